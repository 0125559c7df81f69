//! Fueled driving of the two machines, with per-binding lookup counters:
//! the observable evidence that stored (co)fixpoints are forced once and
//! then served from the store.

use std::collections::HashMap;

use crate::ast::{Closure, Level};
use crate::name::Name;

use super::machine::step_report;
use super::smallstep::{smallstep_report, SsState};
use super::{LookupKind, StuckNonValue};

/// Which machine drives the run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MachineKind {
    /// Weak-head steps on closures; terms reduce in place.
    Big,
    /// Focused steps with explicit levels.
    Small,
}

impl MachineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MachineKind::Big => "big",
            MachineKind::Small => "small",
        }
    }
}

/// Why a run stopped early.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("fuel exhausted after {fuel} machine steps")]
    FuelExhausted { fuel: u64 },
    #[error(transparent)]
    Stuck(#[from] StuckNonValue),
}

/// How often each store binding was looked up, by lookup kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LookupCounts {
    counts: HashMap<(Name, LookupKind), u64>,
}

impl LookupCounts {
    fn record(&mut self, name: Name, kind: LookupKind) {
        *self.counts.entry((name, kind)).or_insert(0) += 1;
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Firings of one kind against one binding.
    pub fn of(&self, name: &Name, kind: LookupKind) -> u64 {
        self.counts.get(&(name.clone(), kind)).copied().unwrap_or(0)
    }

    /// All lookups that touched one binding.
    pub fn binding_total(&self, name: &Name) -> u64 {
        self.counts
            .iter()
            .filter(|((n, _), _)| n == name)
            .map(|(_, c)| *c)
            .sum()
    }

    /// All lookups of one kind, across bindings.
    pub fn kind_total(&self, kind: LookupKind) -> u64 {
        self.counts
            .iter()
            .filter(|((_, k), _)| *k == kind)
            .map(|(_, c)| *c)
            .sum()
    }

    /// Counter rows in a stable order.
    pub fn rows(&self) -> Vec<(Name, LookupKind, u64)> {
        let mut rows: Vec<_> = self
            .counts
            .iter()
            .map(|((n, k), c)| (n.clone(), *k, *c))
            .collect();
        rows.sort_by(|a, b| {
            (&a.0.base, a.0.uid, a.1.as_str()).cmp(&(&b.0.base, b.0.uid, b.1.as_str()))
        });
        rows
    }
}

/// One machine step as recorded in a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    /// 1-based step index.
    pub index: u64,
    /// The focus level the rule fired at; the big machine always fires at
    /// the command level.
    pub level: Level,
    pub rule: &'static str,
    pub lookup: Option<(Name, LookupKind)>,
    /// Store domain after the step.
    pub store_domain: Vec<Name>,
}

/// The result of a completed run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    /// The terminal closure.
    pub closure: Closure,
    /// Rewrite steps taken (for the small machine this includes focusing
    /// moves).
    pub steps: u64,
    pub lookups: LookupCounts,
}

/// Drive a closure to a terminal configuration within `fuel` steps.
pub fn dlpaw_run(
    cl: &Closure,
    machine: MachineKind,
    fuel: u64,
) -> Result<RunReport, RunError> {
    run_impl(cl, machine, fuel, &mut None)
}

/// As [`dlpaw_run`], also returning the step-by-step trace.
pub fn dlpaw_run_traced(
    cl: &Closure,
    machine: MachineKind,
    fuel: u64,
) -> Result<(RunReport, Vec<TraceEntry>), RunError> {
    let mut trace = Some(Vec::new());
    let report = run_impl(cl, machine, fuel, &mut trace)?;
    Ok((report, trace.unwrap_or_default()))
}

fn run_impl(
    cl: &Closure,
    machine: MachineKind,
    fuel: u64,
    trace: &mut Option<Vec<TraceEntry>>,
) -> Result<RunReport, RunError> {
    let mut lookups = LookupCounts::default();
    let mut steps = 0u64;
    match machine {
        MachineKind::Big => {
            let mut cur = cl.clone();
            for _ in 0..fuel {
                match step_report(&cur)? {
                    None => {
                        return Ok(RunReport { closure: cur, steps, lookups });
                    }
                    Some((next, report)) => {
                        steps += 1;
                        if let Some((name, kind)) = &report.lookup {
                            lookups.record(name.clone(), *kind);
                        }
                        if let Some(t) = trace {
                            t.push(TraceEntry {
                                index: steps,
                                level: Level::C,
                                rule: report.rule,
                                lookup: report.lookup.clone(),
                                store_domain: next.store.domain(),
                            });
                        }
                        cur = next;
                    }
                }
            }
            Err(RunError::FuelExhausted { fuel })
        }
        MachineKind::Small => {
            let mut cur = SsState::seed(cl.clone());
            for _ in 0..fuel {
                let level = cur.level;
                match smallstep_report(&cur)? {
                    None => {
                        return Ok(RunReport { closure: cur.closure(), steps, lookups });
                    }
                    Some((next, report)) => {
                        steps += 1;
                        if let Some((name, kind)) = &report.lookup {
                            lookups.record(name.clone(), *kind);
                        }
                        if let Some(t) = trace {
                            t.push(TraceEntry {
                                index: steps,
                                level,
                                rule: report.rule,
                                lookup: report.lookup.clone(),
                                store_domain: next.store.domain(),
                            });
                        }
                        cur = next;
                    }
                }
            }
            Err(RunError::FuelExhausted { fuel })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Command, ContextAst, Forcing, ProofAst, TermAst};
    use crate::dlpaw::erase::erase_closure;
    use crate::name::fresh;
    use crate::subst::alpha_eq_command;

    /// `mk_app(p, q) = μβ.⟨p‖q·β⟩`, the usual application.
    fn mk_app_identity_refl() -> (Command, Name) {
        let beta = fresh("beta");
        let alpha = fresh("alpha");
        let a = fresh("a");
        let lam = ProofAst::LamP(a.clone(), Box::new(ProofAst::Var(a)));
        let app = ProofAst::Mu(
            beta.clone(),
            Box::new(Command::cut(
                lam,
                ContextAst::push_p(ProofAst::Refl, ContextAst::CoVar(beta)),
            )),
        );
        (
            Command::cut(app, ContextAst::CoVar(alpha.clone())),
            alpha,
        )
    }

    #[test]
    fn identity_application_runs_in_six_configurations() {
        // Hand trace, frozen: capture the outer context, β for the NEF
        // argument, bind it, pop the delimiter, fetch the captured context.
        // Six configurations, five rewrites; the terminal closure erases to
        // ⟨refl‖α⟩.
        let (cmd, alpha) = mk_app_identity_refl();
        let seed = Closure::from_command(cmd);
        let (report, trace) = dlpaw_run_traced(&seed, MachineKind::Big, 100).unwrap();
        let rules: Vec<_> = trace.iter().map(|t| t.rule).collect();
        assert_eq!(
            rules,
            vec!["mu-capture", "beta-proof-nef", "mu-tilde-bind", "delim-pop", "lookup-ctx"]
        );
        assert_eq!(report.steps, 5);
        let erased = erase_closure(&report.closure.command, &report.closure.store);
        assert!(alpha_eq_command(
            &erased,
            &Command::cut(ProofAst::Refl, ContextAst::CoVar(alpha))
        ));
        assert_eq!(report.lookups.kind_total(LookupKind::CtxFetch), 1);
    }

    #[test]
    fn both_machines_agree_on_the_identity_application() {
        let (cmd, alpha) = mk_app_identity_refl();
        let seed = Closure::from_command(cmd);
        let big = dlpaw_run(&seed, MachineKind::Big, 100).unwrap();
        let small = dlpaw_run(&seed, MachineKind::Small, 1000).unwrap();
        // The focused machine spends extra steps on descents.
        assert!(small.steps > big.steps);
        let want = Command::cut(ProofAst::Refl, ContextAst::CoVar(alpha));
        for r in [&big, &small] {
            let erased = erase_closure(&r.closure.command, &r.closure.store);
            assert!(alpha_eq_command(&erased, &want));
        }
    }

    #[test]
    fn a_stream_forced_twice_unfolds_once() {
        // ⟨cofix₀[refl]‖μ̃s.⟨s‖μ̃=.⟨s‖μ̃=.⟨refl‖α⟩⟩⟩⟩: the second force is
        // served by the memoized value, so the unfolding lookup fires once.
        let b = fresh("b");
        let x = fresh("x");
        let s = fresh("s");
        let alpha = fresh("alpha");
        let cofix = ProofAst::cofix(TermAst::Zero, b, x, ProofAst::Refl);
        let force = |tail: Command| {
            Command::cut(
                ProofAst::Var(s.clone()),
                ContextAst::Forcing(Forcing::MuEq(Box::new(tail))),
            )
        };
        let last = Command::cut(ProofAst::Refl, ContextAst::CoVar(alpha));
        let body = force(force(last));
        let cmd = Command::cut(cofix, ContextAst::mu_t(s.clone(), body));
        let report = dlpaw_run(&Closure::from_command(cmd), MachineKind::Big, 1000).unwrap();
        assert_eq!(report.lookups.kind_total(LookupKind::CofixUnfold), 1);
        // Both forces resolve through the store: the memoized value is
        // fetched, never recomputed.
        assert!(report.lookups.kind_total(LookupKind::ValueFetch) >= 2);
    }

    #[test]
    fn fuel_zero_is_refused() {
        let (cmd, _) = mk_app_identity_refl();
        let seed = Closure::from_command(cmd);
        for machine in [MachineKind::Big, MachineKind::Small] {
            let got = dlpaw_run(&seed, machine, 0);
            assert_eq!(got, Err(RunError::FuelExhausted { fuel: 0 }));
        }
        let got = dlpaw_run(&seed, MachineKind::Big, 2);
        assert_eq!(got, Err(RunError::FuelExhausted { fuel: 2 }));
    }

    #[test]
    fn stuck_closures_report_their_shape() {
        let cmd = Command::cut(
            ProofAst::Var(fresh("dangling")),
            ContextAst::Forcing(Forcing::MuEq(Box::new(Command::cut(
                ProofAst::Refl,
                ContextAst::CoVar(fresh("alpha")),
            )))),
        );
        let got = dlpaw_run(&Closure::from_command(cmd), MachineKind::Big, 10);
        assert!(matches!(got, Err(RunError::Stuck(_))));
    }

    #[test]
    fn traces_carry_levels_and_store_domains() {
        let (cmd, _) = mk_app_identity_refl();
        let seed = Closure::from_command(cmd);
        let (_, trace) = dlpaw_run_traced(&seed, MachineKind::Small, 1000).unwrap();
        assert!(trace.iter().any(|t| t.level != Level::C));
        assert!(trace.last().unwrap().store_domain.len() >= 2);
        assert_eq!(trace.first().unwrap().index, 1);
    }
}
