//! Small-step reduction with explicit focusing. A configuration carries a
//! level recording where the focus sits: `c → p → e → V → f` on the proof
//! side, `c → t → π` on the term side. Every non-descent step is a single
//! rewrite; term subcomputations are not reduced in place but deferred
//! behind a delimiter (`μtp̂`, for β over a term argument and for fixpoint
//! scrutinees) or a co-delimiter (`μ̃tp̌`, for dependent-pair witnesses), so
//! the proof side of the machine only ever meets term values.
//!
//! The delimited and co-delimited congruences fuse their body's focusing
//! descents into the observable step, so one step of an enclosing command is
//! always one rewrite of its body. Pops have priority over the congruences:
//! a body of shape `⟨p‖tp̂⟩` (resp. `⟨tp̌‖e⟩`) is popped, never entered.

use crate::ast::{
    Binding, Closure, Command, ContextAst, CoTermAst, Forcing, Level, ProofAst, Storable, Store,
    TermAst,
};
use crate::formula::{Formula, TypeExpr};
use crate::name::fresh;
use crate::nef::is_nef;
use crate::subst::{
    free_names_formula, refresh_in_command, refresh_mu_bind, refresh_tail, subst_command,
    subst_formula, subst_proof, subst_suffix, subst_term, AstKind, Replacement,
};

use super::machine::tp_in_ctx;
use super::{command_shape, LookupKind, StepReport, StuckNonValue};

/// A focused configuration: the command, the focus level, and the store.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SsState {
    pub command: Command,
    pub level: Level,
    pub store: Store,
}

impl SsState {
    /// Start a run: focus at the command level.
    pub fn seed(cl: Closure) -> SsState {
        SsState { command: cl.command, level: Level::C, store: cl.store }
    }

    pub fn closure(&self) -> Closure {
        Closure::new(self.command.clone(), self.store.clone())
    }
}

type StepRes = Result<Option<(SsState, StepReport)>, StuckNonValue>;

fn stuck(s: &SsState) -> StuckNonValue {
    StuckNonValue {
        spot: format!("{} at level {}", command_shape(&s.command), s.level),
    }
}

fn step_to(command: Command, level: Level, store: Store, report: StepReport) -> StepRes {
    Ok(Some((SsState { command, level, store }, report)))
}

/// Rules that only move the focus; fused away inside congruences.
pub fn is_descent(rule: &str) -> bool {
    matches!(
        rule,
        "focus-proof"
            | "focus-term"
            | "descend-ctx"
            | "descend-value"
            | "descend-forcing"
            | "descend-coterm"
    )
}

/// One focused step. `Ok(None)` marks a terminal configuration.
pub fn smallstep(s: &SsState) -> Result<Option<SsState>, StuckNonValue> {
    Ok(smallstep_report(s)?.map(|(next, _)| next))
}

/// One focused step together with the rule that fired.
pub fn smallstep_report(s: &SsState) -> StepRes {
    match s.level {
        Level::C => level_command(s),
        Level::P => level_proof(s),
        Level::E => level_context(s),
        Level::V => level_value(s),
        Level::F => level_forcing(s),
        Level::T => level_term(s),
        Level::Pi => level_coterm(s),
    }
}

/// One observable step of a delimited body: run the focusing descents
/// silently and return the first real rewrite. `Ok(None)` means the body is
/// terminal, which the enclosing congruence treats as stuck.
fn fused_inner(
    inner: &Command,
    store: &Store,
) -> Result<Option<(Command, Store, StepReport)>, StuckNonValue> {
    let mut st = SsState {
        command: inner.clone(),
        level: Level::C,
        store: store.clone(),
    };
    loop {
        match smallstep_report(&st)? {
            None => return Ok(None),
            Some((next, report)) => {
                if is_descent(report.rule) {
                    st = next;
                } else {
                    return Ok(Some((next.command, next.store, report)));
                }
            }
        }
    }
}

fn level_command(s: &SsState) -> StepRes {
    let (level, rule) = match &s.command {
        Command::CutP { .. } => (Level::P, "focus-proof"),
        Command::CutT { .. } => (Level::T, "focus-term"),
    };
    step_to(s.command.clone(), level, s.store.clone(), StepReport::plain(rule))
}

fn level_proof(s: &SsState) -> StepRes {
    let (proof, context, asc) = match &s.command {
        Command::CutP { proof, context, ascription } => (proof, context, ascription),
        Command::CutT { .. } => return Err(stuck(s)),
    };
    let store = &s.store;

    // Delimited computation: pop on the ⟨p‖tp̂⟩ shape, else one fused step
    // of the body against the shared store.
    if let ProofAst::MuTp(inner) = &**proof {
        if let Command::CutP { proof: ip, context: ic, ascription: iasc } = &**inner {
            if matches!(&**ic, ContextAst::Tp) {
                let cmd = Command::CutP {
                    proof: ip.clone(),
                    context: context.clone(),
                    ascription: iasc.clone().or_else(|| asc.clone()),
                };
                return step_to(cmd, Level::P, store.clone(), StepReport::plain("delim-pop"));
            }
        }
        return match fused_inner(inner, store)? {
            Some((c2, store2, report)) => {
                let cmd = Command::CutP {
                    proof: Box::new(ProofAst::MuTp(Box::new(c2))),
                    context: context.clone(),
                    ascription: asc.clone(),
                };
                step_to(cmd, Level::P, store2, report)
            }
            None => Err(stuck(s)),
        };
    }

    match &**proof {
        // μα: a delimiter-reaching context is linear and substituted; any
        // other context is captured in the store.
        ProofAst::Mu(alpha, c) => {
            if tp_in_ctx(context) {
                let c2 = subst_command(c, alpha, &Replacement::Ctx((**context).clone()))
                    .map_err(|_| stuck(s))?;
                step_to(c2, Level::C, store.clone(), StepReport::plain("mu-capture-delim"))
            } else {
                let (alpha2, c2) = refresh_in_command(c, alpha, AstKind::Context);
                let mut s2 = store.clone();
                s2.bind_ctx(alpha2, (**context).clone(), asc.clone());
                step_to(c2, Level::C, s2, StepReport::plain("mu-capture"))
            }
        }

        // Focusing a non-value injection.
        ProofAst::Inj(i, p) if !p.is_value() => {
            let a = fresh("a");
            let inner_asc = match asc {
                Some(Formula::Or(l, r)) => {
                    Some(if *i == 1 { (**l).clone() } else { (**r).clone() })
                }
                _ => None,
            };
            let body = Command::CutP {
                proof: Box::new(ProofAst::Inj(*i, Box::new(ProofAst::Var(a.clone())))),
                context: context.clone(),
                ascription: asc.clone(),
            };
            let cmd = Command::CutP {
                proof: p.clone(),
                context: Box::new(ContextAst::mu_t(a, body)),
                ascription: inner_asc,
            };
            step_to(cmd, Level::P, store.clone(), StepReport::plain("cbv-inj"))
        }

        // Focusing a non-value pair, both components at once.
        ProofAst::Pair(p1, p2) if !(p1.is_value() && p2.is_value()) => {
            let a1 = fresh("a");
            let a2 = fresh("a");
            let (asc1, asc2) = match asc {
                Some(Formula::And(l, r)) => (Some((**l).clone()), Some((**r).clone())),
                _ => (None, None),
            };
            let final_cmd = Command::CutP {
                proof: Box::new(ProofAst::Pair(
                    Box::new(ProofAst::Var(a1.clone())),
                    Box::new(ProofAst::Var(a2.clone())),
                )),
                context: context.clone(),
                ascription: asc.clone(),
            };
            let inner = Command::CutP {
                proof: p2.clone(),
                context: Box::new(ContextAst::mu_t(a2, final_cmd)),
                ascription: asc2,
            };
            let cmd = Command::CutP {
                proof: p1.clone(),
                context: Box::new(ContextAst::mu_t(a1, inner)),
                ascription: asc1,
            };
            step_to(cmd, Level::P, store.clone(), StepReport::plain("cbv-pair"))
        }

        // Focusing a non-value dependent pair: the proof is consumed first;
        // the witness then reduces under a co-delimited continuation that
        // hands the proof back once the witness is a value.
        ProofAst::DepPair(t, p) if !(t.is_value() && p.is_value()) => {
            let x = fresh("x");
            let a = fresh("a");
            let (wit_asc, at_x) = match asc {
                Some(Formula::ExistsT(x0, _, b)) => (
                    subst_formula(b, x0, &Replacement::Term((**t).clone())).ok(),
                    subst_formula(b, x0, &Replacement::Term(TermAst::Var(x.clone()))).ok(),
                ),
                _ => (None, None),
            };
            let final_cmd = Command::CutP {
                proof: Box::new(ProofAst::DepPair(
                    Box::new(TermAst::Var(x.clone())),
                    Box::new(ProofAst::Var(a.clone())),
                )),
                context: context.clone(),
                ascription: asc.clone(),
            };
            let recv = Command::CutP {
                proof: Box::new(ProofAst::CoTp),
                context: Box::new(ContextAst::mu_t(a, final_cmd)),
                ascription: at_x,
            };
            let focus = Command::CutT {
                term: t.clone(),
                coterm: Box::new(CoTermAst::mu_x(x, recv)),
                ascription: Some(TypeExpr::Nat),
            };
            let cmd = Command::CutP {
                proof: p.clone(),
                context: Box::new(ContextAst::CoShift(Box::new(focus))),
                ascription: wit_asc,
            };
            step_to(cmd, Level::P, store.clone(), StepReport::plain("cbv-dep-pair"))
        }

        // A fixpoint is deferred: its scrutinee is focused behind a
        // delimiter and the fixpoint itself is stored at the result, so the
        // proof side only ever sees it through a variable.
        ProofAst::Fix { scrut, base, a, x, step, motive } => {
            let y = fresh("y");
            let an = fresh("a");
            let at_y = motive.as_deref().and_then(|m| {
                subst_formula(m, x, &Replacement::Term(TermAst::Var(y.clone()))).ok()
            });
            let thunk = Storable::FixThunk {
                scrut: TermAst::Var(y.clone()),
                base: (**base).clone(),
                a: a.clone(),
                x: x.clone(),
                step: (**step).clone(),
                motive: motive.clone(),
            };
            let body = Command::CutP {
                proof: Box::new(ProofAst::Var(an.clone())),
                context: Box::new(ContextAst::Tp),
                ascription: at_y.clone(),
            };
            let tail = Store::from_bindings(vec![Binding::Proof {
                name: an,
                storable: thunk,
                ascription: at_y,
            }]);
            let focus = Command::CutT {
                term: scrut.clone(),
                coterm: Box::new(CoTermAst::MuX { x: y, body: Box::new(body), tail }),
                ascription: Some(TypeExpr::Nat),
            };
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::MuTp(Box::new(focus))),
                context: context.clone(),
                ascription: asc.clone(),
            };
            step_to(cmd, Level::P, store.clone(), StepReport::plain("fix-delay"))
        }

        ProofAst::Cofix { scrut, b, x, body } => {
            let y = fresh("y");
            let an = fresh("a");
            let at_y = match asc {
                Some(Formula::Nu { index: _, f, x: nx, body: nb }) => Some(Formula::Nu {
                    index: TermAst::Var(y.clone()),
                    f: f.clone(),
                    x: nx.clone(),
                    body: nb.clone(),
                }),
                _ => None,
            };
            let thunk = Storable::CofixThunk {
                scrut: TermAst::Var(y.clone()),
                b: b.clone(),
                x: x.clone(),
                body: (**body).clone(),
            };
            let recv = Command::CutP {
                proof: Box::new(ProofAst::Var(an.clone())),
                context: Box::new(ContextAst::Tp),
                ascription: at_y.clone(),
            };
            let tail = Store::from_bindings(vec![Binding::Proof {
                name: an,
                storable: thunk,
                ascription: at_y,
            }]);
            let focus = Command::CutT {
                term: scrut.clone(),
                coterm: Box::new(CoTermAst::MuX { x: y, body: Box::new(recv), tail }),
                ascription: Some(TypeExpr::Nat),
            };
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::MuTp(Box::new(focus))),
                context: context.clone(),
                ascription: asc.clone(),
            };
            step_to(cmd, Level::P, store.clone(), StepReport::plain("cofix-delay"))
        }

        v if v.is_value() => step_to(
            s.command.clone(),
            Level::E,
            store.clone(),
            StepReport::plain("descend-ctx"),
        ),

        _ => Err(stuck(s)),
    }
}

fn level_context(s: &SsState) -> StepRes {
    let (proof, context, asc) = match &s.command {
        Command::CutP { proof, context, ascription } => (proof, context, ascription),
        Command::CutT { .. } => return Err(stuck(s)),
    };
    let store = &s.store;
    if !proof.is_value() {
        return Err(stuck(s));
    }

    // Co-delimited continuation: pop on the ⟨tp̌‖e⟩ shape, else one fused
    // step of the body against the shared store.
    if let ContextAst::CoShift(inner) = &**context {
        if let Command::CutP { proof: ip, context: ic, ascription: iasc } = &**inner {
            if matches!(&**ip, ProofAst::CoTp) {
                let cmd = Command::CutP {
                    proof: proof.clone(),
                    context: ic.clone(),
                    ascription: iasc.clone().or_else(|| asc.clone()),
                };
                return step_to(cmd, Level::E, store.clone(), StepReport::plain("codelim-pop"));
            }
        }
        return match fused_inner(inner, store)? {
            Some((c2, store2, report)) => {
                let cmd = Command::CutP {
                    proof: proof.clone(),
                    context: Box::new(ContextAst::CoShift(Box::new(c2))),
                    ascription: asc.clone(),
                };
                step_to(cmd, Level::E, store2, report)
            }
            None => Err(stuck(s)),
        };
    }

    match &**context {
        ContextAst::CoVar(alpha) => match store.split_at_name(alpha) {
            // A value against an unbound covariable is terminal.
            None => Ok(None),
            Some((_, Binding::Ctx { name, ctx, ascription }, _)) => {
                let cmd = Command::CutP {
                    proof: proof.clone(),
                    context: Box::new(ctx),
                    ascription: ascription.or_else(|| asc.clone()),
                };
                step_to(
                    cmd,
                    Level::E,
                    store.clone(),
                    StepReport::lookup("lookup-ctx", name, LookupKind::CtxFetch),
                )
            }
            Some((_, Binding::Proof { .. }, _)) => Err(stuck(s)),
        },

        ContextAst::MuT { a, body, tail } => {
            let (a2, tail2, body2) = refresh_mu_bind(a, tail.bindings(), body);
            let mut s2 = store.clone();
            s2.bind_proof(a2, (**proof).clone(), asc.clone()).map_err(|_| stuck(s))?;
            let s2 = s2.concat(&Store::from_bindings(tail2));
            step_to(body2, Level::C, s2, StepReport::plain("mu-tilde-bind"))
        }

        ContextAst::Forcing(_) => step_to(
            s.command.clone(),
            Level::V,
            store.clone(),
            StepReport::plain("descend-value"),
        ),

        ContextAst::Tp | ContextAst::CoShift(_) => Err(stuck(s)),
    }
}

fn level_value(s: &SsState) -> StepRes {
    let (proof, context, asc) = match &s.command {
        Command::CutP { proof, context, ascription } => (proof, context, ascription),
        Command::CutT { .. } => return Err(stuck(s)),
    };
    let store = &s.store;
    if !matches!(&**context, ContextAst::Forcing(_)) {
        return Err(stuck(s));
    }

    match &**proof {
        // Forced variable: fetch the value or unfold the (co)fixpoint one
        // level. Lookups of archived bindings keep the store; unfolds drop
        // the binding, capture the suffix, and rebind the unfolded level
        // under the same name.
        ProofAst::Var(a) => match store.split_at_name(a) {
            None | Some((_, Binding::Ctx { .. }, _)) => Err(stuck(s)),
            Some((prefix, Binding::Proof { name, storable, ascription }, suffix)) => {
                match storable {
                    Storable::Val(v) => {
                        let cmd = Command::CutP {
                            proof: Box::new(v),
                            context: context.clone(),
                            ascription: ascription.or_else(|| asc.clone()),
                        };
                        step_to(
                            cmd,
                            Level::V,
                            store.clone(),
                            StepReport::lookup("lookup-val", name, LookupKind::ValueFetch),
                        )
                    }
                    Storable::FixThunk { scrut, base, a: fa, x, step, motive } => match scrut {
                        TermAst::Zero => {
                            let base_asc = motive.as_deref().and_then(|m| {
                                subst_formula(m, &x, &Replacement::Term(TermAst::Zero)).ok()
                            });
                            let mu = ContextAst::MuT {
                                a: name.clone(),
                                body: Box::new(s.command.clone()),
                                tail: suffix,
                            };
                            let cmd = Command::CutP {
                                proof: Box::new(base),
                                context: Box::new(mu),
                                ascription: base_asc,
                            };
                            step_to(
                                cmd,
                                Level::P,
                                prefix,
                                StepReport::lookup("fix-unfold-zero", name, LookupKind::FixUnfold),
                            )
                        }
                        TermAst::Succ(u) if u.is_value() => {
                            let b2 = fa.refresh();
                            let step1 =
                                subst_proof(&step, &x, &Replacement::Term((*u).clone()))
                                    .map_err(|_| stuck(s))?;
                            let step2 = subst_proof(
                                &step1,
                                &fa,
                                &Replacement::Proof(ProofAst::Var(b2.clone())),
                            )
                            .map_err(|_| stuck(s))?;
                            let pred_asc = motive.as_deref().and_then(|m| {
                                subst_formula(m, &x, &Replacement::Term((*u).clone())).ok()
                            });
                            let mut s2 = prefix;
                            s2.bind_storable(
                                b2,
                                Storable::FixThunk {
                                    scrut: (*u).clone(),
                                    base,
                                    a: fa,
                                    x,
                                    step,
                                    motive,
                                },
                                pred_asc,
                            );
                            let mu = ContextAst::MuT {
                                a: name.clone(),
                                body: Box::new(s.command.clone()),
                                tail: suffix,
                            };
                            let cmd = Command::CutP {
                                proof: Box::new(step2),
                                context: Box::new(mu),
                                ascription: ascription.clone(),
                            };
                            step_to(
                                cmd,
                                Level::P,
                                s2,
                                StepReport::lookup("fix-unfold-succ", name, LookupKind::FixUnfold),
                            )
                        }
                        _ => Err(stuck(s)),
                    },
                    Storable::CofixThunk { scrut, b, x, body } => {
                        if !scrut.is_value() {
                            return Err(stuck(s));
                        }
                        let b2 = b.refresh();
                        let body1 = subst_proof(&body, &x, &Replacement::Term(scrut.clone()))
                            .map_err(|_| stuck(s))?;
                        let body2 = subst_proof(
                            &body1,
                            &b,
                            &Replacement::Proof(ProofAst::Var(b2.clone())),
                        )
                        .map_err(|_| stuck(s))?;
                        let y = fresh("y");
                        let lam = ProofAst::LamT(
                            y.clone(),
                            Box::new(ProofAst::Cofix {
                                scrut: Box::new(TermAst::Var(y)),
                                b: b.clone(),
                                x: x.clone(),
                                body: Box::new(body.clone()),
                            }),
                        );
                        let lam_asc = match &ascription {
                            Some(Formula::Nu { index: _, f, x: nx, body: nb }) => {
                                let yn = fresh("y");
                                Some(Formula::forall(
                                    yn.clone(),
                                    TypeExpr::Nat,
                                    Formula::Nu {
                                        index: TermAst::Var(yn),
                                        f: f.clone(),
                                        x: nx.clone(),
                                        body: nb.clone(),
                                    },
                                ))
                            }
                            _ => None,
                        };
                        let cut_asc = match &ascription {
                            Some(Formula::Nu { index, f, x: nx, body: nb }) => {
                                Some(crate::equational::nu_unfold(index, f, nx, nb))
                            }
                            _ => None,
                        };
                        let mut s2 = prefix;
                        s2.bind_proof(b2, lam, lam_asc).map_err(|_| stuck(s))?;
                        let mu = ContextAst::MuT {
                            a: name.clone(),
                            body: Box::new(s.command.clone()),
                            tail: suffix,
                        };
                        let cmd = Command::CutP {
                            proof: Box::new(body2),
                            context: Box::new(mu),
                            ascription: cut_asc,
                        };
                        step_to(
                            cmd,
                            Level::P,
                            s2,
                            StepReport::lookup("cofix-unfold", name, LookupKind::CofixUnfold),
                        )
                    }
                }
            }
        },

        v if v.is_value() => step_to(
            s.command.clone(),
            Level::F,
            store.clone(),
            StepReport::plain("descend-forcing"),
        ),

        _ => Err(stuck(s)),
    }
}

fn level_forcing(s: &SsState) -> StepRes {
    let (proof, context, asc) = match &s.command {
        Command::CutP { proof, context, ascription } => (proof, context, ascription),
        Command::CutT { .. } => return Err(stuck(s)),
    };
    let store = &s.store;
    let forcing = match &**context {
        ContextAst::Forcing(f) => f,
        _ => return Err(stuck(s)),
    };

    match (&**proof, forcing) {
        // β over a term argument: the argument, value or not, is focused
        // behind a delimiter; substitution happens at the plug.
        (ProofAst::LamT(x, body), Forcing::PushT(t, e2)) => {
            let (cod_renamed, cod_inst) = match asc {
                Some(Formula::ForallT(y, _, b)) => {
                    let renamed = if y == x {
                        Some((**b).clone())
                    } else if free_names_formula(b).contains(x) {
                        None
                    } else {
                        subst_formula(b, y, &Replacement::Term(TermAst::Var(x.clone()))).ok()
                    };
                    let inst = subst_formula(b, y, &Replacement::Term((**t).clone())).ok();
                    (renamed, inst)
                }
                _ => (None, None),
            };
            let inner = Command::CutP {
                proof: body.clone(),
                context: Box::new(ContextAst::Tp),
                ascription: cod_renamed,
            };
            let focus = Command::CutT {
                term: t.clone(),
                coterm: Box::new(CoTermAst::mu_x(x.clone(), inner)),
                ascription: Some(TypeExpr::Nat),
            };
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::MuTp(Box::new(focus))),
                context: e2.clone(),
                ascription: cod_inst,
            };
            step_to(cmd, Level::P, store.clone(), StepReport::plain("beta-term"))
        }

        // β over a proof argument, delimited when the argument is NEF.
        (ProofAst::LamP(a, body), Forcing::PushP(q, e2)) => {
            let parts = match asc {
                Some(Formula::DepProd(a0, dom, cod)) => Some((a0, dom, cod)),
                _ => None,
            };
            let dom_asc = parts.map(|(_, dom, _)| (**dom).clone());
            let cod_renamed = parts.and_then(|(a0, _, cod)| {
                if a0 == a {
                    Some((**cod).clone())
                } else if free_names_formula(cod).contains(a) {
                    None
                } else {
                    subst_formula(cod, a0, &Replacement::Proof(ProofAst::Var(a.clone()))).ok()
                }
            });
            if is_nef(q) {
                let cod_inst = parts.and_then(|(a0, _, cod)| {
                    subst_formula(cod, a0, &Replacement::Proof((**q).clone())).ok()
                });
                let inner = Command::CutP {
                    proof: body.clone(),
                    context: Box::new(ContextAst::Tp),
                    ascription: cod_renamed,
                };
                let mid = Command::CutP {
                    proof: q.clone(),
                    context: Box::new(ContextAst::mu_t(a.clone(), inner)),
                    ascription: dom_asc,
                };
                let cmd = Command::CutP {
                    proof: Box::new(ProofAst::MuTp(Box::new(mid))),
                    context: e2.clone(),
                    ascription: cod_inst,
                };
                step_to(cmd, Level::P, store.clone(), StepReport::plain("beta-proof-nef"))
            } else {
                let inner = Command::CutP {
                    proof: body.clone(),
                    context: e2.clone(),
                    ascription: cod_renamed,
                };
                let cmd = Command::CutP {
                    proof: q.clone(),
                    context: Box::new(ContextAst::mu_t(a.clone(), inner)),
                    ascription: dom_asc,
                };
                step_to(cmd, Level::P, store.clone(), StepReport::plain("beta-proof"))
            }
        }

        // Eliminations: binders go to the store, bodies resume at the
        // command level.
        (ProofAst::Inj(i, v), Forcing::CaseSum(a1, c1, a2, c2)) if *i == 1 || *i == 2 => {
            let (a_i, c_i) = if *i == 1 { (a1, c1) } else { (a2, c2) };
            let branch_asc = match asc {
                Some(Formula::Or(l, r)) => {
                    Some(if *i == 1 { (**l).clone() } else { (**r).clone() })
                }
                _ => None,
            };
            let (a_i2, c_i2) = refresh_in_command(c_i, a_i, AstKind::Proof);
            let mut s2 = store.clone();
            s2.bind_proof(a_i2, (**v).clone(), branch_asc).map_err(|_| stuck(s))?;
            step_to(c_i2, Level::C, s2, StepReport::plain("case-inj"))
        }

        (ProofAst::Pair(v1, v2), Forcing::SplitPair(a1, a2, c)) => {
            let (asc1, asc2) = match asc {
                Some(Formula::And(l, r)) => (Some((**l).clone()), Some((**r).clone())),
                _ => (None, None),
            };
            let (a1n, a2n, c3) = if a1 == a2 {
                let (a2n, c2) = refresh_in_command(c, a2, AstKind::Proof);
                (a1.refresh(), a2n, c2)
            } else {
                let (a1n, c2) = refresh_in_command(c, a1, AstKind::Proof);
                let (a2n, c3) = refresh_in_command(&c2, a2, AstKind::Proof);
                (a1n, a2n, c3)
            };
            let mut s2 = store.clone();
            s2.bind_proof(a1n, (**v1).clone(), asc1).map_err(|_| stuck(s))?;
            s2.bind_proof(a2n, (**v2).clone(), asc2).map_err(|_| stuck(s))?;
            step_to(c3, Level::C, s2, StepReport::plain("split-pair"))
        }

        (ProofAst::DepPair(t, v), Forcing::SplitDep(x, a, c)) => {
            let c_t = subst_command(c, x, &Replacement::Term((**t).clone()))
                .map_err(|_| stuck(s))?;
            let (an, c2) = refresh_in_command(&c_t, a, AstKind::Proof);
            let bind_asc = match asc {
                Some(Formula::ExistsT(x0, _, b)) => {
                    subst_formula(b, x0, &Replacement::Term((**t).clone())).ok()
                }
                _ => None,
            };
            let mut s2 = store.clone();
            s2.bind_proof(an, (**v).clone(), bind_asc).map_err(|_| stuck(s))?;
            step_to(c2, Level::C, s2, StepReport::plain("split-dep"))
        }

        (ProofAst::Refl, Forcing::MuEq(c)) => {
            step_to((**c).clone(), Level::C, store.clone(), StepReport::plain("refl-eq"))
        }

        // A value delivered to the empty forcing context is terminal.
        (v, Forcing::Empty) if v.is_value() => Ok(None),

        _ => Err(stuck(s)),
    }
}

fn level_term(s: &SsState) -> StepRes {
    let (term, coterm, tasc) = match &s.command {
        Command::CutT { term, coterm, ascription } => (term, coterm, ascription),
        Command::CutP { .. } => return Err(stuck(s)),
    };
    let store = &s.store;

    match &**term {
        TermAst::App(t, u) => {
            let k2 = CoTermAst::PushTerm(u.clone(), coterm.clone());
            let cmd = Command::CutT {
                term: t.clone(),
                coterm: Box::new(k2),
                ascription: None,
            };
            step_to(cmd, Level::T, store.clone(), StepReport::plain("term-app-push"))
        }

        TermAst::Succ(u) if !term.is_value() => {
            let x = fresh("x");
            let body = Command::CutT {
                term: Box::new(TermAst::Succ(Box::new(TermAst::Var(x.clone())))),
                coterm: coterm.clone(),
                ascription: tasc.clone(),
            };
            let cmd = Command::CutT {
                term: u.clone(),
                coterm: Box::new(CoTermAst::mu_x(x, body)),
                ascription: Some(TypeExpr::Nat),
            };
            step_to(cmd, Level::T, store.clone(), StepReport::plain("term-succ-focus"))
        }

        TermAst::Rec { scrut, x, y, base, step } => {
            if !scrut.is_value() {
                let z = fresh("z");
                let body = Command::CutT {
                    term: Box::new(TermAst::Rec {
                        scrut: Box::new(TermAst::Var(z.clone())),
                        x: x.clone(),
                        y: y.clone(),
                        base: base.clone(),
                        step: step.clone(),
                    }),
                    coterm: coterm.clone(),
                    ascription: tasc.clone(),
                };
                let cmd = Command::CutT {
                    term: scrut.clone(),
                    coterm: Box::new(CoTermAst::mu_x(z, body)),
                    ascription: Some(TypeExpr::Nat),
                };
                return step_to(cmd, Level::T, store.clone(), StepReport::plain("term-rec-focus"));
            }
            match &**scrut {
                TermAst::Zero => step_to(
                    Command::CutT {
                        term: base.clone(),
                        coterm: coterm.clone(),
                        ascription: tasc.clone(),
                    },
                    Level::T,
                    store.clone(),
                    StepReport::plain("rec-zero"),
                ),
                TermAst::Succ(u) => {
                    let rec_u = TermAst::Rec {
                        scrut: u.clone(),
                        x: x.clone(),
                        y: y.clone(),
                        base: base.clone(),
                        step: step.clone(),
                    };
                    let step1 = subst_term(step, x, &Replacement::Term((**u).clone()))
                        .map_err(|_| stuck(s))?;
                    let step2 = subst_term(&step1, y, &Replacement::Term(rec_u))
                        .map_err(|_| stuck(s))?;
                    step_to(
                        Command::CutT {
                            term: Box::new(step2),
                            coterm: coterm.clone(),
                            ascription: tasc.clone(),
                        },
                        Level::T,
                        store.clone(),
                        StepReport::plain("rec-succ"),
                    )
                }
                _ => Err(stuck(s)),
            }
        }

        // Witness extraction runs the proof against a context that keeps
        // only the witness.
        TermAst::Wit(p) => {
            let x = fresh("x");
            let a = fresh("a");
            let body = Command::CutT {
                term: Box::new(TermAst::Var(x.clone())),
                coterm: coterm.clone(),
                ascription: tasc.clone(),
            };
            let cmd = Command::CutP {
                proof: p.clone(),
                context: Box::new(ContextAst::Forcing(Forcing::SplitDep(x, a, Box::new(body)))),
                ascription: None,
            };
            step_to(cmd, Level::P, store.clone(), StepReport::plain("term-wit"))
        }

        v if v.is_value() => step_to(
            s.command.clone(),
            Level::Pi,
            store.clone(),
            StepReport::plain("descend-coterm"),
        ),

        _ => Err(stuck(s)),
    }
}

fn level_coterm(s: &SsState) -> StepRes {
    let (term, coterm, _) = match &s.command {
        Command::CutT { term, coterm, ascription } => (term, coterm, ascription),
        Command::CutP { .. } => return Err(stuck(s)),
    };
    let store = &s.store;
    if !term.is_value() {
        return Err(stuck(s));
    }

    match &**coterm {
        CoTermAst::PushTerm(u, rest) => match &**term {
            TermAst::Lam(x, body) => {
                let inner = Command::CutT {
                    term: body.clone(),
                    coterm: rest.clone(),
                    ascription: None,
                };
                let cmd = Command::CutT {
                    term: u.clone(),
                    coterm: Box::new(CoTermAst::mu_x(x.clone(), inner)),
                    ascription: Some(TypeExpr::Nat),
                };
                step_to(cmd, Level::T, store.clone(), StepReport::plain("term-beta"))
            }
            _ => Err(stuck(s)),
        },

        // Plug: substitute the value through the body and the captured
        // tail, then append the tail to the ambient store under fresh names.
        CoTermAst::MuX { x, body, tail } => {
            let (tail2, body2) = subst_suffix(
                tail.bindings(),
                body,
                x,
                &Replacement::Term((**term).clone()),
            )
            .map_err(|_| stuck(s))?;
            let (tail3, body3) = refresh_tail(&tail2, &body2);
            let store2 = store.concat(&Store::from_bindings(tail3));
            let level = match &body3 {
                Command::CutT { .. } => Level::T,
                Command::CutP { .. } => Level::P,
            };
            step_to(body3, level, store2, StepReport::plain("term-plug"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;

    fn run(cl: Closure, fuel: u64) -> (SsState, Vec<StepReport>) {
        let mut cur = SsState::seed(cl);
        let mut reports = Vec::new();
        for _ in 0..fuel {
            match smallstep_report(&cur).expect("not stuck") {
                Some((next, report)) => {
                    assert!(next.store.names_unique(), "store names stay unique");
                    reports.push(report);
                    cur = next;
                }
                None => return (cur, reports),
            }
        }
        panic!("fuel exhausted after {} steps", reports.len());
    }

    fn rewrites(reports: &[StepReport]) -> Vec<&'static str> {
        reports.iter().map(|r| r.rule).filter(|r| !is_descent(r)).collect()
    }

    fn big_run(cl: Closure, fuel: u64) -> Closure {
        let mut cur = cl;
        for _ in 0..fuel {
            match super::super::machine::step_report(&cur).expect("not stuck") {
                Some((next, _)) => cur = next,
                None => return cur,
            }
        }
        panic!("big-step fuel exhausted");
    }

    fn covar(base: &str) -> (Name, ContextAst) {
        let n = fresh(base);
        (n.clone(), ContextAst::CoVar(n))
    }

    fn empty_forcing() -> ContextAst {
        ContextAst::Forcing(Forcing::Empty)
    }

    #[test]
    fn focus_descends_through_the_levels() {
        let cmd = Command::cut(ProofAst::Refl, empty_forcing());
        let (fin, reports) = run(Closure::from_command(cmd.clone()), 10);
        let rules: Vec<_> = reports.iter().map(|r| r.rule).collect();
        assert_eq!(
            rules,
            vec!["focus-proof", "descend-ctx", "descend-value", "descend-forcing"]
        );
        assert!(rules.iter().all(|r| is_descent(r)));
        assert_eq!(fin.level, Level::F);
        assert_eq!(fin.command, cmd);
    }

    #[test]
    fn beta_term_detours_behind_the_delimiter() {
        // ⟨λx.refl‖2·α⟩ focuses the argument under μtp̂, plugs, and pops.
        let x = fresh("x");
        let (alpha, e) = covar("alpha");
        let lam = ProofAst::LamT(x, Box::new(ProofAst::Refl));
        let cmd = Command::cut(lam, ContextAst::push_t(TermAst::numeral(2), e));
        let (fin, reports) = run(Closure::from_command(cmd.clone()), 30);
        assert_eq!(rewrites(&reports), vec!["beta-term", "term-plug", "delim-pop"]);
        let big = big_run(Closure::from_command(cmd), 30);
        assert_eq!(fin.command, big.command);
        match &fin.command {
            Command::CutP { proof, context, .. } => {
                assert_eq!(**proof, ProofAst::Refl);
                assert_eq!(**context, ContextAst::CoVar(alpha));
            }
            _ => panic!("expected a proof cut"),
        }
    }

    #[test]
    fn nef_beta_runs_delimited_and_pops() {
        let a = fresh("a");
        let (_, e) = covar("alpha");
        let lam = ProofAst::LamP(a.clone(), Box::new(ProofAst::Var(a)));
        let cmd = Command::cut(lam, ContextAst::push_p(ProofAst::Refl, e));
        let (fin, reports) = run(Closure::from_command(cmd), 30);
        assert_eq!(
            rewrites(&reports),
            vec!["beta-proof-nef", "mu-tilde-bind", "delim-pop"]
        );
        match &fin.command {
            Command::CutP { proof, .. } => match &**proof {
                ProofAst::Var(n) => {
                    assert_eq!(fin.store.lookup_proof(n), Some(&Storable::Val(ProofAst::Refl)));
                }
                p => panic!("expected a variable head, got {p:?}"),
            },
            _ => panic!("expected a proof cut"),
        }
    }

    #[test]
    fn pop_has_priority_over_the_delimited_congruence() {
        // The body ⟨μα.c‖tp̂⟩ also matches the μα rule under the congruence;
        // the pop must win so the capture happens against the real context.
        let (alpha, e) = covar("alpha");
        let inner = Command::cut(
            ProofAst::Mu(alpha.clone(), Box::new(Command::cut(ProofAst::Refl, e))),
            ContextAst::Tp,
        );
        let cmd = Command::cut(ProofAst::MuTp(Box::new(inner)), empty_forcing());
        let (fin, reports) = run(Closure::from_command(cmd), 30);
        assert_eq!(rewrites(&reports), vec!["delim-pop", "mu-capture", "lookup-ctx"]);
        assert_eq!(fin.command, Command::cut(ProofAst::Refl, empty_forcing()));
    }

    #[test]
    fn delimiter_reaching_mu_substitutes_linearly() {
        // Inside the delimiter, a μα whose context reaches tp̂ (through a μ̃
        // here; bare tp̂ would be popped first) is spliced in, not stored.
        let a = fresh("a");
        let b = fresh("b");
        let alpha = fresh("alpha");
        let reach = ContextAst::mu_t(
            b.clone(),
            Command::cut(ProofAst::Var(b), ContextAst::Tp),
        );
        let capture = Command::cut(
            ProofAst::Mu(
                alpha.clone(),
                Box::new(Command::cut(ProofAst::Var(a.clone()), ContextAst::CoVar(alpha))),
            ),
            reach,
        );
        let inner = Command::cut(ProofAst::Refl, ContextAst::mu_t(a, capture));
        let cmd = Command::cut(ProofAst::MuTp(Box::new(inner)), empty_forcing());
        let (fin, reports) = run(Closure::from_command(cmd), 30);
        assert_eq!(
            rewrites(&reports),
            vec![
                "mu-tilde-bind",
                "mu-capture-delim",
                "mu-tilde-bind",
                "delim-pop",
                "lookup-val",
                "lookup-val",
            ]
        );
        assert_eq!(fin.command, Command::cut(ProofAst::Refl, empty_forcing()));
    }

    #[test]
    fn fix_delays_plugs_pops_and_unfolds_per_level() {
        // fix at 2 detours its scrutinee behind the delimiter, stores the
        // thunk via the plugged tail, then unfolds once per numeral level.
        let fa = fresh("a");
        let fx = fresh("x");
        let fix = ProofAst::Fix {
            scrut: Box::new(TermAst::numeral(2)),
            base: Box::new(ProofAst::Refl),
            a: fa.clone(),
            x: fx,
            step: Box::new(ProofAst::Var(fa)),
            motive: None,
        };
        let cmd = Command::cut(fix, empty_forcing());
        let (fin, reports) = run(Closure::from_command(cmd.clone()), 100);
        assert_eq!(
            rewrites(&reports),
            vec![
                "fix-delay",
                "term-plug",
                "delim-pop",
                "fix-unfold-succ",
                "mu-tilde-bind",
                "lookup-val",
                "fix-unfold-succ",
                "mu-tilde-bind",
                "lookup-val",
                "fix-unfold-zero",
                "mu-tilde-bind",
                "lookup-val",
            ]
        );
        let unfolds = reports
            .iter()
            .filter(|r| matches!(&r.lookup, Some((_, LookupKind::FixUnfold))))
            .count();
        assert_eq!(unfolds, 3);
        let big = big_run(Closure::from_command(cmd), 100);
        assert_eq!(fin.command, big.command);
        assert_eq!(fin.command, Command::cut(ProofAst::Refl, empty_forcing()));
    }

    #[test]
    fn dep_pair_witness_reduces_under_the_codelimiter() {
        // A value proof paired with an unevaluated witness: the proof waits
        // on μ̃tp̌ while the term side runs, then the pop reassembles.
        let x = fresh("x");
        let (_, e) = covar("alpha");
        let wit = TermAst::App(
            Box::new(TermAst::Lam(x.clone(), Box::new(TermAst::Var(x)))),
            Box::new(TermAst::Zero),
        );
        let pair = ProofAst::DepPair(Box::new(wit), Box::new(ProofAst::Refl));
        let cmd = Command::cut(pair, e);
        let (fin, reports) = run(Closure::from_command(cmd), 60);
        assert_eq!(
            rewrites(&reports),
            vec![
                "cbv-dep-pair",
                "term-app-push",
                "term-beta",
                "term-plug",
                "term-plug",
                "codelim-pop",
                "mu-tilde-bind",
            ]
        );
        match &fin.command {
            Command::CutP { proof, .. } => match &**proof {
                ProofAst::DepPair(t, p) => {
                    assert_eq!(**t, TermAst::Zero);
                    match &**p {
                        ProofAst::Var(n) => assert_eq!(
                            fin.store.lookup_proof(n),
                            Some(&Storable::Val(ProofAst::Refl))
                        ),
                        p => panic!("expected a stored component, got {p:?}"),
                    }
                }
                p => panic!("expected a dependent pair, got {p:?}"),
            },
            _ => panic!("expected a proof cut"),
        }
    }

    #[test]
    fn rec_and_succ_focus_on_the_term_side() {
        // rec at S(0) with step S(y) computes S(0) again, one focus at a
        // time, and plugs the result into the final coterm.
        let rx = fresh("x");
        let ry = fresh("y");
        let z = fresh("z");
        let (alpha, e) = covar("alpha");
        let rec = TermAst::Rec {
            scrut: Box::new(TermAst::numeral(1)),
            x: rx,
            y: ry.clone(),
            base: Box::new(TermAst::Zero),
            step: Box::new(TermAst::Succ(Box::new(TermAst::Var(ry)))),
        };
        let body = Command::cut(
            ProofAst::DepPair(Box::new(TermAst::Var(z.clone())), Box::new(ProofAst::Refl)),
            e,
        );
        let cmd = Command::cut_term(rec, CoTermAst::mu_x(z, body));
        let (fin, reports) = run(Closure::from_command(cmd), 60);
        assert_eq!(
            rewrites(&reports),
            vec!["rec-succ", "term-succ-focus", "rec-zero", "term-plug", "term-plug"]
        );
        assert_eq!(
            fin.command,
            Command::cut(
                ProofAst::DepPair(Box::new(TermAst::numeral(1)), Box::new(ProofAst::Refl)),
                ContextAst::CoVar(alpha),
            )
        );
    }

    #[test]
    fn plug_refreshes_the_captured_tail_against_the_ambient_store() {
        // The coterm's captured tail binds the same name as the ambient
        // store; the plug must rename it so the body sees the tail's value.
        let n = fresh("n");
        let x = fresh("x");
        let decoy = ProofAst::LamP(x.clone(), Box::new(ProofAst::Var(x.clone())));
        let mut ambient = Store::empty();
        ambient.bind_proof(n.clone(), decoy, None).unwrap();
        let body = Command::cut(ProofAst::Var(n.clone()), empty_forcing());
        let tail = Store::from_bindings(vec![Binding::Proof {
            name: n.clone(),
            storable: Storable::Val(ProofAst::Refl),
            ascription: None,
        }]);
        let coterm = CoTermAst::MuX { x: fresh("y"), body: Box::new(body), tail };
        let cmd = Command::cut_term(TermAst::Zero, coterm);
        let (fin, reports) = run(Closure::new(cmd, ambient), 30);
        assert_eq!(rewrites(&reports), vec!["term-plug", "lookup-val"]);
        assert_eq!(fin.command, Command::cut(ProofAst::Refl, empty_forcing()));
        assert_eq!(fin.store.bindings().len(), 2);
    }

    #[test]
    fn replay_of_the_same_seed_is_deterministic() {
        let fa = fresh("a");
        let fx = fresh("x");
        let fix = ProofAst::Fix {
            scrut: Box::new(TermAst::numeral(3)),
            base: Box::new(ProofAst::Refl),
            a: fa.clone(),
            x: fx,
            step: Box::new(ProofAst::Var(fa)),
            motive: None,
        };
        let cmd = Command::cut(fix, empty_forcing());
        let (fin1, reports1) = run(Closure::from_command(cmd.clone()), 200);
        let (fin2, reports2) = run(Closure::from_command(cmd), 200);
        let rules1: Vec<_> = reports1.iter().map(|r| r.rule).collect();
        let rules2: Vec<_> = reports2.iter().map(|r| r.rule).collect();
        assert_eq!(rules1, rules2);
        assert_eq!(fin1.command, fin2.command);
        assert_eq!(fin1.store.bindings().len(), fin2.store.bindings().len());
    }
}
