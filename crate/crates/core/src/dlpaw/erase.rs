//! Erasure of machine configurations to store-free commands, and the
//! embedding check between the two machines built on it.
//!
//! Two configurations that differ only in administrative structure (store
//! layout, machine-generated binding names, focusing detours) should erase
//! to alpha-equal commands. Erasure is `readback ∘ denote`:
//!
//! - `denote` substitutes the store back into the command, last binding
//!   first, so a binding's occurrences inside later bindings' content are
//!   reached after that content has itself been spliced in. Afterwards the
//!   only free names left are the seed program's own.
//! - `readback` rewinds the small-step machine's term detours: an argument
//!   focused behind `μtp̂` folds back into the β-redex it came from, a
//!   delayed (co)fixpoint scrutinee folds back into the (co)fixpoint, a
//!   dependent-pair witness running under `μ̃tp̌` folds back into the plain
//!   receiving context, and pushed argument stacks fold back into
//!   applications. Captured store tails also drop pure renaming bindings.
//!
//! The embedding check runs both machines on one seed, erases every
//! configuration, collapses consecutive duplicates, and verifies the
//! big-step trace embeds in order into the small-step trace: the small
//! machine passes through every state the big machine does, plus
//! administrative ones in between.

use crate::ast::{
    Binding, Closure, Command, ContextAst, CoTermAst, Forcing, ProofAst, Storable, Store, TermAst,
};
use crate::formula::Formula;
use crate::subst::{alpha_eq_command, subst_command, subst_suffix, Replacement};

use super::machine;
use super::smallstep::{self, SsState};
use super::StuckNonValue;

/// Substitute the store back into the command, last binding first.
pub fn denote(command: &Command, store: &Store) -> Command {
    let mut cmd = command.clone();
    for b in store.bindings().iter().rev() {
        let repl = match b {
            Binding::Proof { storable, .. } => Replacement::Proof(storable.as_proof()),
            Binding::Ctx { ctx, .. } => Replacement::Ctx(ctx.clone()),
        };
        // A kind mismatch cannot happen for a store the machines built; if
        // a hand-made closure shadows kinds, keep the command unchanged.
        cmd = subst_command(&cmd, b.name(), &repl).unwrap_or(cmd);
    }
    cmd
}

/// Erase a configuration to a store-free command.
pub fn erase_closure(command: &Command, store: &Store) -> Command {
    readback_command(&denote(command, store))
}

/// Result of folding a `⟨t‖π⟩` spine found under a delimiter.
enum Folded {
    /// The spine was a β or (co)fixpoint detour; the rebuilt command
    /// consumes the outer context.
    Outer(Command),
    /// The spine collapsed to a proof command; the caller keeps its own
    /// wrapper around it.
    Inner(Command),
    /// Not a recognizable detour; keep the original.
    Opaque,
}

/// Rewind a focused term spine. `outer` is the context of the enclosing
/// delimited cut when there is one to rebuild against.
fn fold_spine(
    term: TermAst,
    coterm: &CoTermAst,
    outer: Option<(&ContextAst, &Option<Formula>)>,
) -> Folded {
    match coterm {
        // Un-focus a pushed argument: ⟨t‖u·π⟩ came from ⟨t u‖π⟩.
        CoTermAst::PushTerm(u, rest) => {
            fold_spine(TermAst::App(Box::new(term), u.clone()), rest, outer)
        }
        CoTermAst::MuX { x, body, tail } => {
            if tail.bindings().is_empty() {
                // Un-β: ⟨t̂‖μ̃x.⟨p‖tp̂⟩⟩ under a delimiter against e came
                // from ⟨λx.p‖t̂·e⟩.
                if let Command::CutP { proof, context, .. } = &**body {
                    if matches!(&**context, ContextAst::Tp) {
                        if let Some((e, asc)) = outer {
                            return Folded::Outer(Command::CutP {
                                proof: Box::new(ProofAst::LamT(x.clone(), proof.clone())),
                                context: Box::new(ContextAst::Forcing(Forcing::PushT(
                                    Box::new(term),
                                    Box::new(e.clone()),
                                ))),
                                ascription: asc.clone(),
                            });
                        }
                        return Folded::Opaque;
                    }
                }
                // Plug ahead of time: fold the receiving command and keep
                // walking if it is still a term cut.
                return match subst_command(body, x, &Replacement::Term(term)) {
                    Ok(Command::CutT { term: t2, coterm: k2, .. }) => fold_spine(*t2, &k2, outer),
                    Ok(done @ Command::CutP { .. }) => Folded::Inner(done),
                    Err(_) => Folded::Opaque,
                };
            }

            // Un-delay: ⟨t̂‖μ̃y.⟨a‖tp̂⟩[a := thunk at y]⟩ under a delimiter
            // against e came from ⟨fix/cofix at t̂‖e⟩.
            if let [Binding::Proof { name, storable, .. }] = tail.bindings() {
                if let Command::CutP { proof, context, .. } = &**body {
                    if matches!(&**context, ContextAst::Tp)
                        && matches!(&**proof, ProofAst::Var(n) if n == name)
                    {
                        if let Some((e, asc)) = outer {
                            let head = match storable {
                                Storable::FixThunk { scrut, base, a, x: fx, step, motive }
                                    if *scrut == TermAst::Var(x.clone()) =>
                                {
                                    Some(ProofAst::Fix {
                                        scrut: Box::new(term),
                                        base: Box::new(base.clone()),
                                        a: a.clone(),
                                        x: fx.clone(),
                                        step: Box::new(step.clone()),
                                        motive: motive.clone(),
                                    })
                                }
                                Storable::CofixThunk { scrut, b, x: cx, body }
                                    if *scrut == TermAst::Var(x.clone()) =>
                                {
                                    Some(ProofAst::Cofix {
                                        scrut: Box::new(term),
                                        b: b.clone(),
                                        x: cx.clone(),
                                        body: Box::new(body.clone()),
                                    })
                                }
                                _ => None,
                            };
                            if let Some(head) = head {
                                return Folded::Outer(Command::CutP {
                                    proof: Box::new(head),
                                    context: Box::new(e.clone()),
                                    ascription: asc.clone(),
                                });
                            }
                        }
                    }
                }
            }
            Folded::Opaque
        }
    }
}

/// Drop captured-tail bindings that merely rename another variable,
/// substituting the target through the rest of the tail and the body.
fn inline_aliases(tail: Vec<Binding>, body: Command) -> (Vec<Binding>, Command) {
    let mut kept = Vec::new();
    let mut rest = tail;
    let mut body = body;
    while !rest.is_empty() {
        let b = rest.remove(0);
        if let Binding::Proof { name, storable: Storable::Val(ProofAst::Var(m)), .. } = &b {
            let repl = Replacement::Proof(ProofAst::Var(m.clone()));
            if let Ok((r2, b2)) = subst_suffix(&rest, &body, name, &repl) {
                rest = r2;
                body = b2;
                continue;
            }
        }
        kept.push(b);
    }
    (kept, body)
}

pub fn readback_command(cmd: &Command) -> Command {
    match cmd {
        Command::CutP { proof, context, ascription } => {
            let p2 = readback_proof(proof);
            let e2 = readback_context(context);

            // A delimited term spine folds back into the proof-level redex
            // it was carved out of.
            if let ProofAst::MuTp(inner) = &p2 {
                if let Command::CutT { term, coterm, .. } = &**inner {
                    match fold_spine((**term).clone(), coterm, Some((&e2, ascription))) {
                        Folded::Outer(done) => return done,
                        Folded::Inner(done) => {
                            return Command::CutP {
                                proof: Box::new(ProofAst::MuTp(Box::new(done))),
                                context: Box::new(e2),
                                ascription: ascription.clone(),
                            }
                        }
                        Folded::Opaque => {}
                    }
                }
            }

            // A co-delimited witness spine folds back to its receiving
            // context once the witness has been delivered to tp̌.
            if let ContextAst::CoShift(inner) = &e2 {
                if let Command::CutT { term, coterm, .. } = &**inner {
                    if let Folded::Inner(done) = fold_spine((**term).clone(), coterm, None) {
                        if let Command::CutP { proof: dp, context: de, .. } = &done {
                            if matches!(&**dp, ProofAst::CoTp) {
                                return Command::CutP {
                                    proof: Box::new(p2),
                                    context: de.clone(),
                                    ascription: ascription.clone(),
                                };
                            }
                        }
                        return Command::CutP {
                            proof: Box::new(p2),
                            context: Box::new(ContextAst::CoShift(Box::new(done))),
                            ascription: ascription.clone(),
                        };
                    }
                }
            }

            Command::CutP {
                proof: Box::new(p2),
                context: Box::new(e2),
                ascription: ascription.clone(),
            }
        }
        Command::CutT { term, coterm, ascription } => Command::CutT {
            term: Box::new(readback_term(term)),
            coterm: Box::new(readback_coterm(coterm)),
            ascription: ascription.clone(),
        },
    }
}

fn readback_term(t: &TermAst) -> TermAst {
    match t {
        TermAst::Var(_) | TermAst::Zero => t.clone(),
        TermAst::Succ(u) => TermAst::Succ(Box::new(readback_term(u))),
        TermAst::Rec { scrut, x, y, base, step } => TermAst::Rec {
            scrut: Box::new(readback_term(scrut)),
            x: x.clone(),
            y: y.clone(),
            base: Box::new(readback_term(base)),
            step: Box::new(readback_term(step)),
        },
        TermAst::Lam(x, b) => TermAst::Lam(x.clone(), Box::new(readback_term(b))),
        TermAst::App(f, u) => {
            TermAst::App(Box::new(readback_term(f)), Box::new(readback_term(u)))
        }
        TermAst::Wit(p) => TermAst::Wit(Box::new(readback_proof(p))),
    }
}

fn readback_proof(p: &ProofAst) -> ProofAst {
    match p {
        ProofAst::Var(_) | ProofAst::Refl | ProofAst::CoTp => p.clone(),
        ProofAst::Inj(i, q) => ProofAst::Inj(*i, Box::new(readback_proof(q))),
        ProofAst::Pair(l, r) => {
            ProofAst::Pair(Box::new(readback_proof(l)), Box::new(readback_proof(r)))
        }
        ProofAst::DepPair(t, q) => {
            ProofAst::DepPair(Box::new(readback_term(t)), Box::new(readback_proof(q)))
        }
        ProofAst::LamT(x, b) => ProofAst::LamT(x.clone(), Box::new(readback_proof(b))),
        ProofAst::LamP(a, b) => ProofAst::LamP(a.clone(), Box::new(readback_proof(b))),
        ProofAst::Fix { scrut, base, a, x, step, motive } => ProofAst::Fix {
            scrut: Box::new(readback_term(scrut)),
            base: Box::new(readback_proof(base)),
            a: a.clone(),
            x: x.clone(),
            step: Box::new(readback_proof(step)),
            motive: motive.clone(),
        },
        ProofAst::Cofix { scrut, b, x, body } => ProofAst::Cofix {
            scrut: Box::new(readback_term(scrut)),
            b: b.clone(),
            x: x.clone(),
            body: Box::new(readback_proof(body)),
        },
        ProofAst::Mu(alpha, c) => ProofAst::Mu(alpha.clone(), Box::new(readback_command(c))),
        ProofAst::MuTp(c) => ProofAst::MuTp(Box::new(readback_command(c))),
    }
}

fn readback_context(e: &ContextAst) -> ContextAst {
    match e {
        ContextAst::CoVar(_) | ContextAst::Tp => e.clone(),
        ContextAst::MuT { a, body, tail } => {
            let body2 = readback_command(body);
            let tail2: Vec<Binding> =
                tail.bindings().iter().map(readback_binding).collect();
            let (tail3, body3) = inline_aliases(tail2, body2);
            ContextAst::MuT {
                a: a.clone(),
                body: Box::new(body3),
                tail: Store::from_bindings(tail3),
            }
        }
        ContextAst::Forcing(f) => ContextAst::Forcing(readback_forcing(f)),
        ContextAst::CoShift(c) => ContextAst::CoShift(Box::new(readback_command(c))),
    }
}

fn readback_forcing(f: &Forcing) -> Forcing {
    match f {
        Forcing::Empty => Forcing::Empty,
        Forcing::CaseSum(a1, c1, a2, c2) => Forcing::CaseSum(
            a1.clone(),
            Box::new(readback_command(c1)),
            a2.clone(),
            Box::new(readback_command(c2)),
        ),
        Forcing::SplitPair(a1, a2, c) => {
            Forcing::SplitPair(a1.clone(), a2.clone(), Box::new(readback_command(c)))
        }
        Forcing::SplitDep(x, a, c) => {
            Forcing::SplitDep(x.clone(), a.clone(), Box::new(readback_command(c)))
        }
        Forcing::PushT(t, e) => {
            Forcing::PushT(Box::new(readback_term(t)), Box::new(readback_context(e)))
        }
        Forcing::PushP(q, e) => {
            Forcing::PushP(Box::new(readback_proof(q)), Box::new(readback_context(e)))
        }
        Forcing::MuEq(c) => Forcing::MuEq(Box::new(readback_command(c))),
    }
}

fn readback_coterm(k: &CoTermAst) -> CoTermAst {
    match k {
        CoTermAst::PushTerm(u, rest) => CoTermAst::PushTerm(
            Box::new(readback_term(u)),
            Box::new(readback_coterm(rest)),
        ),
        CoTermAst::MuX { x, body, tail } => {
            let body2 = readback_command(body);
            let tail2: Vec<Binding> =
                tail.bindings().iter().map(readback_binding).collect();
            let (tail3, body3) = inline_aliases(tail2, body2);
            CoTermAst::MuX {
                x: x.clone(),
                body: Box::new(body3),
                tail: Store::from_bindings(tail3),
            }
        }
    }
}

fn readback_binding(b: &Binding) -> Binding {
    match b {
        Binding::Proof { name, storable, ascription } => Binding::Proof {
            name: name.clone(),
            storable: readback_storable(storable),
            ascription: ascription.clone(),
        },
        Binding::Ctx { name, ctx, ascription } => Binding::Ctx {
            name: name.clone(),
            ctx: readback_context(ctx),
            ascription: ascription.clone(),
        },
    }
}

fn readback_storable(s: &Storable) -> Storable {
    match s {
        Storable::Val(v) => Storable::Val(readback_proof(v)),
        Storable::FixThunk { scrut, base, a, x, step, motive } => Storable::FixThunk {
            scrut: readback_term(scrut),
            base: readback_proof(base),
            a: a.clone(),
            x: x.clone(),
            step: readback_proof(step),
            motive: motive.clone(),
        },
        Storable::CofixThunk { scrut, b, x, body } => Storable::CofixThunk {
            scrut: readback_term(scrut),
            b: b.clone(),
            x: x.clone(),
            body: readback_proof(body),
        },
    }
}

/// Failure modes of the embedding check.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("{0}")]
    Stuck(#[from] StuckNonValue),
    #[error("fuel exhausted before both machines terminated")]
    Fuel,
}

/// Verdict of the embedding check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimOutcome {
    /// Every erased big-step state appears, in order, in the erased
    /// small-step trace, and the final states agree.
    Embedded { big_states: usize, small_states: usize },
    /// The first erased big-step state (by index, after collapsing
    /// duplicates) with no matching small-step state.
    Diverged { missing_at: usize },
}

fn push_dedup(out: &mut Vec<Command>, cmd: Command) {
    if out.last().map(|prev| alpha_eq_command(prev, &cmd)) != Some(true) {
        out.push(cmd);
    }
}

fn big_trace(seed: &Closure, fuel: u64) -> Result<Vec<Command>, SimError> {
    let mut cl = seed.clone();
    let mut out = Vec::new();
    push_dedup(&mut out, erase_closure(&cl.command, &cl.store));
    for _ in 0..fuel {
        match machine::step_report(&cl)? {
            Some((next, _)) => {
                push_dedup(&mut out, erase_closure(&next.command, &next.store));
                cl = next;
            }
            None => return Ok(out),
        }
    }
    Err(SimError::Fuel)
}

fn small_trace(seed: &Closure, fuel: u64) -> Result<Vec<Command>, SimError> {
    let mut st = SsState::seed(seed.clone());
    let mut out = Vec::new();
    push_dedup(&mut out, erase_closure(&st.command, &st.store));
    for _ in 0..fuel {
        match smallstep::smallstep(&st)? {
            Some(next) => {
                push_dedup(&mut out, erase_closure(&next.command, &next.store));
                st = next;
            }
            None => return Ok(out),
        }
    }
    Err(SimError::Fuel)
}

/// Run both machines on `seed` and check the big-step trace embeds into the
/// small-step trace after erasure. `fuel` bounds the big-step run; the
/// small-step run gets a fixed multiple to cover focusing and detours.
pub fn check_embedding(seed: &Closure, fuel: u64) -> Result<SimOutcome, SimError> {
    let big = big_trace(seed, fuel)?;
    let small = small_trace(seed, fuel.saturating_mul(16).max(64))?;
    let mut candidates = small.iter();
    for (i, want) in big.iter().enumerate() {
        if !candidates.any(|have| alpha_eq_command(have, want)) {
            return Ok(SimOutcome::Diverged { missing_at: i });
        }
    }
    match (big.last(), small.last()) {
        (Some(b), Some(s)) if alpha_eq_command(b, s) => Ok(SimOutcome::Embedded {
            big_states: big.len(),
            small_states: small.len(),
        }),
        _ => Ok(SimOutcome::Diverged { missing_at: big.len().saturating_sub(1) }),
    }
}
