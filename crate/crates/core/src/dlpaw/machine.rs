//! Big-step reduction: weak-head steps on closures where term
//! subcomputations happen in place and (co)fixpoints are stored lazily and
//! forced by variable lookups.
//!
//! A step is chosen by the first matching rule group: delimited and
//! co-delimited congruence, β and elimination rules, call-by-value descent
//! into non-value heads, lazy storage of (co)fixpoints, store lookups, and
//! finally in-place term reduction. Terminal closures are a value against an
//! unbound covariable or against the empty forcing context; everything else
//! without a rule is stuck.

use crate::ast::{
    Binding, Closure, Command, ContextAst, CoTermAst, Forcing, ProofAst, Storable, Store, TermAst,
};
use crate::equational::term_step;
use crate::formula::{Formula, TypeExpr};
use crate::name::fresh;
use crate::nef::is_nef;
use crate::subst::{
    refresh_in_command, refresh_mu_bind, subst_command, subst_formula, subst_proof, AstKind,
    Replacement,
};

use super::{command_shape, LookupKind, StepReport, StuckNonValue};

fn stuck(cl: &Closure) -> StuckNonValue {
    StuckNonValue { spot: command_shape(&cl.command) }
}

/// One reduction step. `Ok(None)` marks a terminal closure.
pub fn dlpaw_step(cl: &Closure) -> Result<Option<Closure>, StuckNonValue> {
    Ok(step_report(cl)?.map(|(next, _)| next))
}

/// One reduction step together with the rule that fired.
pub fn step_report(cl: &Closure) -> Result<Option<(Closure, StepReport)>, StuckNonValue> {
    let Closure { command, store } = cl;
    let (proof, context, asc) = match command {
        Command::CutP { proof, context, ascription } => (proof, context, ascription),
        // Term cuts belong to the small-step machine; here terms reduce in
        // place inside proof commands.
        Command::CutT { .. } => return Err(stuck(cl)),
    };

    // A delimited computation reduces against the shared store until its
    // proof reaches the delimiter, then pops.
    if let ProofAst::MuTp(inner) = &**proof {
        if let Command::CutP { proof: ip, context: ic, ascription: iasc } = &**inner {
            if matches!(&**ic, ContextAst::Tp) {
                let cmd = Command::CutP {
                    proof: ip.clone(),
                    context: context.clone(),
                    ascription: iasc.clone().or_else(|| asc.clone()),
                };
                return Ok(Some((
                    Closure::new(cmd, store.clone()),
                    StepReport::plain("delim-pop"),
                )));
            }
        }
        let sub = Closure::new((**inner).clone(), store.clone());
        return match step_report(&sub)? {
            Some((next, report)) => {
                let cmd = Command::CutP {
                    proof: Box::new(ProofAst::MuTp(Box::new(next.command))),
                    context: context.clone(),
                    ascription: asc.clone(),
                };
                Ok(Some((Closure::new(cmd, next.store), report)))
            }
            // The delimited computation halted without reaching its
            // delimiter; the enclosing command can never resume it.
            None => Err(stuck(cl)),
        };
    }

    // Dually, a co-delimited continuation consuming a value reduces against
    // the shared store until its own marker surfaces in proof position.
    if let ContextAst::CoShift(inner) = &**context {
        if proof.is_value() {
            if let Command::CutP { proof: ip, context: ic, ascription: iasc } = &**inner {
                if matches!(&**ip, ProofAst::CoTp) {
                    let cmd = Command::CutP {
                        proof: proof.clone(),
                        context: ic.clone(),
                        ascription: iasc.clone().or_else(|| asc.clone()),
                    };
                    return Ok(Some((
                        Closure::new(cmd, store.clone()),
                        StepReport::plain("codelim-pop"),
                    )));
                }
            }
            let sub = Closure::new((**inner).clone(), store.clone());
            return match step_report(&sub)? {
                Some((next, report)) => {
                    let cmd = Command::CutP {
                        proof: proof.clone(),
                        context: Box::new(ContextAst::CoShift(Box::new(next.command))),
                        ascription: asc.clone(),
                    };
                    Ok(Some((Closure::new(cmd, next.store), report)))
                }
                None => Err(stuck(cl)),
            };
        }
    }

    let step = match (&**proof, &**context) {
        // β over a term argument; the argument must already be a value.
        (ProofAst::LamT(x, body), ContextAst::Forcing(Forcing::PushT(t, e2))) if t.is_value() => {
            let body2 = subst_proof(body, x, &Replacement::Term((**t).clone()))
                .map_err(|_| stuck(cl))?;
            let asc2 = match asc {
                Some(Formula::ForallT(y, _, b)) => {
                    subst_formula(b, y, &Replacement::Term((**t).clone())).ok()
                }
                _ => None,
            };
            let cmd = Command::CutP { proof: Box::new(body2), context: e2.clone(), ascription: asc2 };
            (Closure::new(cmd, store.clone()), StepReport::plain("beta-term"))
        }

        // β over a proof argument. A non-effectful argument may be depended
        // on, so its evaluation is delimited; any other argument is
        // evaluated without dependency tracking.
        (ProofAst::LamP(a, body), ContextAst::Forcing(Forcing::PushP(q, e2))) => {
            let parts = match asc {
                Some(Formula::DepProd(a0, dom, cod)) => Some((a0, dom, cod)),
                _ => None,
            };
            let dom_asc = parts.map(|(_, dom, _)| (**dom).clone());
            let cod_renamed = parts.and_then(|(a0, _, cod)| {
                if a0 == a {
                    Some((**cod).clone())
                } else if crate::subst::free_names_formula(cod).contains(a) {
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
                (Closure::new(cmd, store.clone()), StepReport::plain("beta-proof-nef"))
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
                (Closure::new(cmd, store.clone()), StepReport::plain("beta-proof"))
            }
        }

        // μα captures its context in the store, except a context that
        // reaches the nearest delimiter, which is linear and substituted.
        (ProofAst::Mu(alpha, c), _) => {
            if tp_in_ctx(context) {
                let c2 = subst_command(c, alpha, &Replacement::Ctx((**context).clone()))
                    .map_err(|_| stuck(cl))?;
                (Closure::new(c2, store.clone()), StepReport::plain("mu-capture-delim"))
            } else {
                let (alpha2, c2) = refresh_in_command(c, alpha, AstKind::Context);
                let mut s2 = store.clone();
                s2.bind_ctx(alpha2, (**context).clone(), asc.clone());
                (Closure::new(c2, s2), StepReport::plain("mu-capture"))
            }
        }

        // μ̃a stores the value it receives and re-installs its captured
        // store suffix, freshening every re-inserted name.
        (v, ContextAst::MuT { a, body, tail }) if v.is_value() => {
            let (a2, tail2, body2) = refresh_mu_bind(a, tail.bindings(), body);
            let mut s2 = store.clone();
            s2.bind_proof(a2, v.clone(), asc.clone()).map_err(|_| stuck(cl))?;
            let s2 = s2.concat(&Store::from_bindings(tail2));
            (Closure::new(body2, s2), StepReport::plain("mu-tilde-bind"))
        }

        // Eliminations: a value against the matching forcing context.
        (ProofAst::Inj(i, v), ContextAst::Forcing(Forcing::CaseSum(a1, c1, a2, c2)))
            if (*i == 1 || *i == 2) && v.is_value() =>
        {
            let (a_i, c_i) = if *i == 1 { (a1, c1) } else { (a2, c2) };
            let branch_asc = match asc {
                Some(Formula::Or(l, r)) => {
                    Some(if *i == 1 { (**l).clone() } else { (**r).clone() })
                }
                _ => None,
            };
            let (a_i2, c_i2) = refresh_in_command(c_i, a_i, AstKind::Proof);
            let mut s2 = store.clone();
            s2.bind_proof(a_i2, (**v).clone(), branch_asc).map_err(|_| stuck(cl))?;
            (Closure::new(c_i2, s2), StepReport::plain("case-inj"))
        }

        (ProofAst::Pair(v1, v2), ContextAst::Forcing(Forcing::SplitPair(a1, a2, c)))
            if v1.is_value() && v2.is_value() =>
        {
            let (asc1, asc2) = match asc {
                Some(Formula::And(l, r)) => (Some((**l).clone()), Some((**r).clone())),
                _ => (None, None),
            };
            // The second binder shadows the first on a name clash.
            let (a1n, a2n, c3) = if a1 == a2 {
                let (a2n, c2) = refresh_in_command(c, a2, AstKind::Proof);
                (a1.refresh(), a2n, c2)
            } else {
                let (a1n, c2) = refresh_in_command(c, a1, AstKind::Proof);
                let (a2n, c3) = refresh_in_command(&c2, a2, AstKind::Proof);
                (a1n, a2n, c3)
            };
            let mut s2 = store.clone();
            s2.bind_proof(a1n, (**v1).clone(), asc1).map_err(|_| stuck(cl))?;
            s2.bind_proof(a2n, (**v2).clone(), asc2).map_err(|_| stuck(cl))?;
            (Closure::new(c3, s2), StepReport::plain("split-pair"))
        }

        (ProofAst::DepPair(t, v), ContextAst::Forcing(Forcing::SplitDep(x, a, c)))
            if t.is_value() && v.is_value() =>
        {
            let c_t = subst_command(c, x, &Replacement::Term((**t).clone()))
                .map_err(|_| stuck(cl))?;
            let (an, c2) = refresh_in_command(&c_t, a, AstKind::Proof);
            let bind_asc = match asc {
                Some(Formula::ExistsT(x0, _, b)) => {
                    subst_formula(b, x0, &Replacement::Term((**t).clone())).ok()
                }
                _ => None,
            };
            let mut s2 = store.clone();
            s2.bind_proof(an, (**v).clone(), bind_asc).map_err(|_| stuck(cl))?;
            (Closure::new(c2, s2), StepReport::plain("split-dep"))
        }

        (ProofAst::Refl, ContextAst::Forcing(Forcing::MuEq(c))) => {
            (Closure::new((**c).clone(), store.clone()), StepReport::plain("refl-eq"))
        }

        // Store lookups. A covariable restores its context; a forced proof
        // variable yields its value or unfolds its (co)fixpoint one level.
        (v, ContextAst::CoVar(alpha)) if v.is_value() => {
            match store.split_at_name(alpha) {
                // A value against an unbound covariable is terminal.
                None => return Ok(None),
                Some((_, Binding::Ctx { name, ctx, ascription }, _)) => {
                    let cmd = Command::CutP {
                        proof: proof.clone(),
                        context: Box::new(ctx),
                        ascription: ascription.or_else(|| asc.clone()),
                    };
                    (
                        Closure::new(cmd, store.clone()),
                        StepReport::lookup("lookup-ctx", name, LookupKind::CtxFetch),
                    )
                }
                Some((_, Binding::Proof { .. }, _)) => return Err(stuck(cl)),
            }
        }

        (ProofAst::Var(a), ContextAst::Forcing(_)) => match store.split_at_name(a) {
            None | Some((_, Binding::Ctx { .. }, _)) => return Err(stuck(cl)),
            Some((prefix, Binding::Proof { name, storable, ascription }, suffix)) => {
                match storable {
                    Storable::Val(v) => {
                        let cmd = Command::CutP {
                            proof: Box::new(v),
                            context: context.clone(),
                            ascription: ascription.or_else(|| asc.clone()),
                        };
                        (
                            Closure::new(cmd, store.clone()),
                            StepReport::lookup("lookup-val", name, LookupKind::ValueFetch),
                        )
                    }
                    Storable::FixThunk { scrut, base, a: fa, x, step, motive } => match scrut {
                        // Base case: the binding is dropped, the store
                        // suffix is captured, and the binder name is reused.
                        TermAst::Zero => {
                            let base_asc = motive.as_deref().and_then(|m| {
                                subst_formula(m, &x, &Replacement::Term(TermAst::Zero)).ok()
                            });
                            let mu = ContextAst::MuT {
                                a: name.clone(),
                                body: Box::new(command.clone()),
                                tail: suffix,
                            };
                            let cmd = Command::CutP {
                                proof: Box::new(base),
                                context: Box::new(mu),
                                ascription: base_asc,
                            };
                            (
                                Closure::new(cmd, prefix),
                                StepReport::lookup("fix-unfold-zero", name, LookupKind::FixUnfold),
                            )
                        }
                        // Successor: unfold one level, storing the
                        // fixpoint at the predecessor under a fresh name.
                        TermAst::Succ(u) if u.is_value() => {
                            let b2 = fa.refresh();
                            let step1 = subst_proof(&step, &x, &Replacement::Term((*u).clone()))
                                .map_err(|_| stuck(cl))?;
                            let step2 = subst_proof(
                                &step1,
                                &fa,
                                &Replacement::Proof(ProofAst::Var(b2.clone())),
                            )
                            .map_err(|_| stuck(cl))?;
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
                                body: Box::new(command.clone()),
                                tail: suffix,
                            };
                            let cmd = Command::CutP {
                                proof: Box::new(step2),
                                context: Box::new(mu),
                                ascription: ascription.clone(),
                            };
                            (
                                Closure::new(cmd, s2),
                                StepReport::lookup("fix-unfold-succ", name, LookupKind::FixUnfold),
                            )
                        }
                        _ => return Err(stuck(cl)),
                    },
                    Storable::CofixThunk { scrut, b, x, body } => {
                        if !scrut.is_value() {
                            return Err(stuck(cl));
                        }
                        let b2 = b.refresh();
                        let body1 = subst_proof(&body, &x, &Replacement::Term(scrut.clone()))
                            .map_err(|_| stuck(cl))?;
                        let body2 = subst_proof(
                            &body1,
                            &b,
                            &Replacement::Proof(ProofAst::Var(b2.clone())),
                        )
                        .map_err(|_| stuck(cl))?;
                        // The continuation is memoized as a function from
                        // indices to the restarted cofixpoint.
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
                        s2.bind_proof(b2, lam, lam_asc).map_err(|_| stuck(cl))?;
                        let mu = ContextAst::MuT {
                            a: name.clone(),
                            body: Box::new(command.clone()),
                            tail: suffix,
                        };
                        let cmd = Command::CutP {
                            proof: Box::new(body2),
                            context: Box::new(mu),
                            ascription: cut_asc,
                        };
                        (
                            Closure::new(cmd, s2),
                            StepReport::lookup("cofix-unfold", name, LookupKind::CofixUnfold),
                        )
                    }
                }
            }
        },

        // A value delivered to the empty forcing context is terminal.
        (v, ContextAst::Forcing(Forcing::Empty)) if v.is_value() => return Ok(None),

        // Call-by-value descent: evaluate the components of a non-value
        // head before its elimination.
        (ProofAst::Inj(i, p), _) if !p.is_value() => {
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
            (Closure::new(cmd, store.clone()), StepReport::plain("cbv-inj"))
        }

        (ProofAst::Pair(p1, p2), _) if !(p1.is_value() && p2.is_value()) => {
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
            (Closure::new(cmd, store.clone()), StepReport::plain("cbv-pair"))
        }

        (ProofAst::DepPair(t, p), _) if t.is_value() && !p.is_value() => {
            let a = fresh("a");
            let p_asc = match asc {
                Some(Formula::ExistsT(x0, _, b)) => {
                    subst_formula(b, x0, &Replacement::Term((**t).clone())).ok()
                }
                _ => None,
            };
            let final_cmd = Command::CutP {
                proof: Box::new(ProofAst::DepPair(
                    t.clone(),
                    Box::new(ProofAst::Var(a.clone())),
                )),
                context: context.clone(),
                ascription: asc.clone(),
            };
            let cmd = Command::CutP {
                proof: p.clone(),
                context: Box::new(ContextAst::mu_t(a, final_cmd)),
                ascription: p_asc,
            };
            (Closure::new(cmd, store.clone()), StepReport::plain("cbv-dep-pair"))
        }

        // Laziness: a (co)fixpoint over a settled scrutinee is stored, not
        // unfolded; lookups force it later.
        (ProofAst::Fix { scrut, .. }, _) if scrut.is_value() => {
            let a = fresh("a");
            let s = Storable::classify(proof).expect("fix with a value scrutinee is storable");
            let mut s2 = store.clone();
            s2.bind_storable(a.clone(), s, asc.clone());
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::Var(a)),
                context: context.clone(),
                ascription: asc.clone(),
            };
            (Closure::new(cmd, s2), StepReport::plain("lazy-fix"))
        }

        (ProofAst::Cofix { scrut, .. }, _) if scrut.is_value() => {
            let a = fresh("a");
            let s = Storable::classify(proof).expect("cofix with a value scrutinee is storable");
            let mut s2 = store.clone();
            s2.bind_storable(a.clone(), s, asc.clone());
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::Var(a)),
                context: context.clone(),
                ascription: asc.clone(),
            };
            (Closure::new(cmd, s2), StepReport::plain("lazy-cofix"))
        }

        // In-place term reduction, in the four positions that demand a term
        // value: a dependent pair's witness, a (co)fixpoint's scrutinee, and
        // a pushed term argument.
        (ProofAst::DepPair(t, p), _) if !t.is_value() => {
            let t2 = term_step(t, store).ok_or_else(|| stuck(cl))?;
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::DepPair(Box::new(t2), p.clone())),
                context: context.clone(),
                ascription: asc.clone(),
            };
            (Closure::new(cmd, store.clone()), StepReport::plain("term-dep-pair"))
        }

        (ProofAst::Fix { scrut, base, a, x, step, motive }, _) if !scrut.is_value() => {
            let t2 = term_step(scrut, store).ok_or_else(|| stuck(cl))?;
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::Fix {
                    scrut: Box::new(t2),
                    base: base.clone(),
                    a: a.clone(),
                    x: x.clone(),
                    step: step.clone(),
                    motive: motive.clone(),
                }),
                context: context.clone(),
                ascription: asc.clone(),
            };
            (Closure::new(cmd, store.clone()), StepReport::plain("term-fix-scrut"))
        }

        (ProofAst::Cofix { scrut, b, x, body }, _) if !scrut.is_value() => {
            let t2 = term_step(scrut, store).ok_or_else(|| stuck(cl))?;
            let cmd = Command::CutP {
                proof: Box::new(ProofAst::Cofix {
                    scrut: Box::new(t2),
                    b: b.clone(),
                    x: x.clone(),
                    body: body.clone(),
                }),
                context: context.clone(),
                ascription: asc.clone(),
            };
            (Closure::new(cmd, store.clone()), StepReport::plain("term-cofix-scrut"))
        }

        (ProofAst::LamT(..), ContextAst::Forcing(Forcing::PushT(t, e2))) if !t.is_value() => {
            let t2 = term_step(t, store).ok_or_else(|| stuck(cl))?;
            let cmd = Command::CutP {
                proof: proof.clone(),
                context: Box::new(ContextAst::Forcing(Forcing::PushT(Box::new(t2), e2.clone()))),
                ascription: asc.clone(),
            };
            (Closure::new(cmd, store.clone()), StepReport::plain("term-push"))
        }

        _ => return Err(stuck(cl)),
    };

    Ok(Some(step))
}

/// Drive a closure for the equational probes. `None` when the run gets
/// stuck or exhausts its fuel.
pub(crate) fn run_for_probe(command: Command, store: Store, fuel: u64) -> Option<Closure> {
    let mut cl = Closure::new(command, store);
    for _ in 0..fuel {
        match step_report(&cl) {
            Ok(Some((next, _))) => cl = next,
            Ok(None) => return Some(cl),
            Err(_) => return None,
        }
    }
    None
}

/// Does the context syntactically reach the nearest enclosing delimiter?
/// Such a context is linear and must be substituted, never stored. The
/// traversal does not descend into delimited proofs, whose marker is local.
pub(crate) fn tp_in_ctx(e: &ContextAst) -> bool {
    match e {
        ContextAst::Tp => true,
        ContextAst::CoVar(_) => false,
        ContextAst::MuT { body, tail, .. } => {
            tp_in_cmd(body) || tail.bindings().iter().any(tp_in_binding)
        }
        ContextAst::Forcing(f) => tp_in_forcing(f),
        ContextAst::CoShift(c) => tp_in_cmd(c),
    }
}

fn tp_in_forcing(f: &Forcing) -> bool {
    match f {
        Forcing::Empty => false,
        Forcing::CaseSum(_, c1, _, c2) => tp_in_cmd(c1) || tp_in_cmd(c2),
        Forcing::SplitPair(_, _, c) | Forcing::SplitDep(_, _, c) | Forcing::MuEq(c) => {
            tp_in_cmd(c)
        }
        Forcing::PushT(t, e) => tp_in_term(t) || tp_in_ctx(e),
        Forcing::PushP(p, e) => tp_in_proof(p) || tp_in_ctx(e),
    }
}

fn tp_in_cmd(c: &Command) -> bool {
    match c {
        Command::CutP { proof, context, .. } => tp_in_proof(proof) || tp_in_ctx(context),
        Command::CutT { term, coterm, .. } => tp_in_term(term) || tp_in_coterm(coterm),
    }
}

fn tp_in_proof(p: &ProofAst) -> bool {
    match p {
        ProofAst::Var(_) | ProofAst::Refl | ProofAst::CoTp => false,
        ProofAst::MuTp(_) => false,
        ProofAst::Inj(_, q) | ProofAst::LamT(_, q) | ProofAst::LamP(_, q) => tp_in_proof(q),
        ProofAst::Pair(l, r) => tp_in_proof(l) || tp_in_proof(r),
        ProofAst::DepPair(t, q) => tp_in_term(t) || tp_in_proof(q),
        ProofAst::Fix { scrut, base, step, .. } => {
            tp_in_term(scrut) || tp_in_proof(base) || tp_in_proof(step)
        }
        ProofAst::Cofix { scrut, body, .. } => tp_in_term(scrut) || tp_in_proof(body),
        ProofAst::Mu(_, c) => tp_in_cmd(c),
    }
}

fn tp_in_term(t: &TermAst) -> bool {
    match t {
        TermAst::Var(_) | TermAst::Zero => false,
        TermAst::Succ(u) => tp_in_term(u),
        TermAst::App(f, u) => tp_in_term(f) || tp_in_term(u),
        TermAst::Lam(_, b) => tp_in_term(b),
        TermAst::Rec { scrut, base, step, .. } => {
            tp_in_term(scrut) || tp_in_term(base) || tp_in_term(step)
        }
        TermAst::Wit(p) => tp_in_proof(p),
    }
}

fn tp_in_coterm(k: &CoTermAst) -> bool {
    match k {
        CoTermAst::PushTerm(t, k2) => tp_in_term(t) || tp_in_coterm(k2),
        CoTermAst::MuX { body, tail, .. } => {
            tp_in_cmd(body) || tail.bindings().iter().any(tp_in_binding)
        }
    }
}

fn tp_in_binding(b: &Binding) -> bool {
    match b {
        Binding::Proof { storable, .. } => tp_in_proof(&storable.as_proof()),
        Binding::Ctx { ctx, .. } => tp_in_ctx(ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;

    fn run(cl: Closure, fuel: u64) -> (Closure, Vec<StepReport>) {
        let mut cur = cl;
        let mut reports = Vec::new();
        for _ in 0..fuel {
            match step_report(&cur).expect("not stuck") {
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

    fn covar(base: &str) -> (Name, ContextAst) {
        let n = fresh(base);
        (n.clone(), ContextAst::CoVar(n))
    }

    #[test]
    fn beta_term_substitutes_a_value_argument() {
        let x = fresh("x");
        let (alpha, e) = covar("alpha");
        let lam = ProofAst::LamT(x, Box::new(ProofAst::Refl));
        let cmd = Command::cut(lam, ContextAst::push_t(TermAst::numeral(2), e));
        let (fin, reports) = run(Closure::from_command(cmd), 10);
        assert_eq!(reports[0].rule, "beta-term");
        match &fin.command {
            Command::CutP { proof, context, .. } => {
                assert_eq!(**proof, ProofAst::Refl);
                assert_eq!(**context, ContextAst::CoVar(alpha));
            }
            _ => panic!("expected a proof cut"),
        }
    }

    #[test]
    fn nef_argument_runs_under_a_delimiter_and_pops() {
        // ⟨λa.a‖refl·α⟩ delimits the argument, stores it, and pops.
        let a = fresh("a");
        let (_, e) = covar("alpha");
        let lam = ProofAst::LamP(a.clone(), Box::new(ProofAst::Var(a)));
        let cmd = Command::cut(lam, ContextAst::push_p(ProofAst::Refl, e));
        let (fin, reports) = run(Closure::from_command(cmd), 10);
        let rules: Vec<_> = reports.iter().map(|r| r.rule).collect();
        assert_eq!(rules, vec!["beta-proof-nef", "mu-tilde-bind", "delim-pop"]);
        // The head is the stored variable; the store holds refl.
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
    fn mu_captures_and_the_lookup_restores() {
        // ⟨μα.⟨refl‖α⟩‖μ̃=.⟨refl‖β⟩⟩ stores the forcing context, fetches it
        // back, and eliminates the equality.
        let alpha = fresh("alpha");
        let (beta, e_beta) = covar("beta");
        let inner = Command::cut(ProofAst::Refl, ContextAst::CoVar(alpha.clone()));
        let mu = ProofAst::Mu(alpha, Box::new(inner));
        let forcing = ContextAst::Forcing(Forcing::MuEq(Box::new(Command::cut(
            ProofAst::Refl,
            e_beta,
        ))));
        let cmd = Command::cut(mu, forcing);
        let (fin, reports) = run(Closure::from_command(cmd), 10);
        let rules: Vec<_> = reports.iter().map(|r| r.rule).collect();
        assert_eq!(rules, vec!["mu-capture", "lookup-ctx", "refl-eq"]);
        assert_eq!(reports[1].lookup.as_ref().map(|(_, k)| *k), Some(LookupKind::CtxFetch));
        match &fin.command {
            Command::CutP { context, .. } => assert_eq!(**context, ContextAst::CoVar(beta)),
            _ => panic!("expected a proof cut"),
        }
    }

    #[test]
    fn fix_is_stored_lazily_and_unfolds_once_per_level() {
        // fix 2 of [refl | (a,x).a] forced by μ̃= unfolds exactly three
        // times: at 2, at 1, and at 0.
        let a = fresh("a");
        let x = fresh("x");
        let (_, e) = covar("alpha");
        let fix = ProofAst::fix(
            TermAst::numeral(2),
            ProofAst::Refl,
            a.clone(),
            x,
            ProofAst::Var(a),
        );
        let forcing =
            ContextAst::Forcing(Forcing::MuEq(Box::new(Command::cut(ProofAst::Refl, e))));
        let cmd = Command::cut(fix, forcing);
        let (_, reports) = run(Closure::from_command(cmd), 50);
        assert_eq!(reports[0].rule, "lazy-fix");
        let unfolds = reports
            .iter()
            .filter(|r| matches!(r.lookup, Some((_, LookupKind::FixUnfold))))
            .count();
        assert_eq!(unfolds, 3);
    }

    #[test]
    fn cofix_unfolds_and_memoizes_its_continuation() {
        let b = fresh("b");
        let x = fresh("x");
        let (_, e) = covar("alpha");
        let cofix = ProofAst::cofix(TermAst::Zero, b, x, ProofAst::Refl);
        let forcing =
            ContextAst::Forcing(Forcing::MuEq(Box::new(Command::cut(ProofAst::Refl, e))));
        let cmd = Command::cut(cofix, forcing);
        let (fin, reports) = run(Closure::from_command(cmd), 50);
        let unfolds = reports
            .iter()
            .filter(|r| matches!(r.lookup, Some((_, LookupKind::CofixUnfold))))
            .count();
        assert_eq!(unfolds, 1);
        // The memoized continuation survives in the final store.
        let has_lam = fin.store.bindings().iter().any(|bi| {
            matches!(bi, Binding::Proof { storable: Storable::Val(ProofAst::LamT(..)), .. })
        });
        assert!(has_lam, "continuation function is stored");
    }

    #[test]
    fn cbv_descends_into_pairs_before_splitting() {
        // ⟨(μα.⟨refl‖α⟩, refl)‖μ̃(a1,a2).⟨a1‖β⟩⟩ evaluates both components,
        // splits, and ends on the bound variable.
        let alpha = fresh("alpha");
        let (_, e_beta) = covar("beta");
        let left = ProofAst::Mu(
            alpha.clone(),
            Box::new(Command::cut(ProofAst::Refl, ContextAst::CoVar(alpha))),
        );
        let a1 = fresh("a1");
        let a2 = fresh("a2");
        let split = ContextAst::Forcing(Forcing::SplitPair(
            a1.clone(),
            a2,
            Box::new(Command::cut(ProofAst::Var(a1), e_beta)),
        ));
        let cmd = Command::cut(ProofAst::Pair(Box::new(left), Box::new(ProofAst::Refl)), split);
        let (fin, reports) = run(Closure::from_command(cmd), 20);
        assert_eq!(reports[0].rule, "cbv-pair");
        assert!(reports.iter().any(|r| r.rule == "split-pair"));
        // The components were stored as aliases; chase them to the value.
        match &fin.command {
            Command::CutP { proof, .. } => match &**proof {
                ProofAst::Var(n) => {
                    let mut n = n.clone();
                    loop {
                        match fin.store.lookup_proof(&n) {
                            Some(Storable::Val(ProofAst::Var(m))) => n = m.clone(),
                            other => {
                                assert_eq!(other, Some(&Storable::Val(ProofAst::Refl)));
                                break;
                            }
                        }
                    }
                }
                p => panic!("expected a variable head, got {p:?}"),
            },
            _ => panic!("expected a proof cut"),
        }
    }

    #[test]
    fn delimiter_reaching_contexts_are_substituted_not_stored() {
        // Inside a delimiter, μ⋆ may not capture the tp̂-reaching context
        // into the store; it is replaced linearly.
        let star = fresh("star");
        let a = fresh("a");
        let (_, e) = covar("alpha");
        // μtp̂.⟨μ⋆.⟨refl‖⋆⟩‖μ̃a.⟨a‖tp̂⟩⟩
        let inner_mu = ProofAst::Mu(
            star.clone(),
            Box::new(Command::cut(ProofAst::Refl, ContextAst::CoVar(star))),
        );
        let mu_t = ContextAst::mu_t(
            a.clone(),
            Command::cut(ProofAst::Var(a), ContextAst::Tp),
        );
        let delim = ProofAst::MuTp(Box::new(Command::cut(inner_mu, mu_t)));
        let cmd = Command::cut(delim, e);
        let (fin, reports) = run(Closure::from_command(cmd), 20);
        let rules: Vec<_> = reports.iter().map(|r| r.rule).collect();
        assert_eq!(rules, vec!["mu-capture-delim", "mu-tilde-bind", "delim-pop"]);
        // No context binding was created.
        assert!(fin
            .store
            .bindings()
            .iter()
            .all(|b| matches!(b, Binding::Proof { .. })));
    }

    #[test]
    fn coshift_congruence_reduces_the_body_then_pops() {
        // ⟨refl‖μ̃tp̌.⟨μ⋆.⟨tp̌‖⋆⟩‖β·…⟩⟩: the body runs against the shared
        // store until tp̌ surfaces, then the value flows to the residue.
        let (_, e) = covar("alpha");
        let a = fresh("a");
        // body: ⟨tp̌‖μ̃a.⟨a‖α⟩⟩ — tp̌ is not a value, so the body must first
        // be rewritten by its own rules; use a directly poppable body here.
        let body = Command::cut(ProofAst::CoTp, e);
        let coshift = ContextAst::CoShift(Box::new(body));
        let cmd = Command::cut(ProofAst::Refl, coshift);
        let (fin, reports) = run(Closure::from_command(cmd), 10);
        assert_eq!(reports[0].rule, "codelim-pop");
        match &fin.command {
            Command::CutP { proof, .. } => assert_eq!(**proof, ProofAst::Refl),
            _ => panic!("expected a proof cut"),
        }
        let _ = a;
    }

    #[test]
    fn terms_reduce_in_place_inside_dependent_pairs() {
        // ⟨(1+1 via rec, refl)‖α⟩ computes the witness before terminating.
        let x = fresh("x");
        let y = fresh("y");
        let (_, e) = covar("alpha");
        let two = TermAst::Rec {
            scrut: Box::new(TermAst::numeral(2)),
            x: x.clone(),
            y: y.clone(),
            base: Box::new(TermAst::Zero),
            step: Box::new(TermAst::Succ(Box::new(TermAst::Var(y)))),
        };
        let pair = ProofAst::DepPair(Box::new(two), Box::new(ProofAst::Refl));
        let cmd = Command::cut(pair, e);
        let (fin, reports) = run(Closure::from_command(cmd), 30);
        assert!(reports.iter().all(|r| r.rule == "term-dep-pair"));
        match &fin.command {
            Command::CutP { proof, .. } => match &**proof {
                ProofAst::DepPair(t, _) => assert_eq!(t.as_numeral(), Some(2)),
                p => panic!("expected a dependent pair, got {p:?}"),
            },
            _ => panic!("expected a proof cut"),
        }
    }

    #[test]
    fn term_cuts_are_rejected() {
        let x = fresh("x");
        let cmd = Command::cut_term(
            TermAst::Zero,
            CoTermAst::mu_x(x.clone(), Command::cut(ProofAst::Refl, ContextAst::Tp))
        );
        assert!(step_report(&Closure::from_command(cmd)).is_err());
    }
}
