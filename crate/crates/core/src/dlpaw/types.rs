//! The typechecker for the dependent sequent calculus.
//!
//! Judgments come in two modes. Regular mode types terms, proofs, contexts,
//! commands, closures, and stores against a fixed ambient dependency list;
//! the list grows only through store entries. Dependent mode types the body
//! of a delimited continuation (`μtp̂.c` or `μ̃tp̌.c`): each cut appends a
//! hole `{·|p}` (or `{·|t}`) to the list, the binder that receives the cut
//! fills it, and the delimiter itself checks that both sides of its final
//! cut agree once the accumulated substitution is applied.
//!
//! Two sides of a cut may carry distinct formulas; they must agree only
//! after the dependency list acts on both. That comparison, and every other
//! formula comparison, runs through the bounded equational theory; running
//! out of fuel is reported as a dependency mismatch rather than silently
//! accepted.

use crate::ast::{
    Binding, Closure, CoTermAst, Command, ContextAst, Forcing, ProofAst, Store, TermAst,
};
use crate::env::TypingEnv;
use crate::equational::{formula_equiv_default, formula_step, positivity};
use crate::formula::{Formula, TypeExpr};
use crate::name::{fresh, Name};
use crate::nef::is_nef;
use crate::sigma::{DepEntry, DepPattern, DependencyList};
use crate::subst::{
    alpha_eq_type, free_names_formula, free_names_term, subst_formula, Replacement,
};
use std::collections::HashSet;

/// Environments for this calculus map hypotheses to formulas.
pub type Env = TypingEnv<Formula>;

/// Which judgment family to check in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    /// The dependency list is a fixed ambient.
    Regular,
    /// Inside a delimited continuation: the dependency list grows cut by
    /// cut. Requires a `tp̂` or `tp̌` hypothesis in the environment.
    Dependent,
}

/// The syntax object under judgment.
#[derive(Clone, Debug)]
pub enum Subject {
    Term(TermAst),
    Proof(ProofAst),
    Context(ContextAst),
    Command(Command),
    Closure(Closure),
    Store(Store),
}

/// What is claimed of the subject.
#[derive(Clone, Debug)]
pub enum JudgmentForm {
    /// `t : T`
    HasType(TypeExpr),
    /// `p : A`
    Proves(Formula),
    /// `e : A⊥⊥`
    Refutes(Formula),
    /// Commands, closures, and stores carry no formula of their own.
    Valid,
}

pub use crate::derivation::Derivation;

/// Why a judgment was refused.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound {kind} {name}")]
    Unbound { kind: &'static str, name: Name },
    #[error("{spot}: expected {expected}, found {found}")]
    Mismatch { spot: String, expected: String, found: String },
    #[error("{spot} must be NEF")]
    NefViolation { spot: String },
    #[error("dependency lists do not reconcile the cut: {detail}")]
    DependencyMismatch { detail: String },
    #[error("recursive predicate {f} occurs negatively in a coinductive body")]
    PositivityViolation { f: Name },
    #[error("cannot synthesize a formula for {spot}; ascribe the cut")]
    CannotSynthesize { spot: String },
    #[error("{spot} is out of scope here: {detail}")]
    OutOfScope { spot: &'static str, detail: &'static str },
    #[error("judgment form does not fit the subject")]
    JudgmentShape,
}

/// Check `subject` against `judgment` under `env` and the ambient
/// dependency list, in the given mode.
pub fn dlpaw_typecheck(
    env: &Env,
    sigma: &DependencyList,
    subject: &Subject,
    judgment: &JudgmentForm,
    mode: Mode,
) -> Result<Derivation, TypeError> {
    match mode {
        Mode::Regular => match (subject, judgment) {
            (Subject::Term(t), JudgmentForm::HasType(ty)) => check_term(env, sigma, t, ty),
            (Subject::Proof(p), JudgmentForm::Proves(a)) => check_proof(env, sigma, p, a),
            (Subject::Context(e), JudgmentForm::Refutes(a)) => check_ctx(env, sigma, e, a),
            (Subject::Command(c), JudgmentForm::Valid) => check_command(env, sigma, c),
            (Subject::Closure(cl), JudgmentForm::Valid) => check_closure(env, sigma, cl),
            (Subject::Store(s), JudgmentForm::Valid) => {
                check_store(env, sigma, s).map(|(d, _, _)| d)
            }
            _ => Err(TypeError::JudgmentShape),
        },
        Mode::Dependent => {
            if env.active_delim().is_none() {
                return Err(TypeError::OutOfScope {
                    spot: "the dependent judgment",
                    detail: "no tp̂ or tp̌ hypothesis is in scope",
                });
            }
            match (subject, judgment) {
                (Subject::Command(c), JudgmentForm::Valid) => check_command_dep(env, sigma, c),
                (Subject::Closure(cl), JudgmentForm::Valid) => {
                    check_closure_dep(env, sigma, cl)
                }
                (Subject::Context(e), JudgmentForm::Refutes(a))
                    if sigma.trailing_hole().is_some() =>
                {
                    check_ctx_dep(env, sigma, e, a)
                }
                _ => Err(TypeError::JudgmentShape),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Formula decomposition and comparison.

const HEAD_FUEL: u64 = 256;

fn equiv_or_fuel(a: &Formula, b: &Formula) -> Result<bool, TypeError> {
    formula_equiv_default(a, b).map_err(|f| TypeError::DependencyMismatch {
        detail: format!("comparison gave up after {} steps per side", f.fuel),
    })
}

fn expect_equiv(a: &Formula, b: &Formula, spot: &str) -> Result<Derivation, TypeError> {
    if equiv_or_fuel(a, b)? {
        Ok(Derivation::leaf("equiv"))
    } else {
        Err(TypeError::Mismatch {
            spot: spot.to_string(),
            expected: format!("{b:?}"),
            found: format!("{a:?}"),
        })
    }
}

/// The cut discipline: both sides agree after the dependency list acts.
fn sigma_reconcile(
    sigma: &DependencyList,
    a: &Formula,
    b: &Formula,
) -> Result<Derivation, TypeError> {
    let sa = sigma.apply(a);
    let sb = sigma.apply(b);
    match formula_equiv_default(&sa, &sb) {
        Ok(true) => Ok(Derivation::leaf("sigma-equiv")),
        Ok(false) => Err(TypeError::DependencyMismatch {
            detail: format!("{sa:?} vs {sb:?}"),
        }),
        Err(f) => Err(TypeError::DependencyMismatch {
            detail: format!("comparison gave up after {} steps per side", f.fuel),
        }),
    }
}

fn terms_equiv(t: &TermAst, u: &TermAst) -> Result<bool, TypeError> {
    equiv_or_fuel(
        &Formula::Eq(t.clone(), t.clone()),
        &Formula::Eq(t.clone(), u.clone()),
    )
}

/// Reduce a formula until `extract` recognizes its head. Coinductive
/// unfolding participates, so an intro against a `ν` sees its unfolding.
fn seek_head<T>(
    a: &Formula,
    expected: &'static str,
    extract: impl Fn(&Formula) -> Option<T>,
) -> Result<T, TypeError> {
    let mut cur = a.clone();
    for _ in 0..HEAD_FUEL {
        if let Some(v) = extract(&cur) {
            return Ok(v);
        }
        match formula_step(&cur) {
            Some(next) => cur = next,
            None => break,
        }
    }
    Err(TypeError::Mismatch {
        spot: "formula decomposition".to_string(),
        expected: expected.to_string(),
        found: format!("{cur:?}"),
    })
}

fn seek_or(a: &Formula) -> Result<(Formula, Formula), TypeError> {
    seek_head(a, "a disjunction", |f| match f {
        Formula::Or(l, r) => Some(((**l).clone(), (**r).clone())),
        _ => None,
    })
}

fn seek_and(a: &Formula) -> Result<(Formula, Formula), TypeError> {
    seek_head(a, "a conjunction", |f| match f {
        Formula::And(l, r) => Some(((**l).clone(), (**r).clone())),
        _ => None,
    })
}

fn seek_exists(a: &Formula) -> Result<(Name, TypeExpr, Formula), TypeError> {
    seek_head(a, "an existential", |f| match f {
        Formula::ExistsT(x, ty, b) => Some((x.clone(), ty.clone(), (**b).clone())),
        _ => None,
    })
}

fn seek_forall(a: &Formula) -> Result<(Name, TypeExpr, Formula), TypeError> {
    seek_head(a, "a universal", |f| match f {
        Formula::ForallT(x, ty, b) => Some((x.clone(), ty.clone(), (**b).clone())),
        _ => None,
    })
}

fn seek_depprod(a: &Formula) -> Result<(Name, Formula, Formula), TypeError> {
    seek_head(a, "a dependent product", |f| match f {
        Formula::DepProd(n, dom, cod) => Some((n.clone(), (**dom).clone(), (**cod).clone())),
        _ => None,
    })
}

fn seek_eq(a: &Formula) -> Result<(TermAst, TermAst), TypeError> {
    seek_head(a, "an equation", |f| match f {
        Formula::Eq(t, u) => Some((t.clone(), u.clone())),
        _ => None,
    })
}

fn seek_bot(a: &Formula) -> Result<(), TypeError> {
    seek_head(a, "falsity", |f| match f {
        Formula::Bot => Some(()),
        _ => None,
    })
}

fn seek_nu(a: &Formula) -> Result<(TermAst, Name, Name, Formula), TypeError> {
    seek_head(a, "a coinductive formula", |f| match f {
        Formula::Nu { index, f, x, body } => {
            Some((index.clone(), f.clone(), x.clone(), (**body).clone()))
        }
        _ => None,
    })
}

fn subst_term_into(a: &Formula, x: &Name, t: &TermAst) -> Result<Formula, TypeError> {
    subst_formula(a, x, &Replacement::Term(t.clone())).map_err(|_| TypeError::Mismatch {
        spot: format!("substituting a term for {x}"),
        expected: "a term-kinded occurrence".to_string(),
        found: "a mixed-kind occurrence".to_string(),
    })
}

fn subst_proof_into(a: &Formula, x: &Name, q: &ProofAst) -> Result<Formula, TypeError> {
    subst_formula(a, x, &Replacement::Proof(q.clone())).map_err(|_| TypeError::Mismatch {
        spot: format!("substituting a proof for {x}"),
        expected: "a proof-kinded occurrence".to_string(),
        found: "a mixed-kind occurrence".to_string(),
    })
}

/// Replace occurrences of the term `from` by `to` inside a formula, the
/// substitution an equality eliminator performs. Replacement stops at any
/// binder that shadows a variable of either side, and does not descend into
/// embedded proofs.
pub fn replace_term_in_formula(a: &Formula, from: &TermAst, to: &TermAst) -> Formula {
    let mut guard = free_names_term(from);
    guard.extend(free_names_term(to));
    repl_formula(a, from, to, &guard)
}

fn repl_formula(a: &Formula, from: &TermAst, to: &TermAst, guard: &HashSet<Name>) -> Formula {
    match a {
        Formula::Top | Formula::Bot => a.clone(),
        Formula::Eq(t, u) => Formula::Eq(
            repl_term(t, from, to, guard),
            repl_term(u, from, to, guard),
        ),
        Formula::And(l, r) => Formula::and(
            repl_formula(l, from, to, guard),
            repl_formula(r, from, to, guard),
        ),
        Formula::Or(l, r) => Formula::or(
            repl_formula(l, from, to, guard),
            repl_formula(r, from, to, guard),
        ),
        Formula::ExistsT(x, ty, b) => {
            if guard.contains(x) {
                a.clone()
            } else {
                Formula::ExistsT(x.clone(), ty.clone(), Box::new(repl_formula(b, from, to, guard)))
            }
        }
        Formula::ForallT(x, ty, b) => {
            if guard.contains(x) {
                a.clone()
            } else {
                Formula::ForallT(x.clone(), ty.clone(), Box::new(repl_formula(b, from, to, guard)))
            }
        }
        Formula::DepProd(n, dom, cod) => Formula::DepProd(
            n.clone(),
            Box::new(repl_formula(dom, from, to, guard)),
            Box::new(repl_formula(cod, from, to, guard)),
        ),
        Formula::Nu { index, f, x, body } => {
            let index = repl_term(index, from, to, guard);
            if guard.contains(f) || guard.contains(x) {
                Formula::Nu { index, f: f.clone(), x: x.clone(), body: body.clone() }
            } else {
                Formula::Nu {
                    index,
                    f: f.clone(),
                    x: x.clone(),
                    body: Box::new(repl_formula(body, from, to, guard)),
                }
            }
        }
        Formula::MemP(p, f) => {
            Formula::MemP(p.clone(), Box::new(repl_formula(f, from, to, guard)))
        }
    }
}

fn repl_term(t: &TermAst, from: &TermAst, to: &TermAst, guard: &HashSet<Name>) -> TermAst {
    if crate::subst::alpha_eq_term(t, from) {
        return to.clone();
    }
    match t {
        TermAst::Var(_) | TermAst::Zero | TermAst::Wit(_) => t.clone(),
        TermAst::Succ(u) => TermAst::Succ(Box::new(repl_term(u, from, to, guard))),
        TermAst::App(f, u) => TermAst::App(
            Box::new(repl_term(f, from, to, guard)),
            Box::new(repl_term(u, from, to, guard)),
        ),
        TermAst::Lam(x, b) => {
            if guard.contains(x) {
                t.clone()
            } else {
                TermAst::Lam(x.clone(), Box::new(repl_term(b, from, to, guard)))
            }
        }
        TermAst::Rec { scrut, x, y, base, step } => {
            let scrut = Box::new(repl_term(scrut, from, to, guard));
            let base = Box::new(repl_term(base, from, to, guard));
            if guard.contains(x) || guard.contains(y) {
                TermAst::Rec { scrut, x: x.clone(), y: y.clone(), base, step: step.clone() }
            } else {
                TermAst::Rec {
                    scrut,
                    x: x.clone(),
                    y: y.clone(),
                    base,
                    step: Box::new(repl_term(step, from, to, guard)),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Terms.

/// Synthesize the simple type of a term.
pub fn synth_term(
    env: &Env,
    sigma: &DependencyList,
    t: &TermAst,
) -> Result<(Derivation, TypeExpr), TypeError> {
    match t {
        TermAst::Var(x) => match env.lookup_term(x) {
            Some(ty) => Ok((Derivation::leaf("term-var"), ty.clone())),
            None => Err(TypeError::Unbound { kind: "term variable", name: x.clone() }),
        },
        TermAst::Zero => Ok((Derivation::leaf("term-zero"), TypeExpr::Nat)),
        TermAst::Succ(u) => {
            let d = check_term(env, sigma, u, &TypeExpr::Nat)?;
            Ok((Derivation::node("term-succ", vec![d]), TypeExpr::Nat))
        }
        TermAst::Rec { scrut, x, y, base, step } => {
            let ds = check_term(env, sigma, scrut, &TypeExpr::Nat)?;
            let (db, u_ty) = synth_term(env, sigma, base)?;
            let env2 = env
                .clone()
                .with_term(x.clone(), TypeExpr::Nat)
                .with_term(y.clone(), u_ty.clone());
            let dstep = check_term(&env2, sigma, step, &u_ty)?;
            Ok((Derivation::node("term-rec", vec![ds, db, dstep]), u_ty))
        }
        TermAst::App(f, u) => match synth_term(env, sigma, f) {
            Ok((df, fty)) => match fty {
                TypeExpr::Arrow(dom, cod) => {
                    let du = check_term(env, sigma, u, &dom)?;
                    Ok((Derivation::node("term-app", vec![df, du]), *cod))
                }
                other => Err(TypeError::Mismatch {
                    spot: "the head of an application".to_string(),
                    expected: "a function type".to_string(),
                    found: format!("{other:?}"),
                }),
            },
            Err(orig) => {
                // A β-redex synthesizes through its contraction.
                if let TermAst::Lam(x, body) = &**f {
                    let (du, uty) = synth_term(env, sigma, u)?;
                    let env2 = env.clone().with_term(x.clone(), uty);
                    let (db, bty) = synth_term(&env2, sigma, body)?;
                    Ok((Derivation::node("term-app", vec![du, db]), bty))
                } else {
                    Err(orig)
                }
            }
        },
        TermAst::Lam(..) => Err(TypeError::CannotSynthesize {
            spot: "an unannotated λ-abstraction".to_string(),
        }),
        TermAst::Wit(p) => {
            if !is_nef(p) {
                return Err(TypeError::NefViolation {
                    spot: "the proof under wit".to_string(),
                });
            }
            let (dp, a) = synth_proof(env, sigma, p)?;
            let (_, ty, _) = seek_exists(&a)?;
            Ok((Derivation::node("term-wit", vec![dp]), ty))
        }
    }
}

/// Check a term against a simple type.
pub fn check_term(
    env: &Env,
    sigma: &DependencyList,
    t: &TermAst,
    ty: &TypeExpr,
) -> Result<Derivation, TypeError> {
    if let TermAst::Lam(x, body) = t {
        return match ty {
            TypeExpr::Arrow(dom, cod) => {
                let env2 = env.clone().with_term(x.clone(), (**dom).clone());
                let d = check_term(&env2, sigma, body, cod)?;
                Ok(Derivation::node("term-lam", vec![d]))
            }
            other => Err(TypeError::Mismatch {
                spot: "a λ-abstraction".to_string(),
                expected: "a function type".to_string(),
                found: format!("{other:?}"),
            }),
        };
    }
    let (d, got) = synth_term(env, sigma, t)?;
    if alpha_eq_type(&got, ty) {
        Ok(d)
    } else {
        Err(TypeError::Mismatch {
            spot: "a term".to_string(),
            expected: format!("{ty:?}"),
            found: format!("{got:?}"),
        })
    }
}

// ---------------------------------------------------------------------------
// Proofs.

/// Synthesize a formula for the proofs that determine one: hypotheses,
/// fixpoints carrying a motive, and pairs of synthesizable parts.
pub fn synth_proof(
    env: &Env,
    sigma: &DependencyList,
    p: &ProofAst,
) -> Result<(Derivation, Formula), TypeError> {
    match p {
        ProofAst::Var(a) => match env.lookup_proof(a) {
            Some(f) => Ok((Derivation::leaf("ax-r"), f.clone())),
            None => Err(TypeError::Unbound { kind: "proof variable", name: a.clone() }),
        },
        ProofAst::Pair(l, r) => {
            let (dl, fl) = synth_proof(env, sigma, l)?;
            let (dr, fr) = synth_proof(env, sigma, r)?;
            Ok((Derivation::node("and-r", vec![dl, dr]), Formula::and(fl, fr)))
        }
        ProofAst::Fix { .. } => check_fix(env, sigma, p),
        _ => Err(TypeError::CannotSynthesize {
            spot: "a proof with no synthesizable head".to_string(),
        }),
    }
}

/// Premises of an inductive fixpoint; the conclusion is the motive at the
/// scrutinee, so it both checks and synthesizes.
fn check_fix(
    env: &Env,
    sigma: &DependencyList,
    p: &ProofAst,
) -> Result<(Derivation, Formula), TypeError> {
    let ProofAst::Fix { scrut, base, a, x, step, motive } = p else {
        unreachable!("check_fix is only called on fix nodes");
    };
    let Some(m) = motive else {
        return Err(TypeError::CannotSynthesize {
            spot: "a fix without a motive".to_string(),
        });
    };
    let ds = check_term(env, sigma, scrut, &TypeExpr::Nat)?;
    let base_ty = subst_term_into(m, x, &TermAst::Zero)?;
    let db = check_proof(env, sigma, base, &base_ty)?;
    let step_ty = subst_term_into(m, x, &TermAst::Succ(Box::new(TermAst::Var(x.clone()))))?;
    let env2 = env
        .clone()
        .with_term(x.clone(), TypeExpr::Nat)
        .with_proof(a.clone(), (**m).clone());
    let dstep = check_proof(&env2, sigma, step, &step_ty)?;
    let concl = subst_term_into(m, x, scrut)?;
    Ok((Derivation::node("fix", vec![ds, db, dstep]), concl))
}

/// Check a proof against a formula.
pub fn check_proof(
    env: &Env,
    sigma: &DependencyList,
    p: &ProofAst,
    target: &Formula,
) -> Result<Derivation, TypeError> {
    match p {
        ProofAst::Var(a) => match env.lookup_proof(a) {
            Some(found) => {
                let d = expect_equiv(found, target, &format!("hypothesis {a}"))?;
                Ok(Derivation::node("ax-r", vec![d]))
            }
            None => Err(TypeError::Unbound { kind: "proof variable", name: a.clone() }),
        },
        ProofAst::Inj(i, q) => {
            let (a1, a2) = seek_or(target)?;
            let comp = if *i == 1 { a1 } else { a2 };
            let d = check_proof(env, sigma, q, &comp)?;
            Ok(Derivation::node("or-r", vec![d]))
        }
        ProofAst::Pair(l, r) => {
            let (a1, a2) = seek_and(target)?;
            let dl = check_proof(env, sigma, l, &a1)?;
            let dr = check_proof(env, sigma, r, &a2)?;
            Ok(Derivation::node("and-r", vec![dl, dr]))
        }
        ProofAst::DepPair(t, q) => {
            let (x, ty, body) = seek_exists(target)?;
            let dt = check_term(env, sigma, t, &ty)?;
            let inst = subst_term_into(&body, &x, t)?;
            let dq = check_proof(env, sigma, q, &inst)?;
            Ok(Derivation::node("exists-r", vec![dt, dq]))
        }
        ProofAst::LamT(x, q) => {
            let (y, ty, body) = seek_forall(target)?;
            let body = if y == *x {
                body
            } else {
                subst_term_into(&body, &y, &TermAst::Var(x.clone()))?
            };
            let env2 = env.clone().with_term(x.clone(), ty);
            let d = check_proof(&env2, sigma, q, &body)?;
            Ok(Derivation::node("forall-r", vec![d]))
        }
        ProofAst::LamP(a, q) => {
            let (b, dom, cod) = seek_depprod(target)?;
            let cod = if b == *a {
                cod
            } else {
                subst_proof_into(&cod, &b, &ProofAst::Var(a.clone()))?
            };
            let env2 = env.clone().with_proof(a.clone(), dom);
            let d = check_proof(&env2, sigma, q, &cod)?;
            Ok(Derivation::node("imp-r", vec![d]))
        }
        ProofAst::Refl => {
            let (t, u) = seek_eq(target)?;
            let dt = check_term(env, sigma, &t, &TypeExpr::Nat)?;
            let du = check_term(env, sigma, &u, &TypeExpr::Nat)?;
            if terms_equiv(&t, &u)? {
                Ok(Derivation::node("eq-r", vec![dt, du]))
            } else {
                Err(TypeError::Mismatch {
                    spot: "refl".to_string(),
                    expected: "both sides of the equation to join".to_string(),
                    found: format!("{t:?} vs {u:?}"),
                })
            }
        }
        ProofAst::Fix { .. } => {
            let (d, concl) = check_fix(env, sigma, p)?;
            let de = expect_equiv(&concl, target, "the motive instance of fix")?;
            Ok(Derivation::node("fix", vec![d, de]))
        }
        ProofAst::Cofix { scrut, b, x, body } => {
            let (index, nf, nx, nbody) = seek_nu(target)?;
            let ds = check_term(env, sigma, scrut, &TypeExpr::Nat)?;
            if !terms_equiv(scrut, &index)? {
                return Err(TypeError::Mismatch {
                    spot: "the cofix scrutinee".to_string(),
                    expected: format!("{index:?}"),
                    found: format!("{scrut:?}"),
                });
            }
            if !positivity(&nf, &nbody) {
                return Err(TypeError::PositivityViolation { f: nf });
            }
            // Rename the formula's binders to the node's index variable and
            // a fresh recursion marker.
            let f2 = nf.refresh();
            let mut inst = subst_term_into(&nbody, &nf, &TermAst::Var(f2.clone()))?;
            if nx != *x {
                inst = subst_term_into(&inst, &nx, &TermAst::Var(x.clone()))?;
            }
            let y = fresh("y");
            let b_ty = Formula::forall(
                y.clone(),
                TypeExpr::Nat,
                Formula::Eq(
                    TermAst::App(Box::new(TermAst::Var(f2.clone())), Box::new(TermAst::Var(y))),
                    TermAst::Zero,
                ),
            );
            let env2 = env
                .clone()
                .with_term(f2, TypeExpr::nat_fun(1))
                .with_term(x.clone(), TypeExpr::Nat)
                .with_proof(b.clone(), b_ty);
            let dbody = check_proof(&env2, sigma, body, &inst)?;
            Ok(Derivation::node("cofix", vec![ds, dbody]))
        }
        ProofAst::Mu(alpha, c) => {
            let env2 = env.clone().with_ctx(alpha.clone(), target.clone());
            let d = check_command(&env2, sigma, c)?;
            Ok(Derivation::node("mu", vec![d]))
        }
        ProofAst::MuTp(c) => {
            let env2 = env.clone().with_tp(target.clone());
            let d = check_command_dep(&env2, sigma, c)?;
            Ok(Derivation::node("mu-tp", vec![d]))
        }
        ProofAst::CoTp => Err(TypeError::OutOfScope {
            spot: "tp̌",
            detail: "only legal as the proof side of its own dependent cut",
        }),
    }
}

// ---------------------------------------------------------------------------
// Contexts, regular mode.

/// Synthesize a formula for the contexts that determine one.
pub fn synth_ctx(
    env: &Env,
    _sigma: &DependencyList,
    e: &ContextAst,
) -> Result<(Derivation, Formula), TypeError> {
    match e {
        ContextAst::CoVar(alpha) => match env.lookup_ctx(alpha) {
            Some(f) => Ok((Derivation::leaf("ax-l"), f.clone())),
            None => Err(TypeError::Unbound { kind: "context variable", name: alpha.clone() }),
        },
        ContextAst::Forcing(Forcing::Empty) => {
            Ok((Derivation::leaf("bot-l"), Formula::Bot))
        }
        _ => Err(TypeError::CannotSynthesize {
            spot: "a context with no synthesizable head".to_string(),
        }),
    }
}

/// Check a context against the formula it refutes.
pub fn check_ctx(
    env: &Env,
    sigma: &DependencyList,
    e: &ContextAst,
    target: &Formula,
) -> Result<Derivation, TypeError> {
    match e {
        ContextAst::CoVar(alpha) => match env.lookup_ctx(alpha) {
            Some(found) => {
                let d = expect_equiv(found, target, &format!("context hypothesis {alpha}"))?;
                Ok(Derivation::node("ax-l", vec![d]))
            }
            None => Err(TypeError::Unbound { kind: "context variable", name: alpha.clone() }),
        },
        ContextAst::MuT { a, body, tail } => {
            let env2 = env.clone().with_proof(a.clone(), target.clone());
            let d = check_closure_parts(&env2, sigma, body, tail)?;
            Ok(Derivation::node("mu-tilde", vec![d]))
        }
        ContextAst::Forcing(f) => check_forcing(env, sigma, f, target),
        ContextAst::Tp => Err(TypeError::OutOfScope {
            spot: "tp̂",
            detail: "the delimiter is only legal inside its own dependent scope",
        }),
        ContextAst::CoShift(c) => {
            let env2 = env.clone().with_cotp(target.clone());
            let d = check_command_dep(&env2, sigma, c)?;
            Ok(Derivation::node("co-shift", vec![d]))
        }
    }
}

fn check_forcing(
    env: &Env,
    sigma: &DependencyList,
    f: &Forcing,
    target: &Formula,
) -> Result<Derivation, TypeError> {
    match f {
        Forcing::Empty => {
            seek_bot(target)?;
            Ok(Derivation::leaf("bot-l"))
        }
        Forcing::CaseSum(a1, c1, a2, c2) => {
            let (f1, f2) = seek_or(target)?;
            let env1 = env.clone().with_proof(a1.clone(), f1);
            let d1 = check_command(&env1, sigma, c1)?;
            let env2 = env.clone().with_proof(a2.clone(), f2);
            let d2 = check_command(&env2, sigma, c2)?;
            Ok(Derivation::node("or-l", vec![d1, d2]))
        }
        Forcing::SplitPair(a1, a2, c) => {
            let (f1, f2) = seek_and(target)?;
            let env2 = env.clone().with_proof(a1.clone(), f1).with_proof(a2.clone(), f2);
            let d = check_command(&env2, sigma, c)?;
            Ok(Derivation::node("and-l", vec![d]))
        }
        Forcing::SplitDep(x, a, c) => {
            let (y, ty, body) = seek_exists(target)?;
            let body = if y == *x {
                body
            } else {
                subst_term_into(&body, &y, &TermAst::Var(x.clone()))?
            };
            let env2 = env
                .clone()
                .with_term(x.clone(), ty)
                .with_proof(a.clone(), body);
            let d = check_command(&env2, sigma, c)?;
            Ok(Derivation::node("exists-l", vec![d]))
        }
        Forcing::PushT(t, e2) => {
            let (y, ty, body) = seek_forall(target)?;
            let dt = check_term(env, sigma, t, &ty)?;
            let inst = subst_term_into(&body, &y, t)?;
            let de = check_ctx(env, sigma, e2, &inst)?;
            Ok(Derivation::node("forall-l", vec![dt, de]))
        }
        Forcing::PushP(q, e2) => {
            let (b, dom, cod) = seek_depprod(target)?;
            let dq = check_proof(env, sigma, q, &dom)?;
            if !is_nef(q) && free_names_formula(&cod).contains(&b) {
                return Err(TypeError::NefViolation {
                    spot: "an argument the product's codomain depends on".to_string(),
                });
            }
            let inst = subst_proof_into(&cod, &b, q)?;
            let de = check_ctx(env, sigma, e2, &inst)?;
            Ok(Derivation::node("imp-l", vec![dq, de]))
        }
        Forcing::MuEq(c) => {
            let (t, u) = seek_eq(target)?;
            let Command::CutP { proof, context, ascription } = &**c else {
                return Err(TypeError::OutOfScope {
                    spot: "a term cut",
                    detail: "an equality eliminator encloses a proof cut",
                });
            };
            let (dp, a) = resolve_proof(env, sigma, proof, ascription.as_ref())?;
            let replaced = replace_term_in_formula(&a, &t, &u);
            let de = check_ctx(env, sigma, context, &replaced)?;
            Ok(Derivation::node("eq-l", vec![dp, de]))
        }
    }
}

// ---------------------------------------------------------------------------
// Cut resolution.

fn resolve_proof(
    env: &Env,
    sigma: &DependencyList,
    p: &ProofAst,
    asc: Option<&Formula>,
) -> Result<(Derivation, Formula), TypeError> {
    match asc {
        Some(a) => check_proof(env, sigma, p, a).map(|d| (d, a.clone())),
        None => synth_proof(env, sigma, p),
    }
}

fn resolve_ctx(
    env: &Env,
    sigma: &DependencyList,
    e: &ContextAst,
    asc: Option<&Formula>,
) -> Result<(Derivation, Formula), TypeError> {
    match asc {
        Some(a) => check_ctx(env, sigma, e, a).map(|d| (d, a.clone())),
        None => synth_ctx(env, sigma, e),
    }
}

/// Pick the more informative of two resolution failures.
fn prefer(e1: TypeError, e2: TypeError) -> TypeError {
    match (&e1, &e2) {
        (TypeError::CannotSynthesize { .. }, TypeError::CannotSynthesize { .. }) => e1,
        (TypeError::CannotSynthesize { .. }, _) => e2,
        _ => e1,
    }
}

// ---------------------------------------------------------------------------
// Commands and closures, regular mode.

/// Check a regular command: a proof cut whose sides reconcile through the
/// ambient dependency list.
pub fn check_command(
    env: &Env,
    sigma: &DependencyList,
    c: &Command,
) -> Result<Derivation, TypeError> {
    match c {
        Command::CutP { proof, context, ascription } => {
            if matches!(**proof, ProofAst::CoTp) {
                return Err(TypeError::OutOfScope {
                    spot: "tp̌",
                    detail: "only legal as the proof side of its own dependent cut",
                });
            }
            if matches!(**context, ContextAst::Tp) {
                return Err(TypeError::OutOfScope {
                    spot: "tp̂",
                    detail: "the delimiter is only legal inside its own dependent scope",
                });
            }
            // Resolve the proof side's formula, then the context side's;
            // distinct formulas are legal when the dependency list
            // identifies them.
            let (dp, a) = match resolve_proof(env, sigma, proof, ascription.as_ref()) {
                Ok(got) => got,
                Err(ep) => match synth_ctx(env, sigma, context) {
                    Ok((de, b)) => {
                        let dp = check_proof(env, sigma, proof, &b)
                            .map_err(|e| prefer(e, ep.clone()))?;
                        let ds = Derivation::leaf("sigma-equiv");
                        return Ok(Derivation::node("cut", vec![dp, de, ds]));
                    }
                    Err(ee) => return Err(prefer(ep, ee)),
                },
            };
            match synth_ctx(env, sigma, context) {
                Ok((de, b)) => {
                    let ds = sigma_reconcile(sigma, &a, &b)?;
                    Ok(Derivation::node("cut", vec![dp, de, ds]))
                }
                Err(_) => {
                    let de = check_ctx(env, sigma, context, &a)?;
                    Ok(Derivation::node("cut", vec![dp, de]))
                }
            }
        }
        Command::CutT { .. } => Err(TypeError::OutOfScope {
            spot: "a term cut",
            detail: "term cuts live inside a delimited scope",
        }),
    }
}

/// Check a closure: type the store, then the command under the extended
/// environment and dependency list.
pub fn check_closure(
    env: &Env,
    sigma: &DependencyList,
    cl: &Closure,
) -> Result<Derivation, TypeError> {
    check_closure_parts(env, sigma, &cl.command, &cl.store)
}

fn check_closure_parts(
    env: &Env,
    sigma: &DependencyList,
    cmd: &Command,
    store: &Store,
) -> Result<Derivation, TypeError> {
    let (dstore, ext_env, ext_sigma) = check_store(env, sigma, store)?;
    let env2 = env.extended(&ext_env);
    let sigma2 = sigma.extended(&ext_sigma);
    let dc = check_command(&env2, &sigma2, cmd)?;
    Ok(Derivation::node("closure", vec![dstore, dc]))
}

/// Type a store against the current environment. Returns the hypothesis
/// extension and the dependency entries its proof bindings contribute.
pub fn check_store(
    env: &Env,
    sigma: &DependencyList,
    store: &Store,
) -> Result<(Derivation, Env, DependencyList), TypeError> {
    let mut env_acc = env.clone();
    let mut sigma_acc = sigma.clone();
    let mut ext_env = Env::new();
    let mut ext_sigma = DependencyList::new();
    let mut premises = Vec::new();
    for binding in store.bindings() {
        match binding {
            Binding::Proof { name, storable, ascription } => {
                let p = storable.as_proof();
                let (d, a) = resolve_proof(&env_acc, &sigma_acc, &p, ascription.as_ref())
                    .map_err(|e| {
                        prefer(
                            e,
                            TypeError::CannotSynthesize {
                                spot: format!("the store binding for {name}"),
                            },
                        )
                    })?;
                premises.push(Derivation::node("store-proof", vec![d]));
                env_acc.push_proof(name.clone(), a.clone());
                ext_env.push_proof(name.clone(), a);
                let entry = DepEntry::Proof(DepPattern::PVar(name.clone()), p);
                sigma_acc.push(entry.clone());
                ext_sigma.push(entry);
            }
            Binding::Ctx { name, ctx, ascription } => {
                let (d, a) = resolve_ctx(&env_acc, &sigma_acc, ctx, ascription.as_ref())
                    .map_err(|e| {
                        prefer(
                            e,
                            TypeError::CannotSynthesize {
                                spot: format!("the store binding for {name}"),
                            },
                        )
                    })?;
                premises.push(Derivation::node("store-ctx", vec![d]));
                env_acc.push_ctx(name.clone(), a.clone());
                ext_env.push_ctx(name.clone(), a);
            }
        }
    }
    Ok((Derivation::node("store", premises), ext_env, ext_sigma))
}

// ---------------------------------------------------------------------------
// Dependent mode.

fn require_delim(env: &Env) -> Result<(Formula, bool), TypeError> {
    env.active_delim()
        .map(|(f, co)| (f.clone(), co))
        .ok_or(TypeError::OutOfScope {
            spot: "the dependent judgment",
            detail: "no tp̂ or tp̌ hypothesis is in scope",
        })
}

/// Check the body of a delimited continuation. The final cut of the spine
/// lands on `tp̂` (or starts from `tp̌`); every other cut appends a hole the
/// next binder fills.
pub fn check_command_dep(
    env: &Env,
    sigma: &DependencyList,
    c: &Command,
) -> Result<Derivation, TypeError> {
    let (delim_ty, co) = require_delim(env)?;
    match c {
        Command::CutP { proof, context, ascription }
            if matches!(**proof, ProofAst::CoTp) =>
        {
            if !co {
                return Err(TypeError::OutOfScope {
                    spot: "tp̌",
                    detail: "no co-delimiter is in scope",
                });
            }
            let inner = env.without_active_delim();
            let (de, b) = match resolve_ctx(&inner, sigma, context, ascription.as_ref()) {
                Ok(got) => got,
                Err(_) => {
                    let d = check_ctx(&inner, sigma, context, &delim_ty)?;
                    (d, delim_ty.clone())
                }
            };
            let ds = sigma_reconcile(sigma, &delim_ty, &b)?;
            Ok(Derivation::node("cotp-consume", vec![de, ds]))
        }
        Command::CutP { proof, context, ascription }
            if matches!(**context, ContextAst::Tp) =>
        {
            if co {
                return Err(TypeError::OutOfScope {
                    spot: "tp̂",
                    detail: "the active delimiter is a co-delimiter",
                });
            }
            let inner = env.without_active_delim();
            let (dp, a) = match resolve_proof(&inner, sigma, proof, ascription.as_ref()) {
                Ok(got) => got,
                Err(_) => {
                    let d = check_proof(&inner, sigma, proof, &delim_ty)?;
                    (d, delim_ty.clone())
                }
            };
            let ds = sigma_reconcile(sigma, &a, &delim_ty)?;
            Ok(Derivation::node("tp-consume", vec![dp, ds]))
        }
        Command::CutP { proof, context, ascription } => {
            if !is_nef(proof) {
                return Err(TypeError::NefViolation {
                    spot: "the proof of a dependent cut that continues past the delimiter"
                        .to_string(),
                });
            }
            let inner = env.without_active_delim();
            let (dp, a) = resolve_proof(&inner, sigma, proof, ascription.as_ref())?;
            let sigma2 = sigma.with_hole((**proof).clone());
            let de = check_ctx_dep(env, &sigma2, context, &a)?;
            Ok(Derivation::node("cut-dep", vec![dp, de]))
        }
        Command::CutT { term, coterm, ascription } => {
            let inner = env.without_active_delim();
            let (dt, ty) = match ascription {
                Some(ty) => (check_term(&inner, sigma, term, ty)?, ty.clone()),
                None => synth_term(&inner, sigma, term)?,
            };
            let sigma2 = sigma.with_term_hole((**term).clone());
            let dpi = check_coterm_dep(env, &sigma2, coterm, &ty)?;
            Ok(Derivation::node("cut-term", vec![dt, dpi]))
        }
    }
}

/// Check a dependent continuation against the cut formula; the dependency
/// list ends in the hole the continuation's binder fills.
fn check_ctx_dep(
    env: &Env,
    sigma: &DependencyList,
    e: &ContextAst,
    target: &Formula,
) -> Result<Derivation, TypeError> {
    match e {
        ContextAst::MuT { a, body, tail } => {
            let sigma2 = sigma
                .fill_hole(DepPattern::PVar(a.clone()))
                .expect("a dependent cut pushes its hole before descending");
            let env2 = env.clone().with_proof(a.clone(), target.clone());
            let d = check_closure_dep_parts(&env2, &sigma2, body, tail)?;
            Ok(Derivation::node("mu-tilde-dep", vec![d]))
        }
        ContextAst::Forcing(Forcing::CaseSum(a1, c1, a2, c2)) => {
            let (f1, f2) = seek_or(target)?;
            let s1 = sigma
                .fill_hole(DepPattern::InjPat(1, a1.clone()))
                .expect("a dependent cut pushes its hole before descending");
            let env1 = env.clone().with_proof(a1.clone(), f1);
            let d1 = check_command_dep(&env1, &s1, c1)?;
            let s2 = sigma
                .fill_hole(DepPattern::InjPat(2, a2.clone()))
                .expect("a dependent cut pushes its hole before descending");
            let env2 = env.clone().with_proof(a2.clone(), f2);
            let d2 = check_command_dep(&env2, &s2, c2)?;
            Ok(Derivation::node("or-l-dep", vec![d1, d2]))
        }
        ContextAst::Forcing(Forcing::SplitPair(a1, a2, c)) => {
            let (f1, f2) = seek_and(target)?;
            let sigma2 = sigma
                .fill_hole(DepPattern::PairPat(a1.clone(), a2.clone()))
                .expect("a dependent cut pushes its hole before descending");
            let env2 = env
                .clone()
                .with_proof(a1.clone(), f1)
                .with_proof(a2.clone(), f2);
            let d = check_command_dep(&env2, &sigma2, c)?;
            Ok(Derivation::node("and-l-dep", vec![d]))
        }
        ContextAst::Forcing(Forcing::SplitDep(x, a, c)) => {
            let (y, ty, body) = seek_exists(target)?;
            let body = if y == *x {
                body
            } else {
                subst_term_into(&body, &y, &TermAst::Var(x.clone()))?
            };
            let sigma2 = sigma
                .fill_hole(DepPattern::DepPairPat(x.clone(), a.clone()))
                .expect("a dependent cut pushes its hole before descending");
            let env2 = env
                .clone()
                .with_term(x.clone(), ty)
                .with_proof(a.clone(), body);
            let d = check_command_dep(&env2, &sigma2, c)?;
            Ok(Derivation::node("exists-l-dep", vec![d]))
        }
        _ => Err(TypeError::OutOfScope {
            spot: "this context",
            detail: "not a dependent continuation shape",
        }),
    }
}

/// Check a term-side continuation; the dependency list ends in a term hole.
fn check_coterm_dep(
    env: &Env,
    sigma: &DependencyList,
    pi: &CoTermAst,
    ty: &TypeExpr,
) -> Result<Derivation, TypeError> {
    match pi {
        CoTermAst::MuX { x, body, tail } => {
            let sigma2 = sigma
                .fill_term_hole(x.clone())
                .expect("a term cut pushes its hole before descending");
            let env2 = env.clone().with_term(x.clone(), ty.clone());
            let d = check_closure_dep_parts(&env2, &sigma2, body, tail)?;
            Ok(Derivation::node("mu-x-dep", vec![d]))
        }
        CoTermAst::PushTerm(u, pi2) => match ty {
            TypeExpr::Arrow(dom, cod) => {
                let inner = env.without_active_delim();
                let du = check_term(&inner, sigma, u, dom)?;
                let arg = (**u).clone();
                let sigma2 = sigma
                    .map_term_hole(|s| TermAst::App(Box::new(s), Box::new(arg)))
                    .expect("a term cut pushes its hole before descending");
                let d = check_coterm_dep(env, &sigma2, pi2, cod)?;
                Ok(Derivation::node("push-term-dep", vec![du, d]))
            }
            other => Err(TypeError::Mismatch {
                spot: "a term-argument push".to_string(),
                expected: "a function type".to_string(),
                found: format!("{other:?}"),
            }),
        },
    }
}

/// Check a dependent closure: the store is typed regularly, the command
/// continues in dependent mode.
pub fn check_closure_dep(
    env: &Env,
    sigma: &DependencyList,
    cl: &Closure,
) -> Result<Derivation, TypeError> {
    check_closure_dep_parts(env, sigma, &cl.command, &cl.store)
}

fn check_closure_dep_parts(
    env: &Env,
    sigma: &DependencyList,
    cmd: &Command,
    store: &Store,
) -> Result<Derivation, TypeError> {
    let (dstore, ext_env, ext_sigma) = check_store(env, sigma, store)?;
    let env2 = env.extended(&ext_env);
    let sigma2 = sigma.extended(&ext_sigma);
    let dc = check_command_dep(&env2, &sigma2, cmd)?;
    Ok(Derivation::node("closure", vec![dstore, dc]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Storable;
    use crate::name::fresh;

    fn nat() -> TypeExpr {
        TypeExpr::Nat
    }

    fn num(n: u64) -> TermAst {
        TermAst::numeral(n)
    }

    fn eq00() -> Formula {
        Formula::eq(TermAst::Zero, TermAst::Zero)
    }

    fn check_p(env: &Env, p: &ProofAst, a: &Formula) -> Result<Derivation, TypeError> {
        check_proof(env, &DependencyList::new(), p, a)
    }

    #[test]
    fn refl_accepts_reflexive_equations_only() {
        let env = Env::new();
        let ok = check_p(&env, &ProofAst::Refl, &Formula::eq(num(2), num(2)));
        assert!(ok.unwrap().uses_rule("eq-r"));
        // Joinable but not syntactically equal sides are fine.
        let red = TermAst::App(
            Box::new(TermAst::Lam(fresh("z"), Box::new(num(2)))),
            Box::new(TermAst::Zero),
        );
        assert!(check_p(&env, &ProofAst::Refl, &Formula::eq(red, num(2))).is_ok());
        let bad = check_p(&env, &ProofAst::Refl, &Formula::eq(num(0), num(1)));
        assert!(matches!(bad, Err(TypeError::Mismatch { .. })));
    }

    #[test]
    fn catch_and_throw_type_the_interrupted_witness() {
        // μα.⟨(0, μδ.⟨(S0, refl)‖α⟩)‖α⟩ : ∃x.x = S(0), the classical proof
        // that backtracks to a corrected witness.
        let alpha = fresh("alpha");
        let delta = fresh("delta");
        let xf = fresh("x");
        let goal = Formula::exists(
            xf.clone(),
            nat(),
            Formula::eq(TermAst::Var(xf), num(1)),
        );
        let inner = ProofAst::DepPair(
            Box::new(num(1)),
            Box::new(ProofAst::Refl),
        );
        let throw = ProofAst::Mu(
            delta,
            Box::new(Command::cut(inner, ContextAst::CoVar(alpha.clone()))),
        );
        let p0 = ProofAst::Mu(
            alpha.clone(),
            Box::new(Command::cut(
                ProofAst::DepPair(Box::new(TermAst::Zero), Box::new(throw)),
                ContextAst::CoVar(alpha),
            )),
        );
        let env = Env::new();
        assert!(check_p(&env, &p0, &goal).is_ok());

        // Its witness is not extractable: wit p0 is rejected.
        let wit = TermAst::Wit(Box::new(p0.clone()));
        let got = synth_term(&env, &DependencyList::new(), &wit);
        assert!(matches!(got, Err(TypeError::NefViolation { .. })));

        // Nor is its proof projection: the dependent cut refuses a non-NEF
        // scrutinee.
        let xs = fresh("xs");
        let as_ = fresh("as");
        let prf_shape = ProofAst::MuTp(Box::new(Command::CutP {
            proof: Box::new(p0),
            context: Box::new(ContextAst::Forcing(Forcing::SplitDep(
                xs.clone(),
                as_.clone(),
                Box::new(Command::cut(ProofAst::Var(as_), ContextAst::Tp)),
            ))),
            ascription: Some(goal),
        }));
        let got = check_p(&env, &prf_shape, &Formula::eq(num(0), num(1)));
        assert!(matches!(got, Err(TypeError::NefViolation { .. })));
    }

    #[test]
    fn dependent_witness_flows_through_the_projection() {
        // μtp̂.⟨(0, refl)‖μ̃(x,a).⟨a‖tp̂⟩⟩ : 0 = 0, the proof projection of a
        // NEF existential.
        let xf = fresh("x");
        let goal = Formula::exists(
            xf.clone(),
            nat(),
            Formula::eq(TermAst::Var(xf), TermAst::Zero),
        );
        let q = ProofAst::DepPair(Box::new(TermAst::Zero), Box::new(ProofAst::Refl));
        let xs = fresh("xs");
        let as_ = fresh("as");
        let prf = ProofAst::MuTp(Box::new(Command::CutP {
            proof: Box::new(q),
            context: Box::new(ContextAst::Forcing(Forcing::SplitDep(
                xs.clone(),
                as_.clone(),
                Box::new(Command::cut(ProofAst::Var(as_), ContextAst::Tp)),
            ))),
            ascription: Some(goal),
        }));
        let env = Env::new();
        let d = check_p(&env, &prf, &eq00()).unwrap();
        assert!(d.uses_rule("exists-l-dep"));
        assert!(d.uses_rule("tp-consume"));
    }

    #[test]
    fn cut_reconciles_sides_through_the_dependency_list() {
        let x = fresh("x");
        let a = fresh("a");
        let alpha = fresh("alpha");
        let env = Env::new()
            .with_term(x.clone(), nat())
            .with_proof(a.clone(), Formula::eq(TermAst::Var(x.clone()), TermAst::Var(x.clone())))
            .with_ctx(alpha.clone(), Formula::eq(TermAst::Var(x.clone()), TermAst::Zero));
        let cmd = Command::cut(ProofAst::Var(a), ContextAst::CoVar(alpha));
        let sigma =
            DependencyList::new().with_entry(DepEntry::TermBind(x, TermAst::Zero));
        assert!(check_command(&env, &sigma, &cmd).is_ok());
        let bare = check_command(&env, &DependencyList::new(), &cmd);
        assert!(matches!(bare, Err(TypeError::DependencyMismatch { .. })));
    }

    #[test]
    fn fix_synthesizes_its_motive_instance() {
        let x = fresh("x");
        let a = fresh("a");
        let motive = Formula::eq(TermAst::Var(x.clone()), TermAst::Var(x.clone()));
        let fix = ProofAst::Fix {
            scrut: Box::new(num(2)),
            base: Box::new(ProofAst::Refl),
            a,
            x,
            step: Box::new(ProofAst::Refl),
            motive: Some(Box::new(motive)),
        };
        let env = Env::new();
        let (d, concl) = synth_proof(&env, &DependencyList::new(), &fix).unwrap();
        assert!(d.uses_rule("fix"));
        assert!(crate::subst::alpha_eq_formula(&concl, &Formula::eq(num(2), num(2))));
        assert!(check_p(&env, &fix, &Formula::eq(num(2), num(2))).is_ok());
    }

    #[test]
    fn cofix_demands_a_positive_body() {
        let f = fresh("f");
        let xn = fresh("xn");
        let self_call = Formula::Eq(
            TermAst::App(
                Box::new(TermAst::Var(f.clone())),
                Box::new(TermAst::Succ(Box::new(TermAst::Var(xn.clone())))),
            ),
            TermAst::Zero,
        );
        let nu_pos = Formula::nu(TermAst::Zero, f.clone(), xn.clone(), self_call.clone());
        let b = fresh("b");
        let xc = fresh("xc");
        let al = fresh("al");
        // The body calls the recursive hypothesis at S(x).
        let body = ProofAst::Mu(
            al.clone(),
            Box::new(Command::cut(
                ProofAst::Var(b.clone()),
                ContextAst::Forcing(Forcing::PushT(
                    Box::new(TermAst::Succ(Box::new(TermAst::Var(xc.clone())))),
                    Box::new(ContextAst::CoVar(al)),
                )),
            )),
        );
        let cofix = ProofAst::Cofix {
            scrut: Box::new(TermAst::Zero),
            b,
            x: xc,
            body: Box::new(body),
        };
        let env = Env::new();
        assert!(check_p(&env, &cofix, &nu_pos).unwrap().uses_rule("cofix"));

        let nu_neg = Formula::nu(
            TermAst::Zero,
            f.clone(),
            xn,
            Formula::dep_prod(fresh("d"), self_call, Formula::Bot),
        );
        let got = check_p(&env, &cofix, &nu_neg);
        assert!(matches!(got, Err(TypeError::PositivityViolation { .. })));
    }

    #[test]
    fn product_elimination_guards_dependent_codomains() {
        let beta = fresh("beta");
        let a = fresh("a");
        // A classical argument: μg.⟨refl‖δ⟩ throws to a foreign
        // covariable, so it leaves the NEF fragment.
        let g = fresh("g");
        let delta = fresh("delta");
        let classical = ProofAst::Mu(
            g,
            Box::new(Command::cut(ProofAst::Refl, ContextAst::CoVar(delta.clone()))),
        );
        assert!(!is_nef(&classical));

        // Independent codomain: fine.
        let env = Env::new()
            .with_ctx(beta.clone(), eq00())
            .with_ctx(delta, eq00());
        let plain = Formula::dep_prod(a.clone(), eq00(), eq00());
        let push = ContextAst::Forcing(Forcing::PushP(
            Box::new(classical.clone()),
            Box::new(ContextAst::CoVar(beta.clone())),
        ));
        assert!(check_ctx(&env, &DependencyList::new(), &push, &plain).is_ok());

        // Dependent codomain: the same argument is refused.
        let dependent = Formula::dep_prod(
            a.clone(),
            eq00(),
            Formula::MemP(Box::new(ProofAst::Var(a)), Box::new(Formula::Top)),
        );
        let got = check_ctx(&env, &DependencyList::new(), &push, &dependent);
        assert!(matches!(got, Err(TypeError::NefViolation { .. })));
    }

    #[test]
    fn equality_elimination_replaces_occurrences() {
        // μ̃=.⟨a‖β⟩ : (x = 0)⊥⊥ rewrites x into 0 in the continuation's
        // input.
        let xv = fresh("xv");
        let a = fresh("a");
        let beta = fresh("beta");
        let env = Env::new()
            .with_term(xv.clone(), nat())
            .with_proof(a.clone(), Formula::eq(TermAst::Var(xv.clone()), TermAst::Zero))
            .with_ctx(beta.clone(), eq00());
        let mueq = ContextAst::Forcing(Forcing::MuEq(Box::new(Command::cut(
            ProofAst::Var(a),
            ContextAst::CoVar(beta),
        ))));
        let target = Formula::eq(TermAst::Var(xv), TermAst::Zero);
        let d = check_ctx(&env, &DependencyList::new(), &mueq, &target).unwrap();
        assert!(d.uses_rule("eq-l"));
    }

    #[test]
    fn term_cuts_check_under_the_delimiter_only() {
        let y = fresh("y");
        let xm = fresh("xm");
        let redex = TermAst::App(
            Box::new(TermAst::Lam(y.clone(), Box::new(TermAst::Var(y)))),
            Box::new(TermAst::Zero),
        );
        let inner = Command::cut_ascribed(
            ProofAst::Refl,
            ContextAst::Tp,
            Formula::eq(TermAst::Var(xm.clone()), TermAst::Var(xm.clone())),
        );
        let cut = Command::CutT {
            term: Box::new(redex.clone()),
            coterm: Box::new(CoTermAst::mu_x(xm, inner)),
            ascription: Some(nat()),
        };
        let env = Env::new();
        // At top level the term cut is out of scope.
        let bare = check_command(&env, &DependencyList::new(), &cut);
        assert!(matches!(bare, Err(TypeError::OutOfScope { .. })));
        // Behind the delimiter it types, and the bound term flows into the
        // final comparison.
        let delimited = ProofAst::MuTp(Box::new(cut));
        let d = check_p(&env, &delimited, &eq00()).unwrap();
        assert!(d.uses_rule("cut-term"));
        assert!(d.uses_rule("mu-x-dep"));
        let wrong = check_p(&env, &delimited, &Formula::eq(num(0), num(1)));
        assert!(matches!(wrong, Err(TypeError::DependencyMismatch { .. })));
    }

    #[test]
    fn pushed_arguments_compose_into_the_term_hole() {
        // μtp̂.⟨g‖0·μ̃x.⟨refl‖tp̂⟩⟩ : g(0) = g(0) for g : ℕ → ℕ.
        let gv = fresh("g");
        let xm = fresh("xm");
        let inner = Command::cut_ascribed(
            ProofAst::Refl,
            ContextAst::Tp,
            Formula::eq(TermAst::Var(xm.clone()), TermAst::Var(xm.clone())),
        );
        let cut = Command::CutT {
            term: Box::new(TermAst::Var(gv.clone())),
            coterm: Box::new(CoTermAst::PushTerm(
                Box::new(TermAst::Zero),
                Box::new(CoTermAst::mu_x(xm, inner)),
            )),
            ascription: None,
        };
        let g0 = TermAst::App(Box::new(TermAst::Var(gv.clone())), Box::new(TermAst::Zero));
        let env = Env::new().with_term(gv, TypeExpr::nat_fun(1));
        let d = check_p(
            &env,
            &ProofAst::MuTp(Box::new(cut)),
            &Formula::eq(g0.clone(), g0),
        )
        .unwrap();
        assert!(d.uses_rule("push-term-dep"));
    }

    #[test]
    fn stores_type_their_bindings_in_order() {
        let al = fresh("al");
        let a = fresh("a");
        let beta = fresh("beta");
        let env = Env::new().with_ctx(al.clone(), eq00());
        let mut store = Store::empty();
        store.bind_proof(a.clone(), ProofAst::Refl, Some(eq00())).unwrap();
        store.bind_ctx(beta.clone(), ContextAst::CoVar(al), Some(eq00()));
        let cl = Closure::new(
            Command::cut(ProofAst::Var(a), ContextAst::CoVar(beta)),
            store,
        );
        let d = check_closure(&env, &DependencyList::new(), &cl).unwrap();
        assert!(d.uses_rule("store-proof"));
        assert!(d.uses_rule("store-ctx"));

        let dangling = Closure::from_command(Command::cut(
            ProofAst::Var(fresh("nope")),
            ContextAst::Forcing(Forcing::Empty),
        ));
        let got = check_closure(&env, &DependencyList::new(), &dangling);
        assert!(matches!(got, Err(TypeError::Unbound { .. })));
    }

    #[test]
    fn dependent_mode_needs_a_delimiter_hypothesis() {
        let env = Env::new();
        let cmd = Command::cut(ProofAst::Refl, ContextAst::Tp);
        let got = dlpaw_typecheck(
            &env,
            &DependencyList::new(),
            &Subject::Command(cmd),
            &JudgmentForm::Valid,
            Mode::Dependent,
        );
        assert!(matches!(got, Err(TypeError::OutOfScope { .. })));
    }

    #[test]
    fn co_delimited_contexts_check_their_final_cut_regularly() {
        // μ̃tp̌.⟨(0, tp̌-fed value)…⟩ is exercised through the machine's
        // co-shift: μ̃tp̌.⟨tp̌‖e⟩ with e a covariable of an equivalent type.
        let alpha = fresh("alpha");
        let env = Env::new().with_ctx(alpha.clone(), eq00());
        let co = ContextAst::CoShift(Box::new(Command::cut(
            ProofAst::CoTp,
            ContextAst::CoVar(alpha),
        )));
        let d = check_ctx(&env, &DependencyList::new(), &co, &eq00()).unwrap();
        assert!(d.uses_rule("cotp-consume"));
        // The plain delimiter constant is rejected outside its scope.
        let got = check_command(
            &env,
            &DependencyList::new(),
            &Command::cut(ProofAst::CoTp, ContextAst::Forcing(Forcing::Empty)),
        );
        assert!(matches!(got, Err(TypeError::OutOfScope { .. })));
    }

    #[test]
    fn case_split_fills_the_hole_per_branch() {
        // μtp̂.⟨ι₁(refl)‖μ̃[a₁.⟨refl‖tp̂⟩ | a₂.⟨refl‖tp̂⟩]⟩ : 0 = 0.
        let a1 = fresh("a1");
        let a2 = fresh("a2");
        let disj = Formula::or(eq00(), eq00());
        let body = ProofAst::MuTp(Box::new(Command::CutP {
            proof: Box::new(ProofAst::Inj(1, Box::new(ProofAst::Refl))),
            context: Box::new(ContextAst::Forcing(Forcing::CaseSum(
                a1,
                Box::new(Command::cut(ProofAst::Refl, ContextAst::Tp)),
                a2,
                Box::new(Command::cut(ProofAst::Refl, ContextAst::Tp)),
            ))),
            ascription: Some(disj),
        }));
        let env = Env::new();
        let d = check_p(&env, &body, &eq00()).unwrap();
        assert!(d.uses_rule("or-l-dep"));
    }

    #[test]
    fn stored_fixpoints_check_against_their_motive_ascription() {
        let x = fresh("x");
        let a = fresh("a");
        let n = fresh("n");
        let alpha = fresh("alpha");
        let motive = Formula::eq(TermAst::Var(x.clone()), TermAst::Var(x.clone()));
        let mut store = Store::empty();
        store.bind_storable(
            n.clone(),
            Storable::FixThunk {
                scrut: num(1),
                base: ProofAst::Refl,
                a,
                x,
                step: ProofAst::Refl,
                motive: Some(Box::new(motive)),
            },
            Some(Formula::eq(num(1), num(1))),
        );
        let env = Env::new().with_ctx(alpha.clone(), Formula::eq(num(1), num(1)));
        let cl = Closure::new(
            Command::cut(ProofAst::Var(n), ContextAst::CoVar(alpha)),
            store,
        );
        assert!(check_closure(&env, &DependencyList::new(), &cl).is_ok());
    }
}
