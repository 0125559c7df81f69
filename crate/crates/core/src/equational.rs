//! The equational theory on terms and formulas: single-step reduction,
//! bounded joinability, and the positivity check for coinductive bodies.
//!
//! Stepping is deterministic. A step is, in priority order: a term redex
//! (β, recursor, witness extraction), an equality simplification, a proof
//! run inside a membership atom, and only when nothing else applies, the
//! unfolding of the leftmost outermost coinductive formula.

use crate::ast::{Command, ContextAst, ProofAst, Storable, Store, TermAst};
use crate::formula::{Formula, TypeExpr};
use crate::name::{fresh, Name};
use crate::nef::is_nef;
use crate::subst::{
    alpha_eq_formula, alpha_eq_proof, free_names_term, subst_formula, subst_proof, subst_term,
    Replacement,
};

/// Default fuel for [`formula_equiv`].
pub const DEFAULT_EQUIV_FUEL: u64 = 512;

/// Fuel for machine probes spawned while reducing `wit p` or a membership
/// atom.
pub const PROBE_FUEL: u64 = 4096;

/// The bounded comparison gave up before reaching comparable forms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("equational comparison gave up after {fuel} steps per side")]
pub struct FuelExhausted {
    pub fuel: u64,
}

/// One step of term reduction under a store. The store feeds witness
/// extraction, which runs the proof in the machine against a probe
/// covariable.
pub fn term_step(t: &TermAst, store: &Store) -> Option<TermAst> {
    match t {
        TermAst::Var(_) | TermAst::Zero | TermAst::Lam(..) => None,
        TermAst::Succ(u) => term_step(u, store).map(|u2| TermAst::Succ(Box::new(u2))),
        TermAst::App(f, u) => {
            if let Some(f2) = term_step(f, store) {
                return Some(TermAst::App(Box::new(f2), u.clone()));
            }
            if let Some(u2) = term_step(u, store) {
                return Some(TermAst::App(f.clone(), Box::new(u2)));
            }
            match &**f {
                TermAst::Lam(x, body) if u.is_value() => {
                    Some(subst_term(body, x, &Replacement::Term((**u).clone())).ok()?)
                }
                _ => None,
            }
        }
        TermAst::Rec { scrut, x, y, base, step } => {
            if let Some(s2) = term_step(scrut, store) {
                return Some(TermAst::Rec {
                    scrut: Box::new(s2),
                    x: x.clone(),
                    y: y.clone(),
                    base: base.clone(),
                    step: step.clone(),
                });
            }
            match &**scrut {
                TermAst::Zero => Some((**base).clone()),
                TermAst::Succ(u) if scrut.is_value() => {
                    let rec_u = TermAst::Rec {
                        scrut: u.clone(),
                        x: x.clone(),
                        y: y.clone(),
                        base: base.clone(),
                        step: step.clone(),
                    };
                    let step1 = subst_term(step, x, &Replacement::Term((**u).clone())).ok()?;
                    Some(subst_term(&step1, y, &Replacement::Term(rec_u)).ok()?)
                }
                _ => None,
            }
        }
        TermAst::Wit(p) => wit_probe(p, store),
    }
}

/// Extract the witness of a NEF existential proof by running it against a
/// probe covariable. Accepts only witnesses whose free names survive in the
/// ambient store.
fn wit_probe(p: &ProofAst, store: &Store) -> Option<TermAst> {
    if !is_nef(p) {
        return None;
    }
    let alpha = fresh("probe");
    let cmd = Command::cut((*p).clone(), ContextAst::CoVar(alpha.clone()));
    let final_closure =
        crate::dlpaw::machine::run_for_probe(cmd, store.clone(), PROBE_FUEL)?;
    match &final_closure.command {
        Command::CutP { proof, context, .. } => match (&**proof, &**context) {
            (ProofAst::DepPair(t, _), ContextAst::CoVar(beta))
                if *beta == alpha && t.is_value() =>
            {
                let ambient: std::collections::HashSet<_> =
                    store.domain().into_iter().collect();
                if free_names_term(t).iter().all(|n| ambient.contains(n)) {
                    Some((**t).clone())
                } else {
                    None
                }
            }
            _ => None,
        },
        _ => None,
    }
}

/// Run a NEF proof to a value against a probe covariable and read the value
/// back through the final store. `None` when the proof is already as
/// reduced as we can observe.
fn proof_run_step(p: &ProofAst) -> Option<ProofAst> {
    if !is_nef(p) || p.is_value() {
        return None;
    }
    let alpha = fresh("probe");
    let cmd = Command::cut(p.clone(), ContextAst::CoVar(alpha.clone()));
    let final_closure = crate::dlpaw::machine::run_for_probe(cmd, Store::empty(), PROBE_FUEL)?;
    match &final_closure.command {
        Command::CutP { proof, context, .. } => match (&**proof, &**context) {
            (v, ContextAst::CoVar(beta)) if *beta == alpha && v.is_value() => {
                let flat = read_back(v, &final_closure.store)?;
                if alpha_eq_proof(&flat, p) {
                    None
                } else {
                    Some(flat)
                }
            }
            _ => None,
        },
        _ => None,
    }
}

/// Substitute stored values for the store-bound free names of a value.
/// Fails when the value depends on a lazily stored fixpoint.
fn read_back(v: &ProofAst, store: &Store) -> Option<ProofAst> {
    let mut out = v.clone();
    loop {
        let free = crate::subst::free_names_proof(&out);
        let mut changed = false;
        for n in free {
            match store.lookup_proof(&n) {
                Some(Storable::Val(w)) => {
                    out = subst_proof(&out, &n, &Replacement::Proof(w.clone())).ok()?;
                    changed = true;
                }
                Some(_) => return None,
                None => {
                    if store.lookup_ctx(&n).is_some() {
                        return None;
                    }
                }
            }
        }
        if !changed {
            return Some(out);
        }
    }
}

/// One deterministic step of the formula reduction relation, or `None` when
/// the formula is normal (coinductive unfolding counts as a step and fires
/// only when nothing else does).
pub fn formula_step(a: &Formula) -> Option<Formula> {
    if let Some(a2) = formula_step_no_unfold(a) {
        return Some(a2);
    }
    nu_unfold_leftmost(a)
}

fn type_step(t: &TypeExpr) -> Option<TypeExpr> {
    match t {
        TypeExpr::Nat => None,
        TypeExpr::Arrow(a, b) => {
            if let Some(a2) = type_step(a) {
                return Some(TypeExpr::Arrow(Box::new(a2), b.clone()));
            }
            type_step(b).map(|b2| TypeExpr::Arrow(a.clone(), Box::new(b2)))
        }
        TypeExpr::MemT(u, ty) => {
            if let Some(u2) = term_step(u, &Store::empty()) {
                return Some(TypeExpr::MemT(u2, ty.clone()));
            }
            type_step(ty).map(|ty2| TypeExpr::MemT(u.clone(), Box::new(ty2)))
        }
    }
}

fn formula_step_no_unfold(a: &Formula) -> Option<Formula> {
    match a {
        Formula::Top | Formula::Bot => None,
        Formula::Eq(t, u) => {
            if let Some(t2) = term_step(t, &Store::empty()) {
                return Some(Formula::Eq(t2, u.clone()));
            }
            if let Some(u2) = term_step(u, &Store::empty()) {
                return Some(Formula::Eq(t.clone(), u2));
            }
            match (t, u) {
                (TermAst::Zero, TermAst::Succ(_)) => Some(Formula::Bot),
                (TermAst::Succ(_), TermAst::Zero) => Some(Formula::Bot),
                (TermAst::Succ(t2), TermAst::Succ(u2)) => {
                    Some(Formula::Eq((**t2).clone(), (**u2).clone()))
                }
                _ => None,
            }
        }
        Formula::And(l, r) => {
            if let Some(l2) = formula_step_no_unfold(l) {
                return Some(Formula::And(Box::new(l2), r.clone()));
            }
            formula_step_no_unfold(r).map(|r2| Formula::And(l.clone(), Box::new(r2)))
        }
        Formula::Or(l, r) => {
            if let Some(l2) = formula_step_no_unfold(l) {
                return Some(Formula::Or(Box::new(l2), r.clone()));
            }
            formula_step_no_unfold(r).map(|r2| Formula::Or(l.clone(), Box::new(r2)))
        }
        Formula::ExistsT(x, ty, body) => {
            if let Some(ty2) = type_step(ty) {
                return Some(Formula::ExistsT(x.clone(), ty2, body.clone()));
            }
            formula_step_no_unfold(body)
                .map(|b2| Formula::ExistsT(x.clone(), ty.clone(), Box::new(b2)))
        }
        Formula::ForallT(x, ty, body) => {
            if let Some(ty2) = type_step(ty) {
                return Some(Formula::ForallT(x.clone(), ty2, body.clone()));
            }
            formula_step_no_unfold(body)
                .map(|b2| Formula::ForallT(x.clone(), ty.clone(), Box::new(b2)))
        }
        Formula::DepProd(n, dom, cod) => {
            if let Some(d2) = formula_step_no_unfold(dom) {
                return Some(Formula::DepProd(n.clone(), Box::new(d2), cod.clone()));
            }
            formula_step_no_unfold(cod)
                .map(|c2| Formula::DepProd(n.clone(), dom.clone(), Box::new(c2)))
        }
        Formula::Nu { index, f, x, body } => {
            if let Some(i2) = term_step(index, &Store::empty()) {
                return Some(Formula::Nu {
                    index: i2,
                    f: f.clone(),
                    x: x.clone(),
                    body: body.clone(),
                });
            }
            formula_step_no_unfold(body).map(|b2| Formula::Nu {
                index: index.clone(),
                f: f.clone(),
                x: x.clone(),
                body: Box::new(b2),
            })
        }
        Formula::MemP(p, f) => {
            if let Some(p2) = proof_run_step(p) {
                return Some(Formula::MemP(Box::new(p2), f.clone()));
            }
            formula_step_no_unfold(f).map(|f2| Formula::MemP(p.clone(), Box::new(f2)))
        }
    }
}

/// Unfold one coinductive formula: substitute the index for the bound
/// variable and fold the recursive atoms `f(u) = 0` back into coinductive
/// formulas at index `u`.
pub fn nu_unfold(index: &TermAst, f: &Name, x: &Name, body: &Formula) -> Formula {
    let instantiated = subst_formula(body, x, &Replacement::Term(index.clone()))
        .expect("coinductive body is term-kinded in its index variable");
    fold_f_atoms(&instantiated, f, x, body)
}

fn fold_f_atoms(a: &Formula, f: &Name, x: &Name, orig_body: &Formula) -> Formula {
    match a {
        Formula::Eq(TermAst::App(g, u), TermAst::Zero) => {
            if matches!(&**g, TermAst::Var(n) if n == f) {
                return Formula::Nu {
                    index: (**u).clone(),
                    f: f.clone(),
                    x: x.clone(),
                    body: Box::new(orig_body.clone()),
                };
            }
            a.clone()
        }
        Formula::Top | Formula::Bot | Formula::Eq(..) => a.clone(),
        Formula::And(l, r) => Formula::and(
            fold_f_atoms(l, f, x, orig_body),
            fold_f_atoms(r, f, x, orig_body),
        ),
        Formula::Or(l, r) => Formula::or(
            fold_f_atoms(l, f, x, orig_body),
            fold_f_atoms(r, f, x, orig_body),
        ),
        Formula::ExistsT(y, ty, b) => {
            if y == f {
                a.clone()
            } else {
                Formula::ExistsT(y.clone(), ty.clone(), Box::new(fold_f_atoms(b, f, x, orig_body)))
            }
        }
        Formula::ForallT(y, ty, b) => {
            if y == f {
                a.clone()
            } else {
                Formula::ForallT(y.clone(), ty.clone(), Box::new(fold_f_atoms(b, f, x, orig_body)))
            }
        }
        Formula::DepProd(n, dom, cod) => Formula::DepProd(
            n.clone(),
            Box::new(fold_f_atoms(dom, f, x, orig_body)),
            Box::new(if n == f {
                (**cod).clone()
            } else {
                fold_f_atoms(cod, f, x, orig_body)
            }),
        ),
        Formula::Nu { index, f: g, x: y, body } => {
            if g == f || y == f {
                a.clone()
            } else {
                Formula::Nu {
                    index: index.clone(),
                    f: g.clone(),
                    x: y.clone(),
                    body: Box::new(fold_f_atoms(body, f, x, orig_body)),
                }
            }
        }
        Formula::MemP(p, b) => {
            Formula::MemP(p.clone(), Box::new(fold_f_atoms(b, f, x, orig_body)))
        }
    }
}

fn nu_unfold_leftmost(a: &Formula) -> Option<Formula> {
    match a {
        Formula::Nu { index, f, x, body } => Some(nu_unfold(index, f, x, body)),
        Formula::Top | Formula::Bot | Formula::Eq(..) => None,
        Formula::And(l, r) => {
            if let Some(l2) = nu_unfold_leftmost(l) {
                return Some(Formula::And(Box::new(l2), r.clone()));
            }
            nu_unfold_leftmost(r).map(|r2| Formula::And(l.clone(), Box::new(r2)))
        }
        Formula::Or(l, r) => {
            if let Some(l2) = nu_unfold_leftmost(l) {
                return Some(Formula::Or(Box::new(l2), r.clone()));
            }
            nu_unfold_leftmost(r).map(|r2| Formula::Or(l.clone(), Box::new(r2)))
        }
        Formula::ExistsT(x, ty, body) => nu_unfold_leftmost(body)
            .map(|b2| Formula::ExistsT(x.clone(), ty.clone(), Box::new(b2))),
        Formula::ForallT(x, ty, body) => nu_unfold_leftmost(body)
            .map(|b2| Formula::ForallT(x.clone(), ty.clone(), Box::new(b2))),
        Formula::DepProd(n, dom, cod) => {
            if let Some(d2) = nu_unfold_leftmost(dom) {
                return Some(Formula::DepProd(n.clone(), Box::new(d2), cod.clone()));
            }
            nu_unfold_leftmost(cod)
                .map(|c2| Formula::DepProd(n.clone(), dom.clone(), Box::new(c2)))
        }
        Formula::MemP(p, f) => {
            nu_unfold_leftmost(f).map(|f2| Formula::MemP(p.clone(), Box::new(f2)))
        }
    }
}

/// Bounded joinability: step both formulas, comparing every form seen on one
/// side against every form seen on the other. Definitive answers come from
/// a match (true) or two fully normalized histories (false); running out of
/// fuel first is an error the caller treats as inequivalence.
pub fn formula_equiv(a: &Formula, b: &Formula, fuel: u64) -> Result<bool, FuelExhausted> {
    if alpha_eq_formula(a, b) {
        return Ok(true);
    }
    let mut left = vec![a.clone()];
    let mut right = vec![b.clone()];
    let mut left_normal = false;
    let mut right_normal = false;
    for _ in 0..fuel {
        if !left_normal {
            match formula_step(left.last().expect("nonempty")) {
                Some(next) => {
                    if right.iter().any(|r| alpha_eq_formula(&next, r)) {
                        return Ok(true);
                    }
                    left.push(next);
                }
                None => left_normal = true,
            }
        }
        if !right_normal {
            match formula_step(right.last().expect("nonempty")) {
                Some(next) => {
                    if left.iter().any(|l| alpha_eq_formula(&next, l)) {
                        return Ok(true);
                    }
                    right.push(next);
                }
                None => right_normal = true,
            }
        }
        if left_normal && right_normal {
            return Ok(false);
        }
    }
    Err(FuelExhausted { fuel })
}

/// [`formula_equiv`] with the default fuel.
pub fn formula_equiv_default(a: &Formula, b: &Formula) -> Result<bool, FuelExhausted> {
    formula_equiv(a, b, DEFAULT_EQUIV_FUEL)
}

/// Every occurrence of `fvar` sits under an even number of implication
/// domains.
pub fn positivity(fvar: &Name, a: &Formula) -> bool {
    positive_in(fvar, a, true)
}

fn term_mentions(t: &TermAst, fvar: &Name) -> bool {
    free_names_term(t).contains(fvar)
}

fn type_mentions(t: &TypeExpr, fvar: &Name) -> bool {
    match t {
        TypeExpr::Nat => false,
        TypeExpr::Arrow(a, b) => type_mentions(a, fvar) || type_mentions(b, fvar),
        TypeExpr::MemT(u, ty) => term_mentions(u, fvar) || type_mentions(ty, fvar),
    }
}

fn positive_in(fvar: &Name, a: &Formula, positive: bool) -> bool {
    match a {
        Formula::Top | Formula::Bot => true,
        Formula::Eq(t, u) => {
            if term_mentions(t, fvar) || term_mentions(u, fvar) {
                positive
            } else {
                true
            }
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            positive_in(fvar, l, positive) && positive_in(fvar, r, positive)
        }
        Formula::ExistsT(x, ty, body) | Formula::ForallT(x, ty, body) => {
            let ty_ok = !type_mentions(ty, fvar) || positive;
            ty_ok && (x == fvar || positive_in(fvar, body, positive))
        }
        Formula::DepProd(n, dom, cod) => {
            positive_in(fvar, dom, !positive)
                && (n == fvar || positive_in(fvar, cod, positive))
        }
        Formula::Nu { index, f, x, body } => {
            let idx_ok = !term_mentions(index, fvar) || positive;
            idx_ok && (f == fvar || x == fvar || positive_in(fvar, body, positive))
        }
        Formula::MemP(p, f) => {
            let p_ok = !crate::subst::free_names_proof(p).contains(fvar) || positive;
            p_ok && positive_in(fvar, f, positive)
        }
    }
}
