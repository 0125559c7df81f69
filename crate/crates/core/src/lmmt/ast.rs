//! Syntax of the two-sided calculus: proofs, contexts, commands, and the
//! binding plumbing they need. Constants and co-constants are inert atoms
//! typed by a signature; they give reduction somewhere to block.

use std::collections::HashSet;

use crate::name::{fresh, Name};

/// Proofs: variables, constants, λ-abstractions, and the context binder μ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LProof {
    Var(Name),
    Const(Name),
    Lam(Name, Box<LProof>),
    Mu(Name, Box<LCommand>),
}

/// Contexts: covariables, co-constants, argument pushes, and the proof
/// binder μ̃.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LContext {
    CoVar(Name),
    CoConst(Name),
    Push(Box<LProof>, Box<LContext>),
    MuT(Name, Box<LCommand>),
}

/// A cut.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LCommand {
    pub proof: LProof,
    pub context: LContext,
}

impl LCommand {
    pub fn cut(proof: LProof, context: LContext) -> LCommand {
        LCommand { proof, context }
    }
}

impl LProof {
    /// Values: variables, constants, abstractions.
    pub fn is_value(&self) -> bool {
        matches!(self, LProof::Var(_) | LProof::Const(_) | LProof::Lam(..))
    }
}

impl LContext {
    /// Covalues: covariables, co-constants, argument pushes.
    pub fn is_covalue(&self) -> bool {
        matches!(self, LContext::CoVar(_) | LContext::CoConst(_) | LContext::Push(..))
    }
}

/// `p q ≜ μα.⟨p‖q·α⟩`: application, solved for on the context side.
pub fn mk_app(p: LProof, q: LProof) -> LProof {
    let alpha = fresh("alpha");
    LProof::Mu(
        alpha.clone(),
        Box::new(LCommand::cut(
            p,
            LContext::Push(Box::new(q), Box::new(LContext::CoVar(alpha))),
        )),
    )
}

/// `k_e ≜ λa.μβ.⟨a‖e⟩`: a context reified as a proof; applying it discards
/// the ambient context and restores `e`.
pub fn k_of(e: LContext) -> LProof {
    let a = fresh("a");
    let beta = fresh("beta");
    LProof::Lam(
        a.clone(),
        Box::new(LProof::Mu(
            beta,
            Box::new(LCommand::cut(LProof::Var(a), e)),
        )),
    )
}

/// `call/cc ≜ λa.μα.⟨a‖k_α·α⟩`.
pub fn call_cc() -> LProof {
    let a = fresh("a");
    let alpha = fresh("alpha");
    LProof::Lam(
        a.clone(),
        Box::new(LProof::Mu(
            alpha.clone(),
            Box::new(LCommand::cut(
                LProof::Var(a),
                LContext::Push(
                    Box::new(k_of(LContext::CoVar(alpha.clone()))),
                    Box::new(LContext::CoVar(alpha)),
                ),
            )),
        )),
    )
}

/// What a binder substitution carries.
#[derive(Clone, Debug)]
pub enum LRepl {
    Proof(LProof),
    Ctx(LContext),
}

impl LRepl {
    fn free_names(&self) -> HashSet<Name> {
        match self {
            LRepl::Proof(p) => free_names_proof(p),
            LRepl::Ctx(e) => free_names_ctx(e),
        }
    }
}

pub fn free_names_proof(p: &LProof) -> HashSet<Name> {
    match p {
        LProof::Var(x) => HashSet::from([x.clone()]),
        LProof::Const(_) => HashSet::new(),
        LProof::Lam(a, body) => {
            let mut s = free_names_proof(body);
            s.remove(a);
            s
        }
        LProof::Mu(alpha, c) => {
            let mut s = free_names_command(c);
            s.remove(alpha);
            s
        }
    }
}

pub fn free_names_ctx(e: &LContext) -> HashSet<Name> {
    match e {
        LContext::CoVar(x) => HashSet::from([x.clone()]),
        LContext::CoConst(_) => HashSet::new(),
        LContext::Push(q, e2) => {
            let mut s = free_names_proof(q);
            s.extend(free_names_ctx(e2));
            s
        }
        LContext::MuT(a, c) => {
            let mut s = free_names_command(c);
            s.remove(a);
            s
        }
    }
}

pub fn free_names_command(c: &LCommand) -> HashSet<Name> {
    let mut s = free_names_proof(&c.proof);
    s.extend(free_names_ctx(&c.context));
    s
}

/// Capture-avoiding substitution of `r` for `x` in a proof.
pub fn subst_proof(p: &LProof, x: &Name, r: &LRepl) -> LProof {
    match p {
        LProof::Var(y) => {
            if y == x {
                match r {
                    LRepl::Proof(q) => q.clone(),
                    // Kind mismatch cannot arise from the machine: μ binds
                    // context names only against covariable occurrences.
                    LRepl::Ctx(_) => p.clone(),
                }
            } else {
                p.clone()
            }
        }
        LProof::Const(_) => p.clone(),
        LProof::Lam(a, body) => {
            let (a2, body2) = descend_proof(a, body, x, r);
            LProof::Lam(a2, Box::new(body2))
        }
        LProof::Mu(alpha, c) => {
            let (alpha2, c2) = descend_command(alpha, BinderKind::CtxVar, c, x, r);
            LProof::Mu(alpha2, Box::new(c2))
        }
    }
}

/// Capture-avoiding substitution of `r` for `x` in a context.
pub fn subst_ctx(e: &LContext, x: &Name, r: &LRepl) -> LContext {
    match e {
        LContext::CoVar(y) => {
            if y == x {
                match r {
                    LRepl::Ctx(f) => f.clone(),
                    LRepl::Proof(_) => e.clone(),
                }
            } else {
                e.clone()
            }
        }
        LContext::CoConst(_) => e.clone(),
        LContext::Push(q, e2) => LContext::Push(
            Box::new(subst_proof(q, x, r)),
            Box::new(subst_ctx(e2, x, r)),
        ),
        LContext::MuT(a, c) => {
            let (a2, c2) = descend_command(a, BinderKind::ProofVar, c, x, r);
            LContext::MuT(a2, Box::new(c2))
        }
    }
}

pub fn subst_command(c: &LCommand, x: &Name, r: &LRepl) -> LCommand {
    LCommand {
        proof: subst_proof(&c.proof, x, r),
        context: subst_ctx(&c.context, x, r),
    }
}

/// Which occurrence form a binder's name takes in its body.
#[derive(Clone, Copy)]
enum BinderKind {
    ProofVar,
    CtxVar,
}

impl BinderKind {
    fn rename_to(self, new: &Name) -> LRepl {
        match self {
            BinderKind::ProofVar => LRepl::Proof(LProof::Var(new.clone())),
            BinderKind::CtxVar => LRepl::Ctx(LContext::CoVar(new.clone())),
        }
    }
}

fn descend_proof(binder: &Name, body: &LProof, x: &Name, r: &LRepl) -> (Name, LProof) {
    if binder == x {
        return (binder.clone(), body.clone());
    }
    if r.free_names().contains(binder) {
        let binder2 = binder.refresh();
        let renamed = subst_proof(body, binder, &BinderKind::ProofVar.rename_to(&binder2));
        (binder2, subst_proof(&renamed, x, r))
    } else {
        (binder.clone(), subst_proof(body, x, r))
    }
}

fn descend_command(
    binder: &Name,
    kind: BinderKind,
    body: &LCommand,
    x: &Name,
    r: &LRepl,
) -> (Name, LCommand) {
    if binder == x {
        return (binder.clone(), body.clone());
    }
    if r.free_names().contains(binder) {
        let binder2 = binder.refresh();
        let renamed = subst_command(body, binder, &kind.rename_to(&binder2));
        (binder2, subst_command(&renamed, x, r))
    } else {
        (binder.clone(), subst_command(body, x, r))
    }
}

/// α-equivalence, insensitive to binder names, sensitive to structure and
/// to constants.
pub fn alpha_eq_proof(l: &LProof, r: &LProof) -> bool {
    alpha_proof(l, r, &mut Vec::new())
}

pub fn alpha_eq_ctx(l: &LContext, r: &LContext) -> bool {
    alpha_ctx(l, r, &mut Vec::new())
}

pub fn alpha_eq_command(l: &LCommand, r: &LCommand) -> bool {
    alpha_command(l, r, &mut Vec::new())
}

fn names_match(pairs: &[(Name, Name)], l: &Name, r: &Name) -> bool {
    for (bl, br) in pairs.iter().rev() {
        if bl == l || br == r {
            return bl == l && br == r;
        }
    }
    l == r
}

fn alpha_proof(l: &LProof, r: &LProof, pairs: &mut Vec<(Name, Name)>) -> bool {
    match (l, r) {
        (LProof::Var(a), LProof::Var(b)) => names_match(pairs, a, b),
        (LProof::Const(a), LProof::Const(b)) => a == b,
        (LProof::Lam(a, p), LProof::Lam(b, q)) => {
            pairs.push((a.clone(), b.clone()));
            let ok = alpha_proof(p, q, pairs);
            pairs.pop();
            ok
        }
        (LProof::Mu(a, c), LProof::Mu(b, d)) => {
            pairs.push((a.clone(), b.clone()));
            let ok = alpha_command(c, d, pairs);
            pairs.pop();
            ok
        }
        _ => false,
    }
}

fn alpha_ctx(l: &LContext, r: &LContext, pairs: &mut Vec<(Name, Name)>) -> bool {
    match (l, r) {
        (LContext::CoVar(a), LContext::CoVar(b)) => names_match(pairs, a, b),
        (LContext::CoConst(a), LContext::CoConst(b)) => a == b,
        (LContext::Push(p, e), LContext::Push(q, f)) => {
            alpha_proof(p, q, pairs) && alpha_ctx(e, f, pairs)
        }
        (LContext::MuT(a, c), LContext::MuT(b, d)) => {
            pairs.push((a.clone(), b.clone()));
            let ok = alpha_command(c, d, pairs);
            pairs.pop();
            ok
        }
        _ => false,
    }
}

fn alpha_command(l: &LCommand, r: &LCommand, pairs: &mut Vec<(Name, Name)>) -> bool {
    alpha_proof(&l.proof, &r.proof, pairs) && alpha_ctx(&l.context, &r.context, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mk_app_is_alpha_congruent() {
        let a = fresh("a");
        let id1 = LProof::Lam(a.clone(), Box::new(LProof::Var(a)));
        let b = fresh("b");
        let id2 = LProof::Lam(b.clone(), Box::new(LProof::Var(b)));
        let q = LProof::Const(fresh("q"));
        assert!(alpha_eq_proof(&id1, &id2));
        assert!(alpha_eq_proof(
            &mk_app(id1.clone(), q.clone()),
            &mk_app(id2, q.clone())
        ));
        assert!(!alpha_eq_proof(&mk_app(id1.clone(), q.clone()), &mk_app(q, id1)));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λa.⟨b‖α⟩-body)[b := a-free-proof] refreshes the binder.
        let a = fresh("a");
        let b = fresh("b");
        let lam = LProof::Lam(
            a.clone(),
            Box::new(LProof::Var(b.clone())),
        );
        let got = subst_proof(&lam, &b, &LRepl::Proof(LProof::Var(a.clone())));
        match got {
            LProof::Lam(a2, body) => {
                assert_ne!(a2, a, "binder was refreshed");
                assert_eq!(*body, LProof::Var(a));
            }
            other => panic!("expected a λ, got {other:?}"),
        }
    }

    #[test]
    fn shadowed_binders_block_substitution() {
        let a = fresh("a");
        let lam = LProof::Lam(a.clone(), Box::new(LProof::Var(a.clone())));
        let got = subst_proof(&lam, &a, &LRepl::Proof(LProof::Const(fresh("k"))));
        assert!(alpha_eq_proof(&got, &lam));
    }
}
