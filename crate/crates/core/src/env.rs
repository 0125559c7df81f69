//! Typing environments: ordered hypothesis lists over a formula type `A`.
//!
//! The same shape serves the simply typed calculi (`A` = simple type) and
//! the dependent one (`A` = formula). Order is preserved because dependent
//! hypotheses may refer to names bound further left.

use crate::formula::TypeExpr;
use crate::name::Name;

/// One hypothesis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Hyp<A> {
    /// `x : T` for a term variable.
    TermHyp(Name, TypeExpr),
    /// `a : A` for a proof variable.
    ProofHyp(Name, A),
    /// `α : A⊥⊥` for a context variable.
    CtxHyp(Name, A),
    /// `tp̂ : A⊥⊥`, the delimiter hypothesis.
    TpHyp(A),
    /// `tp̌ : A`, the co-delimiter hypothesis.
    CoTpHyp(A),
}

impl<A> Hyp<A> {
    pub fn name(&self) -> Option<&Name> {
        match self {
            Hyp::TermHyp(n, _) | Hyp::ProofHyp(n, _) | Hyp::CtxHyp(n, _) => Some(n),
            Hyp::TpHyp(_) | Hyp::CoTpHyp(_) => None,
        }
    }
}

/// An ordered typing environment; every name is bound at most once.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TypingEnv<A> {
    hyps: Vec<Hyp<A>>,
}

impl<A> Default for TypingEnv<A> {
    fn default() -> Self {
        TypingEnv { hyps: Vec::new() }
    }
}

impl<A: Clone> TypingEnv<A> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.hyps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.hyps.len()
    }

    pub fn hyps(&self) -> &[Hyp<A>] {
        &self.hyps
    }

    fn debug_check_fresh(&self, n: &Name) {
        debug_assert!(
            self.hyps.iter().all(|h| h.name() != Some(n)),
            "duplicate hypothesis name {n:?}"
        );
    }

    pub fn push_term(&mut self, x: Name, ty: TypeExpr) -> &mut Self {
        self.debug_check_fresh(&x);
        self.hyps.push(Hyp::TermHyp(x, ty));
        self
    }

    pub fn push_proof(&mut self, a: Name, f: A) -> &mut Self {
        self.debug_check_fresh(&a);
        self.hyps.push(Hyp::ProofHyp(a, f));
        self
    }

    pub fn push_ctx(&mut self, alpha: Name, f: A) -> &mut Self {
        self.debug_check_fresh(&alpha);
        self.hyps.push(Hyp::CtxHyp(alpha, f));
        self
    }

    pub fn push_tp(&mut self, f: A) -> &mut Self {
        self.hyps.push(Hyp::TpHyp(f));
        self
    }

    pub fn push_cotp(&mut self, f: A) -> &mut Self {
        self.hyps.push(Hyp::CoTpHyp(f));
        self
    }

    /// Builder variants that consume and return the environment.
    pub fn with_term(mut self, x: Name, ty: TypeExpr) -> Self {
        self.push_term(x, ty);
        self
    }

    pub fn with_proof(mut self, a: Name, f: A) -> Self {
        self.push_proof(a, f);
        self
    }

    pub fn with_ctx(mut self, alpha: Name, f: A) -> Self {
        self.push_ctx(alpha, f);
        self
    }

    pub fn with_tp(mut self, f: A) -> Self {
        self.push_tp(f);
        self
    }

    pub fn with_cotp(mut self, f: A) -> Self {
        self.push_cotp(f);
        self
    }

    pub fn lookup_term(&self, x: &Name) -> Option<&TypeExpr> {
        self.hyps.iter().rev().find_map(|h| match h {
            Hyp::TermHyp(n, t) if n == x => Some(t),
            _ => None,
        })
    }

    pub fn lookup_proof(&self, a: &Name) -> Option<&A> {
        self.hyps.iter().rev().find_map(|h| match h {
            Hyp::ProofHyp(n, f) if n == a => Some(f),
            _ => None,
        })
    }

    pub fn lookup_ctx(&self, alpha: &Name) -> Option<&A> {
        self.hyps.iter().rev().find_map(|h| match h {
            Hyp::CtxHyp(n, f) if n == alpha => Some(f),
            _ => None,
        })
    }

    /// The delimiter hypothesis, if present (rightmost wins).
    pub fn lookup_tp(&self) -> Option<&A> {
        self.hyps.iter().rev().find_map(|h| match h {
            Hyp::TpHyp(f) => Some(f),
            _ => None,
        })
    }

    /// Copy of the environment without its rightmost delimiter hypothesis.
    pub fn without_tp(&self) -> Self {
        let mut out = self.clone();
        if let Some(idx) = out.hyps.iter().rposition(|h| matches!(h, Hyp::TpHyp(_))) {
            out.hyps.remove(idx);
        }
        out
    }

    pub fn has_tp(&self) -> bool {
        self.hyps.iter().any(|h| matches!(h, Hyp::TpHyp(_)))
    }

    /// The active delimiter: the rightmost `tp̂` or `tp̌` hypothesis.
    /// `true` marks the co-delimiter.
    pub fn active_delim(&self) -> Option<(&A, bool)> {
        self.hyps.iter().rev().find_map(|h| match h {
            Hyp::TpHyp(f) => Some((f, false)),
            Hyp::CoTpHyp(f) => Some((f, true)),
            _ => None,
        })
    }

    /// Copy of the environment without its rightmost delimiter hypothesis of
    /// either kind.
    pub fn without_active_delim(&self) -> Self {
        let mut out = self.clone();
        if let Some(idx) = out
            .hyps
            .iter()
            .rposition(|h| matches!(h, Hyp::TpHyp(_) | Hyp::CoTpHyp(_)))
        {
            out.hyps.remove(idx);
        }
        out
    }

    /// Append all hypotheses of `other` on the right.
    pub fn extended(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.hyps.extend(other.hyps.iter().cloned());
        out
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.hyps.iter().filter_map(|h| h.name())
    }
}
