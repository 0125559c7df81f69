//! Dependency lists: the typechecker's record of which proofs flowed into
//! which binders inside a delimited continuation, together with their
//! action on formulas.
//!
//! An entry `{pat|q}` substitutes `q` into a formula through `pat`, but only
//! when `q` is NEF; non-NEF entries act as the identity. The list acts from
//! the most recent entry to the oldest.

use crate::ast::{ProofAst, TermAst};
use crate::formula::Formula;
use crate::name::Name;
use crate::nef::is_nef;
use crate::subst::{subst_formula, Replacement};

/// Binder pattern on the left of an entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DepPattern {
    /// `·`: a cut whose context has not yet named its binder.
    Hole,
    /// `a`
    PVar(Name),
    /// `(a1,a2)`
    PairPat(Name, Name),
    /// `ι_i(a)`
    InjPat(u8, Name),
    /// `(x,a)`
    DepPairPat(Name, Name),
}

/// One dependency entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DepEntry {
    /// `{pat|q}` for a proof `q`.
    Proof(DepPattern, ProofAst),
    /// `{x|t}` binding a term variable directly.
    TermBind(Name, TermAst),
    /// `{·|t}`: a term cut in flight, its binder not yet known.
    TermHole(TermAst),
}

/// An ordered list of dependency entries.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DependencyList(Vec<DepEntry>);

impl DependencyList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[DepEntry] {
        &self.0
    }

    pub fn push(&mut self, entry: DepEntry) {
        self.0.push(entry);
    }

    pub fn with_entry(&self, entry: DepEntry) -> Self {
        let mut out = self.clone();
        out.push(entry);
        out
    }

    /// Append `{·|q}`: a cut is in flight, its binder not yet known.
    pub fn with_hole(&self, q: ProofAst) -> Self {
        self.with_entry(DepEntry::Proof(DepPattern::Hole, q))
    }

    /// Replace a trailing hole's pattern with the binder pattern the context
    /// just revealed. `None` when the list does not end in a hole.
    pub fn fill_hole(&self, pat: DepPattern) -> Option<Self> {
        match self.0.last() {
            Some(DepEntry::Proof(DepPattern::Hole, q)) => {
                let mut out = self.clone();
                let q = q.clone();
                out.0.pop();
                out.0.push(DepEntry::Proof(pat, q));
                Some(out)
            }
            _ => None,
        }
    }

    /// The proof of the trailing hole entry, if the list ends in one.
    pub fn trailing_hole(&self) -> Option<&ProofAst> {
        match self.0.last() {
            Some(DepEntry::Proof(DepPattern::Hole, q)) => Some(q),
            _ => None,
        }
    }

    /// Drop a trailing hole entry, if present.
    pub fn without_trailing_hole(&self) -> Self {
        let mut out = self.clone();
        if matches!(out.0.last(), Some(DepEntry::Proof(DepPattern::Hole, _))) {
            out.0.pop();
        }
        out
    }

    /// Append `{·|t}`: a term cut is in flight, its binder not yet known.
    pub fn with_term_hole(&self, t: TermAst) -> Self {
        self.with_entry(DepEntry::TermHole(t))
    }

    /// The term of the trailing term hole, if the list ends in one.
    pub fn trailing_term_hole(&self) -> Option<&TermAst> {
        match self.0.last() {
            Some(DepEntry::TermHole(t)) => Some(t),
            _ => None,
        }
    }

    /// Name a trailing term hole: `{·|t}` becomes `{x|t}`. `None` when the
    /// list does not end in a term hole.
    pub fn fill_term_hole(&self, x: Name) -> Option<Self> {
        match self.0.last() {
            Some(DepEntry::TermHole(t)) => {
                let mut out = self.clone();
                let t = t.clone();
                out.0.pop();
                out.0.push(DepEntry::TermBind(x, t));
                Some(out)
            }
            _ => None,
        }
    }

    /// Rewrite the term held by a trailing term hole, for rules that push an
    /// argument while the cut is in flight. `None` when there is no such hole.
    pub fn map_term_hole(&self, f: impl FnOnce(TermAst) -> TermAst) -> Option<Self> {
        match self.0.last() {
            Some(DepEntry::TermHole(t)) => {
                let mut out = self.clone();
                let t = t.clone();
                out.0.pop();
                out.0.push(DepEntry::TermHole(f(t)));
                Some(out)
            }
            _ => None,
        }
    }

    pub fn extended(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.0.extend(other.0.iter().cloned());
        out
    }

    /// Apply the list to a formula, newest entry first.
    pub fn apply(&self, a: &Formula) -> Formula {
        let mut out = a.clone();
        for entry in self.0.iter().rev() {
            out = apply_entry(entry, &out);
        }
        out
    }
}

fn subst_proof_in_formula(a: &Formula, x: &Name, q: &ProofAst) -> Formula {
    match subst_formula(a, x, &Replacement::Proof(q.clone())) {
        Ok(f) => f,
        Err(_) => {
            debug_assert!(false, "ill-kinded dependency entry for {x:?}");
            a.clone()
        }
    }
}

fn subst_term_in_formula(a: &Formula, x: &Name, t: &TermAst) -> Formula {
    match subst_formula(a, x, &Replacement::Term(t.clone())) {
        Ok(f) => f,
        Err(_) => {
            debug_assert!(false, "ill-kinded dependency entry for {x:?}");
            a.clone()
        }
    }
}

fn apply_entry(entry: &DepEntry, a: &Formula) -> Formula {
    match entry {
        DepEntry::TermBind(x, t) => subst_term_in_formula(a, x, t),
        DepEntry::TermHole(_) => a.clone(),
        DepEntry::Proof(pat, q) => {
            if !is_nef(q) {
                return a.clone();
            }
            match pat {
                DepPattern::Hole => a.clone(),
                DepPattern::PVar(v) => subst_proof_in_formula(a, v, q),
                DepPattern::PairPat(a1, a2) => match q {
                    ProofAst::Pair(q1, q2) => {
                        let step = subst_proof_in_formula(a, a2, q2);
                        subst_proof_in_formula(&step, a1, q1)
                    }
                    _ => a.clone(),
                },
                DepPattern::InjPat(i, v) => match q {
                    ProofAst::Inj(j, qi) if i == j => subst_proof_in_formula(a, v, qi),
                    _ => a.clone(),
                },
                DepPattern::DepPairPat(x, v) => match q {
                    ProofAst::DepPair(t, qp) => {
                        let step = subst_proof_in_formula(a, v, qp);
                        subst_term_in_formula(&step, x, t)
                    }
                    // `q` is NEF but not a literal pair: its term component
                    // is still `wit q`, which is what dependent witnesses
                    // flow through. The proof component has no projection,
                    // so `v` stays.
                    _ => subst_term_in_formula(a, x, &TermAst::Wit(Box::new(q.clone()))),
                },
            }
        }
    }
}

/// Does `sigma1` imply `sigma2` on the probe set: whenever `sigma1`
/// identifies a probe pair, `sigma2` must identify it too. A sound sampling
/// check, not a decision procedure.
pub fn dep_implies(
    sigma1: &DependencyList,
    sigma2: &DependencyList,
    probes: &[(Formula, Formula)],
) -> bool {
    debug_assert!(!probes.is_empty(), "dep_implies needs at least one probe");
    probes.iter().all(|(a, b)| {
        let l1 = sigma1.apply(a);
        let r1 = sigma1.apply(b);
        if crate::subst::alpha_eq_formula(&l1, &r1) {
            let l2 = sigma2.apply(a);
            let r2 = sigma2.apply(b);
            crate::subst::alpha_eq_formula(&l2, &r2)
        } else {
            true
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ContextAst;
    use crate::ast::Command;
    use crate::name::fresh;

    fn probe(p: &ProofAst) -> Formula {
        Formula::MemP(Box::new(p.clone()), Box::new(Formula::Top))
    }

    #[test]
    fn empty_list_is_identity() {
        let a = Formula::eq(TermAst::Zero, TermAst::Zero);
        assert_eq!(DependencyList::new().apply(&a), a);
    }

    #[test]
    fn value_entry_substitutes() {
        let a = fresh("a");
        let sigma = DependencyList::new()
            .with_entry(DepEntry::Proof(DepPattern::PVar(a.clone()), ProofAst::Refl));
        let f = probe(&ProofAst::Var(a));
        assert_eq!(sigma.apply(&f), probe(&ProofAst::Refl));
    }

    #[test]
    fn non_nef_entry_is_identity() {
        let a = fresh("a");
        let b = fresh("b");
        let alpha = fresh("alpha");
        // μα.⟨b‖refl·α⟩ drops into an argument stack, so it is not NEF.
        let q = ProofAst::Mu(
            alpha.clone(),
            Box::new(Command::cut(
                ProofAst::Var(b),
                ContextAst::push_p(ProofAst::Refl, ContextAst::CoVar(alpha)),
            )),
        );
        assert!(!is_nef(&q));
        let sigma =
            DependencyList::new().with_entry(DepEntry::Proof(DepPattern::PVar(a.clone()), q));
        let f = probe(&ProofAst::Var(a));
        assert_eq!(sigma.apply(&f), f);
    }

    #[test]
    fn pair_pattern_distributes() {
        let a1 = fresh("a1");
        let a2 = fresh("a2");
        let v1 = ProofAst::Refl;
        let v2 = ProofAst::LamP(fresh("z"), Box::new(ProofAst::Var(fresh("w"))));
        let pair = ProofAst::Pair(Box::new(v1.clone()), Box::new(v2.clone()));
        let combined = DependencyList::new().with_entry(DepEntry::Proof(
            DepPattern::PairPat(a1.clone(), a2.clone()),
            pair,
        ));
        let split = DependencyList::new()
            .with_entry(DepEntry::Proof(DepPattern::PVar(a1.clone()), v1))
            .with_entry(DepEntry::Proof(DepPattern::PVar(a2.clone()), v2));
        let f = Formula::and(probe(&ProofAst::Var(a1)), probe(&ProofAst::Var(a2)));
        assert_eq!(combined.apply(&f), split.apply(&f));
    }

    #[test]
    fn weakening_implies() {
        let a = fresh("a");
        let entry = DepEntry::Proof(DepPattern::PVar(a.clone()), ProofAst::Refl);
        let sigma = DependencyList::new();
        let sigma_more = DependencyList::new().with_entry(entry);
        let probes = vec![(probe(&ProofAst::Var(a.clone())), probe(&ProofAst::Var(a)))];
        assert!(dep_implies(&sigma, &sigma_more, &probes));
    }

    #[test]
    fn injection_entry_implies_component_entry() {
        let a = fresh("a");
        let v = ProofAst::Refl;
        let inj = DependencyList::new().with_entry(DepEntry::Proof(
            DepPattern::InjPat(1, a.clone()),
            ProofAst::Inj(1, Box::new(v.clone())),
        ));
        let plain = DependencyList::new()
            .with_entry(DepEntry::Proof(DepPattern::PVar(a.clone()), v.clone()));
        let probes = vec![
            (probe(&ProofAst::Var(a.clone())), probe(&v)),
            (probe(&ProofAst::Var(a)), probe(&ProofAst::Refl)),
        ];
        assert!(dep_implies(&inj, &plain, &probes));
        assert!(dep_implies(&plain, &inj, &probes));
    }

    #[test]
    fn separating_probe_refutes() {
        let a = fresh("a");
        let sigma = DependencyList::new()
            .with_entry(DepEntry::Proof(DepPattern::PVar(a.clone()), ProofAst::Refl));
        let probes = vec![(probe(&ProofAst::Var(a)), probe(&ProofAst::Refl))];
        // sigma identifies the pair, the empty list does not.
        assert!(!dep_implies(&sigma, &DependencyList::new(), &probes));
    }
}
