//! First-order formulas over arithmetic terms, and the simple types of the
//! term layer.

use crate::ast::{ProofAst, TermAst};
use crate::name::Name;

/// Types for first-order terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TypeExpr {
    Nat,
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
    /// Relativization predicate `t ∈ T`; produced by typing decomposition,
    /// never by the surface parser.
    MemT(TermAst, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn arrow(dom: TypeExpr, cod: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Box::new(dom), Box::new(cod))
    }

    /// `ℕ → ℕ → … → ℕ` with `n` arrows.
    pub fn nat_fun(n: usize) -> TypeExpr {
        let mut t = TypeExpr::Nat;
        for _ in 0..n {
            t = TypeExpr::arrow(TypeExpr::Nat, t);
        }
        t
    }
}

/// Formulas.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Top,
    Bot,
    Eq(TermAst, TermAst),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    ExistsT(Name, TypeExpr, Box<Formula>),
    ForallT(Name, TypeExpr, Box<Formula>),
    /// Dependent product `Πa:A.B`; plain implication when `a` is not free
    /// in `B`.
    DepProd(Name, Box<Formula>, Box<Formula>),
    /// Coinductive formula `ν_{fx}^t A`: the body `A` mentions the
    /// recursive hypothesis only through atoms `f(u) = 0`.
    Nu {
        index: TermAst,
        f: Name,
        x: Name,
        body: Box<Formula>,
    },
    /// Relativization predicate `p ∈ A`; produced by typing decomposition,
    /// never by the surface parser.
    MemP(Box<ProofAst>, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn eq(t: TermAst, u: TermAst) -> Formula {
        Formula::Eq(t, u)
    }

    pub fn exists(x: Name, ty: TypeExpr, body: Formula) -> Formula {
        Formula::ExistsT(x, ty, Box::new(body))
    }

    pub fn forall(x: Name, ty: TypeExpr, body: Formula) -> Formula {
        Formula::ForallT(x, ty, Box::new(body))
    }

    pub fn dep_prod(a: Name, dom: Formula, cod: Formula) -> Formula {
        Formula::DepProd(a, Box::new(dom), Box::new(cod))
    }

    /// Non-dependent implication `A → B`.
    pub fn imp(dom: Formula, cod: Formula) -> Formula {
        Formula::dep_prod(crate::name::fresh("_"), dom, cod)
    }

    pub fn nu(index: TermAst, f: Name, x: Name, body: Formula) -> Formula {
        Formula::Nu { index, f, x, body: Box::new(body) }
    }
}
