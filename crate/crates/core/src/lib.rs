//! Typecheckers and abstract machines for three classical sequent calculi:
//! a strategy-parameterized core with μ/μ̃ binders, a call-by-need calculus
//! with explicit shared stores, and a dependently typed calculus with
//! delimited control and lazily evaluated (co)fixpoints, together with the
//! choice-principle proof terms that run on it.

pub mod ast;
pub mod derivation;
pub mod dlpaw;
pub mod env;
pub mod lmmt;
pub mod equational;
pub mod formula;
pub mod name;
pub mod nef;
pub mod sigma;
pub mod subst;
