//! The dependently typed sequent calculus with delimited control, shared
//! stores, and lazily evaluated (co)fixpoints: a big-step machine that
//! reduces terms in place, a small-step machine with explicit levels, the
//! type checker, and the fueled runner.

pub mod erase;
pub mod machine;
pub mod run;
pub mod smallstep;
pub mod types;

use crate::ast::{Command, ContextAst, Forcing, ProofAst};
use crate::name::Name;

/// What a store lookup did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LookupKind {
    /// Fetched a stored context for a covariable.
    CtxFetch,
    /// Fetched a stored value for a proof variable.
    ValueFetch,
    /// Forced an inductive fixpoint one level.
    FixUnfold,
    /// Forced a coinductive fixpoint one level.
    CofixUnfold,
}

impl LookupKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LookupKind::CtxFetch => "ctx-fetch",
            LookupKind::ValueFetch => "value-fetch",
            LookupKind::FixUnfold => "fix-unfold",
            LookupKind::CofixUnfold => "cofix-unfold",
        }
    }
}

/// What one machine step did: the rule that fired and, for lookups, the
/// store binding it touched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub rule: &'static str,
    pub lookup: Option<(Name, LookupKind)>,
}

impl StepReport {
    fn plain(rule: &'static str) -> StepReport {
        StepReport { rule, lookup: None }
    }

    fn lookup(rule: &'static str, name: Name, kind: LookupKind) -> StepReport {
        StepReport { rule, lookup: Some((name, kind)) }
    }
}

/// No rule applies to a closure that is not terminal. Well-typed closed
/// closures never reach this state, so it signals ill-typed or open input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("machine stuck at {spot}: no rule applies (ill-typed or open input)")]
pub struct StuckNonValue {
    pub spot: String,
}

/// Short head-shape description for stuck reports and traces.
pub fn command_shape(c: &Command) -> String {
    match c {
        Command::CutP { proof, context, .. } => {
            format!("⟨{}‖{}⟩", proof_shape(proof), ctx_shape(context))
        }
        Command::CutT { .. } => "⟨term‖stack⟩".to_string(),
    }
}

fn proof_shape(p: &ProofAst) -> &'static str {
    match p {
        ProofAst::Var(_) => "var",
        ProofAst::Inj(..) => "inj",
        ProofAst::Pair(..) => "pair",
        ProofAst::DepPair(..) => "dep-pair",
        ProofAst::LamT(..) => "λx",
        ProofAst::LamP(..) => "λa",
        ProofAst::Refl => "refl",
        ProofAst::Fix { .. } => "fix",
        ProofAst::Cofix { .. } => "cofix",
        ProofAst::Mu(..) => "μ",
        ProofAst::MuTp(_) => "μtp̂",
        ProofAst::CoTp => "tp̌",
    }
}

fn ctx_shape(e: &ContextAst) -> &'static str {
    match e {
        ContextAst::CoVar(_) => "covar",
        ContextAst::MuT { .. } => "μ̃",
        ContextAst::Tp => "tp̂",
        ContextAst::CoShift(_) => "μ̃tp̌",
        ContextAst::Forcing(f) => match f {
            Forcing::Empty => "[]",
            Forcing::CaseSum(..) => "case",
            Forcing::SplitPair(..) => "split",
            Forcing::SplitDep(..) => "dest",
            Forcing::PushT(..) => "t·e",
            Forcing::PushP(..) => "q·e",
            Forcing::MuEq(_) => "μ̃=",
        },
    }
}
