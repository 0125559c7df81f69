//! The two-sided core calculus: proofs cut against contexts, with control
//! binders on both sides, a strategy-parameterized head reduction, a
//! phase-annotated small-step machine, the phase-refined call-by-name type
//! system, and its continuation-passing translation.

pub mod ast;
pub mod cps;
pub mod machine;
pub mod smallstep;
pub mod types;

pub use ast::{call_cc, k_of, mk_app, LCommand, LContext, LProof};
pub use cps::{
    cps_env, cps_term, cps_type, target_alpha_eq, target_normalize, target_step,
    target_typecheck, TargetTerm, TargetType,
};
pub use machine::{cbn, cbv, lmmt_run, lmmt_step, Strategy};
pub use smallstep::{lmmt_smallstep, Annotated, Phase};
pub use types::{lmmt_typecheck, Level, LmmtError, Signature, SimpleType, Subject};
