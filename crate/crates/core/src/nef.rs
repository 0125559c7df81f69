//! The negative-elimination-free (NEF) fragment and the shape checks for
//! (co-)delimited commands.
//!
//! A NEF proof uses, up to renaming, a single distinguished covariable and
//! never builds argument stacks `t·e` or `q·e`, so it cannot discard its
//! continuation. Checking is purely syntactic: we track the covariable bound
//! by the nearest enclosing μ.

use crate::ast::{Binding, Command, ContextAst, CoTermAst, Forcing, ProofAst, Storable, Store};
use crate::name::Name;

/// Is `p` negative-elimination-free?
pub fn is_nef(p: &ProofAst) -> bool {
    nef_proof(p, None)
}

fn nef_proof(p: &ProofAst, star: Option<&Name>) -> bool {
    match p {
        ProofAst::Var(_) | ProofAst::Refl => true,
        ProofAst::Inj(_, q) => nef_proof(q, star),
        ProofAst::Pair(q, r) => nef_proof(q, star) && nef_proof(r, star),
        ProofAst::DepPair(_, q) => nef_proof(q, star),
        // Abstraction bodies are unrestricted.
        ProofAst::LamT(..) | ProofAst::LamP(..) => true,
        ProofAst::Fix { base, step, .. } => nef_proof(base, star) && nef_proof(step, star),
        ProofAst::Cofix { body, .. } => nef_proof(body, star),
        ProofAst::Mu(alpha, c) => nef_command(c, Some(alpha)),
        ProofAst::MuTp(c) => is_delimited_command(c),
        ProofAst::CoTp => false,
    }
}

fn nef_command(c: &Command, star: Option<&Name>) -> bool {
    match c {
        Command::CutP { proof, context, .. } => {
            nef_proof(proof, star) && nef_context(context, star)
        }
        Command::CutT { .. } => false,
    }
}

fn nef_context(e: &ContextAst, star: Option<&Name>) -> bool {
    match e {
        ContextAst::CoVar(beta) => star == Some(beta),
        ContextAst::MuT { body, tail, .. } => {
            nef_store(tail, star) && nef_command(body, star)
        }
        ContextAst::Forcing(f) => match f {
            Forcing::CaseSum(_, c1, _, c2) => nef_command(c1, star) && nef_command(c2, star),
            Forcing::SplitPair(_, _, c) => nef_command(c, star),
            Forcing::SplitDep(_, _, c) => nef_command(c, star),
            Forcing::Empty | Forcing::PushT(..) | Forcing::PushP(..) | Forcing::MuEq(_) => false,
        },
        // Co-shifts are NEF whenever their body is a well-shaped co-delimited
        // command; the tp̌ cut at the bottom plays the role of the star.
        ContextAst::CoShift(c) => is_codelimited_command(c),
        ContextAst::Tp => false,
    }
}

// Captured store suffixes may ride along under μ̃ binders; their proof
// bindings must stay NEF and context bindings would smuggle in extra
// covariables, so they are rejected.
fn nef_store(tail: &Store, star: Option<&Name>) -> bool {
    tail.bindings().iter().all(|b| match b {
        Binding::Proof { storable, .. } => match storable {
            Storable::Val(v) => nef_proof(v, star),
            Storable::FixThunk { base, step, .. } => {
                nef_proof(base, star) && nef_proof(step, star)
            }
            Storable::CofixThunk { body, .. } => nef_proof(body, star),
        },
        Binding::Ctx { .. } => false,
    })
}

/// Is `c` a delimited command: either `⟨p‖tp̂⟩`, or a NEF proof cut against
/// a μ̃-shaped context whose bodies are again delimited?
pub fn is_delimited_command(c: &Command) -> bool {
    match c {
        Command::CutP { proof, context, .. } => match &**context {
            ContextAst::Tp => true,
            _ => nef_proof(proof, None) && is_delimited_context(context),
        },
        // Term cuts occur in delimited position only through the small-step
        // machinery, with a delimited body behind the binder.
        Command::CutT { coterm, .. } => is_delimited_coterm(coterm),
    }
}

fn is_delimited_context(e: &ContextAst) -> bool {
    match e {
        ContextAst::MuT { body, .. } => is_delimited_command(body),
        ContextAst::Forcing(Forcing::CaseSum(_, c1, _, c2)) => {
            is_delimited_command(c1) && is_delimited_command(c2)
        }
        ContextAst::Forcing(Forcing::SplitPair(_, _, c)) => is_delimited_command(c),
        ContextAst::Forcing(Forcing::SplitDep(_, _, c)) => is_delimited_command(c),
        _ => false,
    }
}

fn is_delimited_coterm(pi: &CoTermAst) -> bool {
    match pi {
        CoTermAst::PushTerm(_, rest) => is_delimited_coterm(rest),
        CoTermAst::MuX { body, tail, .. } => {
            nef_store(tail, None) && is_delimited_command(body)
        }
    }
}

/// Is `c` a co-delimited command: the dual shape, with `tp̌` in proof
/// position as the eventual head?
pub fn is_codelimited_command(c: &Command) -> bool {
    match c {
        Command::CutP { proof, context, .. } => match &**proof {
            ProofAst::CoTp => true,
            p => nef_proof(p, None) && is_codelimited_context(context),
        },
        Command::CutT { coterm, .. } => is_codelimited_coterm(coterm),
    }
}

fn is_codelimited_context(e: &ContextAst) -> bool {
    match e {
        ContextAst::MuT { body, .. } => is_codelimited_command(body),
        ContextAst::Forcing(Forcing::CaseSum(_, c1, _, c2)) => {
            is_codelimited_command(c1) && is_codelimited_command(c2)
        }
        ContextAst::Forcing(Forcing::SplitPair(_, _, c)) => is_codelimited_command(c),
        ContextAst::Forcing(Forcing::SplitDep(_, _, c)) => is_codelimited_command(c),
        _ => false,
    }
}

fn is_codelimited_coterm(pi: &CoTermAst) -> bool {
    match pi {
        CoTermAst::PushTerm(_, rest) => is_codelimited_coterm(rest),
        CoTermAst::MuX { body, tail, .. } => {
            nef_store(tail, None) && is_codelimited_command(body)
        }
    }
}
