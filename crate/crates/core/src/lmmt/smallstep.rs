//! The context-free call-by-name machine: the command carries a phase mark
//! and each rule either refocuses or rewrites. Exactly six rules; variable
//! and covariable heads have none.

use super::ast::{subst_command, LCommand, LContext, LProof, LRepl};

/// The examination phase: context, proof, covalue, value.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Phase {
    /// `e`: examine the context.
    Ctx,
    /// `p`: the context is settled; examine the proof.
    Proof,
    /// `E`: both sides settled down to a covalue.
    CoValue,
    /// `V`: the proof is a value facing an applicative context.
    Value,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Ctx => "e",
            Phase::Proof => "p",
            Phase::CoValue => "E",
            Phase::Value => "V",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A command under examination.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Annotated {
    pub command: LCommand,
    pub phase: Phase,
}

impl Annotated {
    /// Runs start by examining the context.
    pub fn seed(command: LCommand) -> Annotated {
        Annotated { command, phase: Phase::Ctx }
    }
}

fn at(command: LCommand, phase: Phase) -> Option<Annotated> {
    Some(Annotated { command, phase })
}

/// The value category of the phase-marked grammar: abstractions and
/// constants. Variables stay at the proof level because μ̃ substitutes whole
/// proofs for them, so they never descend further.
fn examined_value(p: &LProof) -> bool {
    matches!(p, LProof::Lam(..) | LProof::Const(_))
}

/// One step of the phase-annotated machine.
pub fn lmmt_smallstep(ac: &Annotated) -> Option<Annotated> {
    let LCommand { proof, context } = &ac.command;
    match ac.phase {
        Phase::Ctx => match context {
            // ⟨p‖μ̃a.c⟩ₑ → cₑ[p/a]
            LContext::MuT(a, body) => at(
                subst_command(body, a, &LRepl::Proof(proof.clone())),
                Phase::Ctx,
            ),
            // ⟨p‖E⟩ₑ → ⟨p‖E⟩ₚ
            e if e.is_covalue() => at(ac.command.clone(), Phase::Proof),
            _ => None,
        },
        Phase::Proof => match proof {
            // ⟨μα.c‖E⟩ₚ → cₑ[E/α]
            LProof::Mu(alpha, body) if context.is_covalue() => at(
                subst_command(body, alpha, &LRepl::Ctx(context.clone())),
                Phase::Ctx,
            ),
            // ⟨V‖E⟩ₚ → ⟨V‖E⟩_E
            p if examined_value(p) && context.is_covalue() => {
                at(ac.command.clone(), Phase::CoValue)
            }
            _ => None,
        },
        Phase::CoValue => match context {
            // ⟨V‖q·e⟩_E → ⟨V‖q·e⟩_V
            LContext::Push(..) if examined_value(proof) => {
                at(ac.command.clone(), Phase::Value)
            }
            _ => None,
        },
        Phase::Value => match (proof, context) {
            // ⟨λa.p‖q·e⟩_V → ⟨q‖μ̃a.⟨p‖e⟩⟩ₑ
            (LProof::Lam(a, p), LContext::Push(q, e)) => {
                let inner = LCommand::cut((**p).clone(), (**e).clone());
                at(
                    LCommand::cut(
                        (**q).clone(),
                        LContext::MuT(a.clone(), Box::new(inner)),
                    ),
                    Phase::Ctx,
                )
            }
            _ => None,
        },
    }
}
