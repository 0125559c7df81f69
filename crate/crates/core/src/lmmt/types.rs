//! The phase-refined call-by-name type system. Five sequent levels: values,
//! proofs, covalues, contexts, and commands; the two dereliction rules move
//! a settled side up one level, and collapsing the levels yields the plain
//! two-sided system.

use std::collections::HashMap;

use crate::derivation::Derivation;
use crate::env::TypingEnv;
use crate::name::Name;

use super::ast::{LCommand, LContext, LProof};

/// Simple types over atoms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SimpleType {
    Atom(String),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn atom(name: impl Into<String>) -> SimpleType {
        SimpleType::Atom(name.into())
    }

    pub fn arrow(dom: SimpleType, cod: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(dom), Box::new(cod))
    }
}

impl std::fmt::Display for SimpleType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimpleType::Atom(a) => f.write_str(a),
            SimpleType::Arrow(dom, cod) => match **dom {
                SimpleType::Arrow(..) => write!(f, "({dom}) → {cod}"),
                _ => write!(f, "{dom} → {cod}"),
            },
        }
    }
}

/// Types for the inert atoms.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    consts: HashMap<Name, SimpleType>,
    coconsts: HashMap<Name, SimpleType>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn with_const(mut self, k: Name, ty: SimpleType) -> Signature {
        self.consts.insert(k, ty);
        self
    }

    pub fn with_coconst(mut self, kappa: Name, ty: SimpleType) -> Signature {
        self.coconsts.insert(kappa, ty);
        self
    }

    pub fn const_type(&self, k: &Name) -> Option<&SimpleType> {
        self.consts.get(k)
    }

    pub fn coconst_type(&self, kappa: &Name) -> Option<&SimpleType> {
        self.coconsts.get(kappa)
    }

    pub fn const_entries(&self) -> impl Iterator<Item = (&Name, &SimpleType)> {
        self.consts.iter()
    }

    pub fn coconst_entries(&self) -> impl Iterator<Item = (&Name, &SimpleType)> {
        self.coconsts.iter()
    }
}

/// The five sequent levels.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Level {
    Proof,
    Value,
    Ctx,
    CoValue,
    Command,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Proof => "p",
            Level::Value => "V",
            Level::Ctx => "e",
            Level::CoValue => "E",
            Level::Command => "c",
        }
    }
}

/// The syntax object under judgment.
#[derive(Clone, Debug)]
pub enum Subject {
    Proof(LProof),
    Ctx(LContext),
    Cmd(LCommand),
}

/// Why a sequent was refused.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LmmtError {
    #[error("unbound {kind} {name}")]
    Unbound { kind: &'static str, name: Name },
    #[error("no rule derives {sequent}")]
    RuleMismatch { sequent: String },
}

fn mismatch(sequent: String) -> LmmtError {
    LmmtError::RuleMismatch { sequent }
}

fn proof_sequent(p: &LProof, level: Level, ty: &SimpleType) -> String {
    format!("⊢_{} {:?} : {}", level.as_str(), p, ty)
}

fn ctx_sequent(e: &LContext, level: Level, ty: &SimpleType) -> String {
    format!("⊢_{} {:?} : ({})⊥⊥", level.as_str(), e, ty)
}

/// Check `subject` at `level`. Commands take no type; every other level
/// requires one.
pub fn lmmt_typecheck(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    subject: &Subject,
    level: Level,
    ty: Option<&SimpleType>,
) -> Result<Derivation, LmmtError> {
    match (subject, level) {
        (Subject::Proof(p), Level::Value) => {
            let ty = ty.ok_or_else(|| mismatch("a value sequent without a type".into()))?;
            check_value(env, sig, p, ty)
        }
        (Subject::Proof(p), Level::Proof) => {
            let ty = ty.ok_or_else(|| mismatch("a proof sequent without a type".into()))?;
            check_proof(env, sig, p, ty)
        }
        (Subject::Ctx(e), Level::CoValue) => {
            let ty = ty.ok_or_else(|| mismatch("a covalue sequent without a type".into()))?;
            check_covalue(env, sig, e, ty)
        }
        (Subject::Ctx(e), Level::Ctx) => {
            let ty = ty.ok_or_else(|| mismatch("a context sequent without a type".into()))?;
            check_ctx(env, sig, e, ty)
        }
        (Subject::Cmd(c), Level::Command) => {
            if ty.is_some() {
                return Err(mismatch("a command sequent carries no type".into()));
            }
            check_command(env, sig, c)
        }
        _ => Err(mismatch(format!(
            "subject does not fit level {}",
            level.as_str()
        ))),
    }
}

fn check_value(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    p: &LProof,
    ty: &SimpleType,
) -> Result<Derivation, LmmtError> {
    match p {
        // A variable is judged at the proof level, never at the value level:
        // μ̃ binds it to a whole proof.
        LProof::Var(_) => Err(mismatch(proof_sequent(p, Level::Value, ty))),
        LProof::Const(k) => match sig.const_type(k) {
            Some(found) if found == ty => Ok(Derivation::leaf("const")),
            Some(_) => Err(mismatch(proof_sequent(p, Level::Value, ty))),
            None => Err(LmmtError::Unbound { kind: "constant", name: k.clone() }),
        },
        LProof::Lam(a, body) => match ty {
            SimpleType::Arrow(dom, cod) => {
                let env2 = env.clone().with_proof(a.clone(), (**dom).clone());
                let d = check_proof(&env2, sig, body, cod)?;
                Ok(Derivation::node("lam", vec![d]))
            }
            _ => Err(mismatch(proof_sequent(p, Level::Value, ty))),
        },
        LProof::Mu(..) => Err(mismatch(proof_sequent(p, Level::Value, ty))),
    }
}

fn check_proof(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    p: &LProof,
    ty: &SimpleType,
) -> Result<Derivation, LmmtError> {
    match p {
        LProof::Var(a) => match env.lookup_proof(a) {
            Some(found) if found == ty => Ok(Derivation::leaf("ax-r")),
            Some(_) => Err(mismatch(proof_sequent(p, Level::Proof, ty))),
            None => Err(LmmtError::Unbound { kind: "variable", name: a.clone() }),
        },
        LProof::Mu(alpha, body) => {
            let env2 = env.clone().with_ctx(alpha.clone(), ty.clone());
            let d = check_command(&env2, sig, body)?;
            Ok(Derivation::node("mu", vec![d]))
        }
        _ => {
            let d = check_value(env, sig, p, ty)?;
            Ok(Derivation::node("deref-value", vec![d]))
        }
    }
}

fn check_covalue(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    e: &LContext,
    ty: &SimpleType,
) -> Result<Derivation, LmmtError> {
    match e {
        LContext::CoVar(alpha) => match env.lookup_ctx(alpha) {
            Some(found) if found == ty => Ok(Derivation::leaf("ax-e")),
            Some(_) => Err(mismatch(ctx_sequent(e, Level::CoValue, ty))),
            None => Err(LmmtError::Unbound { kind: "covariable", name: alpha.clone() }),
        },
        LContext::CoConst(kappa) => match sig.coconst_type(kappa) {
            Some(found) if found == ty => Ok(Derivation::leaf("coconst")),
            Some(_) => Err(mismatch(ctx_sequent(e, Level::CoValue, ty))),
            None => Err(LmmtError::Unbound { kind: "co-constant", name: kappa.clone() }),
        },
        LContext::Push(q, e2) => match ty {
            SimpleType::Arrow(dom, cod) => {
                let dq = check_proof(env, sig, q, dom)?;
                let de = check_ctx(env, sig, e2, cod)?;
                Ok(Derivation::node("push", vec![dq, de]))
            }
            _ => Err(mismatch(ctx_sequent(e, Level::CoValue, ty))),
        },
        LContext::MuT(..) => Err(mismatch(ctx_sequent(e, Level::CoValue, ty))),
    }
}

fn check_ctx(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    e: &LContext,
    ty: &SimpleType,
) -> Result<Derivation, LmmtError> {
    match e {
        LContext::MuT(a, body) => {
            let env2 = env.clone().with_proof(a.clone(), ty.clone());
            let d = check_command(&env2, sig, body)?;
            Ok(Derivation::node("mu-tilde", vec![d]))
        }
        _ => {
            let d = check_covalue(env, sig, e, ty)?;
            Ok(Derivation::node("deref-covalue", vec![d]))
        }
    }
}

fn synth_proof(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    p: &LProof,
) -> Option<SimpleType> {
    match p {
        LProof::Var(a) => env.lookup_proof(a).cloned(),
        LProof::Const(k) => sig.const_type(k).cloned(),
        _ => None,
    }
}

fn synth_ctx(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    e: &LContext,
) -> Option<SimpleType> {
    match e {
        LContext::CoVar(alpha) => env.lookup_ctx(alpha).cloned(),
        LContext::CoConst(kappa) => sig.coconst_type(kappa).cloned(),
        LContext::Push(q, e2) => {
            let dom = synth_proof(env, sig, q)?;
            let cod = synth_ctx(env, sig, e2)?;
            Some(SimpleType::arrow(dom, cod))
        }
        LContext::MuT(..) => None,
    }
}

fn check_command(
    env: &TypingEnv<SimpleType>,
    sig: &Signature,
    c: &LCommand,
) -> Result<Derivation, LmmtError> {
    // The cut formula comes from whichever side determines one.
    if let Some(ty) = synth_proof(env, sig, &c.proof) {
        let dp = check_proof(env, sig, &c.proof, &ty)?;
        let de = check_ctx(env, sig, &c.context, &ty)?;
        return Ok(Derivation::node("cut", vec![dp, de]));
    }
    if let Some(ty) = synth_ctx(env, sig, &c.context) {
        let dp = check_proof(env, sig, &c.proof, &ty)?;
        let de = check_ctx(env, sig, &c.context, &ty)?;
        return Ok(Derivation::node("cut", vec![dp, de]));
    }
    Err(mismatch(format!(
        "the cut formula of ⟨{:?}‖{:?}⟩",
        c.proof, c.context
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmmt::ast::{k_of, mk_app};
    use crate::name::fresh;

    fn x() -> SimpleType {
        SimpleType::atom("X")
    }

    #[test]
    fn the_identity_is_a_value_of_arrow_type() {
        let a = fresh("a");
        let id = LProof::Lam(a.clone(), Box::new(LProof::Var(a)));
        let env = TypingEnv::new();
        let d = lmmt_typecheck(
            &env,
            &Signature::new(),
            &Subject::Proof(id),
            Level::Value,
            Some(&SimpleType::arrow(x(), x())),
        )
        .unwrap();
        assert!(d.uses_rule("lam"));
    }

    #[test]
    fn the_control_operator_types_at_peirce() {
        // λa.μα.⟨a‖k_α·α⟩ : ((A→B)→A)→A.
        let a = fresh("a");
        let alpha = fresh("alpha");
        let peirce = LProof::Lam(
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
        );
        let ab = SimpleType::arrow(SimpleType::atom("A"), SimpleType::atom("B"));
        let ty = SimpleType::arrow(
            SimpleType::arrow(ab, SimpleType::atom("A")),
            SimpleType::atom("A"),
        );
        let env = TypingEnv::new();
        let got = lmmt_typecheck(
            &env,
            &Signature::new(),
            &Subject::Proof(peirce),
            Level::Proof,
            Some(&ty),
        );
        assert!(got.unwrap().uses_rule("push"));
    }

    #[test]
    fn cut_sides_must_agree() {
        let a = fresh("a");
        let alpha = fresh("alpha");
        let env = TypingEnv::new()
            .with_proof(a.clone(), SimpleType::atom("A"))
            .with_ctx(alpha.clone(), SimpleType::atom("B"));
        let c = LCommand::cut(LProof::Var(a), LContext::CoVar(alpha));
        let got = lmmt_typecheck(
            &env,
            &Signature::new(),
            &Subject::Cmd(c),
            Level::Command,
            None,
        );
        assert!(matches!(got, Err(LmmtError::RuleMismatch { .. })));
    }

    #[test]
    fn application_composes_arrow_types() {
        // p : A→B, q : A ⟹ mk_app(p, q) : B.
        let p = fresh("p");
        let q = fresh("q");
        let env = TypingEnv::new()
            .with_proof(
                p.clone(),
                SimpleType::arrow(SimpleType::atom("A"), SimpleType::atom("B")),
            )
            .with_proof(q.clone(), SimpleType::atom("A"));
        let app = mk_app(LProof::Var(p), LProof::Var(q));
        let got = lmmt_typecheck(
            &env,
            &Signature::new(),
            &Subject::Proof(app),
            Level::Proof,
            Some(&SimpleType::atom("B")),
        );
        assert!(got.is_ok());
    }

    #[test]
    fn variables_sit_at_the_proof_level() {
        let a = fresh("a");
        let env = TypingEnv::new().with_proof(a.clone(), x());
        let subject = Subject::Proof(LProof::Var(a));
        let sig = Signature::new();
        assert!(lmmt_typecheck(&env, &sig, &subject, Level::Proof, Some(&x())).is_ok());
        assert!(lmmt_typecheck(&env, &sig, &subject, Level::Value, Some(&x())).is_err());
    }

    #[test]
    fn unknown_constants_are_unbound() {
        let k = fresh("k");
        let got = lmmt_typecheck(
            &TypingEnv::new(),
            &Signature::new(),
            &Subject::Proof(LProof::Const(k)),
            Level::Value,
            Some(&x()),
        );
        assert!(matches!(got, Err(LmmtError::Unbound { .. })));
    }
}
