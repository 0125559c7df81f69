//! Continuation-passing translation of the call-by-name calculus into plain
//! λ-terms, following the phase descent e → p → E → V. Each clause of the
//! expanded translation spells out the small-step rule for its phase, so the
//! simulation and typing arguments go through clause by clause.
//!
//! Commands translate at every phase: ⟦⟨p‖e⟩⟧ᵉ = ⟦e⟧ₑ ⟦p⟧ₚ, ⟦⟨p‖E⟩⟧ᵖ =
//! ⟦p⟧ₚ ⟦E⟧_E, ⟦⟨V‖E⟩⟧^E = ⟦E⟧_E ⟦V⟧_V, ⟦⟨V‖q·e⟩⟧^V = ⟦V⟧_V ⟦q⟧ₚ ⟦e⟧ₑ.

use std::collections::HashMap;

use crate::env::TypingEnv;
use crate::name::{fresh, Name};

use super::ast::{LCommand, LContext, LProof};
use super::types::{Level, Signature, SimpleType, Subject};

/// Plain λ-terms; β-reduction is the only rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TargetTerm {
    Var(Name),
    Lam(Name, Box<TargetTerm>),
    App(Box<TargetTerm>, Box<TargetTerm>),
}

impl TargetTerm {
    pub fn lam(x: Name, body: TargetTerm) -> TargetTerm {
        TargetTerm::Lam(x, Box::new(body))
    }

    pub fn app(f: TargetTerm, arg: TargetTerm) -> TargetTerm {
        TargetTerm::App(Box::new(f), Box::new(arg))
    }

    /// Node count, used by the inhabitation search bound.
    pub fn size(&self) -> usize {
        match self {
            TargetTerm::Var(_) => 1,
            TargetTerm::Lam(_, b) => 1 + b.size(),
            TargetTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }
}

/// Simple target types; `Bot` is an uninhabited atom.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TargetType {
    Atom(String),
    Bot,
    Arrow(Box<TargetType>, Box<TargetType>),
}

impl TargetType {
    pub fn atom(name: impl Into<String>) -> TargetType {
        TargetType::Atom(name.into())
    }

    pub fn arrow(dom: TargetType, cod: TargetType) -> TargetType {
        TargetType::Arrow(Box::new(dom), Box::new(cod))
    }
}

impl std::fmt::Display for TargetType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetType::Atom(a) => f.write_str(a),
            TargetType::Bot => f.write_str("⊥"),
            TargetType::Arrow(dom, cod) => match **dom {
                TargetType::Arrow(..) => write!(f, "({dom}) → {cod}"),
                _ => write!(f, "{dom} → {cod}"),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// The translation.

/// Translate `subject` at `level`. Panics if the subject is not in the
/// syntactic category the level denotes; callers hold that precondition.
pub fn cps_term(subject: &Subject, level: Level) -> TargetTerm {
    match (subject, level) {
        (Subject::Proof(p), Level::Proof) => proof_p(p),
        (Subject::Proof(p), Level::Value) => value_v(p),
        (Subject::Ctx(e), Level::Ctx) => ctx_e(e),
        (Subject::Ctx(e), Level::CoValue) => covalue_e(e),
        (Subject::Cmd(c), Level::Command) => command_c(c),
        (Subject::Cmd(c), _) => command_at(c, level),
        _ => panic!("no translation clause for this subject at level {}", level.as_str()),
    }
}

/// ⟦c⟧ at the phase the annotated machine would examine it.
fn command_at(c: &LCommand, level: Level) -> TargetTerm {
    match level {
        // ⟦⟨p‖e⟩⟧ᵉ ≜ ⟦e⟧ₑ ⟦p⟧ₚ
        Level::Ctx | Level::Command => command_c(c),
        // ⟦⟨p‖E⟩⟧ᵖ ≜ ⟦p⟧ₚ ⟦E⟧_E
        Level::Proof => TargetTerm::app(proof_p(&c.proof), covalue_e(&c.context)),
        // ⟦⟨V‖E⟩⟧^E ≜ ⟦E⟧_E ⟦V⟧_V
        Level::CoValue => TargetTerm::app(covalue_e(&c.context), value_v(&c.proof)),
        // ⟦⟨V‖q·e⟩⟧^V ≜ ⟦V⟧_V ⟦q⟧ₚ ⟦e⟧ₑ
        Level::Value => match &c.context {
            LContext::Push(q, e) => TargetTerm::app(
                TargetTerm::app(value_v(&c.proof), proof_p(q)),
                ctx_e(e),
            ),
            _ => panic!("a command at the value level needs an applicative context"),
        },
    }
}

fn command_c(c: &LCommand) -> TargetTerm {
    TargetTerm::app(ctx_e(&c.context), proof_p(&c.proof))
}

fn ctx_e(e: &LContext) -> TargetTerm {
    match e {
        // ⟦μ̃a.c⟧ₑ ≜ λa.⟦c⟧
        LContext::MuT(a, c) => TargetTerm::lam(a.clone(), command_c(c)),
        // ⟦E⟧ₑ ≜ λp.p ⟦E⟧_E
        _ => {
            let p = fresh("p");
            TargetTerm::lam(
                p.clone(),
                TargetTerm::app(TargetTerm::Var(p), covalue_e(e)),
            )
        }
    }
}

fn proof_p(p: &LProof) -> TargetTerm {
    match p {
        // ⟦μα.c⟧ₚ ≜ λα.⟦c⟧
        LProof::Mu(alpha, c) => TargetTerm::lam(alpha.clone(), command_c(c)),
        // ⟦a⟧ₚ ≜ a
        LProof::Var(a) => TargetTerm::Var(a.clone()),
        // ⟦V⟧ₚ ≜ λE.E ⟦V⟧_V
        _ => {
            let k = fresh("E");
            TargetTerm::lam(
                k.clone(),
                TargetTerm::app(TargetTerm::Var(k), value_v(p)),
            )
        }
    }
}

fn covalue_e(e: &LContext) -> TargetTerm {
    match e {
        // ⟦α⟧_E ≜ α
        LContext::CoVar(alpha) => TargetTerm::Var(alpha.clone()),
        // ⟦𝛋⟧_E ≜ 𝛋
        LContext::CoConst(kappa) => TargetTerm::Var(kappa.clone()),
        // ⟦q·e⟧_E ≜ λV.V ⟦q⟧ₚ ⟦e⟧ₑ
        LContext::Push(q, e2) => {
            let v = fresh("V");
            TargetTerm::lam(
                v.clone(),
                TargetTerm::app(
                    TargetTerm::app(TargetTerm::Var(v), proof_p(q)),
                    ctx_e(e2),
                ),
            )
        }
        LContext::MuT(..) => panic!("μ̃ has no covalue translation"),
    }
}

fn value_v(p: &LProof) -> TargetTerm {
    match p {
        // ⟦λa.p⟧_V ≜ λq e.(λa.e ⟦p⟧ₚ) q
        LProof::Lam(a, body) => {
            let q = fresh("q");
            let e = fresh("e");
            let inner = TargetTerm::lam(
                a.clone(),
                TargetTerm::app(TargetTerm::Var(e.clone()), proof_p(body)),
            );
            TargetTerm::lam(
                q.clone(),
                TargetTerm::lam(e, TargetTerm::app(inner, TargetTerm::Var(q))),
            )
        }
        // ⟦𝐤⟧_V ≜ 𝐤
        LProof::Const(k) => TargetTerm::Var(k.clone()),
        _ => panic!("only abstractions and constants live at the value level"),
    }
}

/// Translate a type at a level. The descent mirrors the term translation:
/// each level is the double negation of the next, bottoming out at values.
pub fn cps_type(a: &SimpleType, level: Level) -> TargetType {
    match level {
        // ⟦A⟧ₑ ≜ ⟦A⟧ₚ → ⊥
        Level::Ctx => TargetType::arrow(cps_type(a, Level::Proof), TargetType::Bot),
        // ⟦A⟧ₚ ≜ ⟦A⟧_E → ⊥
        Level::Proof => TargetType::arrow(cps_type(a, Level::CoValue), TargetType::Bot),
        // ⟦A⟧_E ≜ ⟦A⟧_V → ⊥
        Level::CoValue => TargetType::arrow(cps_type(a, Level::Value), TargetType::Bot),
        Level::Value => match a {
            // ⟦X⟧_V ≜ X
            SimpleType::Atom(x) => TargetType::Atom(x.clone()),
            // ⟦A→B⟧_V ≜ ⟦A⟧ₚ → ⟦B⟧ₑ → ⊥
            SimpleType::Arrow(dom, cod) => TargetType::arrow(
                cps_type(dom, Level::Proof),
                TargetType::arrow(cps_type(cod, Level::Ctx), TargetType::Bot),
            ),
        },
        Level::Command => panic!("commands have no type to translate"),
    }
}

/// Translate a typing environment: proof hypotheses land at level p,
/// context hypotheses at level E, matching where substitution happens.
pub fn cps_env(env: &TypingEnv<SimpleType>, sig: &Signature) -> HashMap<Name, TargetType> {
    let mut out = HashMap::new();
    let names: Vec<Name> = env.names().cloned().collect();
    for name in names {
        if let Some(a) = env.lookup_proof(&name) {
            out.insert(name.clone(), cps_type(a, Level::Proof));
        }
        if let Some(a) = env.lookup_ctx(&name) {
            out.insert(name, cps_type(a, Level::CoValue));
        }
    }
    for (k, a) in sig.const_entries() {
        out.insert(k.clone(), cps_type(a, Level::Value));
    }
    for (kappa, a) in sig.coconst_entries() {
        out.insert(kappa.clone(), cps_type(a, Level::CoValue));
    }
    out
}

// ---------------------------------------------------------------------------
// Target typechecking: unification-based inference, then matching against
// the expected type. Simple types admit principal inference, so checking is
// exact.

#[derive(Clone, PartialEq, Eq, Debug)]
enum Ty {
    Meta(u32),
    Atom(String),
    Bot,
    Arrow(Box<Ty>, Box<Ty>),
}

fn lift(t: &TargetType) -> Ty {
    match t {
        TargetType::Atom(a) => Ty::Atom(a.clone()),
        TargetType::Bot => Ty::Bot,
        TargetType::Arrow(d, c) => Ty::Arrow(Box::new(lift(d)), Box::new(lift(c))),
    }
}

struct Infer {
    next_meta: u32,
    solution: HashMap<u32, Ty>,
}

impl Infer {
    fn new() -> Infer {
        Infer { next_meta: 0, solution: HashMap::new() }
    }

    fn fresh_meta(&mut self) -> Ty {
        self.next_meta += 1;
        Ty::Meta(self.next_meta - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Meta(m) => match self.solution.get(m) {
                Some(bound) => self.resolve(&bound.clone()),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, m: u32, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Meta(n) => n == m,
            Ty::Arrow(d, c) => self.occurs(m, &d) || self.occurs(m, &c),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => true,
            (Ty::Meta(m), other) | (other, Ty::Meta(m)) => {
                if self.occurs(*m, other) {
                    return false;
                }
                self.solution.insert(*m, other.clone());
                true
            }
            (Ty::Atom(x), Ty::Atom(y)) => x == y,
            (Ty::Bot, Ty::Bot) => true,
            (Ty::Arrow(d1, c1), Ty::Arrow(d2, c2)) => {
                self.unify(d1, d2) && self.unify(c1, c2)
            }
            _ => false,
        }
    }

    fn infer(&mut self, scope: &mut Vec<(Name, Ty)>, t: &TargetTerm) -> Option<Ty> {
        match t {
            TargetTerm::Var(x) => scope
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, ty)| ty.clone()),
            TargetTerm::Lam(x, body) => {
                let dom = self.fresh_meta();
                scope.push((x.clone(), dom.clone()));
                let cod = self.infer(scope, body);
                scope.pop();
                Some(Ty::Arrow(Box::new(dom), Box::new(cod?)))
            }
            TargetTerm::App(f, arg) => {
                let tf = self.infer(scope, f)?;
                let ta = self.infer(scope, arg)?;
                let cod = self.fresh_meta();
                if self.unify(&tf, &Ty::Arrow(Box::new(ta), Box::new(cod.clone()))) {
                    Some(cod)
                } else {
                    None
                }
            }
        }
    }
}

/// Does `t` check against `ty` under `env`? Inference is principal, so this
/// answers whether some instantiation of the term's binders matches exactly.
pub fn target_typecheck(
    env: &HashMap<Name, TargetType>,
    t: &TargetTerm,
    ty: &TargetType,
) -> bool {
    let mut infer = Infer::new();
    let mut scope: Vec<(Name, Ty)> = env
        .iter()
        .map(|(n, a)| (n.clone(), lift(a)))
        .collect();
    match infer.infer(&mut scope, t) {
        Some(inferred) => infer.unify(&inferred, &lift(ty)),
        None => false,
    }
}

// ---------------------------------------------------------------------------
// β-reduction.

fn target_free(t: &TargetTerm, x: &Name) -> bool {
    match t {
        TargetTerm::Var(y) => y == x,
        TargetTerm::Lam(y, b) => y != x && target_free(b, x),
        TargetTerm::App(f, a) => target_free(f, x) || target_free(a, x),
    }
}

fn target_subst(t: &TargetTerm, x: &Name, v: &TargetTerm) -> TargetTerm {
    match t {
        TargetTerm::Var(y) => {
            if y == x {
                v.clone()
            } else {
                t.clone()
            }
        }
        TargetTerm::Lam(y, b) => {
            if y == x {
                t.clone()
            } else if target_free(v, y) {
                let y2 = y.refresh();
                let b2 = target_subst(b, y, &TargetTerm::Var(y2.clone()));
                TargetTerm::lam(y2, target_subst(&b2, x, v))
            } else {
                TargetTerm::lam(y.clone(), target_subst(b, x, v))
            }
        }
        TargetTerm::App(f, a) => {
            TargetTerm::app(target_subst(f, x, v), target_subst(a, x, v))
        }
    }
}

/// One leftmost-outermost β-step, if any.
pub fn target_step(t: &TargetTerm) -> Option<TargetTerm> {
    match t {
        TargetTerm::Var(_) => None,
        TargetTerm::App(f, a) => {
            if let TargetTerm::Lam(x, body) = &**f {
                return Some(target_subst(body, x, a));
            }
            if let Some(f2) = target_step(f) {
                return Some(TargetTerm::app(f2, (**a).clone()));
            }
            target_step(a).map(|a2| TargetTerm::app((**f).clone(), a2))
        }
        TargetTerm::Lam(x, b) => {
            target_step(b).map(|b2| TargetTerm::lam(x.clone(), b2))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
#[error("β-normalization gave up after {fuel} steps")]
pub struct TargetFuel {
    pub fuel: u64,
}

/// Leftmost-outermost normalization.
pub fn target_normalize(t: &TargetTerm, fuel: u64) -> Result<TargetTerm, TargetFuel> {
    let mut cur = t.clone();
    for _ in 0..fuel {
        match target_step(&cur) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    match target_step(&cur) {
        Some(_) => Err(TargetFuel { fuel }),
        None => Ok(cur),
    }
}

/// α-equality of target terms.
pub fn target_alpha_eq(a: &TargetTerm, b: &TargetTerm) -> bool {
    fn go(a: &TargetTerm, b: &TargetTerm, pairs: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (TargetTerm::Var(x), TargetTerm::Var(y)) => {
                for (l, r) in pairs.iter().rev() {
                    if l == x || r == y {
                        return l == x && r == y;
                    }
                }
                x == y
            }
            (TargetTerm::Lam(x, ba), TargetTerm::Lam(y, bb)) => {
                pairs.push((x.clone(), y.clone()));
                let ok = go(ba, bb, pairs);
                pairs.pop();
                ok
            }
            (TargetTerm::App(f1, a1), TargetTerm::App(f2, a2)) => {
                go(f1, f2, pairs) && go(a1, a2, pairs)
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Substitution of a target term for a free variable, exposed for the
/// compositionality check ⟦c[q/a]⟧ = ⟦c⟧[⟦q⟧ₚ/a].
pub fn target_substitute(t: &TargetTerm, x: &Name, v: &TargetTerm) -> TargetTerm {
    target_subst(t, x, v)
}

// ---------------------------------------------------------------------------
// Inhabitation search for the consistency check: enumerate closed terms up
// to a node-count bound (binders drawn left to right, de Bruijn style) and
// ask whether any types at ⊥.

/// All closed terms with at most `max_size` nodes, up to α-equivalence.
pub fn closed_terms_to_size(max_size: usize) -> Vec<TargetTerm> {
    fn build(size: usize, depth: usize, binders: &[Name], out: &mut Vec<TargetTerm>) {
        if size == 0 {
            return;
        }
        if size == 1 {
            for b in binders {
                out.push(TargetTerm::Var(b.clone()));
            }
            return;
        }
        // Lam consumes one node.
        let x = Name { base: format!("x{depth}"), uid: depth as u64 };
        let mut inner = binders.to_vec();
        inner.push(x.clone());
        let mut bodies = Vec::new();
        build(size - 1, depth + 1, &inner, &mut bodies);
        for b in bodies {
            out.push(TargetTerm::lam(x.clone(), b));
        }
        // App splits the remaining nodes.
        for left in 1..size - 1 {
            let mut fs = Vec::new();
            build(left, depth, binders, &mut fs);
            let mut args = Vec::new();
            build(size - 1 - left, depth, binders, &mut args);
            for f in &fs {
                for a in &args {
                    out.push(TargetTerm::app(f.clone(), a.clone()));
                }
            }
        }
    }
    let mut out = Vec::new();
    for size in 1..=max_size {
        build(size, 0, &[], &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmmt::ast::{k_of, mk_app};
    use crate::lmmt::smallstep::{lmmt_smallstep, Annotated, Phase};

    fn var(n: &Name) -> TargetTerm {
        TargetTerm::Var(n.clone())
    }

    #[test]
    fn variables_and_covariables_translate_to_themselves() {
        let a = fresh("a");
        let alpha = fresh("alpha");
        assert_eq!(
            cps_term(&Subject::Proof(LProof::Var(a.clone())), Level::Proof),
            var(&a)
        );
        assert_eq!(
            cps_term(&Subject::Ctx(LContext::CoVar(alpha.clone())), Level::CoValue),
            var(&alpha)
        );
    }

    #[test]
    fn binders_translate_to_target_abstractions() {
        // ⟦μα.⟨a‖α⟩⟧ₚ = λα.(λp.p α) a and ⟦q·ε⟧_E = λV.V ⟦q⟧ₚ ⟦ε⟧ₑ.
        let a = fresh("a");
        let alpha = fresh("alpha");
        let mu = LProof::Mu(
            alpha.clone(),
            Box::new(LCommand::cut(
                LProof::Var(a.clone()),
                LContext::CoVar(alpha.clone()),
            )),
        );
        let got = cps_term(&Subject::Proof(mu), Level::Proof);
        let p = fresh("p");
        let want = TargetTerm::lam(
            alpha.clone(),
            TargetTerm::app(
                TargetTerm::lam(
                    p.clone(),
                    TargetTerm::app(var(&p), var(&alpha)),
                ),
                var(&a),
            ),
        );
        assert!(target_alpha_eq(&got, &want));

        let q = fresh("q");
        let eps = fresh("eps");
        let stack = LContext::Push(
            Box::new(LProof::Var(q.clone())),
            Box::new(LContext::CoConst(eps.clone())),
        );
        let got = cps_term(&Subject::Ctx(stack), Level::CoValue);
        let v = fresh("V");
        let p2 = fresh("p");
        let want = TargetTerm::lam(
            v.clone(),
            TargetTerm::app(
                TargetTerm::app(var(&v), var(&q)),
                TargetTerm::lam(p2.clone(), TargetTerm::app(var(&p2), var(&eps))),
            ),
        );
        assert!(target_alpha_eq(&got, &want));
    }

    #[test]
    fn atomic_types_unfold_through_the_levels() {
        // ⟦X⟧ₚ = ((X→⊥)→⊥)→⊥ by unfolding p → E → V.
        let x = SimpleType::atom("X");
        assert_eq!(cps_type(&x, Level::Value), TargetType::atom("X"));
        let want = TargetType::arrow(
            TargetType::arrow(
                TargetType::arrow(TargetType::atom("X"), TargetType::Bot),
                TargetType::Bot,
            ),
            TargetType::Bot,
        );
        assert_eq!(cps_type(&x, Level::Proof), want);
    }

    #[test]
    fn arrow_types_take_an_argument_and_a_continuation() {
        let ab = SimpleType::arrow(SimpleType::atom("A"), SimpleType::atom("B"));
        let want = TargetType::arrow(
            cps_type(&SimpleType::atom("A"), Level::Proof),
            TargetType::arrow(
                cps_type(&SimpleType::atom("B"), Level::Ctx),
                TargetType::Bot,
            ),
        );
        assert_eq!(cps_type(&ab, Level::Value), want);
    }

    #[test]
    fn the_identity_checks_at_bottom_to_bottom() {
        let x = fresh("x");
        let id = TargetTerm::lam(x.clone(), var(&x));
        let ty = TargetType::arrow(TargetType::Bot, TargetType::Bot);
        assert!(target_typecheck(&HashMap::new(), &id, &ty));
        assert!(!target_typecheck(
            &HashMap::new(),
            &id,
            &TargetType::arrow(TargetType::Bot, TargetType::atom("X")),
        ));
    }

    #[test]
    fn self_application_does_not_typecheck() {
        let x = fresh("x");
        let t = TargetTerm::lam(
            x.clone(),
            TargetTerm::app(var(&x), var(&x)),
        );
        let ty = TargetType::arrow(TargetType::Bot, TargetType::Bot);
        assert!(!target_typecheck(&HashMap::new(), &t, &ty));
    }

    #[test]
    fn no_closed_term_inhabits_bottom() {
        let terms = closed_terms_to_size(7);
        assert!(terms.len() > 100);
        for t in &terms {
            assert!(
                !target_typecheck(&HashMap::new(), t, &TargetType::Bot),
                "{t:?} claims ⊥"
            );
        }
    }

    #[test]
    fn the_control_proof_translation_is_well_typed() {
        // ⟦λa.μα.⟨a‖k_α·α⟩⟧ₚ : ⟦((A→B)→A)→A⟧ₚ.
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
        let t = cps_term(&Subject::Proof(peirce), Level::Proof);
        assert!(target_typecheck(
            &HashMap::new(),
            &t,
            &cps_type(&ty, Level::Proof),
        ));
    }

    #[test]
    fn beta_contraction_reaches_the_deferred_command() {
        // ⟦⟨λa.p‖q·e⟩⟧^V →β² ⟦⟨q‖μ̃a.⟨p‖e⟩⟩⟧ᵉ.
        let a = fresh("a");
        let q = fresh("q");
        let eps = fresh("eps");
        let lam = LProof::Lam(a.clone(), Box::new(LProof::Var(a.clone())));
        let stack = LContext::Push(
            Box::new(LProof::Var(q.clone())),
            Box::new(LContext::CoConst(eps.clone())),
        );
        let redex = LCommand::cut(lam.clone(), stack.clone());
        let contractum = LCommand::cut(
            LProof::Var(q),
            LContext::MuT(
                a.clone(),
                Box::new(LCommand::cut(
                    LProof::Var(a),
                    LContext::CoConst(eps),
                )),
            ),
        );
        let start = cps_term(&Subject::Cmd(redex), Level::Value);
        let want = cps_term(&Subject::Cmd(contractum), Level::Command);
        let one = target_step(&start).unwrap();
        let two = target_step(&one).unwrap();
        assert!(target_alpha_eq(&two, &want));
    }

    #[test]
    fn every_machine_step_maps_to_target_reduction() {
        // Drive ⟨mk_app(λa.a, 𝐪)‖μ̃b.⟨b‖ε⟩⟩ through the annotated machine and
        // replay each step in the target.
        let a = fresh("a");
        let b = fresh("b");
        let q = LProof::Const(fresh("q"));
        let eps = LContext::CoConst(fresh("eps"));
        let id = LProof::Lam(a.clone(), Box::new(LProof::Var(a)));
        let seed = LCommand::cut(
            mk_app(id, q),
            LContext::MuT(b.clone(), Box::new(LCommand::cut(LProof::Var(b), eps))),
        );
        let mut ac = Annotated::seed(seed);
        let mut transitions = 0;
        while let Some(next) = lmmt_smallstep(&ac) {
            let before = cps_term(&Subject::Cmd(ac.command.clone()), phase_level(ac.phase));
            let after = cps_term(&Subject::Cmd(next.command.clone()), phase_level(next.phase));
            let mut cur = before;
            let mut hit = false;
            for _ in 0..4 {
                match target_step(&cur) {
                    Some(stepped) => {
                        cur = stepped;
                        if target_alpha_eq(&cur, &after) {
                            hit = true;
                            break;
                        }
                    }
                    None => break,
                }
            }
            assert!(hit, "no β⁺ path for {:?}", ac.command);
            transitions += 1;
            ac = next;
        }
        assert!(transitions >= 6);
    }

    fn phase_level(ph: Phase) -> Level {
        match ph {
            Phase::Ctx => Level::Ctx,
            Phase::Proof => Level::Proof,
            Phase::CoValue => Level::CoValue,
            Phase::Value => Level::Value,
        }
    }

    #[test]
    fn translation_commutes_with_substitution() {
        // ⟦c[q/a]⟧ = ⟦c⟧[⟦q⟧ₚ/a] on a β-redex body.
        let a = fresh("a");
        let alpha = fresh("alpha");
        let q = fresh("qv");
        let c = LCommand::cut(
            LProof::Var(a.clone()),
            LContext::Push(
                Box::new(LProof::Var(a.clone())),
                Box::new(LContext::CoVar(alpha)),
            ),
        );
        let replacement = LProof::Lam(q.clone(), Box::new(LProof::Var(q)));
        let substituted = crate::lmmt::ast::subst_command(
            &c,
            &a,
            &crate::lmmt::ast::LRepl::Proof(replacement.clone()),
        );
        let lhs = cps_term(&Subject::Cmd(substituted), Level::Command);
        let rhs = target_substitute(
            &cps_term(&Subject::Cmd(c), Level::Command),
            &a,
            &cps_term(&Subject::Proof(replacement), Level::Proof),
        );
        assert!(target_alpha_eq(&lhs, &rhs));
    }

    #[test]
    fn normal_forms_are_irreducible() {
        let x = fresh("x");
        let y = fresh("y");
        let t = TargetTerm::app(
            TargetTerm::lam(x.clone(), var(&x)),
            var(&y),
        );
        let nf = target_normalize(&t, 10).unwrap();
        assert!(target_alpha_eq(&nf, &var(&y)));
        assert_eq!(target_step(&nf), None);

        let omega_inner = TargetTerm::lam(
            x.clone(),
            TargetTerm::app(var(&x), var(&x)),
        );
        let omega = TargetTerm::app(omega_inner.clone(), omega_inner);
        assert_eq!(target_normalize(&omega, 25), Err(TargetFuel { fuel: 25 }));
    }
}
