//! Capture-avoiding substitution, alpha-equivalence, and free-name
//! computation for every syntactic class.
//!
//! Substitution renames binders on the fly (with globally fresh names) only
//! when a binder would capture a free name of the replacement. Names are
//! shared across the term/proof/context namespaces, so substituting at an
//! occurrence of the wrong kind is a structured error rather than a panic.

use crate::ast::{
    Binding, Closure, Command, ContextAst, CoTermAst, Forcing, ProofAst, Storable, Store, TermAst,
};
use crate::formula::{Formula, TypeExpr};
use crate::name::Name;
use std::collections::HashSet;

/// Which syntactic class a name occurrence belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AstKind {
    Term,
    Proof,
    Context,
}

impl std::fmt::Display for AstKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AstKind::Term => "term",
            AstKind::Proof => "proof",
            AstKind::Context => "context",
        };
        write!(f, "{s}")
    }
}

/// What to substitute for the target name.
#[derive(Clone, Debug)]
pub enum Replacement {
    Term(TermAst),
    Proof(ProofAst),
    Ctx(ContextAst),
}

impl Replacement {
    pub fn kind(&self) -> AstKind {
        match self {
            Replacement::Term(_) => AstKind::Term,
            Replacement::Proof(_) => AstKind::Proof,
            Replacement::Ctx(_) => AstKind::Context,
        }
    }

    fn free_names(&self) -> HashSet<Name> {
        match self {
            Replacement::Term(t) => free_names_term(t),
            Replacement::Proof(p) => free_names_proof(p),
            Replacement::Ctx(e) => free_names_ctx(e),
        }
    }
}

/// The target name occurs at a kind the replacement cannot fill.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{name} occurs as a {expected} but the replacement is a {found}")]
pub struct KindMismatch {
    pub name: Name,
    pub expected: AstKind,
    pub found: AstKind,
}

struct SubstEnv<'a> {
    target: &'a Name,
    repl: &'a Replacement,
    repl_free: HashSet<Name>,
}

type Res<T> = Result<T, KindMismatch>;

impl<'a> SubstEnv<'a> {
    fn new(target: &'a Name, repl: &'a Replacement) -> Self {
        SubstEnv { target, repl, repl_free: repl.free_names() }
    }

    fn captures(&self, binder: &Name) -> bool {
        self.repl_free.contains(binder)
    }

    /// Rename binder `b` to a fresh name inside each part, returning the new
    /// name. `kind` is the binder's syntactic class.
    fn freshen(b: &Name, kind: AstKind) -> (Name, Replacement) {
        let b2 = b.refresh();
        let repl = match kind {
            AstKind::Term => Replacement::Term(TermAst::Var(b2.clone())),
            AstKind::Proof => Replacement::Proof(ProofAst::Var(b2.clone())),
            AstKind::Context => Replacement::Ctx(ContextAst::CoVar(b2.clone())),
        };
        (b2, repl)
    }

    fn term(&self, t: &TermAst) -> Res<TermAst> {
        Ok(match t {
            TermAst::Var(x) if x == self.target => match self.repl {
                Replacement::Term(r) => r.clone(),
                other => {
                    return Err(KindMismatch {
                        name: x.clone(),
                        expected: AstKind::Term,
                        found: other.kind(),
                    })
                }
            },
            TermAst::Var(_) | TermAst::Zero => t.clone(),
            TermAst::Succ(u) => TermAst::Succ(Box::new(self.term(u)?)),
            TermAst::Rec { scrut, x, y, base, step } => {
                let scrut = Box::new(self.term(scrut)?);
                let base = Box::new(self.term(base)?);
                let (x2, y2, step2) = if x == self.target || y == self.target {
                    (x.clone(), y.clone(), (**step).clone())
                } else {
                    let (x2, s) = self.avoid_in_term(x, step)?;
                    let (y2, s) = self.avoid_in_term(y, &s)?;
                    (x2, y2, self.term(&s)?)
                };
                TermAst::Rec { scrut, x: x2, y: y2, base, step: Box::new(step2) }
            }
            TermAst::Lam(x, body) => {
                if x == self.target {
                    t.clone()
                } else {
                    let (x2, body) = self.avoid_in_term(x, body)?;
                    TermAst::Lam(x2, Box::new(self.term(&body)?))
                }
            }
            TermAst::App(f, u) => {
                TermAst::App(Box::new(self.term(f)?), Box::new(self.term(u)?))
            }
            TermAst::Wit(p) => TermAst::Wit(Box::new(self.proof(p)?)),
        })
    }

    /// Rename `x` away in `body` if it would capture; shadowing already
    /// handled by the caller.
    fn avoid_in_term(&self, x: &Name, body: &TermAst) -> Res<(Name, TermAst)> {
        if self.captures(x) {
            let (x2, repl) = Self::freshen(x, AstKind::Term);
            let env = SubstEnv::new(x, &repl);
            Ok((x2, env.term(body)?))
        } else {
            Ok((x.clone(), body.clone()))
        }
    }

    fn avoid_in_proof(&self, b: &Name, kind: AstKind, body: &ProofAst) -> Res<(Name, ProofAst)> {
        if self.captures(b) {
            let (b2, repl) = Self::freshen(b, kind);
            let env = SubstEnv::new(b, &repl);
            Ok((b2, env.proof(body)?))
        } else {
            Ok((b.clone(), body.clone()))
        }
    }

    fn avoid_in_command(&self, b: &Name, kind: AstKind, body: &Command) -> Res<(Name, Command)> {
        if self.captures(b) {
            let (b2, repl) = Self::freshen(b, kind);
            let env = SubstEnv::new(b, &repl);
            Ok((b2, env.command(body)?))
        } else {
            Ok((b.clone(), body.clone()))
        }
    }

    fn proof(&self, p: &ProofAst) -> Res<ProofAst> {
        Ok(match p {
            ProofAst::Var(a) if a == self.target => match self.repl {
                Replacement::Proof(r) => r.clone(),
                other => {
                    return Err(KindMismatch {
                        name: a.clone(),
                        expected: AstKind::Proof,
                        found: other.kind(),
                    })
                }
            },
            ProofAst::Var(_) | ProofAst::Refl | ProofAst::CoTp => p.clone(),
            ProofAst::Inj(i, q) => ProofAst::Inj(*i, Box::new(self.proof(q)?)),
            ProofAst::Pair(q, r) => {
                ProofAst::Pair(Box::new(self.proof(q)?), Box::new(self.proof(r)?))
            }
            ProofAst::DepPair(t, q) => {
                ProofAst::DepPair(Box::new(self.term(t)?), Box::new(self.proof(q)?))
            }
            ProofAst::LamT(x, body) => {
                if x == self.target {
                    p.clone()
                } else {
                    let (x2, body) = self.avoid_in_proof(x, AstKind::Term, body)?;
                    ProofAst::LamT(x2, Box::new(self.proof(&body)?))
                }
            }
            ProofAst::LamP(a, body) => {
                if a == self.target {
                    p.clone()
                } else {
                    let (a2, body) = self.avoid_in_proof(a, AstKind::Proof, body)?;
                    ProofAst::LamP(a2, Box::new(self.proof(&body)?))
                }
            }
            ProofAst::Fix { scrut, base, a, x, step, motive } => {
                let scrut = self.term(scrut)?;
                let base = self.proof(base)?;
                if a == self.target || x == self.target {
                    ProofAst::Fix {
                        scrut: Box::new(scrut),
                        base: Box::new(base),
                        a: a.clone(),
                        x: x.clone(),
                        step: step.clone(),
                        motive: motive.clone(),
                    }
                } else {
                    // The motive shares the `x` binder with `step`, so rename
                    // them together when a binder would capture.
                    let mut a2 = a.clone();
                    let mut x2 = x.clone();
                    let mut step2 = (**step).clone();
                    let mut motive2 = motive.as_deref().cloned();
                    if self.captures(a) {
                        let (an, repl) = Self::freshen(a, AstKind::Proof);
                        let env = SubstEnv::new(a, &repl);
                        step2 = env.proof(&step2)?;
                        a2 = an;
                    }
                    if self.captures(x) {
                        let (xn, repl) = Self::freshen(x, AstKind::Term);
                        let env = SubstEnv::new(x, &repl);
                        step2 = env.proof(&step2)?;
                        motive2 = motive2.as_ref().map(|m| env.formula(m)).transpose()?;
                        x2 = xn;
                    }
                    ProofAst::Fix {
                        scrut: Box::new(scrut),
                        base: Box::new(base),
                        a: a2,
                        x: x2,
                        step: Box::new(self.proof(&step2)?),
                        motive: motive2
                            .as_ref()
                            .map(|m| self.formula(m))
                            .transpose()?
                            .map(Box::new),
                    }
                }
            }
            ProofAst::Cofix { scrut, b, x, body } => {
                let scrut = self.term(scrut)?;
                let body2 = if b == self.target || x == self.target {
                    (**body).clone()
                } else {
                    let (b2, s) = self.avoid_in_proof(b, AstKind::Proof, body)?;
                    let (x2, s) = self.avoid_in_proof(x, AstKind::Term, &s)?;
                    return Ok(ProofAst::Cofix {
                        scrut: Box::new(scrut),
                        b: b2,
                        x: x2,
                        body: Box::new(self.proof(&s)?),
                    });
                };
                ProofAst::Cofix {
                    scrut: Box::new(scrut),
                    b: b.clone(),
                    x: x.clone(),
                    body: Box::new(body2),
                }
            }
            ProofAst::Mu(alpha, c) => {
                if alpha == self.target {
                    p.clone()
                } else {
                    let (alpha2, c) = self.avoid_in_command(alpha, AstKind::Context, c)?;
                    ProofAst::Mu(alpha2, Box::new(self.command(&c)?))
                }
            }
            ProofAst::MuTp(c) => ProofAst::MuTp(Box::new(self.command(c)?)),
        })
    }

    fn ctx(&self, e: &ContextAst) -> Res<ContextAst> {
        Ok(match e {
            ContextAst::CoVar(alpha) if alpha == self.target => match self.repl {
                Replacement::Ctx(r) => r.clone(),
                other => {
                    return Err(KindMismatch {
                        name: alpha.clone(),
                        expected: AstKind::Context,
                        found: other.kind(),
                    })
                }
            },
            ContextAst::CoVar(_) | ContextAst::Tp => e.clone(),
            ContextAst::MuT { a, body, tail } => {
                if a == self.target {
                    e.clone()
                } else {
                    let (a2, tail2, body2) = if self.captures(a) {
                        let (a2, repl) = Self::freshen(a, AstKind::Proof);
                        let env = SubstEnv::new(a, &repl);
                        let (t, b) = env.store_suffix(tail.bindings(), body)?;
                        (a2, t, b)
                    } else {
                        (a.clone(), tail.bindings().to_vec(), (**body).clone())
                    };
                    let (tail3, body3) = self.store_suffix(&tail2, &body2)?;
                    ContextAst::MuT {
                        a: a2,
                        body: Box::new(body3),
                        tail: Store::from_bindings(tail3),
                    }
                }
            }
            ContextAst::Forcing(f) => ContextAst::Forcing(self.forcing(f)?),
            ContextAst::CoShift(c) => ContextAst::CoShift(Box::new(self.command(c)?)),
        })
    }

    /// Substitute through a store suffix and the command it scopes over.
    /// Each binding name scopes over the later bindings and the command.
    fn store_suffix(&self, bindings: &[Binding], body: &Command) -> Res<(Vec<Binding>, Command)> {
        match bindings.split_first() {
            None => Ok((Vec::new(), self.command(body)?)),
            Some((first, rest)) => {
                let (name, kind, content_substituted) = match first {
                    Binding::Proof { name, storable, ascription } => (
                        name,
                        AstKind::Proof,
                        Binding::Proof {
                            name: name.clone(),
                            storable: self.storable(storable)?,
                            ascription: match ascription {
                                Some(a) => Some(self.formula(a)?),
                                None => None,
                            },
                        },
                    ),
                    Binding::Ctx { name, ctx, ascription } => (
                        name,
                        AstKind::Context,
                        Binding::Ctx {
                            name: name.clone(),
                            ctx: self.ctx(ctx)?,
                            ascription: match ascription {
                                Some(a) => Some(self.formula(a)?),
                                None => None,
                            },
                        },
                    ),
                };
                if name == self.target {
                    // Shadowed for the rest of the suffix and the body.
                    let mut out = vec![content_substituted];
                    out.extend(rest.iter().cloned());
                    return Ok((out, body.clone()));
                }
                let (rest2, body2, renamed) = if self.captures(name) {
                    let (n2, repl) = Self::freshen(name, kind);
                    let env = SubstEnv::new(name, &repl);
                    let (r, b) = env.store_suffix(rest, body)?;
                    (r, b, Some(n2))
                } else {
                    (rest.to_vec(), body.clone(), None)
                };
                let first2 = match (renamed, content_substituted) {
                    (Some(n2), Binding::Proof { storable, ascription, .. }) => {
                        Binding::Proof { name: n2, storable, ascription }
                    }
                    (Some(n2), Binding::Ctx { ctx, ascription, .. }) => {
                        Binding::Ctx { name: n2, ctx, ascription }
                    }
                    (None, b) => b,
                };
                let (rest3, body3) = self.store_suffix(&rest2, &body2)?;
                let mut out = vec![first2];
                out.extend(rest3);
                Ok((out, body3))
            }
        }
    }

    fn storable(&self, s: &Storable) -> Res<Storable> {
        // Reuse the proof traversal via the denoted proof, then reclassify.
        let p = self.proof(&s.as_proof())?;
        Ok(Storable::classify(&p).unwrap_or(Storable::Val(p)))
    }

    fn forcing(&self, f: &Forcing) -> Res<Forcing> {
        Ok(match f {
            Forcing::Empty => Forcing::Empty,
            Forcing::CaseSum(a1, c1, a2, c2) => {
                let (a1n, c1n) = if a1 == self.target {
                    (a1.clone(), (**c1).clone())
                } else {
                    let (a, c) = self.avoid_in_command(a1, AstKind::Proof, c1)?;
                    (a, self.command(&c)?)
                };
                let (a2n, c2n) = if a2 == self.target {
                    (a2.clone(), (**c2).clone())
                } else {
                    let (a, c) = self.avoid_in_command(a2, AstKind::Proof, c2)?;
                    (a, self.command(&c)?)
                };
                Forcing::CaseSum(a1n, Box::new(c1n), a2n, Box::new(c2n))
            }
            Forcing::SplitPair(a1, a2, c) => {
                if a1 == self.target || a2 == self.target {
                    f.clone()
                } else {
                    let (a1n, c) = self.avoid_in_command(a1, AstKind::Proof, c)?;
                    let (a2n, c) = self.avoid_in_command(a2, AstKind::Proof, &c)?;
                    Forcing::SplitPair(a1n, a2n, Box::new(self.command(&c)?))
                }
            }
            Forcing::SplitDep(x, a, c) => {
                if x == self.target || a == self.target {
                    f.clone()
                } else {
                    let (xn, c) = self.avoid_in_command(x, AstKind::Term, c)?;
                    let (an, c) = self.avoid_in_command(a, AstKind::Proof, &c)?;
                    Forcing::SplitDep(xn, an, Box::new(self.command(&c)?))
                }
            }
            Forcing::PushT(t, e) => {
                Forcing::PushT(Box::new(self.term(t)?), Box::new(self.ctx(e)?))
            }
            Forcing::PushP(q, e) => {
                Forcing::PushP(Box::new(self.proof(q)?), Box::new(self.ctx(e)?))
            }
            Forcing::MuEq(c) => Forcing::MuEq(Box::new(self.command(c)?)),
        })
    }

    fn coterm(&self, pi: &CoTermAst) -> Res<CoTermAst> {
        Ok(match pi {
            CoTermAst::PushTerm(t, rest) => {
                CoTermAst::PushTerm(Box::new(self.term(t)?), Box::new(self.coterm(rest)?))
            }
            CoTermAst::MuX { x, body, tail } => {
                if x == self.target {
                    pi.clone()
                } else {
                    let (x2, tail2, body2) = if self.captures(x) {
                        let (x2, repl) = Self::freshen(x, AstKind::Term);
                        let env = SubstEnv::new(x, &repl);
                        let (t, b) = env.store_suffix(tail.bindings(), body)?;
                        (x2, t, b)
                    } else {
                        (x.clone(), tail.bindings().to_vec(), (**body).clone())
                    };
                    let (tail3, body3) = self.store_suffix(&tail2, &body2)?;
                    CoTermAst::MuX {
                        x: x2,
                        body: Box::new(body3),
                        tail: Store::from_bindings(tail3),
                    }
                }
            }
        })
    }

    fn command(&self, c: &Command) -> Res<Command> {
        Ok(match c {
            Command::CutP { proof, context, ascription } => Command::CutP {
                proof: Box::new(self.proof(proof)?),
                context: Box::new(self.ctx(context)?),
                ascription: match ascription {
                    Some(a) => Some(self.formula(a)?),
                    None => None,
                },
            },
            Command::CutT { term, coterm, ascription } => Command::CutT {
                term: Box::new(self.term(term)?),
                coterm: Box::new(self.coterm(coterm)?),
                ascription: match ascription {
                    Some(t) => Some(self.type_expr(t)?),
                    None => None,
                },
            },
        })
    }

    fn formula(&self, a: &Formula) -> Res<Formula> {
        Ok(match a {
            Formula::Top | Formula::Bot => a.clone(),
            Formula::Eq(t, u) => Formula::Eq(self.term(t)?, self.term(u)?),
            Formula::And(l, r) => Formula::and(self.formula(l)?, self.formula(r)?),
            Formula::Or(l, r) => Formula::or(self.formula(l)?, self.formula(r)?),
            Formula::ExistsT(x, ty, body) => {
                let ty = self.type_expr(ty)?;
                if x == self.target {
                    Formula::ExistsT(x.clone(), ty, body.clone())
                } else {
                    let (xn, body) = self.avoid_in_formula(x, AstKind::Term, body)?;
                    Formula::ExistsT(xn, ty, Box::new(self.formula(&body)?))
                }
            }
            Formula::ForallT(x, ty, body) => {
                let ty = self.type_expr(ty)?;
                if x == self.target {
                    Formula::ForallT(x.clone(), ty, body.clone())
                } else {
                    let (xn, body) = self.avoid_in_formula(x, AstKind::Term, body)?;
                    Formula::ForallT(xn, ty, Box::new(self.formula(&body)?))
                }
            }
            Formula::DepProd(a2, dom, cod) => {
                let dom = self.formula(dom)?;
                if a2 == self.target {
                    Formula::DepProd(a2.clone(), Box::new(dom), cod.clone())
                } else {
                    let (an, cod) = self.avoid_in_formula(a2, AstKind::Proof, cod)?;
                    Formula::DepProd(an, Box::new(dom), Box::new(self.formula(&cod)?))
                }
            }
            Formula::Nu { index, f, x, body } => {
                let index = self.term(index)?;
                if f == self.target || x == self.target {
                    Formula::Nu { index, f: f.clone(), x: x.clone(), body: body.clone() }
                } else {
                    let (fn2, body) = self.avoid_in_formula(f, AstKind::Term, body)?;
                    let (xn, body) = self.avoid_in_formula(x, AstKind::Term, &body)?;
                    Formula::Nu { index, f: fn2, x: xn, body: Box::new(self.formula(&body)?) }
                }
            }
            Formula::MemP(p, f) => {
                Formula::MemP(Box::new(self.proof(p)?), Box::new(self.formula(f)?))
            }
        })
    }

    fn avoid_in_formula(&self, b: &Name, kind: AstKind, body: &Formula) -> Res<(Name, Formula)> {
        if self.captures(b) {
            let (b2, repl) = Self::freshen(b, kind);
            let env = SubstEnv::new(b, &repl);
            Ok((b2, env.formula(body)?))
        } else {
            Ok((b.clone(), body.clone()))
        }
    }

    fn type_expr(&self, t: &TypeExpr) -> Res<TypeExpr> {
        Ok(match t {
            TypeExpr::Nat => TypeExpr::Nat,
            TypeExpr::Arrow(a, b) => {
                TypeExpr::arrow(self.type_expr(a)?, self.type_expr(b)?)
            }
            TypeExpr::MemT(u, ty) => TypeExpr::MemT(self.term(u)?, Box::new(self.type_expr(ty)?)),
        })
    }
}

/// Substitute `repl` for every free occurrence of `x` in a term.
pub fn subst_term(t: &TermAst, x: &Name, repl: &Replacement) -> Res<TermAst> {
    SubstEnv::new(x, repl).term(t)
}

pub fn subst_proof(p: &ProofAst, x: &Name, repl: &Replacement) -> Res<ProofAst> {
    SubstEnv::new(x, repl).proof(p)
}

pub fn subst_ctx(e: &ContextAst, x: &Name, repl: &Replacement) -> Res<ContextAst> {
    SubstEnv::new(x, repl).ctx(e)
}

pub fn subst_command(c: &Command, x: &Name, repl: &Replacement) -> Res<Command> {
    SubstEnv::new(x, repl).command(c)
}

pub fn subst_coterm(pi: &CoTermAst, x: &Name, repl: &Replacement) -> Res<CoTermAst> {
    SubstEnv::new(x, repl).coterm(pi)
}

pub fn subst_formula(a: &Formula, x: &Name, repl: &Replacement) -> Res<Formula> {
    SubstEnv::new(x, repl).formula(a)
}

pub fn subst_type(t: &TypeExpr, x: &Name, repl: &Replacement) -> Res<TypeExpr> {
    SubstEnv::new(x, repl).type_expr(t)
}

/// Substitute through a whole closure; store bindings scope left to right
/// over the rest of the store and the command.
pub fn subst_closure(cl: &Closure, x: &Name, repl: &Replacement) -> Res<Closure> {
    let env = SubstEnv::new(x, repl);
    let (bindings, command) = env.store_suffix(cl.store.bindings(), &cl.command)?;
    Ok(Closure { command, store: Store::from_bindings(bindings) })
}

/// Rename a bound name to a fresh copy inside a command, returning the new
/// name. Used by the machines before extending a store, so that store
/// domains stay duplicate-free.
pub fn refresh_in_command(c: &Command, name: &Name, kind: AstKind) -> (Name, Command) {
    let fresh = name.refresh();
    let repl = match kind {
        AstKind::Term => Replacement::Term(TermAst::Var(fresh.clone())),
        AstKind::Proof => Replacement::Proof(ProofAst::Var(fresh.clone())),
        AstKind::Context => Replacement::Ctx(ContextAst::CoVar(fresh.clone())),
    };
    let c2 = subst_command(c, name, &repl)
        .expect("renaming a name to a fresh name of the same kind cannot mismatch");
    (fresh, c2)
}

/// Substitute through a captured store suffix and the command after it,
/// respecting shadowing by the suffix's own binding names.
pub fn subst_suffix(
    tail: &[Binding],
    body: &Command,
    x: &Name,
    repl: &Replacement,
) -> Res<(Vec<Binding>, Command)> {
    SubstEnv::new(x, repl).store_suffix(tail, body)
}

fn rename_through(
    old: &Name,
    kind: AstKind,
    bindings: &[Binding],
    body: &Command,
) -> (Name, Vec<Binding>, Command) {
    let fresh = old.refresh();
    let repl = match kind {
        AstKind::Term => Replacement::Term(TermAst::Var(fresh.clone())),
        AstKind::Proof => Replacement::Proof(ProofAst::Var(fresh.clone())),
        AstKind::Context => Replacement::Ctx(ContextAst::CoVar(fresh.clone())),
    };
    let env = SubstEnv::new(old, &repl);
    let (bs, b) = env
        .store_suffix(bindings, body)
        .expect("renaming a name to a fresh name of the same kind cannot mismatch");
    (fresh, bs, b)
}

/// Freshen every binding name of a captured store tail, renaming
/// consistently through the later bindings and the body. Used when a
/// machine re-inserts a captured suffix into a store whose domain may
/// already contain those names.
pub fn refresh_tail(tail: &[Binding], body: &Command) -> (Vec<Binding>, Command) {
    let mut bindings = tail.to_vec();
    let mut body = body.clone();
    let mut idx = 0;
    while idx < bindings.len() {
        let (old, kind) = match &bindings[idx] {
            Binding::Proof { name, .. } => (name.clone(), AstKind::Proof),
            Binding::Ctx { name, .. } => (name.clone(), AstKind::Context),
        };
        let (n2, rest, b) = rename_through(&old, kind, &bindings[idx + 1..], &body);
        match &mut bindings[idx] {
            Binding::Proof { name, .. } | Binding::Ctx { name, .. } => *name = n2,
        }
        bindings.truncate(idx + 1);
        bindings.extend(rest);
        body = b;
        idx += 1;
    }
    (bindings, body)
}

/// Freshen a μ̃ binder together with every name of its captured store tail.
pub fn refresh_mu_bind(a: &Name, tail: &[Binding], body: &Command) -> (Name, Vec<Binding>, Command) {
    let (a2, bindings, body) = rename_through(a, AstKind::Proof, tail, body);
    let (bindings, body) = refresh_tail(&bindings, &body);
    (a2, bindings, body)
}

fn collect_term(t: &TermAst, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match t {
        TermAst::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        TermAst::Zero => {}
        TermAst::Succ(u) => collect_term(u, bound, out),
        TermAst::Rec { scrut, x, y, base, step } => {
            collect_term(scrut, bound, out);
            collect_term(base, bound, out);
            bound.push(x.clone());
            bound.push(y.clone());
            collect_term(step, bound, out);
            bound.pop();
            bound.pop();
        }
        TermAst::Lam(x, body) => {
            bound.push(x.clone());
            collect_term(body, bound, out);
            bound.pop();
        }
        TermAst::App(f, u) => {
            collect_term(f, bound, out);
            collect_term(u, bound, out);
        }
        TermAst::Wit(p) => collect_proof(p, bound, out),
    }
}

fn collect_proof(p: &ProofAst, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match p {
        ProofAst::Var(a) => {
            if !bound.contains(a) {
                out.insert(a.clone());
            }
        }
        ProofAst::Refl | ProofAst::CoTp => {}
        ProofAst::Inj(_, q) => collect_proof(q, bound, out),
        ProofAst::Pair(q, r) => {
            collect_proof(q, bound, out);
            collect_proof(r, bound, out);
        }
        ProofAst::DepPair(t, q) => {
            collect_term(t, bound, out);
            collect_proof(q, bound, out);
        }
        ProofAst::LamT(x, body) => {
            bound.push(x.clone());
            collect_proof(body, bound, out);
            bound.pop();
        }
        ProofAst::LamP(a, body) => {
            bound.push(a.clone());
            collect_proof(body, bound, out);
            bound.pop();
        }
        // The motive is elaboration data; it does not contribute free names.
        ProofAst::Fix { scrut, base, a, x, step, motive: _ } => {
            collect_term(scrut, bound, out);
            collect_proof(base, bound, out);
            bound.push(a.clone());
            bound.push(x.clone());
            collect_proof(step, bound, out);
            bound.pop();
            bound.pop();
        }
        ProofAst::Cofix { scrut, b, x, body } => {
            collect_term(scrut, bound, out);
            bound.push(b.clone());
            bound.push(x.clone());
            collect_proof(body, bound, out);
            bound.pop();
            bound.pop();
        }
        ProofAst::Mu(alpha, c) => {
            bound.push(alpha.clone());
            collect_command(c, bound, out);
            bound.pop();
        }
        ProofAst::MuTp(c) => collect_command(c, bound, out),
    }
}

fn collect_ctx(e: &ContextAst, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match e {
        ContextAst::CoVar(alpha) => {
            if !bound.contains(alpha) {
                out.insert(alpha.clone());
            }
        }
        ContextAst::Tp => {}
        ContextAst::MuT { a, body, tail } => {
            bound.push(a.clone());
            let mut pushed = 1;
            for b in tail.bindings() {
                match b {
                    Binding::Proof { name, storable, .. } => {
                        collect_proof(&storable.as_proof(), bound, out);
                        bound.push(name.clone());
                    }
                    Binding::Ctx { name, ctx, .. } => {
                        collect_ctx(ctx, bound, out);
                        bound.push(name.clone());
                    }
                }
                pushed += 1;
            }
            collect_command(body, bound, out);
            for _ in 0..pushed {
                bound.pop();
            }
        }
        ContextAst::Forcing(f) => collect_forcing(f, bound, out),
        ContextAst::CoShift(c) => collect_command(c, bound, out),
    }
}

fn collect_forcing(f: &Forcing, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match f {
        Forcing::Empty => {}
        Forcing::CaseSum(a1, c1, a2, c2) => {
            bound.push(a1.clone());
            collect_command(c1, bound, out);
            bound.pop();
            bound.push(a2.clone());
            collect_command(c2, bound, out);
            bound.pop();
        }
        Forcing::SplitPair(a1, a2, c) => {
            bound.push(a1.clone());
            bound.push(a2.clone());
            collect_command(c, bound, out);
            bound.pop();
            bound.pop();
        }
        Forcing::SplitDep(x, a, c) => {
            bound.push(x.clone());
            bound.push(a.clone());
            collect_command(c, bound, out);
            bound.pop();
            bound.pop();
        }
        Forcing::PushT(t, e) => {
            collect_term(t, bound, out);
            collect_ctx(e, bound, out);
        }
        Forcing::PushP(q, e) => {
            collect_proof(q, bound, out);
            collect_ctx(e, bound, out);
        }
        Forcing::MuEq(c) => collect_command(c, bound, out),
    }
}

fn collect_coterm(pi: &CoTermAst, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match pi {
        CoTermAst::PushTerm(t, rest) => {
            collect_term(t, bound, out);
            collect_coterm(rest, bound, out);
        }
        CoTermAst::MuX { x, body, tail } => {
            bound.push(x.clone());
            let mut pushed = 1;
            for b in tail.bindings() {
                match b {
                    Binding::Proof { name, storable, .. } => {
                        collect_proof(&storable.as_proof(), bound, out);
                        bound.push(name.clone());
                    }
                    Binding::Ctx { name, ctx, .. } => {
                        collect_ctx(ctx, bound, out);
                        bound.push(name.clone());
                    }
                }
                pushed += 1;
            }
            collect_command(body, bound, out);
            for _ in 0..pushed {
                bound.pop();
            }
        }
    }
}

fn collect_command(c: &Command, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match c {
        Command::CutP { proof, context, ascription } => {
            collect_proof(proof, bound, out);
            collect_ctx(context, bound, out);
            if let Some(a) = ascription {
                collect_formula(a, bound, out);
            }
        }
        Command::CutT { term, coterm, ascription } => {
            collect_term(term, bound, out);
            collect_coterm(coterm, bound, out);
            if let Some(t) = ascription {
                collect_type(t, bound, out);
            }
        }
    }
}

fn collect_formula(a: &Formula, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match a {
        Formula::Top | Formula::Bot => {}
        Formula::Eq(t, u) => {
            collect_term(t, bound, out);
            collect_term(u, bound, out);
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_formula(l, bound, out);
            collect_formula(r, bound, out);
        }
        Formula::ExistsT(x, ty, body) | Formula::ForallT(x, ty, body) => {
            collect_type(ty, bound, out);
            bound.push(x.clone());
            collect_formula(body, bound, out);
            bound.pop();
        }
        Formula::DepProd(a2, dom, cod) => {
            collect_formula(dom, bound, out);
            bound.push(a2.clone());
            collect_formula(cod, bound, out);
            bound.pop();
        }
        Formula::Nu { index, f, x, body } => {
            collect_term(index, bound, out);
            bound.push(f.clone());
            bound.push(x.clone());
            collect_formula(body, bound, out);
            bound.pop();
            bound.pop();
        }
        Formula::MemP(p, f) => {
            collect_proof(p, bound, out);
            collect_formula(f, bound, out);
        }
    }
}

fn collect_type(t: &TypeExpr, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match t {
        TypeExpr::Nat => {}
        TypeExpr::Arrow(a, b) => {
            collect_type(a, bound, out);
            collect_type(b, bound, out);
        }
        TypeExpr::MemT(u, ty) => {
            collect_term(u, bound, out);
            collect_type(ty, bound, out);
        }
    }
}

pub fn free_names_term(t: &TermAst) -> HashSet<Name> {
    let mut out = HashSet::new();
    collect_term(t, &mut Vec::new(), &mut out);
    out
}

pub fn free_names_proof(p: &ProofAst) -> HashSet<Name> {
    let mut out = HashSet::new();
    collect_proof(p, &mut Vec::new(), &mut out);
    out
}

pub fn free_names_ctx(e: &ContextAst) -> HashSet<Name> {
    let mut out = HashSet::new();
    collect_ctx(e, &mut Vec::new(), &mut out);
    out
}

pub fn free_names_command(c: &Command) -> HashSet<Name> {
    let mut out = HashSet::new();
    collect_command(c, &mut Vec::new(), &mut out);
    out
}

pub fn free_names_formula(a: &Formula) -> HashSet<Name> {
    let mut out = HashSet::new();
    collect_formula(a, &mut Vec::new(), &mut out);
    out
}

pub fn free_names_coterm(pi: &CoTermAst) -> HashSet<Name> {
    let mut out = HashSet::new();
    collect_coterm(pi, &mut Vec::new(), &mut out);
    out
}

/// Free names of a closure: store binding names scope over later bindings
/// and the command.
pub fn free_names_closure(cl: &Closure) -> HashSet<Name> {
    let mut out = HashSet::new();
    let mut bound = Vec::new();
    for b in cl.store.bindings() {
        match b {
            Binding::Proof { name, storable, .. } => {
                collect_proof(&storable.as_proof(), &mut bound, &mut out);
                bound.push(name.clone());
            }
            Binding::Ctx { name, ctx, .. } => {
                collect_ctx(ctx, &mut bound, &mut out);
                bound.push(name.clone());
            }
        }
    }
    collect_command(&cl.command, &mut bound, &mut out);
    out
}

/// A closure is closed when its command and store contents only mention
/// store-bound names.
pub fn closure_is_closed(cl: &Closure) -> bool {
    free_names_closure(cl).is_empty()
}

// ---------------------------------------------------------------------------
// Alpha-equivalence.

struct AlphaCtx {
    pairs: Vec<(Name, Name)>,
}

impl AlphaCtx {
    fn new() -> Self {
        AlphaCtx { pairs: Vec::new() }
    }

    fn name_eq(&self, l: &Name, r: &Name) -> bool {
        for (a, b) in self.pairs.iter().rev() {
            if a == l || b == r {
                return a == l && b == r;
            }
        }
        l == r
    }

    fn push(&mut self, l: &Name, r: &Name) {
        self.pairs.push((l.clone(), r.clone()));
    }

    fn pop(&mut self, n: usize) {
        for _ in 0..n {
            self.pairs.pop();
        }
    }

    fn term(&mut self, l: &TermAst, r: &TermAst) -> bool {
        match (l, r) {
            (TermAst::Var(x), TermAst::Var(y)) => self.name_eq(x, y),
            (TermAst::Zero, TermAst::Zero) => true,
            (TermAst::Succ(a), TermAst::Succ(b)) => self.term(a, b),
            (
                TermAst::Rec { scrut: s1, x: x1, y: y1, base: b1, step: t1 },
                TermAst::Rec { scrut: s2, x: x2, y: y2, base: b2, step: t2 },
            ) => {
                self.term(s1, s2) && self.term(b1, b2) && {
                    self.push(x1, x2);
                    self.push(y1, y2);
                    let ok = self.term(t1, t2);
                    self.pop(2);
                    ok
                }
            }
            (TermAst::Lam(x1, b1), TermAst::Lam(x2, b2)) => {
                self.push(x1, x2);
                let ok = self.term(b1, b2);
                self.pop(1);
                ok
            }
            (TermAst::App(f1, a1), TermAst::App(f2, a2)) => {
                self.term(f1, f2) && self.term(a1, a2)
            }
            (TermAst::Wit(p1), TermAst::Wit(p2)) => self.proof(p1, p2),
            _ => false,
        }
    }

    fn proof(&mut self, l: &ProofAst, r: &ProofAst) -> bool {
        match (l, r) {
            (ProofAst::Var(a), ProofAst::Var(b)) => self.name_eq(a, b),
            (ProofAst::Refl, ProofAst::Refl) => true,
            (ProofAst::CoTp, ProofAst::CoTp) => true,
            (ProofAst::Inj(i, p), ProofAst::Inj(j, q)) => i == j && self.proof(p, q),
            (ProofAst::Pair(p1, q1), ProofAst::Pair(p2, q2)) => {
                self.proof(p1, p2) && self.proof(q1, q2)
            }
            (ProofAst::DepPair(t1, p1), ProofAst::DepPair(t2, p2)) => {
                self.term(t1, t2) && self.proof(p1, p2)
            }
            (ProofAst::LamT(x1, p1), ProofAst::LamT(x2, p2)) => {
                self.push(x1, x2);
                let ok = self.proof(p1, p2);
                self.pop(1);
                ok
            }
            (ProofAst::LamP(a1, p1), ProofAst::LamP(a2, p2)) => {
                self.push(a1, a2);
                let ok = self.proof(p1, p2);
                self.pop(1);
                ok
            }
            (
                ProofAst::Fix { scrut: s1, base: b1, a: a1, x: x1, step: t1, motive: _ },
                ProofAst::Fix { scrut: s2, base: b2, a: a2, x: x2, step: t2, motive: _ },
            ) => {
                self.term(s1, s2) && self.proof(b1, b2) && {
                    self.push(a1, a2);
                    self.push(x1, x2);
                    let ok = self.proof(t1, t2);
                    self.pop(2);
                    ok
                }
            }
            (
                ProofAst::Cofix { scrut: s1, b: b1, x: x1, body: p1 },
                ProofAst::Cofix { scrut: s2, b: b2, x: x2, body: p2 },
            ) => {
                self.term(s1, s2) && {
                    self.push(b1, b2);
                    self.push(x1, x2);
                    let ok = self.proof(p1, p2);
                    self.pop(2);
                    ok
                }
            }
            (ProofAst::Mu(a1, c1), ProofAst::Mu(a2, c2)) => {
                self.push(a1, a2);
                let ok = self.command(c1, c2);
                self.pop(1);
                ok
            }
            (ProofAst::MuTp(c1), ProofAst::MuTp(c2)) => self.command(c1, c2),
            _ => false,
        }
    }

    fn ctx(&mut self, l: &ContextAst, r: &ContextAst) -> bool {
        match (l, r) {
            (ContextAst::CoVar(a), ContextAst::CoVar(b)) => self.name_eq(a, b),
            (ContextAst::Tp, ContextAst::Tp) => true,
            (
                ContextAst::MuT { a: a1, body: c1, tail: t1 },
                ContextAst::MuT { a: a2, body: c2, tail: t2 },
            ) => {
                if t1.len() != t2.len() {
                    return false;
                }
                self.push(a1, a2);
                let mut pushed = 1;
                let mut ok = true;
                for (b1, b2) in t1.bindings().iter().zip(t2.bindings()) {
                    if !self.binding(b1, b2, &mut pushed) {
                        ok = false;
                        break;
                    }
                }
                let ok = ok && self.command(c1, c2);
                self.pop(pushed);
                ok
            }
            (ContextAst::Forcing(f1), ContextAst::Forcing(f2)) => self.forcing(f1, f2),
            (ContextAst::CoShift(c1), ContextAst::CoShift(c2)) => self.command(c1, c2),
            _ => false,
        }
    }

    // Binding ascriptions are elaboration data; ignored like command ones.
    fn binding(&mut self, l: &Binding, r: &Binding, pushed: &mut usize) -> bool {
        match (l, r) {
            (
                Binding::Proof { name: n1, storable: s1, .. },
                Binding::Proof { name: n2, storable: s2, .. },
            ) => {
                if !self.proof(&s1.as_proof(), &s2.as_proof()) {
                    return false;
                }
                self.push(n1, n2);
                *pushed += 1;
                true
            }
            (
                Binding::Ctx { name: n1, ctx: e1, .. },
                Binding::Ctx { name: n2, ctx: e2, .. },
            ) => {
                if !self.ctx(e1, e2) {
                    return false;
                }
                self.push(n1, n2);
                *pushed += 1;
                true
            }
            _ => false,
        }
    }

    fn forcing(&mut self, l: &Forcing, r: &Forcing) -> bool {
        match (l, r) {
            (Forcing::Empty, Forcing::Empty) => true,
            (Forcing::CaseSum(a1, c1, b1, d1), Forcing::CaseSum(a2, c2, b2, d2)) => {
                self.push(a1, a2);
                let ok1 = self.command(c1, c2);
                self.pop(1);
                self.push(b1, b2);
                let ok2 = self.command(d1, d2);
                self.pop(1);
                ok1 && ok2
            }
            (Forcing::SplitPair(a1, b1, c1), Forcing::SplitPair(a2, b2, c2)) => {
                self.push(a1, a2);
                self.push(b1, b2);
                let ok = self.command(c1, c2);
                self.pop(2);
                ok
            }
            (Forcing::SplitDep(x1, a1, c1), Forcing::SplitDep(x2, a2, c2)) => {
                self.push(x1, x2);
                self.push(a1, a2);
                let ok = self.command(c1, c2);
                self.pop(2);
                ok
            }
            (Forcing::PushT(t1, e1), Forcing::PushT(t2, e2)) => {
                self.term(t1, t2) && self.ctx(e1, e2)
            }
            (Forcing::PushP(p1, e1), Forcing::PushP(p2, e2)) => {
                self.proof(p1, p2) && self.ctx(e1, e2)
            }
            (Forcing::MuEq(c1), Forcing::MuEq(c2)) => self.command(c1, c2),
            _ => false,
        }
    }

    fn coterm(&mut self, l: &CoTermAst, r: &CoTermAst) -> bool {
        match (l, r) {
            (CoTermAst::PushTerm(t1, p1), CoTermAst::PushTerm(t2, p2)) => {
                self.term(t1, t2) && self.coterm(p1, p2)
            }
            (
                CoTermAst::MuX { x: x1, body: c1, tail: t1 },
                CoTermAst::MuX { x: x2, body: c2, tail: t2 },
            ) => {
                if t1.len() != t2.len() {
                    return false;
                }
                self.push(x1, x2);
                let mut pushed = 1;
                let mut ok = true;
                for (b1, b2) in t1.bindings().iter().zip(t2.bindings()) {
                    if !self.binding(b1, b2, &mut pushed) {
                        ok = false;
                        break;
                    }
                }
                let ok = ok && self.command(c1, c2);
                self.pop(pushed);
                ok
            }
            _ => false,
        }
    }

    // Ascriptions are elaboration data, not syntax; ignore them here.
    fn command(&mut self, l: &Command, r: &Command) -> bool {
        match (l, r) {
            (
                Command::CutP { proof: p1, context: e1, .. },
                Command::CutP { proof: p2, context: e2, .. },
            ) => self.proof(p1, p2) && self.ctx(e1, e2),
            (
                Command::CutT { term: t1, coterm: pi1, .. },
                Command::CutT { term: t2, coterm: pi2, .. },
            ) => self.term(t1, t2) && self.coterm(pi1, pi2),
            _ => false,
        }
    }

    fn formula(&mut self, l: &Formula, r: &Formula) -> bool {
        match (l, r) {
            (Formula::Top, Formula::Top) | (Formula::Bot, Formula::Bot) => true,
            (Formula::Eq(t1, u1), Formula::Eq(t2, u2)) => {
                self.term(t1, t2) && self.term(u1, u2)
            }
            (Formula::And(a1, b1), Formula::And(a2, b2))
            | (Formula::Or(a1, b1), Formula::Or(a2, b2)) => {
                self.formula(a1, a2) && self.formula(b1, b2)
            }
            (Formula::ExistsT(x1, t1, b1), Formula::ExistsT(x2, t2, b2))
            | (Formula::ForallT(x1, t1, b1), Formula::ForallT(x2, t2, b2)) => {
                self.type_expr(t1, t2) && {
                    self.push(x1, x2);
                    let ok = self.formula(b1, b2);
                    self.pop(1);
                    ok
                }
            }
            (Formula::DepProd(a1, d1, c1), Formula::DepProd(a2, d2, c2)) => {
                self.formula(d1, d2) && {
                    self.push(a1, a2);
                    let ok = self.formula(c1, c2);
                    self.pop(1);
                    ok
                }
            }
            (
                Formula::Nu { index: i1, f: f1, x: x1, body: b1 },
                Formula::Nu { index: i2, f: f2, x: x2, body: b2 },
            ) => {
                self.term(i1, i2) && {
                    self.push(f1, f2);
                    self.push(x1, x2);
                    let ok = self.formula(b1, b2);
                    self.pop(2);
                    ok
                }
            }
            (Formula::MemP(p1, f1), Formula::MemP(p2, f2)) => {
                self.proof(p1, p2) && self.formula(f1, f2)
            }
            _ => false,
        }
    }

    fn type_expr(&mut self, l: &TypeExpr, r: &TypeExpr) -> bool {
        match (l, r) {
            (TypeExpr::Nat, TypeExpr::Nat) => true,
            (TypeExpr::Arrow(a1, b1), TypeExpr::Arrow(a2, b2)) => {
                self.type_expr(a1, a2) && self.type_expr(b1, b2)
            }
            (TypeExpr::MemT(t1, y1), TypeExpr::MemT(t2, y2)) => {
                self.term(t1, t2) && self.type_expr(y1, y2)
            }
            _ => false,
        }
    }

    fn closure(&mut self, l: &Closure, r: &Closure) -> bool {
        if l.store.len() != r.store.len() {
            return false;
        }
        let mut pushed = 0;
        let mut ok = true;
        for (b1, b2) in l.store.bindings().iter().zip(r.store.bindings()) {
            if !self.binding(b1, b2, &mut pushed) {
                ok = false;
                break;
            }
        }
        let ok = ok && self.command(&l.command, &r.command);
        self.pop(pushed);
        ok
    }
}

pub fn alpha_eq_term(l: &TermAst, r: &TermAst) -> bool {
    AlphaCtx::new().term(l, r)
}

pub fn alpha_eq_proof(l: &ProofAst, r: &ProofAst) -> bool {
    AlphaCtx::new().proof(l, r)
}

pub fn alpha_eq_ctx(l: &ContextAst, r: &ContextAst) -> bool {
    AlphaCtx::new().ctx(l, r)
}

pub fn alpha_eq_command(l: &Command, r: &Command) -> bool {
    AlphaCtx::new().command(l, r)
}

pub fn alpha_eq_formula(l: &Formula, r: &Formula) -> bool {
    AlphaCtx::new().formula(l, r)
}

pub fn alpha_eq_type(l: &TypeExpr, r: &TypeExpr) -> bool {
    AlphaCtx::new().type_expr(l, r)
}

pub fn alpha_eq_closure(l: &Closure, r: &Closure) -> bool {
    AlphaCtx::new().closure(l, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::fresh;

    fn tvar(n: &Name) -> TermAst {
        TermAst::Var(n.clone())
    }

    #[test]
    fn direct_replacement() {
        let x = fresh("x");
        let body = TermAst::Succ(Box::new(tvar(&x)));
        let got = subst_term(&body, &x, &Replacement::Term(TermAst::Zero)).unwrap();
        assert_eq!(got, TermAst::Succ(Box::new(TermAst::Zero)));
    }

    #[test]
    fn shadowed_binder_blocks_substitution() {
        let x = fresh("x");
        let body = TermAst::Lam(x.clone(), Box::new(tvar(&x)));
        let got = subst_term(&body, &x, &Replacement::Term(TermAst::Zero)).unwrap();
        assert_eq!(got, body);
    }

    #[test]
    fn capture_triggers_renaming() {
        let x = fresh("x");
        let y = fresh("y");
        let body = TermAst::Lam(y.clone(), Box::new(tvar(&x)));
        let got = subst_term(&body, &x, &Replacement::Term(tvar(&y))).unwrap();
        let expected = TermAst::Lam(fresh("y"), Box::new(tvar(&y)));
        assert!(alpha_eq_term(&got, &expected), "got {got:?}");
        // The result must not capture: it is not alpha-equal to λy.y.
        let captured = TermAst::Lam(y.clone(), Box::new(tvar(&y)));
        assert!(!alpha_eq_term(&got, &captured));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let a = fresh("a");
        let body = TermAst::Succ(Box::new(tvar(&a)));
        let err = subst_term(&body, &a, &Replacement::Proof(ProofAst::Refl)).unwrap_err();
        assert_eq!(err.expected, AstKind::Term);
        assert_eq!(err.found, AstKind::Proof);
    }

    #[test]
    fn alpha_eq_renamed_identity() {
        let a = fresh("a");
        let b = fresh("b");
        let l = ProofAst::LamP(a.clone(), Box::new(ProofAst::Var(a.clone())));
        let r = ProofAst::LamP(b.clone(), Box::new(ProofAst::Var(b.clone())));
        assert!(alpha_eq_proof(&l, &r));
    }

    #[test]
    fn alpha_eq_structural_mismatch() {
        let a = fresh("a");
        let b = fresh("b");
        let l = ProofAst::LamP(a.clone(), Box::new(ProofAst::Var(a.clone())));
        let r = ProofAst::LamP(
            a.clone(),
            Box::new(ProofAst::LamP(b.clone(), Box::new(ProofAst::Var(a.clone())))),
        );
        assert!(!alpha_eq_proof(&l, &r));
    }

    #[test]
    fn alpha_eq_covariable_renaming() {
        let a = fresh("a");
        let alpha = fresh("alpha");
        let beta = fresh("beta");
        let l = ProofAst::Mu(
            alpha.clone(),
            Box::new(Command::cut(ProofAst::Var(a.clone()), ContextAst::CoVar(alpha.clone()))),
        );
        let r = ProofAst::Mu(
            beta.clone(),
            Box::new(Command::cut(ProofAst::Var(a.clone()), ContextAst::CoVar(beta.clone()))),
        );
        assert!(alpha_eq_proof(&l, &r));
    }

    #[test]
    fn free_names_after_substitution() {
        let x = fresh("x");
        let y = fresh("y");
        let body = TermAst::App(Box::new(tvar(&x)), Box::new(tvar(&x)));
        let got = subst_term(&body, &x, &Replacement::Term(tvar(&y))).unwrap();
        let free = free_names_term(&got);
        assert!(free.contains(&y) && !free.contains(&x));
    }
}
