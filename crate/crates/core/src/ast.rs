//! Abstract syntax shared by all three calculi.
//!
//! The grammar is the dLPAω superset: terms, proofs, contexts, term-level
//! co-terms, commands, closures, and stores. The λμμ̃ fragment uses proofs
//! built from `Var`, `LamP`, `Mu` and contexts built from `CoVar`,
//! `Forcing(PushP)`, `MuT`; the call-by-need calculus has its own syntax in
//! the `lv` module because its context classification differs.

use crate::formula::Formula;
use crate::name::Name;
use std::fmt;

/// First-order terms (the arithmetic layer).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TermAst {
    Var(Name),
    Zero,
    Succ(Box<TermAst>),
    /// `rec t of [t0 | (x,y).tS]`: primitive recursion on `t`, with `x` the
    /// predecessor and `y` the recursive result in `tS`.
    Rec {
        scrut: Box<TermAst>,
        x: Name,
        y: Name,
        base: Box<TermAst>,
        step: Box<TermAst>,
    },
    Lam(Name, Box<TermAst>),
    App(Box<TermAst>, Box<TermAst>),
    /// The witness of an existential proof; well-typed only for NEF proofs.
    Wit(Box<ProofAst>),
}

/// Proof terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProofAst {
    Var(Name),
    /// `inj i p` with `i` in {1,2}.
    Inj(u8, Box<ProofAst>),
    Pair(Box<ProofAst>, Box<ProofAst>),
    /// Dependent pair `(t, p)` proving an existential.
    DepPair(Box<TermAst>, Box<ProofAst>),
    /// `λx.p` over a term variable.
    LamT(Name, Box<ProofAst>),
    /// `λa.p` over a proof variable.
    LamP(Name, Box<ProofAst>),
    Refl,
    /// `fix t of [p0 | (a,x).pS]`: inductive fixpoint on `t`, with `x` the
    /// predecessor and `a` the recursive proof in `pS`.
    ///
    /// `motive` is optional elaboration data: the formula the fixpoint
    /// computes, with `x` free (the instance at `t` is `motive[t/x]`). It is
    /// not recoverable from an instance, so builders record it; machines
    /// thread it, `alpha_eq` ignores it, the typechecker verifies it.
    Fix {
        scrut: Box<TermAst>,
        base: Box<ProofAst>,
        a: Name,
        x: Name,
        step: Box<ProofAst>,
        motive: Option<Box<Formula>>,
    },
    /// `cofix t of (b,x).p`: coinductive fixpoint started at `t`, with `x`
    /// the current index and `b` the continuation function in `p`.
    Cofix {
        scrut: Box<TermAst>,
        b: Name,
        x: Name,
        body: Box<ProofAst>,
    },
    /// `μα.c`: context capture.
    Mu(Name, Box<Command>),
    /// `μtp̂.c`: delimited continuation over a dependent subcomputation.
    MuTp(Box<Command>),
    /// `tp̌`: the co-delimited continuation constant, dual to the `Tp`
    /// context. Appears in proof position inside `μ̃tp̌.c` bodies.
    CoTp,
}

/// Contexts (co-proofs).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ContextAst {
    CoVar(Name),
    /// `μ̃a.cτ`: binder that stores its proof; `tail` is the captured store
    /// suffix, empty in source programs.
    MuT {
        a: Name,
        body: Box<Command>,
        tail: Store,
    },
    Forcing(Forcing),
    /// `tp̂`: the delimiter context.
    Tp,
    /// `μ̃tp̌.c`: co-delimited continuation, dual of `MuTp`.
    CoShift(Box<Command>),
}

/// Forcing contexts: the contexts that eagerly demand a value and trigger
/// store lookups.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Forcing {
    /// `[]`: the empty context refuting ⊥.
    Empty,
    /// `μ̃[a1.c1 | a2.c2]`: case split on an injection.
    CaseSum(Name, Box<Command>, Name, Box<Command>),
    /// `μ̃(a1,a2).c`: split a conjunction pair.
    SplitPair(Name, Name, Box<Command>),
    /// `μ̃(x,a).c`: split a dependent pair.
    SplitDep(Name, Name, Box<Command>),
    /// `t·e`: push a term argument.
    PushT(Box<TermAst>, Box<ContextAst>),
    /// `q·e`: push a proof argument.
    PushP(Box<ProofAst>, Box<ContextAst>),
    /// `μ̃=.c`: eliminate an equality.
    MuEq(Box<Command>),
}

/// Term-level co-terms for the small-step term machinery.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CoTermAst {
    /// `u·π`: push a term argument onto a term stack.
    PushTerm(Box<TermAst>, Box<CoTermAst>),
    /// `μ̃x.cτ`: receive a term value; `tail` is the captured store suffix,
    /// empty in source programs.
    MuX {
        x: Name,
        body: Box<Command>,
        tail: Store,
    },
}

impl CoTermAst {
    pub fn mu_x(x: Name, body: Command) -> CoTermAst {
        CoTermAst::MuX {
            x,
            body: Box::new(body),
            tail: Store::empty(),
        }
    }
}

/// Commands: a proof cut against a context, or a term against a co-term.
///
/// `ascription` is optional elaboration data naming the cut formula (or cut
/// type, for term cuts). Machines neither read nor invent it; `alpha_eq`
/// ignores it; the typechecker verifies it before use.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Command {
    CutP {
        proof: Box<ProofAst>,
        context: Box<ContextAst>,
        ascription: Option<Formula>,
    },
    CutT {
        term: Box<TermAst>,
        coterm: Box<CoTermAst>,
        ascription: Option<crate::formula::TypeExpr>,
    },
}

impl Command {
    pub fn cut(proof: ProofAst, context: ContextAst) -> Command {
        Command::CutP {
            proof: Box::new(proof),
            context: Box::new(context),
            ascription: None,
        }
    }

    pub fn cut_ascribed(proof: ProofAst, context: ContextAst, formula: Formula) -> Command {
        Command::CutP {
            proof: Box::new(proof),
            context: Box::new(context),
            ascription: Some(formula),
        }
    }

    pub fn cut_term(term: TermAst, coterm: CoTermAst) -> Command {
        Command::CutT {
            term: Box::new(term),
            coterm: Box::new(coterm),
            ascription: None,
        }
    }
}

/// What a store may bind to a proof variable: a value or a lazy fixpoint.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Storable {
    Val(ProofAst),
    FixThunk {
        scrut: TermAst,
        base: ProofAst,
        a: Name,
        x: Name,
        step: ProofAst,
        motive: Option<Box<Formula>>,
    },
    CofixThunk {
        scrut: TermAst,
        b: Name,
        x: Name,
        body: ProofAst,
    },
}

impl Storable {
    /// View the storable as the proof it denotes.
    pub fn as_proof(&self) -> ProofAst {
        match self {
            Storable::Val(v) => v.clone(),
            Storable::FixThunk { scrut, base, a, x, step, motive } => ProofAst::Fix {
                scrut: Box::new(scrut.clone()),
                base: Box::new(base.clone()),
                a: a.clone(),
                x: x.clone(),
                step: Box::new(step.clone()),
                motive: motive.clone(),
            },
            Storable::CofixThunk { scrut, b, x, body } => ProofAst::Cofix {
                scrut: Box::new(scrut.clone()),
                b: b.clone(),
                x: x.clone(),
                body: Box::new(body.clone()),
            },
        }
    }

    /// Classify a proof as a storable, if it is one.
    pub fn classify(p: &ProofAst) -> Option<Storable> {
        if p.is_value() {
            return Some(Storable::Val(p.clone()));
        }
        match p {
            ProofAst::Fix { scrut, base, a, x, step, motive } if scrut.is_value() => {
                Some(Storable::FixThunk {
                    scrut: (**scrut).clone(),
                    base: (**base).clone(),
                    a: a.clone(),
                    x: x.clone(),
                    step: (**step).clone(),
                    motive: motive.clone(),
                })
            }
            ProofAst::Cofix { scrut, b, x, body } if scrut.is_value() => {
                Some(Storable::CofixThunk {
                    scrut: (**scrut).clone(),
                    b: b.clone(),
                    x: x.clone(),
                    body: (**body).clone(),
                })
            }
            _ => None,
        }
    }
}

/// One store binding. `ascription` is optional elaboration data (the bound
/// formula); machines may thread it, the typechecker verifies before use,
/// and alpha-equivalence ignores it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Binding {
    Proof {
        name: Name,
        storable: Storable,
        ascription: Option<Formula>,
    },
    Ctx {
        name: Name,
        ctx: ContextAst,
        ascription: Option<Formula>,
    },
}

impl Binding {
    pub fn name(&self) -> &Name {
        match self {
            Binding::Proof { name, .. } | Binding::Ctx { name, .. } => name,
        }
    }

    pub fn ascription(&self) -> Option<&Formula> {
        match self {
            Binding::Proof { ascription, .. } | Binding::Ctx { ascription, .. } => {
                ascription.as_ref()
            }
        }
    }
}

/// Binding a proof that is neither a value nor a (co)fixpoint thunk.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("proof bound to {name} is not storable (not a value or (co)fixpoint)")]
pub struct NotStorable {
    pub name: Name,
}

/// An ordered sequence of bindings; every bound name occurs at most once.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Store(Vec<Binding>);

impl Store {
    pub fn empty() -> Store {
        Store(Vec::new())
    }

    pub fn from_bindings(bindings: Vec<Binding>) -> Store {
        let store = Store(bindings);
        debug_assert!(store.names_unique());
        store
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn bindings(&self) -> &[Binding] {
        &self.0
    }

    pub fn names_unique(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.0.iter().all(|b| seen.insert(b.name().clone()))
    }

    /// Append a proof binding, checking storability.
    pub fn bind_proof(
        &mut self,
        a: Name,
        p: ProofAst,
        ascription: Option<Formula>,
    ) -> Result<(), NotStorable> {
        match Storable::classify(&p) {
            Some(s) => {
                self.0.push(Binding::Proof { name: a, storable: s, ascription });
                Ok(())
            }
            None => Err(NotStorable { name: a }),
        }
    }

    pub fn bind_storable(&mut self, a: Name, s: Storable, ascription: Option<Formula>) {
        self.0.push(Binding::Proof { name: a, storable: s, ascription });
    }

    pub fn bind_ctx(&mut self, alpha: Name, e: ContextAst, ascription: Option<Formula>) {
        self.0.push(Binding::Ctx { name: alpha, ctx: e, ascription });
    }

    pub fn lookup_proof(&self, a: &Name) -> Option<&Storable> {
        self.0.iter().rev().find_map(|b| match b {
            Binding::Proof { name, storable, .. } if name == a => Some(storable),
            _ => None,
        })
    }

    pub fn lookup_ctx(&self, alpha: &Name) -> Option<&ContextAst> {
        self.0.iter().rev().find_map(|b| match b {
            Binding::Ctx { name, ctx, .. } if name == alpha => Some(ctx),
            _ => None,
        })
    }

    /// Split at the binding for `name`: the prefix before it, the binding,
    /// and the suffix after it.
    pub fn split_at_name(&self, name: &Name) -> Option<(Store, Binding, Store)> {
        let idx = self.0.iter().position(|b| b.name() == name)?;
        let prefix = Store(self.0[..idx].to_vec());
        let suffix = Store(self.0[idx + 1..].to_vec());
        Some((prefix, self.0[idx].clone(), suffix))
    }

    pub fn concat(&self, other: &Store) -> Store {
        let mut out = self.0.clone();
        out.extend(other.0.iter().cloned());
        Store(out)
    }

    pub fn domain(&self) -> Vec<Name> {
        self.0.iter().map(|b| b.name().clone()).collect()
    }
}

/// A command paired with a store.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Closure {
    pub command: Command,
    pub store: Store,
}

impl Closure {
    pub fn new(command: Command, store: Store) -> Closure {
        Closure { command, store }
    }

    pub fn from_command(command: Command) -> Closure {
        Closure { command, store: Store::empty() }
    }
}

impl TermAst {
    pub fn var(n: Name) -> TermAst {
        TermAst::Var(n)
    }

    /// The numeral `S^n(0)`.
    pub fn numeral(n: u64) -> TermAst {
        let mut t = TermAst::Zero;
        for _ in 0..n {
            t = TermAst::Succ(Box::new(t));
        }
        t
    }

    /// Read back a numeral, if this term is one.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut t = self;
        let mut n = 0;
        loop {
            match t {
                TermAst::Zero => return Some(n),
                TermAst::Succ(u) => {
                    n += 1;
                    t = u;
                }
                _ => return None,
            }
        }
    }

    /// Term values: variables, numerals, abstractions.
    pub fn is_value(&self) -> bool {
        match self {
            TermAst::Var(_) | TermAst::Lam(..) => true,
            TermAst::Zero => true,
            TermAst::Succ(t) => t.is_numeral_tail(),
            _ => false,
        }
    }

    fn is_numeral_tail(&self) -> bool {
        match self {
            TermAst::Zero => true,
            TermAst::Succ(t) => t.is_numeral_tail(),
            _ => false,
        }
    }
}

impl ProofAst {
    pub fn var(n: Name) -> ProofAst {
        ProofAst::Var(n)
    }

    pub fn fix(scrut: TermAst, base: ProofAst, a: Name, x: Name, step: ProofAst) -> ProofAst {
        ProofAst::Fix {
            scrut: Box::new(scrut),
            base: Box::new(base),
            a,
            x,
            step: Box::new(step),
            motive: None,
        }
    }

    pub fn cofix(scrut: TermAst, b: Name, x: Name, body: ProofAst) -> ProofAst {
        ProofAst::Cofix { scrut: Box::new(scrut), b, x, body: Box::new(body) }
    }

    /// Proof values: variables, value injections, value pairs, dependent
    /// pairs of a term value and a value, abstractions, refl.
    pub fn is_value(&self) -> bool {
        match self {
            ProofAst::Var(_) | ProofAst::LamT(..) | ProofAst::LamP(..) | ProofAst::Refl => true,
            ProofAst::Inj(_, p) => p.is_value(),
            ProofAst::Pair(p, q) => p.is_value() && q.is_value(),
            ProofAst::DepPair(t, p) => t.is_value() && p.is_value(),
            _ => false,
        }
    }
}

impl ContextAst {
    pub fn covar(n: Name) -> ContextAst {
        ContextAst::CoVar(n)
    }

    pub fn mu_t(a: Name, body: Command) -> ContextAst {
        ContextAst::MuT { a, body: Box::new(body), tail: Store::empty() }
    }

    pub fn push_p(q: ProofAst, e: ContextAst) -> ContextAst {
        ContextAst::Forcing(Forcing::PushP(Box::new(q), Box::new(e)))
    }

    pub fn push_t(t: TermAst, e: ContextAst) -> ContextAst {
        ContextAst::Forcing(Forcing::PushT(Box::new(t), Box::new(e)))
    }

    pub fn is_forcing(&self) -> bool {
        matches!(self, ContextAst::Forcing(_))
    }
}

/// Focus levels for the small-step machine: `C → P → E → V → F` on the
/// proof side and `C → T → Pi` on the term side.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub enum Level {
    C,
    P,
    E,
    V,
    F,
    T,
    Pi,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::C => "c",
            Level::P => "p",
            Level::E => "e",
            Level::V => "V",
            Level::F => "f",
            Level::T => "t",
            Level::Pi => "pi",
        };
        write!(f, "{s}")
    }
}

/// A command plus the level the machine is examining.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnnotatedCommand {
    pub command: Command,
    pub level: Level,
}
