//! Head reduction parameterized by an evaluation strategy: a value class
//! over proofs and a covalue class over contexts. The two presets resolve
//! the μ/μ̃ critical pair in opposite directions.

use super::ast::{
    free_names_ctx, subst_command, LCommand, LContext, LProof, LRepl,
};

/// An evaluation strategy: which proofs may be bound by μ̃, which contexts
/// may be captured by μ.
#[derive(Clone, Copy)]
pub struct Strategy {
    pub name: &'static str,
    pub value: fn(&LProof) -> bool,
    pub covalue: fn(&LContext) -> bool,
}

impl std::fmt::Debug for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name)
    }
}

/// Call-by-name: every proof may be bound, only covalues may be captured.
pub fn cbn() -> Strategy {
    Strategy {
        name: "cbn",
        value: |_| true,
        covalue: LContext::is_covalue,
    }
}

/// Call-by-value: only values may be bound, every context may be captured.
pub fn cbv() -> Strategy {
    Strategy {
        name: "cbv",
        value: LProof::is_value,
        covalue: |_| true,
    }
}

/// One head step, or `None` on a blocked command.
pub fn lmmt_step(c: &LCommand, s: &Strategy) -> Option<LCommand> {
    // ⟨p‖μ̃a.c⟩ → c[p/a] for p in the value class.
    if let LContext::MuT(a, body) = &c.context {
        if (s.value)(&c.proof) {
            return Some(subst_command(body, a, &LRepl::Proof(c.proof.clone())));
        }
    }
    // ⟨μα.c‖e⟩ → c[e/α] for e in the covalue class.
    if let LProof::Mu(alpha, body) = &c.proof {
        if (s.covalue)(&c.context) {
            return Some(subst_command(body, alpha, &LRepl::Ctx(c.context.clone())));
        }
    }
    // ⟨λa.p‖q·e⟩ → ⟨q‖μ̃a.⟨p‖e⟩⟩.
    if let (LProof::Lam(a, p), LContext::Push(q, e)) = (&c.proof, &c.context) {
        let (a2, p2) = if free_names_ctx(e).contains(a) {
            let a2 = a.refresh();
            (
                a2.clone(),
                subst_command(
                    &LCommand::cut((**p).clone(), LContext::CoVar(a2.clone())),
                    a,
                    &LRepl::Proof(LProof::Var(a2)),
                )
                .proof,
            )
        } else {
            (a.clone(), (**p).clone())
        };
        let inner = LCommand::cut(p2, (**e).clone());
        return Some(LCommand::cut(
            (**q).clone(),
            LContext::MuT(a2, Box::new(inner)),
        ));
    }
    None
}

/// Fuel ran out with the command still reducible.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("fuel exhausted after {fuel} head steps")]
pub struct FuelExhausted {
    pub fuel: u64,
}

/// Iterate head steps to a blocked command.
pub fn lmmt_run(
    c: &LCommand,
    s: &Strategy,
    fuel: u64,
) -> Result<(LCommand, u64), FuelExhausted> {
    let mut cur = c.clone();
    let mut steps = 0u64;
    loop {
        match lmmt_step(&cur, s) {
            None => return Ok((cur, steps)),
            Some(next) => {
                if steps == fuel {
                    return Err(FuelExhausted { fuel });
                }
                steps += 1;
                cur = next;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmmt::ast::{alpha_eq_command, call_cc, k_of, mk_app};
    use crate::name::fresh;

    fn konst(base: &str) -> LProof {
        LProof::Const(fresh(base))
    }

    fn coconst(base: &str) -> LContext {
        LContext::CoConst(fresh(base))
    }

    #[test]
    fn mu_captures_a_covalue_under_cbn() {
        let alpha = fresh("alpha");
        let alpha2 = fresh("alpha2");
        let c = LCommand::cut(
            LProof::Mu(
                alpha.clone(),
                Box::new(LCommand::cut(konst("k"), LContext::CoVar(alpha))),
            ),
            LContext::CoVar(alpha2.clone()),
        );
        let next = lmmt_step(&c, &cbn()).unwrap();
        assert_eq!(next.context, LContext::CoVar(alpha2));
    }

    #[test]
    fn beta_defers_the_argument() {
        let a = fresh("a");
        let q = konst("q");
        let e = coconst("eps");
        let c = LCommand::cut(
            LProof::Lam(a.clone(), Box::new(LProof::Var(a.clone()))),
            LContext::Push(Box::new(q.clone()), Box::new(e.clone())),
        );
        let next = lmmt_step(&c, &cbn()).unwrap();
        let want = LCommand::cut(
            q,
            LContext::MuT(
                a.clone(),
                Box::new(LCommand::cut(LProof::Var(a), e)),
            ),
        );
        assert!(alpha_eq_command(&next, &want));
    }

    #[test]
    fn the_critical_pair_resolves_by_strategy() {
        let alpha = fresh("alpha");
        let a = fresh("a");
        let kappa = coconst("kappa");
        let k = konst("k");
        let mu = LProof::Mu(
            alpha.clone(),
            Box::new(LCommand::cut(k.clone(), LContext::CoVar(alpha))),
        );
        let mu_t = LContext::MuT(
            a.clone(),
            Box::new(LCommand::cut(LProof::Var(a), kappa.clone())),
        );
        let c = LCommand::cut(mu.clone(), mu_t.clone());
        // CBN binds the whole μ on the proof side.
        let cbn_next = lmmt_step(&c, &cbn()).unwrap();
        assert!(alpha_eq_command(&cbn_next, &LCommand::cut(mu, kappa.clone())));
        // CBV captures the whole μ̃ on the context side.
        let cbv_next = lmmt_step(&c, &cbv()).unwrap();
        assert!(alpha_eq_command(
            &cbv_next,
            &LCommand::cut(k, mu_t)
        ));
    }

    #[test]
    fn at_most_one_rule_fires_per_preset() {
        let alpha = fresh("alpha");
        let a = fresh("a");
        let samples = vec![
            LCommand::cut(
                LProof::Mu(
                    alpha.clone(),
                    Box::new(LCommand::cut(konst("k"), LContext::CoVar(alpha.clone()))),
                ),
                LContext::MuT(
                    a.clone(),
                    Box::new(LCommand::cut(LProof::Var(a.clone()), coconst("kappa"))),
                ),
            ),
            LCommand::cut(
                LProof::Lam(a.clone(), Box::new(LProof::Var(a.clone()))),
                LContext::Push(Box::new(konst("q")), Box::new(coconst("eps"))),
            ),
            LCommand::cut(LProof::Var(a), LContext::CoVar(alpha)),
        ];
        for c in &samples {
            for s in [cbn(), cbv()] {
                let mut applicable = 0;
                if matches!(&c.context, LContext::MuT(..)) && (s.value)(&c.proof) {
                    applicable += 1;
                }
                if matches!(&c.proof, LProof::Mu(..)) && (s.covalue)(&c.context) {
                    applicable += 1;
                }
                if matches!(
                    (&c.proof, &c.context),
                    (LProof::Lam(..), LContext::Push(..))
                ) {
                    applicable += 1;
                }
                assert!(applicable <= 1, "determinism under {}", s.name);
            }
        }
    }

    #[test]
    fn call_cc_reifies_its_context_in_three_steps() {
        // ⟨call/cc‖q·ε⟩ →³ ⟨q‖k_ε·ε⟩, with the continuation reified as a
        // proof that restores ε.
        let q = konst("q");
        let eps = coconst("eps");
        let c = LCommand::cut(
            call_cc(),
            LContext::Push(Box::new(q.clone()), Box::new(eps.clone())),
        );
        let (fin, steps) = lmmt_run(&c, &cbn(), 100).unwrap();
        assert_eq!(steps, 3);
        let want = LCommand::cut(
            q,
            LContext::Push(Box::new(k_of(eps.clone())), Box::new(eps)),
        );
        assert!(alpha_eq_command(&fin, &want));
    }

    #[test]
    fn a_reified_context_discards_its_caller() {
        // ⟨k_ε‖q′·ε′⟩ →* ⟨q′‖ε⟩: the saved context replaces the current one.
        let eps = coconst("eps");
        let q2 = konst("qq");
        let eps2 = coconst("eps2");
        let c = LCommand::cut(
            k_of(eps.clone()),
            LContext::Push(Box::new(q2.clone()), Box::new(eps2)),
        );
        let (fin, steps) = lmmt_run(&c, &cbn(), 100).unwrap();
        assert_eq!(steps, 3);
        assert!(alpha_eq_command(&fin, &LCommand::cut(q2, eps)));
    }

    #[test]
    fn blocked_commands_return_unchanged() {
        let a = fresh("a");
        let alpha = fresh("alpha");
        let c = LCommand::cut(LProof::Var(a), LContext::CoVar(alpha));
        let (fin, steps) = lmmt_run(&c, &cbn(), 10).unwrap();
        assert_eq!(steps, 0);
        assert_eq!(fin, c);
    }

    #[test]
    fn application_of_the_identity_forwards_its_argument() {
        // Seeded behind a forwarding continuation, the application runs in
        // four steps to a q-headed command.
        let a = fresh("a");
        let b = fresh("b");
        let q = konst("q");
        let eps = coconst("eps");
        let id = LProof::Lam(a.clone(), Box::new(LProof::Var(a)));
        let app = mk_app(id, q.clone());
        let c = LCommand::cut(
            app,
            LContext::MuT(
                b.clone(),
                Box::new(LCommand::cut(LProof::Var(b), eps.clone())),
            ),
        );
        let (fin, steps) = lmmt_run(&c, &cbn(), 100).unwrap();
        assert_eq!(steps, 4);
        assert!(alpha_eq_command(&fin, &LCommand::cut(q, eps)));
    }

    #[test]
    fn fuel_exhaustion_reports() {
        // ⟨μα.⟨k‖μ̃a.⟨μα′.…‖…⟩⟩⟩ loops: Ω-style self-application.
        let a = fresh("a");
        let d = LProof::Lam(
            a.clone(),
            Box::new(mk_app(LProof::Var(a.clone()), LProof::Var(a))),
        );
        let omega = mk_app(d.clone(), d);
        let c = LCommand::cut(omega, LContext::CoConst(fresh("eps")));
        let got = lmmt_run(&c, &cbn(), 50);
        assert_eq!(got, Err(FuelExhausted { fuel: 50 }));
    }
}
