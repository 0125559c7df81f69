//! Derivation trees returned by the typecheckers: the rule name at each
//! node and the premise derivations in premise order.

/// A checked rule instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: &'static str,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(rule: &'static str) -> Derivation {
        Derivation { rule, premises: Vec::new() }
    }

    pub fn node(rule: &'static str, premises: Vec<Derivation>) -> Derivation {
        Derivation { rule, premises }
    }

    /// Number of rule instances in the tree.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn uses_rule(&self, rule: &str) -> bool {
        self.rule == rule || self.premises.iter().any(|d| d.uses_rule(rule))
    }

    /// How many nodes use the rule.
    pub fn count_rule(&self, rule: &str) -> usize {
        usize::from(self.rule == rule)
            + self.premises.iter().map(|d| d.count_rule(rule)).sum::<usize>()
    }
}
