//! Names with globally fresh identifiers.
//!
//! Binders are named, not indexed: stores bind names, and freshness of the
//! uid makes store-domain uniqueness checkable. The counter is atomic so
//! parallel corpus runs draw from disjoint ranges automatically.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

/// A variable name: a human-readable base plus a unique id.
///
/// Equality and hashing use both fields; `alpha_eq` on syntax ignores the
/// base and compares binding structure only.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    pub base: String,
    pub uid: u64,
}

impl Name {
    /// Make a name with an explicit uid. Intended for parsers and tests;
    /// everything else should use [`fresh`].
    pub fn new(base: impl Into<String>, uid: u64) -> Self {
        Name { base: base.into(), uid }
    }

    /// A fresh copy of this name: same base, new uid.
    pub fn refresh(&self) -> Self {
        fresh(&self.base)
    }
}

/// Generate a name whose uid is strictly greater than every uid issued so far.
pub fn fresh(base: &str) -> Name {
    let uid = NEXT_UID.fetch_add(1, Ordering::Relaxed);
    Name { base: base.to_string(), uid }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.base, self.uid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_uids_are_distinct() {
        let a = fresh("a");
        let b = fresh("a");
        assert_eq!(a.base, "a");
        assert_ne!(a.uid, b.uid);
    }

    #[test]
    fn fresh_is_monotone() {
        let a = fresh("x");
        let b = fresh("y");
        assert!(b.uid > a.uid);
    }
}
