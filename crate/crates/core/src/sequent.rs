//! Sequents as pairs of finite multisets compared up to alpha-equivalence.

use crate::syntax::{Formula, Term};
use std::collections::BTreeSet;

/// A multiset of formulas. Insertion order is kept for display; equality,
/// membership and counting use alpha-keys, so the order never matters.
#[derive(Clone, Debug, Default)]
pub struct Multiset {
    items: Vec<Formula>,
    keys: Vec<Formula>,
}

impl Multiset {
    pub fn new() -> Multiset {
        Multiset::default()
    }

    pub fn from_vec(items: Vec<Formula>) -> Multiset {
        let keys = items.iter().map(Formula::alpha_key).collect();
        Multiset { items, keys }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Formula] {
        &self.items
    }

    pub fn push(&mut self, f: Formula) {
        self.keys.push(f.alpha_key());
        self.items.push(f);
    }

    pub fn with(mut self, f: Formula) -> Multiset {
        self.push(f);
        self
    }

    pub fn count(&self, f: &Formula) -> usize {
        let k = f.alpha_key();
        self.keys.iter().filter(|x| **x == k).count()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        let k = f.alpha_key();
        self.keys.contains(&k)
    }

    /// Removes one occurrence; false when absent.
    pub fn remove_one(&mut self, f: &Formula) -> bool {
        let k = f.alpha_key();
        match self.keys.iter().position(|x| *x == k) {
            Some(i) => {
                self.keys.remove(i);
                self.items.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn without(&self, f: &Formula) -> Option<Multiset> {
        let mut m = self.clone();
        m.remove_one(f).then_some(m)
    }

    /// Removes `n` occurrences; `None` when fewer are present.
    pub fn without_n(&self, f: &Formula, n: usize) -> Option<Multiset> {
        let mut m = self.clone();
        for _ in 0..n {
            if !m.remove_one(f) {
                return None;
            }
        }
        Some(m)
    }

    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut m = self.clone();
        m.items.extend(other.items.iter().cloned());
        m.keys.extend(other.keys.iter().cloned());
        m
    }

    /// `self - other`, or `None` unless `other` is a sub-multiset of `self`.
    pub fn difference(&self, other: &Multiset) -> Option<Multiset> {
        let mut m = self.clone();
        for f in other.iter() {
            if !m.remove_one(f) {
                return None;
            }
        }
        Some(m)
    }

    pub fn is_submultiset_of(&self, other: &Multiset) -> bool {
        other.difference(self).is_some()
    }

    /// Sorted `(alpha-key, multiplicity)` pairs.
    pub fn canonical(&self) -> Vec<(Formula, usize)> {
        let mut keys = self.keys.clone();
        keys.sort();
        let mut out: Vec<(Formula, usize)> = Vec::new();
        for k in keys {
            match out.last_mut() {
                Some((last, n)) if *last == k => *n += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }

    /// Distinct formulas (first representative of each alpha class).
    pub fn distinct(&self) -> Vec<Formula> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (f, k) in self.items.iter().zip(&self.keys) {
            if seen.insert(k.clone()) {
                out.push(f.clone());
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Formula) -> Formula) -> Multiset {
        Multiset::from_vec(self.items.iter().map(f).collect())
    }

    pub(crate) fn key_at(&self, i: usize) -> &Formula {
        &self.keys[i]
    }
}

impl PartialEq for Multiset {
    fn eq(&self, other: &Multiset) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }
}

impl Eq for Multiset {}

impl FromIterator<Formula> for Multiset {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Multiset {
        Multiset::from_vec(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Multiset {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sequent {
    pub ante: Multiset,
    pub succ: Multiset,
}

impl Sequent {
    pub fn new(ante: Vec<Formula>, succ: Vec<Formula>) -> Sequent {
        Sequent { ante: Multiset::from_vec(ante), succ: Multiset::from_vec(succ) }
    }

    pub fn from_sides(ante: Multiset, succ: Multiset) -> Sequent {
        Sequent { ante, succ }
    }

    pub fn is_empty(&self) -> bool {
        self.ante.is_empty() && self.succ.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.ante.iter().chain(self.succ.iter())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.formulas().flat_map(|f| f.free_vars()).collect()
    }

    pub fn has_free(&self, x: &str) -> bool {
        self.formulas().any(|f| f.has_free(x))
    }

    /// All variable names, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.all_vars(&mut out);
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.constants(&mut out);
        }
        out
    }

    pub fn subst(&self, x: &str, t: &Term) -> Sequent {
        Sequent { ante: self.ante.map(|f| f.subst(x, t)), succ: self.succ.map(|f| f.subst(x, t)) }
    }

    /// Context union `self, other` on both sides.
    pub fn join(&self, other: &Sequent) -> Sequent {
        Sequent { ante: self.ante.union(&other.ante), succ: self.succ.union(&other.succ) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: &str) -> Formula {
        Formula::atom(p, vec![])
    }

    #[test]
    fn multiset_equality_ignores_order_and_counts_copies() {
        let x = Multiset::from_vec(vec![a("P"), a("Q"), a("P")]);
        let y = Multiset::from_vec(vec![a("Q"), a("P"), a("P")]);
        let z = Multiset::from_vec(vec![a("Q"), a("P")]);
        assert_eq!(x, y);
        assert_ne!(x, z);
        assert_eq!(x.count(&a("P")), 2);
        assert_eq!(x.difference(&z), Some(Multiset::from_vec(vec![a("P")])));
        assert!(z.difference(&x).is_none());
    }

    #[test]
    fn alpha_variants_are_identified() {
        let f = Formula::forall_i("x", Formula::atom("P", vec![Term::var("x")]));
        let g = Formula::forall_i("y", Formula::atom("P", vec![Term::var("y")]));
        assert_eq!(Multiset::from_vec(vec![f]), Multiset::from_vec(vec![g]));
    }
}
