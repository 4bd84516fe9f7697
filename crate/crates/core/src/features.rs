//! Compact sets of feature indices.

use std::cmp::Ordering;
use std::fmt;

/// A set of 0-based feature indices backed by a bitset.
///
/// Trailing zero words are always trimmed, so structural equality and hashing
/// agree with set equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FeatureSet {
    words: Vec<u64>,
}

impl FeatureSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, 1, ..., m-1}`.
    pub fn full(m: usize) -> Self {
        let mut words = vec![u64::MAX; m / 64];
        if !m.is_multiple_of(64) {
            words.push((1u64 << (m % 64)) - 1);
        }
        let mut set = Self { words };
        set.trim();
        set
    }

    pub fn singleton(i: usize) -> Self {
        let mut set = Self::new();
        set.insert(i);
        set
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        if w >= self.words.len() {
            return false;
        }
        let present = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        self.trim();
        present
    }

    pub fn contains(&self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        self.words.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest member plus one, or 0 for the empty set.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * 64 + (64 - w.leading_zeros() as usize),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn is_subset(&self, other: &FeatureSet) -> bool {
        self.words.iter().enumerate().all(|(i, w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    pub fn is_proper_subset(&self, other: &FeatureSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersects(&self, other: &FeatureSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &FeatureSet) -> FeatureSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).unwrap_or(&0) | other.words.get(i).unwrap_or(&0))
            .collect();
        FeatureSet { words }
    }

    pub fn intersection(&self, other: &FeatureSet) -> FeatureSet {
        let mut set = FeatureSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        set.trim();
        set
    }

    pub fn difference(&self, other: &FeatureSet) -> FeatureSet {
        let mut set = FeatureSet {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| w & !other.words.get(i).unwrap_or(&0))
                .collect(),
        };
        set.trim();
        set
    }

    /// `{0..m} \ self`.
    pub fn complement(&self, m: usize) -> FeatureSet {
        FeatureSet::full(m).difference(self)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Membership mask of length `m`. Members at or beyond `m` are dropped.
    pub fn to_mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for i in self.iter().take_while(|&i| i < m) {
            mask[i] = true;
        }
        mask
    }

    pub fn from_mask(mask: &[bool]) -> FeatureSet {
        mask.iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = FeatureSet::new();
        for i in iter {
            set.insert(i);
        }
        set
    }
}

impl Extend<usize> for FeatureSet {
    fn extend<I: IntoIterator<Item = usize>>(&mut self, iter: I) {
        for i in iter {
            self.insert(i);
        }
    }
}

impl<const N: usize> From<[usize; N]> for FeatureSet {
    fn from(items: [usize; N]) -> Self {
        items.into_iter().collect()
    }
}

/// Lexicographic on the ascending member sequence.
impl Ord for FeatureSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for FeatureSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn full_and_complement() {
        assert_eq!(FeatureSet::full(0), FeatureSet::new());
        assert_eq!(FeatureSet::full(3).to_vec(), vec![0, 1, 2]);
        assert_eq!(FeatureSet::full(64).len(), 64);
        assert_eq!(FeatureSet::full(65).len(), 65);
        assert_eq!(FeatureSet::from([1, 3]).complement(5).to_vec(), vec![0, 2, 4]);
    }

    #[test]
    fn trailing_words_do_not_affect_equality() {
        let mut a = FeatureSet::from([2, 100]);
        a.remove(100);
        assert_eq!(a, FeatureSet::from([2]));
        assert_eq!(a.bound(), 3);
    }

    proptest! {
        #[test]
        fn agrees_with_btreeset(a in proptest::collection::btree_set(0usize..150, 0..20),
                                b in proptest::collection::btree_set(0usize..150, 0..20)) {
            let fa: FeatureSet = a.iter().copied().collect();
            let fb: FeatureSet = b.iter().copied().collect();
            prop_assert_eq!(fa.to_vec(), a.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(fa.union(&fb).to_vec(), a.union(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(fa.intersection(&fb).to_vec(), a.intersection(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(fa.difference(&fb).to_vec(), a.difference(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(fa.is_subset(&fb), a.is_subset(&b));
            prop_assert_eq!(fa.intersects(&fb), !a.is_disjoint(&b));
            prop_assert_eq!(fa.cmp(&fb), a.iter().cmp(b.iter()));
            let back: BTreeSet<usize> = fa.iter().collect();
            prop_assert_eq!(back, a);
        }
    }
}
