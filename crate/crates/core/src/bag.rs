//! A multiset with explicit per-element cardinalities.

use std::collections::btree_map;
use std::collections::BTreeMap;

/// A bag (multiset) over `T`, stored as distinct elements with their
/// cardinalities. Elements with cardinality zero are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bag<T: Ord> {
    items: BTreeMap<T, usize>,
    total: usize,
}

impl<T: Ord> Default for Bag<T> {
    fn default() -> Self {
        Bag {
            items: BTreeMap::new(),
            total: 0,
        }
    }
}

impl<T: Ord> Bag<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: T) {
        self.insert_n(item, 1);
    }

    /// Adds `n` copies of `item`. Adding zero copies is a no-op.
    pub fn insert_n(&mut self, item: T, n: usize) {
        if n == 0 {
            return;
        }
        *self.items.entry(item).or_insert(0) += n;
        self.total += n;
    }

    /// Cardinality of `item`, zero if absent.
    pub fn count(&self, item: &T) -> usize {
        self.items.get(item).copied().unwrap_or(0)
    }

    /// Total number of elements, counting multiplicity.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of distinct elements.
    pub fn distinct(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Distinct elements with their cardinalities, in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> + '_ {
        self.items.iter().map(|(k, &v)| (k, v))
    }

    pub fn contains(&self, item: &T) -> bool {
        self.items.contains_key(item)
    }

    /// Whether every element occurs in `other` at least as often as in `self`.
    pub fn is_sub_bag(&self, other: &Bag<T>) -> bool {
        self.items.iter().all(|(k, &v)| other.count(k) >= v)
    }
}

impl<T: Ord> FromIterator<T> for Bag<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut bag = Bag::new();
        for item in iter {
            bag.insert(item);
        }
        bag
    }
}

impl<T: Ord> FromIterator<(T, usize)> for Bag<T> {
    fn from_iter<I: IntoIterator<Item = (T, usize)>>(iter: I) -> Self {
        let mut bag = Bag::new();
        for (item, n) in iter {
            bag.insert_n(item, n);
        }
        bag
    }
}

impl<T: Ord> Extend<(T, usize)> for Bag<T> {
    fn extend<I: IntoIterator<Item = (T, usize)>>(&mut self, iter: I) {
        for (item, n) in iter {
            self.insert_n(item, n);
        }
    }
}

impl<T: Ord> IntoIterator for Bag<T> {
    type Item = (T, usize);
    type IntoIter = btree_map::IntoIter<T, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}
