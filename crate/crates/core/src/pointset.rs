use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum number of points a [`PointSet`] can address.
pub const MAX_POINTS: usize = 64;

/// A subset of `{0, .., 63}` stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> PointSet {
        assert!(n <= MAX_POINTS, "at most {MAX_POINTS} points supported");
        if n == MAX_POINTS {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> PointSet {
        PointSet(1u64 << x)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(it: I) -> PointSet {
        let mut s = PointSet::EMPTY;
        for x in it {
            s.insert(x);
        }
        s
    }

    #[inline]
    pub fn contains(self, x: usize) -> bool {
        x < MAX_POINTS && self.0 >> x & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize) {
        self.0 |= 1u64 << x;
    }

    #[inline]
    pub fn remove(&mut self, x: usize) {
        self.0 &= !(1u64 << x);
    }

    #[inline]
    pub fn union(self, o: PointSet) -> PointSet {
        PointSet(self.0 | o.0)
    }

    #[inline]
    pub fn intersect(self, o: PointSet) -> PointSet {
        PointSet(self.0 & o.0)
    }

    #[inline]
    pub fn minus(self, o: PointSet) -> PointSet {
        PointSet(self.0 & !o.0)
    }

    /// Complement relative to `{0, .., n-1}`.
    #[inline]
    pub fn complement(self, n: usize) -> PointSet {
        PointSet::full(n).minus(self)
    }

    #[inline]
    pub fn is_subset(self, o: PointSet) -> bool {
        self.0 & !o.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> PointIter {
        PointIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        PointSet::from_points(it)
    }
}

pub struct PointIter(u64);

impl Iterator for PointIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for PointIter {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_complement() {
        assert_eq!(PointSet::full(0), PointSet::EMPTY);
        assert_eq!(PointSet::full(64).len(), 64);
        let s = PointSet::from_points([0, 2]);
        assert_eq!(s.complement(4).to_vec(), vec![1, 3]);
    }

    #[test]
    fn iteration_is_ascending() {
        let s = PointSet::from_points([5, 1, 63, 7]);
        assert_eq!(s.to_vec(), vec![1, 5, 7, 63]);
        assert_eq!(s.first(), Some(1));
    }
}
