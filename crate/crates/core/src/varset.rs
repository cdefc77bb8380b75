//! Bitmask sets of variable indices.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest ground set supported by any set-level operation.
pub const MAX_VARS: usize = 20;

/// A subset of the ground variables `0..n`, stored as a bitmask.
///
/// The ambient size `n` is carried by the surrounding context (a `CiSet`,
/// an `EntropyVector`, a graph) rather than by the set itself.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarSet(u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub const fn from_bits(bits: u32) -> Self {
        VarSet(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        VarSet(1 << i)
    }

    /// The full ground set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VARS, "ground set of size {n} exceeds {MAX_VARS}");
        VarSet(((1u64 << n) - 1) as u32)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(VarSet::EMPTY, |s, i| s | VarSet::singleton(i))
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub const fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub const fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub const fn difference(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> VarSet {
        VarSet::full(n).difference(self)
    }

    pub const fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Whether every member is below `n`.
    pub fn within(self, n: usize) -> bool {
        n >= 32 || self.0 >> n == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = VarSet> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(VarSet(cur))
        })
    }

    /// Nonempty proper subsets of `self`.
    pub fn proper_nonempty_subsets(self) -> impl Iterator<Item = VarSet> {
        self.subsets().filter(move |s| !s.is_empty() && *s != self)
    }

    /// Lexicographic comparison of the sorted member lists.
    pub fn lex_cmp(self, other: VarSet) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl std::ops::BitOr for VarSet {
    type Output = VarSet;
    fn bitor(self, rhs: VarSet) -> VarSet {
        self.union(rhs)
    }
}

impl std::ops::BitAnd for VarSet {
    type Output = VarSet;
    fn bitand(self, rhs: VarSet) -> VarSet {
        self.intersection(rhs)
    }
}

impl std::ops::Sub for VarSet {
    type Output = VarSet;
    fn sub(self, rhs: VarSet) -> VarSet {
        self.difference(rhs)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VarSet {
    /// Default rendering: `X1X2` style, one-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        for i in self.iter() {
            write!(f, "X{}", i + 1)?;
        }
        Ok(())
    }
}
