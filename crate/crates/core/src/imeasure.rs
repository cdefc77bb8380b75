//! Atom calculus of the I-measure.
//!
//! Each nonempty subset `S` of the ground set names one atom of the field
//! generated by `m(X_1), .., m(X_n)`: the atom lying inside `m(X_i)` exactly
//! for `i ∈ S`. A triple `(X;Y|Z)` covers the atoms meeting `X` and `Y` and
//! avoiding `Z`. Over positive polymatroids, implication is containment of
//! these atom sets.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::entropy::RationalEntropy;
use crate::error::{Error, Result};
use crate::triple::{CiSet, CiTriple};
use crate::varset::VarSet;

/// Ground-set cap for atom bitsets (`2^16 - 1` atoms).
pub const MAX_ATOM_VARS: usize = 16;

/// A set of nonempty atoms. Atom `S` lives at bit position `S - 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomSet {
    ambient: usize,
    words: Vec<u64>,
}

impl AtomSet {
    pub fn empty(ambient: usize) -> Result<Self> {
        if ambient > MAX_ATOM_VARS {
            return Err(Error::CapExceeded { what: "atom sets", n: ambient, cap: MAX_ATOM_VARS });
        }
        let bits = (1usize << ambient) - 1;
        Ok(AtomSet { ambient, words: vec![0; bits.div_ceil(64)] })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    fn pos(atom: VarSet) -> usize {
        debug_assert!(!atom.is_empty());
        atom.bits() as usize - 1
    }

    pub fn insert(&mut self, atom: VarSet) {
        assert!(!atom.is_empty() && atom.within(self.ambient), "not an atom: {atom:?}");
        let p = Self::pos(atom);
        self.words[p / 64] |= 1 << (p % 64);
    }

    pub fn contains(&self, atom: VarSet) -> bool {
        if atom.is_empty() || !atom.within(self.ambient) {
            return false;
        }
        let p = Self::pos(atom);
        self.words[p / 64] & (1 << (p % 64)) != 0
    }

    pub fn union_with(&mut self, other: &AtomSet) {
        assert_eq!(self.ambient, other.ambient);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Atoms in increasing bitmask order.
    pub fn iter(&self) -> impl Iterator<Item = VarSet> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(VarSet::from_bits((k * 64 + b + 1) as u32))
            })
        })
    }

    /// Lowest-index atom of `self` not in `other`.
    pub fn first_missing_from(&self, other: &AtomSet) -> Option<VarSet> {
        self.words.iter().zip(&other.words).enumerate().find_map(|(k, (a, b))| {
            let d = a & !b;
            (d != 0).then(|| VarSet::from_bits((k * 64 + d.trailing_zeros() as usize + 1) as u32))
        })
    }
}

impl std::fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `m(t)`: atoms `S` with `S ∩ x ≠ ∅`, `S ∩ y ≠ ∅`, `S ∩ z = ∅`.
pub fn atoms_of(t: &CiTriple, ambient: usize) -> Result<AtomSet> {
    let mut out = AtomSet::empty(ambient)?;
    if !t.within(ambient) {
        return Err(Error::OutOfRange { set: t.vars(), n: ambient });
    }
    if t.is_trivial() {
        return Ok(out);
    }
    // Every covered atom is a subset of the complement of z that meets x and y.
    let free = t.z().complement(ambient);
    for s in free.subsets() {
        if !(s & t.x()).is_empty() && !(s & t.y()).is_empty() {
            out.insert(s);
        }
    }
    Ok(out)
}

/// `m(Σ)`: the union of `m(σ)` over the members.
pub fn atoms_of_set(s: &CiSet) -> Result<AtomSet> {
    let mut out = AtomSet::empty(s.ambient())?;
    for t in s {
        out.union_with(&atoms_of(t, s.ambient())?);
    }
    Ok(out)
}

/// A nonnegative weighting of the nonempty atoms; absent atoms weigh 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PositiveImeasure {
    ambient: usize,
    weights: BTreeMap<VarSet, BigRational>,
}

impl PositiveImeasure {
    pub fn new(ambient: usize) -> Self {
        PositiveImeasure { ambient, weights: BTreeMap::new() }
    }

    /// The measure putting weight 1 on a single atom.
    pub fn unit(ambient: usize, atom: VarSet) -> Result<Self> {
        let mut m = PositiveImeasure::new(ambient);
        m.set(atom, BigRational::one())?;
        Ok(m)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn set(&mut self, atom: VarSet, w: BigRational) -> Result<()> {
        if atom.is_empty() || !atom.within(self.ambient) {
            return Err(Error::Domain(format!("{atom:?} is not a nonempty atom of F_{}", self.ambient)));
        }
        if w < BigRational::zero() {
            return Err(Error::Domain(format!("negative atom weight {w}")));
        }
        if w.is_zero() {
            self.weights.remove(&atom);
        } else {
            self.weights.insert(atom, w);
        }
        Ok(())
    }

    pub fn weight(&self, atom: VarSet) -> BigRational {
        self.weights.get(&atom).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Atoms with nonzero weight, in increasing bitmask order.
    pub fn support(&self) -> impl Iterator<Item = (VarSet, &BigRational)> {
        self.weights.iter().map(|(a, w)| (*a, w))
    }

    /// Total weight on the atoms of `atoms`.
    pub fn measure(&self, atoms: &AtomSet) -> BigRational {
        self.support().filter(|(a, _)| atoms.contains(*a)).map(|(_, w)| w.clone()).sum()
    }
}

/// Expand a positive I-measure into its polymatroid:
/// `h(α) = Σ { w(S) : S ∩ α ≠ ∅ }`.
pub fn measure_to_entropy(m: &PositiveImeasure) -> Result<RationalEntropy> {
    let n = m.ambient();
    let mut values = vec![BigRational::zero(); 1 << n];
    for (atom, w) in m.support() {
        for b in 1..1u32 << n {
            if b & atom.bits() != 0 {
                values[b as usize] += w;
            }
        }
    }
    RationalEntropy::from_values(n, values)?.check_polymatroid()
}

/// Result of deciding implication over positive polymatroids.
#[derive(Clone, Debug, PartialEq)]
pub enum PositiveOutcome {
    Implied,
    /// A unit measure on an atom of `m(τ)` outside `m(Σ)`.
    Counterexample { atom: VarSet, measure: PositiveImeasure },
}

impl PositiveOutcome {
    pub fn is_implied(&self) -> bool {
        matches!(self, PositiveOutcome::Implied)
    }
}

/// Decide `Δ_n ⊨ Σ ⇒ τ` by checking `m(τ) ⊆ m(Σ)`.
pub fn positive_implies(s: &CiSet, t: &CiTriple) -> Result<PositiveOutcome> {
    let n = s.ambient();
    let sigma = atoms_of_set(s)?;
    let tau = atoms_of(t, n)?;
    Ok(match tau.first_missing_from(&sigma) {
        None => PositiveOutcome::Implied,
        Some(atom) => PositiveOutcome::Counterexample { atom, measure: PositiveImeasure::unit(n, atom)? },
    })
}

/// Drop every antecedent whose atoms are disjoint from `m(τ)`; the remaining
/// set still implies `τ` over positive polymatroids.
pub fn prune_antecedents(s: &CiSet, t: &CiTriple) -> Result<CiSet> {
    if !positive_implies(s, t)?.is_implied() {
        return Err(Error::NotImplied);
    }
    let tau = atoms_of(t, s.ambient())?;
    let mut kept = CiSet::new(s.ambient());
    for sigma in s {
        if !atoms_of(sigma, s.ambient())?.is_disjoint(&tau) {
            kept.insert(*sigma)?;
        }
    }
    Ok(kept)
}
