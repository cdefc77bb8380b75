//! Set functions `h: 2^Ω -> R` and the information measures they induce.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::triple::{CiSet, CiTriple};
use crate::varset::VarSet;

/// Largest ground set for which a dense entropy vector is materialized.
pub const MAX_ENTROPY_VARS: usize = 16;

/// Numeric backing of an entropy vector.
///
/// Rationals compare exactly; floats compare with an absolute slack of 1e-9.
pub trait Scalar:
    Clone + Debug + PartialOrd + Zero + Signed + Send + Sync + 'static
{
    fn tolerance() -> Self;

    /// `|self| <= tolerance`.
    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    /// `self >= -tolerance`.
    fn is_nonnegative(&self) -> bool {
        *self >= -Self::tolerance()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }
}

/// A real-valued function on the subsets of an `n`-variable ground set.
///
/// Values are stored densely by subset bitmask. A vector built from partial
/// data may leave some subsets undefined; evaluating a measure that needs one
/// of them reports [`Error::MissingSubset`].
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyVector<T> {
    ambient: usize,
    values: Vec<Option<T>>,
    checked: bool,
}

pub type RationalEntropy = EntropyVector<BigRational>;
pub type FloatEntropy = EntropyVector<f64>;

impl<T: Scalar> EntropyVector<T> {
    /// Build from a dense table indexed by subset bitmask; `values[0]` must be 0.
    pub fn from_values(ambient: usize, values: Vec<T>) -> Result<Self> {
        check_ambient(ambient)?;
        if values.len() != 1 << ambient {
            return Err(Error::Domain(format!(
                "expected {} values for n = {ambient}, got {}",
                1usize << ambient,
                values.len()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::NotPolymatroid("h(∅) must be 0".into()));
        }
        Ok(EntropyVector { ambient, values: values.into_iter().map(Some).collect(), checked: false })
    }

    pub fn from_fn<F: FnMut(VarSet) -> T>(ambient: usize, mut f: F) -> Result<Self> {
        check_ambient(ambient)?;
        let values = (0..1u32 << ambient)
            .map(|b| if b == 0 { T::zero() } else { f(VarSet::from_bits(b)) })
            .collect();
        Self::from_values(ambient, values)
    }

    /// Build from the subsets that are known; the rest stay undefined.
    pub fn from_partial<I: IntoIterator<Item = (VarSet, T)>>(ambient: usize, entries: I) -> Result<Self> {
        check_ambient(ambient)?;
        let mut values = vec![None; 1 << ambient];
        values[0] = Some(T::zero());
        for (s, v) in entries {
            if !s.within(ambient) {
                return Err(Error::OutOfRange { set: s, n: ambient });
            }
            if s.is_empty() && !v.is_zero() {
                return Err(Error::NotPolymatroid("h(∅) must be 0".into()));
            }
            values[s.bits() as usize] = Some(v);
        }
        Ok(EntropyVector { ambient, values, checked: false })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn get(&self, s: VarSet) -> Result<&T> {
        if !s.within(self.ambient) {
            return Err(Error::OutOfRange { set: s, n: self.ambient });
        }
        self.values[s.bits() as usize].as_ref().ok_or(Error::MissingSubset(s))
    }

    /// Whether [`check_polymatroid`](Self::check_polymatroid) has accepted this vector.
    pub fn is_polymatroid_checked(&self) -> bool {
        self.checked
    }

    /// Verify elemental monotonicity `h(A) <= h(A ∪ i)` and elemental
    /// submodularity `I(i;j|K) >= 0`; together these imply every Shannon
    /// inequality. Tags the vector on success.
    pub fn check_polymatroid(mut self) -> Result<Self> {
        let n = self.ambient;
        for b in 0..1u32 << n {
            let a = VarSet::from_bits(b);
            let ha = self.get(a)?.clone();
            for i in a.complement(n).iter() {
                let hai = self.get(a | VarSet::singleton(i))?;
                if !(hai.clone() - ha.clone()).is_nonnegative() {
                    return Err(Error::NotPolymatroid(format!(
                        "monotonicity fails: h({a:?}) > h({:?})",
                        a | VarSet::singleton(i)
                    )));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let ij = VarSet::from_indices([i, j]);
                for k in ij.complement(n).subsets() {
                    let t = CiTriple::new(VarSet::singleton(i), VarSet::singleton(j), k);
                    if !self.eval_mi(&t)?.is_nonnegative() {
                        return Err(Error::NotPolymatroid(format!("submodularity fails at {t}")));
                    }
                }
            }
        }
        self.checked = true;
        Ok(self)
    }

    /// `I_h(X;Y|Z) = h(ZX) + h(ZY) - h(ZXY) - h(Z)`; equals `h(X|Z)` when `x == y`.
    pub fn eval_mi(&self, t: &CiTriple) -> Result<T> {
        if t.is_trivial() {
            if !t.within(self.ambient) {
                return Err(Error::OutOfRange { set: t.vars(), n: self.ambient });
            }
            return Ok(T::zero());
        }
        let (x, y, z) = (t.x(), t.y(), t.z());
        let v = self.get(z | x)?.clone() + self.get(z | y)?.clone()
            - self.get(z | x | y)?.clone()
            - self.get(z)?.clone();
        Ok(v)
    }

    /// `h(Σ)`: the sum of `eval_mi` over the members of `s`.
    pub fn eval_sum(&self, s: &CiSet) -> Result<T> {
        s.iter().try_fold(T::zero(), |acc, t| Ok(acc + self.eval_mi(t)?))
    }

    /// Restrict to the subsets of `keep`, reindexed onto `0..|keep|`.
    pub fn project(&self, keep: VarSet) -> Result<EntropyVector<T>> {
        let idx: Vec<usize> = keep.iter().collect();
        let m = idx.len();
        let mut values = Vec::with_capacity(1 << m);
        for b in 0..1u32 << m {
            let s = VarSet::from_indices((0..m).filter(|k| b & (1 << k) != 0).map(|k| idx[k]));
            values.push(self.get(s)?.clone());
        }
        let mut out = EntropyVector::from_values(m, values)?;
        out.checked = self.checked;
        Ok(out)
    }
}

impl EntropyVector<BigRational> {
    pub fn to_f64(&self) -> EntropyVector<f64> {
        EntropyVector {
            ambient: self.ambient,
            values: self
                .values
                .iter()
                .map(|v| v.as_ref().map(|r| r.to_f64().unwrap_or(f64::NAN)))
                .collect(),
            checked: self.checked,
        }
    }
}

fn check_ambient(n: usize) -> Result<()> {
    if n > MAX_ENTROPY_VARS {
        return Err(Error::CapExceeded { what: "entropy vectors", n, cap: MAX_ENTROPY_VARS });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::CiSet;
    use num_bigint::BigInt;

    fn r(p: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(p))
    }

    fn s(ix: &[usize]) -> VarSet {
        VarSet::from_indices(ix.iter().copied())
    }

    fn mi(x: &[usize], y: &[usize], z: &[usize]) -> CiTriple {
        CiTriple::new(s(x), s(y), s(z))
    }

    #[test]
    fn independent_bits_have_zero_mutual_information() {
        let h = EntropyVector::from_fn(2, |a| a.len() as f64).unwrap().check_polymatroid().unwrap();
        assert_eq!(h.eval_mi(&mi(&[0], &[1], &[])).unwrap(), 0.0);
    }

    #[test]
    fn shared_bit_has_unit_mutual_information() {
        let h = EntropyVector::from_fn(2, |_| r(1)).unwrap().check_polymatroid().unwrap();
        assert_eq!(h.eval_mi(&mi(&[0], &[1], &[])).unwrap(), r(1));
    }

    #[test]
    fn parity_triple_has_unit_conditional_information() {
        // a = b xor c: any two bits are independent, all three carry 2 bits
        let h = EntropyVector::from_fn(3, |a| r(a.len().min(2) as i64)).unwrap();
        let h = h.check_polymatroid().unwrap();
        assert_eq!(h.eval_mi(&mi(&[0], &[1], &[2])).unwrap(), r(1));
        let sigma = CiSet::from_triples(3, [mi(&[0], &[1], &[2]), mi(&[0], &[2], &[1])]).unwrap();
        assert_eq!(h.eval_sum(&sigma).unwrap(), r(2));
        assert_eq!(h.eval_sum(&CiSet::new(3)).unwrap(), r(0));
    }

    #[test]
    fn conditional_triple_evaluates_conditional_entropy() {
        let h = EntropyVector::from_fn(2, |a| r(a.len() as i64)).unwrap();
        let t = CiTriple::conditional(s(&[0]), s(&[1]));
        assert_eq!(h.eval_mi(&t).unwrap(), r(1));
    }

    #[test]
    fn missing_subset_is_reported() {
        let h = EntropyVector::from_partial(2, [(s(&[0]), 1.0), (s(&[1]), 1.0)]).unwrap();
        let err = h.eval_mi(&mi(&[0], &[1], &[])).unwrap_err();
        assert_eq!(err, Error::MissingSubset(s(&[0, 1])));
    }

    #[test]
    fn non_polymatroids_are_rejected() {
        // h(A) = 2 > h(AB) = 1 breaks monotonicity
        let h = EntropyVector::from_values(2, vec![r(0), r(2), r(1), r(1)]).unwrap();
        assert!(matches!(h.check_polymatroid(), Err(Error::NotPolymatroid(_))));
        // h(A)=h(B)=1, h(AB)=3 breaks submodularity
        let h = EntropyVector::from_values(2, vec![r(0), r(1), r(1), r(3)]).unwrap();
        assert!(matches!(h.check_polymatroid(), Err(Error::NotPolymatroid(_))));
        assert!(EntropyVector::from_values(1, vec![r(1), r(1)]).is_err());
    }

    #[test]
    fn float_tolerance_absorbs_rounding() {
        let h = EntropyVector::from_values(2, vec![0.0, 1.0, 1.0, 2.0 + 5e-10]).unwrap();
        assert!(h.check_polymatroid().is_ok());
    }
}
