#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use ciapprox::imeasure::{measure_to_entropy, PositiveImeasure};
use ciapprox::{CiSet, CiTriple, RationalEntropy, VarSet};

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn s(ix: &[usize]) -> VarSet {
    VarSet::from_indices(ix.iter().copied())
}

pub fn mi(x: &[usize], y: &[usize], z: &[usize]) -> CiTriple {
    CiTriple::new(s(x), s(y), s(z))
}

/// Split `0..n` by a base-4 code into `[x, y, z, unused]`.
pub fn split(n: usize, mut code: usize) -> [VarSet; 4] {
    let mut parts = [VarSet::EMPTY; 4];
    for v in 0..n {
        parts[code % 4] = parts[code % 4] | VarSet::singleton(v);
        code /= 4;
    }
    parts
}

pub fn disjoint_triples(n: usize) -> Vec<CiTriple> {
    let mut out: Vec<CiTriple> = (0..4usize.pow(n as u32))
        .map(|c| split(n, c))
        .filter(|p| !p[0].is_empty() && !p[1].is_empty())
        .map(|p| CiTriple::new(p[0], p[1], p[2]))
        .collect();
    out.sort_by_key(|t| (t.z().bits(), t.x().bits(), t.y().bits()));
    out.dedup();
    out
}

pub fn measure_from(n: usize, weights: &[(i64, i64)]) -> PositiveImeasure {
    let mut m = PositiveImeasure::new(n);
    for (a, &(p, q)) in weights.iter().enumerate().take((1 << n) - 1) {
        m.set(VarSet::from_bits(a as u32 + 1), BigRational::new(p.into(), q.into())).unwrap();
    }
    m
}

/// A rational polymatroid from a random positive I-measure.
pub fn arb_polymatroid(n: usize) -> impl Strategy<Value = (PositiveImeasure, RationalEntropy)> {
    prop::collection::vec((0i64..6, 1i64..4), (1 << n) - 1).prop_map(move |w| {
        let m = measure_from(n, &w);
        let h = measure_to_entropy(&m).unwrap();
        (m, h)
    })
}

/// Any triple (possibly overlapping or trivial) on `n` variables.
pub fn arb_triple(n: usize) -> impl Strategy<Value = CiTriple> {
    (0u32..1 << n, 0u32..1 << n, 0u32..1 << n)
        .prop_map(|(x, y, z)| CiTriple::new(VarSet::from_bits(x), VarSet::from_bits(y), VarSet::from_bits(z)))
}

pub fn arb_set(n: usize, max: usize) -> impl Strategy<Value = CiSet> {
    prop::collection::vec(arb_triple(n), 0..=max).prop_map(move |v| CiSet::from_triples(n, v).unwrap())
}
