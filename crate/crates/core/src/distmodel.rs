//! Explicit discrete joint distributions and their entropy vectors.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::entropy::{FloatEntropy, MAX_ENTROPY_VARS};
use crate::error::{Error, Result};
use crate::triple::{CiSet, CiTriple};
use crate::varset::{VarSet, MAX_VARS};

/// Largest number of states a dense table may hold.
pub const MAX_STATES: usize = 1 << 20;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// A joint distribution over finite domains, stored densely in
/// lexicographic state order (first variable most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    names: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(vars: Vec<(String, usize)>, probs: Vec<f64>) -> Result<Self> {
        if vars.len() > MAX_VARS {
            return Err(Error::CapExceeded { what: "distribution variables", n: vars.len(), cap: MAX_VARS });
        }
        let mut states = 1usize;
        for (name, k) in &vars {
            if *k == 0 {
                return Err(Error::InvalidDistribution(format!("variable {name} has an empty domain")));
            }
            states = states.saturating_mul(*k);
        }
        if states > MAX_STATES {
            return Err(Error::CapExceeded { what: "distribution states", n: states, cap: MAX_STATES });
        }
        if probs.len() != states {
            return Err(Error::InvalidDistribution(format!("expected {states} probabilities, got {}", probs.len())));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let (names, sizes) = vars.into_iter().unzip();
        Ok(JointDistribution { names, sizes, probs })
    }

    /// All-binary distribution from named variables.
    pub fn binary(names: &[&str], probs: Vec<f64>) -> Result<Self> {
        Self::new(names.iter().map(|n| (n.to_string(), 2)).collect(), probs)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    fn digits(&self, mut state: usize) -> Vec<usize> {
        let mut d = vec![0; self.sizes.len()];
        for (v, &k) in self.sizes.iter().enumerate().rev() {
            d[v] = state % k;
            state /= k;
        }
        d
    }

    /// Probability of a full assignment.
    pub fn prob(&self, assignment: &[usize]) -> Result<f64> {
        if assignment.len() != self.sizes.len() || assignment.iter().zip(&self.sizes).any(|(a, k)| a >= k) {
            return Err(Error::InvalidDistribution(format!("bad assignment {assignment:?}")));
        }
        let idx = assignment.iter().zip(&self.sizes).fold(0, |acc, (a, k)| acc * k + a);
        Ok(self.probs[idx])
    }

    /// Independent product; `other`'s variables come last.
    pub fn product(&self, other: &JointDistribution) -> Result<Self> {
        let probs = self.probs.iter().flat_map(|p| other.probs.iter().map(move |q| p * q)).collect();
        let vars = self.vars().chain(other.vars()).collect();
        Self::new(vars, probs)
    }

    fn vars(&self) -> impl Iterator<Item = (String, usize)> + '_ {
        self.names.iter().cloned().zip(self.sizes.iter().copied())
    }

    /// Marginal probabilities over `keep`, in lexicographic order of the
    /// kept variables.
    fn marginal_table(&self, keep: VarSet) -> Vec<f64> {
        let idx: Vec<usize> = keep.iter().collect();
        let mut strides = vec![0usize; self.sizes.len()];
        let mut size = 1;
        for &v in idx.iter().rev() {
            strides[v] = size;
            size *= self.sizes[v];
        }
        let mut out = vec![0.0; size];
        let mut digits = vec![0usize; self.sizes.len()];
        for &p in &self.probs {
            let m: usize = idx.iter().map(|&v| digits[v] * strides[v]).sum();
            out[m] += p;
            // advance the mixed-radix counter
            for v in (0..digits.len()).rev() {
                digits[v] += 1;
                if digits[v] < self.sizes[v] {
                    break;
                }
                digits[v] = 0;
            }
        }
        out
    }

    pub fn marginal(&self, keep: VarSet) -> Result<Self> {
        if !keep.within(self.n_vars()) {
            return Err(Error::OutOfRange { set: keep, n: self.n_vars() });
        }
        let vars = keep.iter().map(|v| (self.names[v].clone(), self.sizes[v])).collect();
        Self::new(vars, self.marginal_table(keep))
    }

    /// Base-2 entropy of the marginal on `keep`.
    pub fn entropy(&self, keep: VarSet) -> f64 {
        if keep.is_empty() {
            return 0.0;
        }
        shannon_entropy(&self.marginal_table(keep))
    }

    /// Entropy of every subset of the variables, polymatroid-checked.
    pub fn entropy_vector(&self) -> Result<FloatEntropy> {
        let n = self.n_vars();
        if n > MAX_ENTROPY_VARS {
            return Err(Error::CapExceeded { what: "entropy vectors", n, cap: MAX_ENTROPY_VARS });
        }
        let values: Vec<f64> =
            (0..1u32 << n).into_par_iter().map(|b| self.entropy(VarSet::from_bits(b))).collect();
        FloatEntropy::from_values(n, values)?.check_polymatroid()
    }

    /// Text dump: a `vars:` header, then `digits : prob` per state.
    pub fn dump(&self) -> String {
        let mut out = String::from("vars:");
        for (name, k) in self.vars() {
            if k == 2 {
                write!(out, " {name}").unwrap();
            } else {
                write!(out, " {name}:{k}").unwrap();
            }
        }
        out.push('\n');
        for (i, p) in self.probs.iter().enumerate() {
            let d: Vec<String> = self.digits(i).iter().map(|x| x.to_string()).collect();
            writeln!(out, "{} : {p}", d.join(" ")).unwrap();
        }
        out
    }

    /// Parse a dump. Missing states have probability 0; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::InvalidDistribution(format!("line {line}: {msg}"));
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| bad(1, "empty input".into()))?;
        let header = header.strip_prefix("vars:").ok_or_else(|| bad(hl, "expected 'vars:' header".into()))?;
        let mut vars = Vec::new();
        for tok in header.split_whitespace() {
            match tok.split_once(':') {
                Some((n, k)) => {
                    let k = k.parse().map_err(|_| bad(hl, format!("bad domain size in {tok:?}")))?;
                    vars.push((n.to_string(), k));
                }
                None => vars.push((tok.to_string(), 2)),
            }
        }
        let states = vars.iter().try_fold(1usize, |acc, (_, k)| acc.checked_mul(*k).filter(|&s| s <= MAX_STATES));
        let states = states.ok_or(Error::CapExceeded { what: "distribution states", n: usize::MAX, cap: MAX_STATES })?;
        let mut probs = vec![0.0; states];
        let mut seen = vec![false; states];
        for (ln, line) in lines {
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| bad(ln, "expected 'digits : prob'".into()))?;
            let digits: Vec<&str> = lhs.split_whitespace().collect();
            let digits: Vec<usize> = if digits.len() == 1 && vars.len() > 1 {
                digits[0].chars().map(|c| c.to_digit(36).map(|d| d as usize)).collect::<Option<_>>()
            } else {
                digits.iter().map(|d| d.parse().ok()).collect::<Option<_>>()
            }
            .ok_or_else(|| bad(ln, format!("bad state {lhs:?}")))?;
            if digits.len() != vars.len() || digits.iter().zip(&vars).any(|(d, (_, k))| d >= k) {
                return Err(bad(ln, format!("state {lhs:?} does not match the variables")));
            }
            let idx = digits.iter().zip(&vars).fold(0, |acc, (d, (_, k))| acc * k + d);
            if std::mem::replace(&mut seen[idx], true) {
                return Err(bad(ln, format!("state {lhs:?} listed twice")));
            }
            probs[idx] = rhs.trim().parse().map_err(|_| bad(ln, format!("bad probability {:?}", rhs.trim())))?;
        }
        Self::new(vars, probs)
    }
}

fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum()
}

/// Composite variables formed by a partition of a base distribution's
/// variables.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupedView {
    base: JointDistribution,
    groups: Vec<(String, VarSet)>,
}

impl GroupedView {
    pub fn new(base: JointDistribution, groups: Vec<(String, VarSet)>) -> Result<Self> {
        let mut covered = VarSet::EMPTY;
        for (name, g) in &groups {
            if g.is_empty() {
                return Err(Error::InvalidDistribution(format!("group {name} is empty")));
            }
            if !g.within(base.n_vars()) {
                return Err(Error::OutOfRange { set: *g, n: base.n_vars() });
            }
            if !covered.is_disjoint(*g) {
                return Err(Error::InvalidDistribution(format!("group {name} overlaps another group")));
            }
            covered = covered | *g;
        }
        if covered != VarSet::full(base.n_vars()) {
            return Err(Error::InvalidDistribution("groups do not cover every variable".into()));
        }
        Ok(GroupedView { base, groups })
    }

    pub fn base(&self) -> &JointDistribution {
        &self.base
    }

    pub fn groups(&self) -> &[(String, VarSet)] {
        &self.groups
    }

    pub fn names(&self) -> Vec<String> {
        self.groups.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Base variables behind a set of groups.
    pub fn expand(&self, s: VarSet) -> VarSet {
        s.iter().fold(VarSet::EMPTY, |acc, g| acc | self.groups[g].1)
    }

    /// Entropy vector over the groups, polymatroid-checked.
    pub fn entropy_vector(&self) -> Result<FloatEntropy> {
        let n = self.groups.len();
        if n > MAX_ENTROPY_VARS {
            return Err(Error::CapExceeded { what: "entropy vectors", n, cap: MAX_ENTROPY_VARS });
        }
        let values: Vec<f64> = (0..1u32 << n)
            .into_par_iter()
            .map(|b| self.base.entropy(self.expand(VarSet::from_bits(b))))
            .collect();
        FloatEntropy::from_values(n, values)?.check_polymatroid()
    }
}

/// Binary variables, all fair and independent except the lowest-indexed
/// member of `a`, which is the parity of the rest of `a ∪ b ∪ c`.
pub fn parity_distribution(names: &[String], a: VarSet, b: VarSet, c: VarSet) -> Result<JointDistribution> {
    let n = names.len();
    for s in [a, b, c] {
        if !s.within(n) {
            return Err(Error::OutOfRange { set: s, n });
        }
    }
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::Overlap);
    }
    let a1 = a.first().ok_or(Error::EmptySet("a"))?;
    if n > 20 {
        return Err(Error::CapExceeded { what: "distribution variables", n, cap: 20 });
    }
    let rest = (a | b | c) - VarSet::singleton(a1);
    let mass = 1.0 / (1u64 << (n - 1)) as f64;
    // bit of variable v in state i, first variable most significant
    let bit = |i: usize, v: usize| (i >> (n - 1 - v)) & 1;
    let probs = (0..1usize << n)
        .map(|i| {
            let parity = rest.iter().map(|v| bit(i, v)).sum::<usize>() % 2;
            if bit(i, a1) == parity {
                mass
            } else {
                0.0
            }
        })
        .collect();
    JointDistribution::new(names.iter().map(|s| (s.clone(), 2)).collect(), probs)
}

/// `δ₁, δ₂, f₁, f₂` evaluated at `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaF {
    pub delta1: f64,
    pub delta2: f64,
    pub f1: f64,
    pub f2: f64,
}

fn xlog(p: f64) -> f64 {
    p * p.log2()
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0 / 3.0) {
        return Err(Error::Domain(format!("x = {x} must lie in (0, 1/3)")));
    }
    Ok(())
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 0.0 && y < 1.0 / 6.0) {
        return Err(Error::Domain(format!("y = {y} must lie in (0, 1/6)")));
    }
    Ok(())
}

pub fn delta1(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(-(xlog(1.0 - 3.0 * x) + 3.0 * xlog(x)))
}

pub fn delta2(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(-(xlog(1.0 - 2.0 * x) + xlog(2.0 * x)))
}

pub fn f1(y: f64) -> Result<f64> {
    check_y(y)?;
    Ok(-(2.0 * xlog(0.5 - 3.0 * y) + 6.0 * xlog(y)))
}

pub fn f2(y: f64) -> Result<f64> {
    check_y(y)?;
    Ok(-(2.0 * xlog(0.5 - 2.0 * y) + 2.0 * xlog(2.0 * y)))
}

pub fn delta_f_functions(x: f64, y: f64) -> Result<DeltaF> {
    Ok(DeltaF { delta1: delta1(x)?, delta2: delta2(x)?, f1: f1(y)?, f2: f2(y)? })
}

/// Base variable order of the intersection counterexample.
pub const COUNTEREXAMPLE_VARS: [&str; 12] =
    ["A1", "A2", "A3", "A4_1", "A4_2", "A5_1", "A5_2", "A6_1", "A6_2", "A7_1", "A7_2", "A7_3"];

fn pair_block(i: usize, x: f64) -> Result<JointDistribution> {
    JointDistribution::binary(
        &[COUNTEREXAMPLE_VARS[2 * i - 5], COUNTEREXAMPLE_VARS[2 * i - 4]],
        vec![1.0 - 3.0 * x, x, x, x],
    )
}

/// Strictly positive distribution on twelve bits, grouped into `A`, `B`,
/// `C`, on which `I(A;B|C)` and `I(A;C|B)` vanish as `x, y -> 0` while
/// `I(A;B)` stays near 2.
pub fn intersection_counterexample(x: f64, y: f64) -> Result<GroupedView> {
    check_x(x)?;
    check_y(y)?;
    let fair = JointDistribution::binary(&COUNTEREXAMPLE_VARS[..3], vec![0.125; 8])?;
    let e = 0.5 - 3.0 * y;
    let a7 = JointDistribution::binary(&COUNTEREXAMPLE_VARS[9..], vec![e, y, y, y, y, y, y, e])?;
    let base = fair.product(&pair_block(4, x)?)?.product(&pair_block(5, x)?)?.product(&pair_block(6, x)?)?.product(&a7)?;
    let idx = |name: &str| COUNTEREXAMPLE_VARS.iter().position(|v| *v == name).unwrap();
    let group = |members: [&str; 4]| VarSet::from_indices(members.map(idx));
    GroupedView::new(
        base,
        vec![
            ("A".into(), group(["A2", "A6_1", "A7_1", "A5_1"])),
            ("B".into(), group(["A3", "A6_2", "A7_2", "A4_1"])),
            ("C".into(), group(["A1", "A5_2", "A7_3", "A4_2"])),
        ],
    )
}

/// Information quantities of the counterexample at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub y: f64,
    pub i_ab: f64,
    pub i_ab_c: f64,
    pub i_ac_b: f64,
    pub i_a_bc: f64,
    /// `I(A;B) / (I(A;B|C) + I(A;C|B))`.
    pub ratio: f64,
}

pub fn counterexample_row(x: f64, y: f64) -> Result<SweepRow> {
    let h = intersection_counterexample(x, y)?.entropy_vector()?;
    let (a, b, c) = (VarSet::singleton(0), VarSet::singleton(1), VarSet::singleton(2));
    let i_ab = h.eval_mi(&CiTriple::new(a, b, VarSet::EMPTY))?;
    let i_ab_c = h.eval_mi(&CiTriple::new(a, b, c))?;
    let i_ac_b = h.eval_mi(&CiTriple::new(a, c, b))?;
    let i_a_bc = h.eval_mi(&CiTriple::new(a, b | c, VarSet::EMPTY))?;
    Ok(SweepRow { x, y, i_ab, i_ab_c, i_ac_b, i_a_bc, ratio: i_ab / (i_ab_c + i_ac_b) })
}

pub fn sweep(points: &[(f64, f64)]) -> Result<Vec<SweepRow>> {
    points.par_iter().map(|&(x, y)| counterexample_row(x, y)).collect()
}

/// `Σ(U)`: each marginal `(X;Y)` becomes `(X∩U; Y∩U)`; trivial results
/// are dropped.
pub fn project_marginals(s: &CiSet, u: VarSet) -> Result<CiSet> {
    let n = s.ambient();
    if !u.within(n) {
        return Err(Error::OutOfRange { set: u, n });
    }
    let mut out = CiSet::new(n);
    for t in s {
        if !t.z().is_empty() {
            return Err(Error::NonConforming { triple: *t, reason: "expected a marginal CI (X;Y)".into() });
        }
        out.insert(CiTriple::new(t.x() & u, t.y() & u, VarSet::EMPTY))?;
    }
    Ok(out)
}
