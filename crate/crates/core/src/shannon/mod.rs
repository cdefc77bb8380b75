//! Exact and approximate implication over the Shannon cone `Γ_n`.
//!
//! Every question reduces to an exact rational LP over the elemental
//! inequalities. Certificates are nonnegative combinations of elemental
//! inequalities and can be rechecked without the solver.

mod simplex;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::entropy::RationalEntropy;
use crate::error::{Error, Result};
use crate::graphsep::dag_from_basis;
use crate::imeasure::{measure_to_entropy, positive_implies, PositiveOutcome};
use crate::triple::{CiSet, CiTriple};
use crate::varset::VarSet;

use simplex::{Lp, LpOutcome, Relation};

/// Default ground-set cap for LP computations; `CIAPPROX_LP_CAP` overrides it.
pub const DEFAULT_LP_CAP: usize = 10;

pub fn lp_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("CIAPPROX_LP_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_LP_CAP)
            .min(crate::entropy::MAX_ENTROPY_VARS)
    })
}

fn check_cap(n: usize) -> Result<()> {
    let cap = lp_cap();
    if n > cap {
        return Err(Error::CapExceeded { what: "Shannon LPs", n, cap });
    }
    if n < 2 {
        return Err(Error::Domain(format!("Shannon LPs need at least 2 variables, got {n}")));
    }
    Ok(())
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// A linear form `Σ c_S h(S)` over the nonempty subsets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearFunctional {
    coeffs: BTreeMap<VarSet, BigRational>,
}

impl LinearFunctional {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `I(X;Y|Z)` as `h(ZX) + h(ZY) - h(ZXY) - h(Z)`.
    pub fn from_triple(t: &CiTriple) -> Self {
        let mut f = Self::zero();
        if t.is_trivial() {
            return f;
        }
        let (x, y, z) = (t.x(), t.y(), t.z());
        f.add_term(z | x, int(1));
        f.add_term(z | y, int(1));
        f.add_term(z | x | y, int(-1));
        f.add_term(z, int(-1));
        f
    }

    /// `h(Σ)` as a form.
    pub fn from_set(s: &CiSet) -> Self {
        let mut f = Self::zero();
        for t in s {
            f.add_scaled(&Self::from_triple(t), &int(1));
        }
        f
    }

    pub fn add_term(&mut self, s: VarSet, c: BigRational) {
        if s.is_empty() || c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(s).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&s);
        }
    }

    pub fn add_scaled(&mut self, other: &LinearFunctional, c: &BigRational) {
        for (s, v) in &other.coeffs {
            self.add_term(*s, v * c);
        }
    }

    pub fn scaled(&self, c: &BigRational) -> LinearFunctional {
        let mut f = Self::zero();
        f.add_scaled(self, c);
        f
    }

    pub fn coeff(&self, s: VarSet) -> BigRational {
        self.coeffs.get(&s).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarSet, &BigRational)> {
        self.coeffs.iter().map(|(s, c)| (*s, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, h: &RationalEntropy) -> Result<BigRational> {
        self.coeffs.iter().try_fold(BigRational::zero(), |acc, (s, c)| Ok(acc + c * h.get(*s)?))
    }

    /// Coefficient vector indexed by `bits - 1`.
    fn dense(&self, n: usize) -> Vec<(usize, BigRational)> {
        debug_assert!(self.coeffs.keys().all(|s| s.within(n)));
        self.coeffs.iter().map(|(s, c)| (s.bits() as usize - 1, c.clone())).collect()
    }
}

/// The elemental inequalities on `n` variables, each written as a triple:
/// monotonicity `h(Ω) - h(Ω∖i)` as the conditional `(i;i|Ω∖i)` and
/// submodularity as `(i;j|K)`.
#[derive(Clone, Debug)]
pub struct ElementalBasis {
    ambient: usize,
    triples: Vec<CiTriple>,
    functionals: Vec<LinearFunctional>,
}

impl ElementalBasis {
    fn build(n: usize) -> Self {
        let full = VarSet::full(n);
        let mut triples: Vec<CiTriple> = (0..n)
            .map(|i| CiTriple::conditional(full - VarSet::singleton(i), VarSet::singleton(i)))
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                let ij = VarSet::from_indices([i, j]);
                for k in (full - ij).subsets() {
                    triples.push(CiTriple::new(VarSet::singleton(i), VarSet::singleton(j), k));
                }
            }
        }
        let functionals = triples.iter().map(LinearFunctional::from_triple).collect();
        ElementalBasis { ambient: n, triples, functionals }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[CiTriple] {
        &self.triples
    }

    pub fn functionals(&self) -> &[LinearFunctional] {
        &self.functionals
    }
}

/// The cached elemental basis for `n` variables (`2 <= n <= cap`).
pub fn elemental_basis(n: usize) -> Result<&'static ElementalBasis> {
    static CACHE: [OnceLock<&'static ElementalBasis>; crate::entropy::MAX_ENTROPY_VARS + 1] =
        [const { OnceLock::new() }; crate::entropy::MAX_ENTROPY_VARS + 1];
    check_cap(n)?;
    Ok(*CACHE[n].get_or_init(|| Box::leak(Box::new(ElementalBasis::build(n)))))
}

/// Proof that `λ·h(Σ) - h(τ) = Σ y_e·e` with every `y_e >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpCertificate {
    pub ambient: usize,
    /// Nonzero multipliers keyed by their elemental triple.
    pub multipliers: Vec<(CiTriple, BigRational)>,
    pub lambda: BigRational,
}

impl LpCertificate {
    fn from_solution(basis: &ElementalBasis, y: &[BigRational], lambda: BigRational) -> Self {
        let multipliers = basis
            .triples
            .iter()
            .zip(y)
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (*t, c.clone()))
            .collect();
        LpCertificate { ambient: basis.ambient, multipliers, lambda }
    }

    /// Recheck the identity by direct arithmetic on linear forms.
    pub fn verify(&self, s: &CiSet, t: &CiTriple) -> bool {
        if self.lambda.is_negative() || s.ambient() != self.ambient {
            return false;
        }
        let n = self.ambient;
        let mut lhs = LinearFunctional::zero();
        for (e, c) in &self.multipliers {
            if c.is_negative() || !is_elemental(e, n) {
                return false;
            }
            lhs.add_scaled(&LinearFunctional::from_triple(e), c);
        }
        let mut rhs = LinearFunctional::from_set(s).scaled(&self.lambda);
        rhs.add_scaled(&LinearFunctional::from_triple(t), &int(-1));
        lhs == rhs
    }

    /// One `coef * I(..)` line per multiplier, then `lambda = p/q`.
    pub fn to_text(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (e, c) in &self.multipliers {
            out.push_str(&format!("{c} * {}\n", e.display_with(names)));
        }
        out.push_str(&format!("lambda = {}\n", self.lambda));
        out
    }

    /// Inverse of [`to_text`](Self::to_text).
    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        let mut multipliers = Vec::new();
        let mut lambda = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(v) = line.strip_prefix("lambda") {
                let v = v.trim_start().strip_prefix('=').ok_or_else(|| bad_line(line))?;
                lambda = Some(parse_rational(v.trim())?);
            } else {
                let (c, t) = line.split_once('*').ok_or_else(|| bad_line(line))?;
                let triple = crate::triple::parse_triple(t.trim(), names)?;
                multipliers.push((triple, parse_rational(c.trim())?));
            }
        }
        let lambda = lambda.ok_or_else(|| Error::Domain("certificate has no lambda line".into()))?;
        Ok(LpCertificate { ambient: names.len(), multipliers, lambda })
    }
}

fn bad_line(line: &str) -> Error {
    Error::Domain(format!("malformed certificate line: {line}"))
}

/// Parse `p`, `p/q` or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Domain(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((w, f)) = s.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = w.trim_start().starts_with('-');
        let w: BigInt = if w.is_empty() || w == "-" { BigInt::zero() } else { w.parse().map_err(|_| err())? };
        let f: BigInt = f.parse().map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), s.split_once('.').unwrap().1.len());
        let frac = BigRational::new(f, scale);
        let w = BigRational::from_integer(w);
        return Ok(if neg { w - frac } else { w + frac });
    }
    Ok(BigRational::from_integer(s.trim().parse().map_err(|_| err())?))
}

fn is_elemental(e: &CiTriple, n: usize) -> bool {
    if !e.within(n) {
        return false;
    }
    if e.is_conditional() {
        e.x().len() == 1 && e.vars() == VarSet::full(n)
    } else {
        e.is_disjoint() && e.x().len() == 1 && e.y().len() == 1
    }
}

fn check_inputs(s: &CiSet, t: &CiTriple) -> Result<usize> {
    let n = s.ambient();
    check_cap(n)?;
    if !t.within(n) {
        return Err(Error::OutOfRange { set: t.vars(), n });
    }
    Ok(n)
}

/// Outcome of [`shannon_ei`].
#[derive(Clone, Debug, PartialEq)]
pub enum EiOutcome {
    Holds,
    /// A rational polymatroid with `h(Σ) = 0 < h(τ)`.
    Counterexample(RationalEntropy),
}

impl EiOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, EiOutcome::Holds)
    }
}

/// Polymatroid with `h(Σ) = 0 < h(τ)` read off a missing I-measure atom.
fn atom_witness(s: &CiSet, t: &CiTriple) -> Result<Option<RationalEntropy>> {
    match positive_implies(s, t)? {
        PositiveOutcome::Implied => Ok(None),
        PositiveOutcome::Counterexample { measure, .. } => Ok(Some(measure_to_entropy(&measure)?)),
    }
}

fn vertex_to_entropy(n: usize, x: &[BigRational]) -> Result<RationalEntropy> {
    let mut values = Vec::with_capacity(1 << n);
    values.push(BigRational::zero());
    values.extend_from_slice(&x[..(1 << n) - 1]);
    RationalEntropy::from_values(n, values)?.check_polymatroid()
}

/// `max obj·h` over `h ∈ Γ_n`, `f_σ(h) <= 0` for the given forms, `h(Ω) <= 1`.
fn cone_lp(n: usize, zeroed: &[LinearFunctional], obj: &LinearFunctional) -> Result<(BigRational, RationalEntropy)> {
    let basis = elemental_basis(n)?;
    let nv = (1 << n) - 1;
    let mut lp = Lp::new(nv);
    for e in &basis.functionals {
        lp.add_row(e.scaled(&int(-1)).dense(n), Relation::Le, BigRational::zero());
    }
    for f in zeroed {
        lp.add_row(f.dense(n), Relation::Le, BigRational::zero());
    }
    lp.add_row(vec![(nv - 1, BigRational::one())], Relation::Le, BigRational::one());
    lp.maximize(obj.dense(n));
    match lp.solve() {
        LpOutcome::Optimal { x, value } => Ok((value, vertex_to_entropy(n, &x)?)),
        other => unreachable!("the normalized Shannon cone LP is feasible and bounded: {other:?}"),
    }
}

/// Decide `Γ_n ⊨ h(Σ) = 0 ⇒ h(τ) = 0`.
///
/// Maximizes `h(τ)` over normalized polymatroids vanishing on `Σ`. When an
/// atom of `τ` is missing from `Σ`, its unit polymatroid is returned
/// directly as the counterexample.
pub fn shannon_ei(s: &CiSet, t: &CiTriple) -> Result<EiOutcome> {
    let n = check_inputs(s, t)?;
    if t.is_trivial() {
        return Ok(EiOutcome::Holds);
    }
    if let Some(h) = atom_witness(s, t)? {
        return Ok(EiOutcome::Counterexample(h));
    }
    let zeroed: Vec<_> = s.iter().map(LinearFunctional::from_triple).collect();
    let (value, h) = cone_lp(n, &zeroed, &LinearFunctional::from_triple(t))?;
    Ok(if value.is_zero() { EiOutcome::Holds } else { EiOutcome::Counterexample(h) })
}

/// Outcome of [`check_lambda`].
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaOutcome {
    Certified(LpCertificate),
    /// A rational polymatroid with `λ·h(Σ) < h(τ)`.
    Refuted(RationalEntropy),
}

impl LambdaOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, LambdaOutcome::Certified(_))
    }
}

/// Rows `Σ y_e e_S [- λ f_Σ,S] = rhs_S` over every nonempty `S`.
fn cone_membership_lp(
    n: usize,
    basis: &ElementalBasis,
    lambda_column: Option<&LinearFunctional>,
    target: &LinearFunctional,
) -> Lp {
    let k = basis.len();
    let nv = (1usize << n) - 1;
    let mut rows: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); nv];
    for (j, e) in basis.functionals.iter().enumerate() {
        for (s, c) in e.iter() {
            rows[s.bits() as usize - 1].push((j, c.clone()));
        }
    }
    if let Some(f) = lambda_column {
        for (s, c) in f.iter() {
            rows[s.bits() as usize - 1].push((k, -c));
        }
    }
    let mut lp = Lp::new(k + usize::from(lambda_column.is_some()));
    for (i, row) in rows.into_iter().enumerate() {
        lp.add_row(row, Relation::Eq, target.coeff(VarSet::from_bits(i as u32 + 1)));
    }
    lp
}

/// Decide `Γ_n ⊨ λ·h(Σ) >= h(τ)`.
pub fn check_lambda(s: &CiSet, t: &CiTriple, lambda: &BigRational) -> Result<LambdaOutcome> {
    let n = check_inputs(s, t)?;
    if lambda.is_negative() {
        return Err(Error::Domain(format!("lambda must be nonnegative, got {lambda}")));
    }
    let basis = elemental_basis(n)?;
    let f_sigma = LinearFunctional::from_set(s);
    let f_tau = LinearFunctional::from_triple(t);
    let mut target = f_sigma.scaled(lambda);
    target.add_scaled(&f_tau, &int(-1));

    let mut lp = cone_membership_lp(n, basis, None, &target);
    lp.minimize(Vec::new());
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            Ok(LambdaOutcome::Certified(LpCertificate::from_solution(basis, &x, lambda.clone())))
        }
        LpOutcome::Infeasible => {
            if let Some(h) = atom_witness(s, t)? {
                return Ok(LambdaOutcome::Refuted(h));
            }
            let (_, h) = cone_lp(n, &[], &target.scaled(&int(-1)))?;
            Ok(LambdaOutcome::Refuted(h))
        }
        LpOutcome::Unbounded => unreachable!("feasibility LP has a zero objective"),
    }
}

/// Outcome of [`min_lambda`].
#[derive(Clone, Debug, PartialEq)]
pub enum MinLambda {
    Value { value: BigRational, cert: LpCertificate },
    /// No finite `λ` works.
    Unbounded,
}

impl MinLambda {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            MinLambda::Value { value, .. } => Some(value),
            MinLambda::Unbounded => None,
        }
    }
}

/// The least `λ >= 0` with `Γ_n ⊨ λ·h(Σ) >= h(τ)`.
pub fn min_lambda(s: &CiSet, t: &CiTriple) -> Result<MinLambda> {
    let n = check_inputs(s, t)?;
    let basis = elemental_basis(n)?;
    let f_sigma = LinearFunctional::from_set(s);
    let f_tau = LinearFunctional::from_triple(t);
    let mut lp = cone_membership_lp(n, basis, Some(&f_sigma), &f_tau.scaled(&int(-1)));
    let k = basis.len();
    lp.minimize(vec![(k, BigRational::one())]);
    match lp.solve() {
        LpOutcome::Optimal { x, value } => {
            let cert = LpCertificate::from_solution(basis, &x[..k], value.clone());
            Ok(MinLambda::Value { value, cert })
        }
        LpOutcome::Infeasible => Ok(MinLambda::Unbounded),
        LpOutcome::Unbounded => unreachable!("lambda is bounded below by zero"),
    }
}

/// Which bound theorem an instance is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// Saturated CIs and conditionals; bound `min{|A|,|B|}`.
    Saturated,
    /// A recursive basis in the natural order; bound 1.
    Recursive,
    /// Marginal CIs; bound `min{|A|,|B|}`.
    Marginal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub bound: BigRational,
    /// `None` when no finite λ exists.
    pub lambda: Option<BigRational>,
    pub positive_implied: bool,
    pub shannon_implied: bool,
    /// Whether the implication premise this kind relies on holds: positive
    /// implication for saturated and recursive sets, Shannon implication
    /// for marginal ones.
    pub premise_holds: bool,
    pub violation: bool,
}

fn validate_kind(s: &CiSet, kind: BoundKind) -> Result<()> {
    let n = s.ambient();
    match kind {
        BoundKind::Saturated | BoundKind::Marginal => {
            for t in s {
                let k = t.classify(n);
                let ok = match kind {
                    BoundKind::Saturated => k.saturated || k.conditional,
                    _ => k.marginal && t.is_disjoint(),
                };
                if !ok {
                    let reason = match kind {
                        BoundKind::Saturated => "expected a saturated CI or a conditional",
                        _ => "expected a marginal CI (X;Y)",
                    };
                    return Err(Error::NonConforming { triple: *t, reason: reason.into() });
                }
            }
            Ok(())
        }
        BoundKind::Recursive => dag_from_basis(s, &(0..n).collect::<Vec<_>>()).map(|_| ()),
    }
}

/// Compute `min_lambda` and compare it with the bound for `kind`.
pub fn verify_theorem_bound(s: &CiSet, t: &CiTriple, kind: BoundKind) -> Result<BoundReport> {
    check_inputs(s, t)?;
    validate_kind(s, kind)?;
    let bound = match kind {
        BoundKind::Recursive => int(1),
        _ => int(t.x().len().min(t.y().len()) as i64),
    };
    let positive_implied = positive_implies(s, t)?.is_implied();
    let shannon_implied = shannon_ei(s, t)?.holds();
    let lambda = min_lambda(s, t)?.value().cloned();
    let premise_holds = match kind {
        BoundKind::Marginal => shannon_implied,
        _ => positive_implied,
    };
    let within = lambda.as_ref().is_some_and(|l| *l <= bound);
    Ok(BoundReport {
        kind,
        bound,
        lambda,
        positive_implied,
        shannon_implied,
        premise_holds,
        violation: premise_holds && !within,
    })
}

/// Replace each conditional `(Y;Y|X)` by `(Y;W|X)` and `(Y;Y|XW)` with
/// `W = Ω∖XY`, so every member mentions all variables.
pub fn saturate_conditionals(s: &CiSet, n: usize) -> Result<CiSet> {
    if s.ambient() != n {
        return Err(Error::AmbientMismatch(s.ambient(), n));
    }
    let full = VarSet::full(n);
    let mut out = CiSet::new(n);
    for t in s {
        if t.vars() == full {
            out.insert(*t)?;
        } else if t.is_conditional() {
            let (y, x) = (t.y(), t.z());
            let w = full - x - y;
            out.insert(CiTriple::new(y, w, x))?;
            out.insert(CiTriple::conditional(x | w, y))?;
        } else {
            return Err(Error::NonConforming {
                triple: *t,
                reason: "expected a saturated CI or a conditional".into(),
            });
        }
    }
    Ok(out)
}

impl fmt::Display for LpCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.multipliers {
            writeln!(f, "{c} * {e}")?;
        }
        write!(f, "lambda = {}", self.lambda)
    }
}
