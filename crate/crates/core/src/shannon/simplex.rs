//! Dense two-phase simplex over exact rationals, with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<BigRational>, value: BigRational },
    Infeasible,
    Unbounded,
}

type Row = (Vec<(usize, BigRational)>, Relation, BigRational);

/// `opt c·x` subject to sparse rows and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub(crate) struct Lp {
    nvars: usize,
    rows: Vec<Row>,
    objective: Vec<(usize, BigRational)>,
    maximize: bool,
}

impl Lp {
    pub fn new(nvars: usize) -> Self {
        Lp { nvars, ..Default::default() }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, BigRational)>, rel: Relation, rhs: BigRational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.nvars));
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn maximize(&mut self, c: Vec<(usize, BigRational)>) {
        self.objective = c;
        self.maximize = true;
    }

    pub fn minimize(&mut self, c: Vec<(usize, BigRational)>) {
        self.objective = c;
        self.maximize = false;
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    /// Reduced costs; the last entry is minus the objective value.
    cost: Vec<BigRational>,
    basis: Vec<usize>,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
    ncols: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(lp: &Lp) -> Tableau {
        let m = lp.rows.len();
        let nslack = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        // Normalize to nonnegative right-hand sides.
        let normalized: Vec<_> = lp
            .rows
            .iter()
            .map(|(c, rel, b)| {
                if b.is_negative() {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.iter().map(|(j, a)| (*j, -a)).collect::<Vec<_>>(), flipped, -b)
                } else {
                    (c.clone(), *rel, b.clone())
                }
            })
            .collect();
        let needs_art: Vec<bool> = normalized.iter().map(|r| r.1 != Relation::Le).collect();
        let nart = needs_art.iter().filter(|&&a| a).count();
        let first_artificial = lp.nvars + nslack;
        let ncols = first_artificial + nart;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut art) = (lp.nvars, first_artificial);
        for (i, (coeffs, rel, b)) in normalized.into_iter().enumerate() {
            let mut row = vec![BigRational::zero(); ncols + 1];
            for (j, a) in coeffs {
                row[j] += a;
            }
            match rel {
                Relation::Le => {
                    row[slack] = BigRational::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -BigRational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            if needs_art[i] {
                row[art] = BigRational::one();
                basis.push(art);
                art += 1;
            }
            row[ncols] = b;
            rows.push(row);
        }

        // Phase-one costs: minimize the sum of artificials.
        let mut cost = vec![BigRational::zero(); ncols + 1];
        for (row, &b) in rows.iter().zip(&basis) {
            if b >= first_artificial {
                for (j, a) in row.iter().enumerate() {
                    if j < first_artificial || j == ncols {
                        cost[j] -= a;
                    }
                }
            }
        }
        Tableau { rows, cost, basis, first_artificial, ncols }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        let nz: Vec<usize> = {
            let row = &mut self.rows[r];
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            (0..row.len()).filter(|&j| !row[j].is_zero()).collect()
        };
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<BigRational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let d = &f * &pivot_row[j];
                row[j] -= d;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Minimize the current cost row over columns `< limit`.
    fn iterate(&mut self, limit: usize) -> Step {
        loop {
            let Some(c) = (0..limit).find(|&j| self.cost[j].is_negative()) else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Step::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, lp: &Lp) -> LpOutcome {
        if self.first_artificial < self.ncols {
            self.iterate(self.ncols);
            if !self.cost[self.ncols].is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-level artificials out of the basis where possible;
            // rows where that fails are redundant.
            for r in 0..self.rows.len() {
                if self.basis[r] >= self.first_artificial {
                    if let Some(c) = (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero()) {
                        self.pivot(r, c);
                    }
                }
            }
        }

        let sign = if lp.maximize { -BigRational::one() } else { BigRational::one() };
        let mut c = vec![BigRational::zero(); self.ncols + 1];
        for (j, v) in &lp.objective {
            c[*j] += &sign * v;
        }
        let mut cost = c.clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if c[b].is_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    cost[j] -= &c[b] * a;
                }
            }
        }
        self.cost = cost;

        match self.iterate(self.first_artificial) {
            Step::Unbounded => LpOutcome::Unbounded,
            Step::Optimal => {
                let mut x = vec![BigRational::zero(); lp.nvars];
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if b < lp.nvars {
                        x[b] = row[self.ncols].clone();
                    }
                }
                let value = lp.objective.iter().map(|(j, v)| v * &x[*j]).sum();
                LpOutcome::Optimal { x, value }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    fn row(v: &[i64]) -> Vec<(usize, BigRational)> {
        v.iter().enumerate().filter(|(_, &a)| a != 0).map(|(j, &a)| (j, q(a, 1))).collect()
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = Lp::new(2);
        lp.add_row(row(&[1, 0]), Relation::Le, q(4, 1));
        lp.add_row(row(&[0, 2]), Relation::Le, q(12, 1));
        lp.add_row(row(&[3, 2]), Relation::Le, q(18, 1));
        lp.maximize(row(&[3, 5]));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![q(2, 1), q(6, 1)], value: q(36, 1) });
    }

    #[test]
    fn equality_and_ge_rows_use_phase_one() {
        // min x + y, x + 2y = 3, x >= 1/2
        let mut lp = Lp::new(2);
        lp.add_row(row(&[1, 2]), Relation::Eq, q(3, 1));
        lp.add_row(row(&[1, 0]), Relation::Ge, q(1, 2));
        lp.minimize(row(&[1, 1]));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![q(1, 2), q(5, 4)], value: q(7, 4) });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add_row(row(&[1]), Relation::Le, q(1, 1));
        lp.add_row(row(&[1]), Relation::Ge, q(2, 1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = Lp::new(2);
        lp.add_row(row(&[1, -1]), Relation::Le, q(1, 1));
        lp.maximize(row(&[1, 0]));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        // -x = -2 twice, min x
        let mut lp = Lp::new(1);
        lp.add_row(row(&[-1]), Relation::Eq, q(-2, 1));
        lp.add_row(row(&[-1]), Relation::Eq, q(-2, 1));
        lp.minimize(row(&[1]));
        assert_eq!(lp.solve(), LpOutcome::Optimal { x: vec![q(2, 1)], value: q(2, 1) });
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic cycling example under the largest-coefficient rule
        let mut lp = Lp::new(4);
        lp.add_row(vec![(0, q(1, 2)), (1, q(-11, 2)), (2, q(-5, 2)), (3, q(9, 1))], Relation::Le, q(0, 1));
        lp.add_row(vec![(0, q(1, 2)), (1, q(-3, 2)), (2, q(-1, 2)), (3, q(1, 1))], Relation::Le, q(0, 1));
        lp.add_row(row(&[1, 0, 0, 0]), Relation::Le, q(1, 1));
        lp.maximize(vec![(0, q(10, 1)), (1, q(-57, 1)), (2, q(-9, 1)), (3, q(-24, 1))]);
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 1)),
            other => panic!("{other:?}"),
        }
    }
}
