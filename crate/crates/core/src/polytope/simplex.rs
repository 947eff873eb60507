//! Phase-1 simplex over exact rationals with Bland's rule.
//!
//! Decides whether `A x = b, x ≥ 0` has a solution and returns one. Only
//! feasibility is needed, so there is no phase 2.

use num_traits::{Signed, Zero};

use super::rational::Rational;

/// Dense tableau: `m` constraint rows over `n` structural plus `m`
/// artificial columns, last entry of each row is the right-hand side.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs of the phase-1 objective, plus the negated objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width();
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in 0..=w {
                if !pivot_row[j].is_zero() {
                    row[j] -= &f * &pivot_row[j];
                }
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for j in 0..=w {
                if !pivot_row[j].is_zero() {
                    self.cost[j] -= &f * &pivot_row[j];
                }
            }
        }
        self.basis[r] = col;
    }

    /// Bland: lowest-index column with negative reduced cost.
    fn entering(&self) -> Option<usize> {
        (0..self.width()).find(|&j| self.cost[j].is_negative())
    }

    /// Minimum ratio test, ties broken by lowest basic variable index.
    fn leaving(&self, col: usize) -> Option<usize> {
        let w = self.width();
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = &row[w] / &row[col];
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Returns a non-negative solution of `A x = b` if one exists.
///
/// Redundant equality rows are allowed: their artificials stay basic at
/// zero.
pub fn find_feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    assert!(a.iter().all(|r| r.len() == n), "ragged constraint matrix");
    let w = n + m;

    let mut rows = Vec::with_capacity(m);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut row: Vec<Rational> = Vec::with_capacity(w + 1);
        row.extend(ai.iter().map(|v| if flip { -v } else { v.clone() }));
        row.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
        row.push(if flip { -bi } else { bi.clone() });
        rows.push(row);
    }
    // minimize the sum of artificials; with artificials basic the reduced
    // cost of a structural column is minus its column sum
    let mut cost = vec![Rational::zero(); w + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[w] -= &row[w];
    }
    let mut t = Tableau { rows, cost, basis: (n..w).collect() };

    while let Some(col) = t.entering() {
        let r = t.leaving(col).expect("phase-1 objective is bounded below");
        t.pivot(r, col);
    }

    if !t.cost[w].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rows[i][w].clone();
        }
    }
    Some(x)
}
