//! Exact-rational two-phase simplex with Bland's anti-cycling rule.
//!
//! Solves `minimize c·x subject to A x = b, x ≥ 0`. Every quantity is a
//! [`Rational`], so the optimum is exact and termination does not depend on
//! tolerances.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("constraint matrix is ragged or does not match b/c")]
    Shape,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = col;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let ncols = cost.len();
        let mut d = cost.to_vec();
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for j in 0..ncols {
                if !row[j].is_zero() {
                    d[j] -= cb * &row[j];
                }
            }
        }
        d
    }

    /// Runs simplex iterations over the columns `0..active` until optimal.
    fn optimize(&mut self, cost: &[Rational], active: usize) -> Result<(), LpError> {
        loop {
            let d = self.reduced_costs(cost);
            // Bland: lowest-index improving column
            let Some(col) = (0..active).find(|&j| d[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let (r, _) = best.ok_or(LpError::Unbounded)?;
            self.pivot(r, col);
        }
    }
}

/// Minimizes `c·x` over `{x ≥ 0 : A x = b}`.
pub fn minimize(
    a: &[Vec<Rational>],
    b: &[Rational],
    c: &[Rational],
) -> Result<LpSolution, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape);
    }

    // Phase 1 tableau: [A | I] with one artificial per row, rhs made nonnegative.
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Rational> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.extend((0..m).map(|k| {
            if k == i {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        }));
        rows.push(r);
        rhs.push(if flip { -bi.clone() } else { bi.clone() });
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
    };
    let mut phase1_cost = vec![Rational::zero(); n + m];
    for v in phase1_cost.iter_mut().skip(n) {
        *v = Rational::from_integer(1.into());
    }
    t.optimize(&phase1_cost, n + m)?;
    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&bv, _)| bv >= n)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        return Err(LpError::Infeasible);
    }

    // Drive remaining (zero-valued) artificials out of the basis.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] < n {
            r += 1;
            continue;
        }
        match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
            Some(col) => {
                t.pivot(r, col);
                r += 1;
            }
            None => {
                // redundant equality
                t.rows.remove(r);
                t.rhs.remove(r);
                t.basis.remove(r);
            }
        }
    }
    for row in t.rows.iter_mut() {
        row.truncate(n);
    }

    t.optimize(c, n)?;
    let mut x = vec![Rational::zero(); n];
    for (&bv, v) in t.basis.iter().zip(&t.rhs) {
        x[bv] = v.clone();
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpSolution { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, rational};

    fn q(v: i64) -> Rational {
        integer(v)
    }

    #[test]
    fn small_textbook_problem() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![vec![q(1), q(2), q(1), q(0)], vec![q(3), q(1), q(0), q(1)]];
        let sol = minimize(&a, &[q(4), q(6)], &[q(-1), q(-1), q(0), q(0)]).unwrap();
        assert_eq!(sol.objective, rational(-14, 5));
        assert_eq!(sol.x[0], rational(8, 5));
        assert_eq!(sol.x[1], rational(6, 5));
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x + y = -1 with x,y ≥ 0
        let a = vec![vec![q(1), q(1)]];
        assert_eq!(
            minimize(&a, &[q(-1)], &[q(0), q(0)]),
            Err(LpError::Infeasible)
        );
        // min -x s.t. x - y = 0
        let a = vec![vec![q(1), q(-1)]];
        assert_eq!(
            minimize(&a, &[q(0)], &[q(-1), q(0)]),
            Err(LpError::Unbounded)
        );
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        let sol = minimize(&a, &[q(1), q(2)], &[q(1), q(2)]).unwrap();
        assert_eq!(sol.objective, q(1));
    }

    #[test]
    fn shape_errors() {
        assert_eq!(
            minimize(&[vec![q(1)]], &[q(1), q(2)], &[q(0)]),
            Err(LpError::Shape)
        );
    }
}
