//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Only used to find tight coordinate bounds, so problem sizes are tiny.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{LatticeError, Result};

pub(crate) enum Outcome {
    Infeasible,
    Unbounded,
    Optimal(BigRational),
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &piv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let k = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= p * &k;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimise `cost` over the columns allowed by `allowed`.
    fn run(&mut self, cost: &[BigRational], allowed: &dyn Fn(usize) -> bool) -> Option<BigRational> {
        loop {
            // reduced costs: c_j - c_B B^-1 A_j
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        rc -= &cost[bi] * &self.rows[i][j];
                    }
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                let mut value = BigRational::zero();
                for (i, &bi) in self.basis.iter().enumerate() {
                    value += &cost[bi] * &self.rows[i][self.ncols];
                }
                return Some(value);
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rows[i][self.ncols] / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (r, _) = leave?;
            self.pivot(r, c);
        }
    }
}

/// Minimise `objective·x` subject to `a·x >= b` for each row, `x` free.
pub(crate) fn minimize(rows: &[(Vec<BigInt>, BigInt)], n: usize, objective: &[BigInt]) -> Outcome {
    let m = rows.len();
    // columns: u (n), v (n), slack (m), artificial (m), rhs
    let nreal = 2 * n + m;
    let ncols = nreal + m;
    let mut t = Vec::with_capacity(m);
    for (i, (a, b)) in rows.iter().enumerate() {
        let sign = if b.is_negative() { -1 } else { 1 };
        let mut row = vec![BigRational::zero(); ncols + 1];
        for j in 0..n {
            let aj = BigRational::from_integer(&a[j] * sign);
            row[n + j] = -aj.clone();
            row[j] = aj;
        }
        row[2 * n + i] = BigRational::from_integer(BigInt::from(-sign));
        row[nreal + i] = BigRational::from_integer(BigInt::from(1));
        row[ncols] = BigRational::from_integer(b * sign);
        t.push(row);
    }
    let mut tab = Tableau {
        rows: t,
        basis: (nreal..ncols).collect(),
        ncols,
    };
    let mut phase1 = vec![BigRational::zero(); ncols];
    for c in phase1.iter_mut().skip(nreal) {
        *c = BigRational::from_integer(BigInt::from(1));
    }
    let Some(v) = tab.run(&phase1, &|_| true) else {
        return Outcome::Infeasible;
    };
    if v.is_positive() {
        return Outcome::Infeasible;
    }
    // drive artificials out of the basis
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= nreal {
            if let Some(j) = (0..nreal).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.rows.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    let mut cost = vec![BigRational::zero(); ncols];
    for j in 0..n {
        let c = BigRational::from_integer(objective[j].clone());
        cost[n + j] = -c.clone();
        cost[j] = c;
    }
    match tab.run(&cost, &|j| j < nreal) {
        Some(v) => Outcome::Optimal(v),
        None => Outcome::Unbounded,
    }
}

/// Integer range `[ceil(min x_d), floor(max x_d)]` over the rational polytope.
pub(crate) fn coordinate_range(
    rows: &[(Vec<BigInt>, BigInt)],
    n: usize,
    d: usize,
) -> Result<(BigInt, BigInt)> {
    let mut obj = vec![BigInt::zero(); n];
    obj[d] = BigInt::from(1);
    let lo = match minimize(rows, n, &obj) {
        Outcome::Infeasible => return Err(LatticeError::Empty),
        Outcome::Unbounded => return Err(LatticeError::Unbounded),
        Outcome::Optimal(v) => v.ceil().to_integer(),
    };
    obj[d] = BigInt::from(-1);
    let hi = match minimize(rows, n, &obj) {
        Outcome::Infeasible => return Err(LatticeError::Empty),
        Outcome::Unbounded => return Err(LatticeError::Unbounded),
        Outcome::Optimal(v) => (-v).floor().to_integer(),
    };
    Ok((lo, hi))
}
