//! Integer linear algebra: echelon forms by unimodular column operations,
//! integer solutions of equality systems, rational rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Result of column-reducing `A` to lower echelon form `H = A·U`.
pub(crate) struct ColumnEchelon {
    pub h: Vec<Vec<BigInt>>,
    pub u: Vec<Vec<BigInt>>,
    /// `pivots[i]` is the pivot column of row `i`, if it has one.
    pub pivots: Vec<Option<usize>>,
    pub rank: usize,
}

fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, k: &BigInt) {
    for row in m.iter_mut() {
        let add = &row[src] * k;
        row[dst] += add;
    }
}

fn col_swap(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_neg(m: &mut [Vec<BigInt>], a: usize) {
    for row in m.iter_mut() {
        row[a] = -&row[a];
    }
}

pub(crate) fn column_echelon(a: &[Vec<BigInt>], n: usize) -> ColumnEchelon {
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { One::one() } else { Zero::zero() }).collect())
        .collect();
    let mut pivots = vec![None; a.len()];
    let mut c = 0;
    for i in 0..h.len() {
        if c >= n {
            break;
        }
        // Euclid on row i across columns c..n until only column c is nonzero.
        loop {
            let mut best: Option<usize> = None;
            for j in c..n {
                if !h[i][j].is_zero()
                    && best.is_none_or(|b| h[i][j].abs() < h[i][b].abs())
                {
                    best = Some(j);
                }
            }
            let Some(b) = best else { break };
            if b != c {
                col_swap(&mut h, b, c);
                col_swap(&mut u, b, c);
            }
            let mut done = true;
            for j in c + 1..n {
                if !h[i][j].is_zero() {
                    let q = -h[i][j].div_floor(&h[i][c]);
                    col_axpy(&mut h, j, c, &q);
                    col_axpy(&mut u, j, c, &q);
                    if !h[i][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !h[i][c].is_zero() {
            if h[i][c].is_negative() {
                col_neg(&mut h, c);
                col_neg(&mut u, c);
            }
            pivots[i] = Some(c);
            c += 1;
        }
    }
    ColumnEchelon {
        h,
        u,
        pivots,
        rank: c,
    }
}

/// Integer solutions of `E x = f`: a particular solution and a basis of the
/// integer kernel (as columns), or `None` if there is no integer solution.
pub(crate) fn solve_equalities(
    e: &[Vec<BigInt>],
    f: &[BigInt],
    n: usize,
) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let ech = column_echelon(e, n);
    let mut y = vec![BigInt::zero(); n];
    for i in 0..e.len() {
        let partial: BigInt = (0..ech.rank).map(|j| &ech.h[i][j] * &y[j]).sum();
        match ech.pivots[i] {
            Some(p) => {
                let rest = &f[i] - (&partial - &ech.h[i][p] * &y[p]);
                let (q, r) = rest.div_rem(&ech.h[i][p]);
                if !r.is_zero() {
                    return None;
                }
                y[p] = q;
            }
            None => {
                if partial != f[i] {
                    return None;
                }
            }
        }
    }
    let x0: Vec<BigInt> = (0..n)
        .map(|r| (0..n).map(|j| &ech.u[r][j] * &y[j]).sum())
        .collect();
    let kernel: Vec<Vec<BigInt>> = (ech.rank..n)
        .map(|j| (0..n).map(|r| ech.u[r][j].clone()).collect())
        .collect();
    Some((x0, kernel))
}

/// Rank of a list of integer vectors over the rationals.
pub(crate) fn rank(vectors: &[Vec<BigInt>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let n = vectors[0].len();
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            if !rows[i][c].is_zero() {
                let k = &rows[i][c] / &rows[r][c];
                for j in c..n {
                    let sub = &rows[r][j] * &k;
                    rows[i][j] -= sub;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Solve the square system `A x = b` over the rationals, `A` invertible.
pub(crate) fn solve_square(a: &[Vec<BigInt>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r: Vec<BigRational> = row
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for j in c..=n {
            m[c][j] = &m[c][j] / &piv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let k = m[i][c].clone();
                for j in c..=n {
                    let sub = &m[c][j] * &k;
                    m[i][j] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}
