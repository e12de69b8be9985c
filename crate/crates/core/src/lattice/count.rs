use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use super::{linalg, lp, uniform_below, IntPoint, LatticeError, Polytope, Relation, Result};

type Row = (Vec<i128>, i128);

/// Constraints of `p` as `a·x >= b` rows, equalities split in two.
pub(crate) fn ge_rows(p: &Polytope) -> Result<Vec<(Vec<BigInt>, BigInt)>> {
    let mut rows = Vec::new();
    for c in p.constraints() {
        let a = c.coefficients().to_vec();
        let b = c.bound().clone();
        if c.kind() == Relation::Eq {
            rows.push((a.iter().map(|x| -x).collect(), -&b));
        }
        rows.push((a, b));
    }
    Ok(rows)
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or(LatticeError::Overflow)
}

/// A polytope re-expressed over the integer parameters `z` of its equality
/// lattice, `x = x0 + K z`, with a tight bounding box added as rows.
struct Prepared {
    x0: Vec<i128>,
    /// `basis[j]` is column `j` of `K`.
    basis: Vec<Vec<i128>>,
    rows: Vec<Row>,
    empty: bool,
}

impl Prepared {
    fn new(p: &Polytope) -> Result<Prepared> {
        let n = p.ambient_dim();
        let mut eq_a = Vec::new();
        let mut eq_b = Vec::new();
        let mut ge = Vec::new();
        for c in p.constraints() {
            match c.kind() {
                Relation::Eq => {
                    eq_a.push(c.coefficients().to_vec());
                    eq_b.push(c.bound().clone());
                }
                Relation::Ge => ge.push((c.coefficients().to_vec(), c.bound().clone())),
            }
        }
        let empty = Prepared {
            x0: vec![0; n],
            basis: Vec::new(),
            rows: Vec::new(),
            empty: true,
        };
        let Some((x0, kernel)) = linalg::solve_equalities(&eq_a, &eq_b, n) else {
            return Ok(empty);
        };
        let k = kernel.len();
        let mut zrows: Vec<(Vec<BigInt>, BigInt)> = Vec::with_capacity(ge.len() + 2 * k);
        for (a, b) in &ge {
            let coeffs: Vec<BigInt> = kernel
                .iter()
                .map(|col| a.iter().zip(col).map(|(x, y)| x * y).sum())
                .collect();
            let shift: BigInt = a.iter().zip(&x0).map(|(x, y)| x * y).sum();
            zrows.push((coeffs, b - shift));
        }
        if k == 0 {
            if zrows.iter().any(|(_, b)| b > &BigInt::zero()) {
                return Ok(empty);
            }
        } else {
            let mut boxes = Vec::with_capacity(2 * k);
            for j in 0..k {
                let (lo, hi) = match lp::coordinate_range(&zrows, k, j) {
                    Ok(r) => r,
                    Err(LatticeError::Empty) => return Ok(empty),
                    Err(e) => return Err(e),
                };
                if lo > hi {
                    return Ok(empty);
                }
                let mut unit = vec![BigInt::zero(); k];
                unit[j] = BigInt::from(1);
                boxes.push((unit.clone(), lo));
                unit[j] = BigInt::from(-1);
                boxes.push((unit, -hi));
            }
            zrows.extend(boxes);
        }
        let rows = zrows
            .iter()
            .map(|(a, b)| Ok((a.iter().map(to_i128).collect::<Result<Vec<_>>>()?, to_i128(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Prepared {
            x0: x0.iter().map(to_i128).collect::<Result<_>>()?,
            basis: kernel
                .iter()
                .map(|c| c.iter().map(to_i128).collect::<Result<_>>())
                .collect::<Result<_>>()?,
            rows,
            empty: false,
        })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The row `a·x >= b` pulled back to `z`.
    fn pull_back(&self, a: &[i128], b: i128) -> Result<Row> {
        let coeffs = self
            .basis
            .iter()
            .map(|col| {
                a.iter().zip(col).try_fold(0i128, |s, (x, y)| {
                    x.checked_mul(*y).and_then(|v| s.checked_add(v))
                })
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(LatticeError::Overflow)?;
        let shift = a
            .iter()
            .zip(&self.x0)
            .try_fold(0i128, |s, (x, y)| x.checked_mul(*y).and_then(|v| s.checked_add(v)))
            .ok_or(LatticeError::Overflow)?;
        Ok((coeffs, b.checked_sub(shift).ok_or(LatticeError::Overflow)?))
    }

    fn point(&self, z: &[i128]) -> Vec<i128> {
        let mut x = self.x0.clone();
        for (col, zj) in self.basis.iter().zip(z) {
            for (xi, ci) in x.iter_mut().zip(col) {
                *xi += ci * zj;
            }
        }
        x
    }
}

/// Canonical form: gcd-reduced rows with integer-rounded bounds, sorted, one
/// row per coefficient vector. `None` if a row is contradictory.
fn normalize(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    for (mut a, b) in rows {
        let g = a.iter().fold(0i128, |g, x| g.gcd(x));
        if g == 0 {
            if b > 0 {
                return None;
            }
            continue;
        }
        for x in a.iter_mut() {
            *x /= g;
        }
        out.push((a, Integer::div_ceil(&b, &g)));
    }
    out.sort();
    let mut dedup: Vec<Row> = Vec::with_capacity(out.len());
    for (a, b) in out {
        match dedup.last_mut() {
            Some((la, lb)) if *la == a => *lb = (*lb).max(b),
            _ => dedup.push((a, b)),
        }
    }
    Some(dedup)
}

/// Bounds on variable `j` from rows whose only nonzero coefficient is `j`.
fn single_bounds(rows: &[Row], j: usize) -> (Option<i128>, Option<i128>) {
    let mut lo: Option<i128> = None;
    let mut hi: Option<i128> = None;
    for (a, b) in rows {
        if a[j] == 0 || a.iter().enumerate().any(|(i, x)| i != j && *x != 0) {
            continue;
        }
        if a[j] > 0 {
            let v = b.div_ceil(&a[j]);
            lo = Some(lo.map_or(v, |l| l.max(v)));
        } else {
            let v = b.div_floor(&a[j]);
            hi = Some(hi.map_or(v, |h| h.min(v)));
        }
    }
    (lo, hi)
}

/// Exact integral-point counting with a memo over residual systems.
///
/// The memo persists across calls, so nested polytopes (as visited by
/// [`Counter::ith_point`]) reuse each other's sub-counts.
#[derive(Default)]
pub struct Counter {
    memo: HashMap<(usize, Vec<Row>), u128>,
    prepared: HashMap<Polytope, Arc<(Prepared, Vec<(i128, i128)>)>>,
}

const MEMO_LIMIT: usize = 1 << 21;

impl Counter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cache_len(&self) -> usize {
        self.memo.len()
    }

    /// The `z`-space system of `p` and its integer bounding box, cached
    /// since both need exact linear programs.
    fn prepare(&mut self, p: &Polytope) -> Result<Arc<(Prepared, Vec<(i128, i128)>)>> {
        if let Some(entry) = self.prepared.get(p) {
            return Ok(Arc::clone(entry));
        }
        let prep = Prepared::new(p)?;
        let bbox = if prep.empty {
            Vec::new()
        } else {
            p.bounding_box()?
                .iter()
                .map(|iv| Ok((to_i128(&iv.lower)?, to_i128(&iv.upper)?)))
                .collect::<Result<_>>()?
        };
        if self.prepared.len() >= 64 {
            self.prepared.clear();
        }
        let entry = Arc::new((prep, bbox));
        self.prepared.insert(p.clone(), Arc::clone(&entry));
        Ok(entry)
    }

    pub fn count(&mut self, p: &Polytope) -> Result<super::PointCount> {
        let entry = self.prepare(p)?;
        let n = self.count_prepared(&entry.0, &[])?;
        Ok(super::PointCount(BigUint::from(n)))
    }

    fn count_prepared(&mut self, prep: &Prepared, extra: &[Row]) -> Result<u128> {
        if prep.empty {
            return Ok(0);
        }
        let mut rows = prep.rows.clone();
        rows.extend_from_slice(extra);
        self.count_rows(prep.dim(), rows)
    }

    fn count_rows(&mut self, k: usize, rows: Vec<Row>) -> Result<u128> {
        let Some(rows) = normalize(rows) else {
            return Ok(0);
        };
        match k {
            0 => return Ok(1),
            1 => {
                let (lo, hi) = single_bounds(&rows, 0);
                let (lo, hi) = (lo.ok_or(LatticeError::Unbounded)?, hi.ok_or(LatticeError::Unbounded)?);
                return Ok(if hi >= lo { (hi - lo + 1) as u128 } else { 0 });
            }
            _ => {}
        }
        let key = (k, rows);
        if let Some(&n) = self.memo.get(&key) {
            return Ok(n);
        }
        let rows = key.1;
        let (lo, hi) = single_bounds(&rows, 0);
        let (lo, hi) = (lo.ok_or(LatticeError::Unbounded)?, hi.ok_or(LatticeError::Unbounded)?);
        let mut total: u128 = 0;
        if k == 2 {
            for v in lo..=hi {
                let mut ylo = i128::MIN;
                let mut yhi = i128::MAX;
                let mut feasible = true;
                for (a, b) in &rows {
                    let rhs = b - a[0] * v;
                    match a[1].signum() {
                        1 => ylo = ylo.max(Integer::div_ceil(&rhs, &a[1])),
                        -1 => yhi = yhi.min(Integer::div_floor(&rhs, &a[1])),
                        _ => {
                            if rhs > 0 {
                                feasible = false;
                                break;
                            }
                        }
                    }
                }
                if feasible && yhi >= ylo {
                    if ylo == i128::MIN || yhi == i128::MAX {
                        return Err(LatticeError::Unbounded);
                    }
                    total = total
                        .checked_add((yhi - ylo + 1) as u128)
                        .ok_or(LatticeError::Overflow)?;
                }
            }
        } else {
            for v in lo..=hi {
                let sub: Vec<Row> = rows
                    .iter()
                    .map(|(a, b)| (a[1..].to_vec(), b - a[0] * v))
                    .collect();
                total = total
                    .checked_add(self.count_rows(k - 1, sub)?)
                    .ok_or(LatticeError::Overflow)?;
            }
        }
        if self.memo.len() >= MEMO_LIMIT {
            self.memo.clear();
        }
        self.memo.insert((k, rows), total);
        Ok(total)
    }

    /// The `index`-th integral point of `p` in lexicographic order.
    ///
    /// Each coordinate is found by bisection: the polytope is cut at the
    /// midpoint of the current range and the exact count of the lower half
    /// decides which half holds the point.
    pub fn ith_point(&mut self, p: &Polytope, index: &BigUint) -> Result<IntPoint> {
        let entry = self.prepare(p)?;
        let (prep, bbox) = (&entry.0, &entry.1);
        let total = self.count_prepared(prep, &[])?;
        let mut i = index.to_u128().filter(|&i| i < total).ok_or_else(|| {
            LatticeError::IndexOutOfRange {
                index: index.clone(),
                count: BigUint::from(total),
            }
        })?;
        let n = p.ambient_dim();
        let mut extra: Vec<Row> = Vec::new();
        let mut point = Vec::with_capacity(n);
        for (d, &(lo, hi)) in bbox.iter().enumerate() {
            let mut l = lo;
            let mut u = hi + 1;
            let mut unit = vec![0i128; n];
            while l < u - 1 {
                let g = Integer::div_floor(&(l + u), &2);
                unit[d] = -1;
                let below = prep.pull_back(&unit, 1 - g)?;
                let mut rows = extra.clone();
                rows.push(below.clone());
                let c = self.count_prepared(prep, &rows)?;
                if i < c {
                    u = g;
                    extra.push(below);
                } else {
                    i -= c;
                    l = g;
                    unit[d] = 1;
                    extra.push(prep.pull_back(&unit, g)?);
                }
            }
            point.push(BigInt::from(l));
        }
        debug_assert!(p.contains(&IntPoint(point.clone())).unwrap_or(false));
        Ok(IntPoint(point))
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&mut self, p: &Polytope, rng: &mut R) -> Result<IntPoint> {
        let total = self.count(p)?;
        if total.0.is_zero() {
            return Err(LatticeError::Empty);
        }
        let index = uniform_below(rng, &total.0);
        self.ith_point(p, &index)
    }

    /// Every integral point in lexicographic order, by walking the `z`
    /// parameters. Intended for small polytopes.
    pub fn enumerate(&mut self, p: &Polytope) -> Result<Vec<IntPoint>> {
        let prep = Prepared::new(p)?;
        if prep.empty {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut z = Vec::new();
        enumerate_rec(&prep, prep.rows.clone(), &mut z, &mut out)?;
        let mut pts: Vec<IntPoint> = out
            .into_iter()
            .map(|x| IntPoint(x.into_iter().map(BigInt::from).collect()))
            .collect();
        pts.sort();
        Ok(pts)
    }
}

fn enumerate_rec(prep: &Prepared, rows: Vec<Row>, z: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) -> Result<()> {
    let Some(rows) = normalize(rows) else {
        return Ok(());
    };
    let remaining = prep.dim() - z.len();
    if remaining == 0 {
        out.push(prep.point(z));
        return Ok(());
    }
    let (lo, hi) = single_bounds(&rows, 0);
    let (lo, hi) = (lo.ok_or(LatticeError::Unbounded)?, hi.ok_or(LatticeError::Unbounded)?);
    for v in lo..=hi {
        let sub: Vec<Row> = rows.iter().map(|(a, b)| (a[1..].to_vec(), b - a[0] * v)).collect();
        z.push(v);
        enumerate_rec(prep, sub, z, out)?;
        z.pop();
    }
    Ok(())
}
