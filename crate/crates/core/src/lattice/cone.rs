//! Ranked access to the lattice points of `{x in Z^m : M x = 0, x >= 1}`
//! with `w·x <= L`, for a positive integer weight `w`.
//!
//! The cone `C = {x >= 0 : M x = 0}` is triangulated into simplicial cones
//! spanned by its extreme rays. The relative interiors of the faces of the
//! triangulation that are not contained in the boundary of `C` partition the
//! interior of `C`, and `x >= 1` is exactly the interior when no coordinate
//! vanishes on all of `C`. The lattice points in the relative interior of a
//! face spanned by rays `r_1..r_f` are
//!
//! ```text
//!     p + c_1 r_1 + ... + c_f r_f,    c in Z^f, c >= 0,
//! ```
//!
//! for `p` ranging over the lattice points of the half-open parallelepiped
//! `{sum t_j r_j : 0 < t_j <= 1}`. Each such translate is a "piece"; the
//! number of its points with `w·x <= L` is a knapsack count, tabulated once
//! per multiset of ray lengths. Ranking walks pieces, then the coefficients.
//!
//! This gives exact counts and an index-to-point bijection in time linear in
//! `L`, independent of the dimension of the cone.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::linalg;
use super::{LatticeError, Result};

#[derive(Debug, Clone)]
struct Piece {
    base: Vec<i64>,
    base_len: u64,
    /// Ray indices, ordered by (length, index).
    rays: Vec<usize>,
    lens: Vec<u64>,
}

/// The interior lattice points of a pointed polyhedral cone, decomposed into
/// translated simplicial orthants.
#[derive(Debug, Clone)]
pub struct OpenCone {
    ambient_dim: usize,
    cone_dim: usize,
    weights: Vec<u64>,
    rays: Vec<Vec<i64>>,
    simplices: Vec<Vec<usize>>,
    pieces: Vec<Piece>,
}

fn gcd_normalize(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

fn big_rows(v: &[&Vec<i128>]) -> Vec<Vec<BigInt>> {
    v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Extreme rays of `{x >= 0 : M x = 0}` by the double description method.
fn extreme_rays(equalities: &[Vec<i64>], m: usize) -> Result<(usize, Vec<Vec<i128>>)> {
    let e: Vec<Vec<BigInt>> = equalities
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let zeros = vec![BigInt::zero(); e.len()];
    let (_, kernel) = linalg::solve_equalities(&e, &zeros, m).ok_or(LatticeError::DegenerateCone)?;
    let k = kernel.len();
    if k == 0 {
        return Ok((0, Vec::new()));
    }
    // row i of the kernel basis is the functional z -> x_i
    let b: Vec<Vec<BigInt>> = (0..m).map(|i| kernel.iter().map(|c| c[i].clone()).collect()).collect();

    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..m {
        let mut trial: Vec<Vec<BigInt>> = chosen.iter().map(|&j| b[j].clone()).collect();
        trial.push(b[i].clone());
        if linalg::rank(&trial) == trial.len() {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        }
    }
    if chosen.len() < k {
        return Err(LatticeError::DegenerateCone);
    }
    let square: Vec<Vec<BigInt>> = chosen.iter().map(|&j| b[j].clone()).collect();
    let mut rays: Vec<Vec<i128>> = Vec::with_capacity(k);
    for j in 0..k {
        let rhs: Vec<BigRational> = (0..k)
            .map(|i| if i == j { BigRational::one() } else { BigRational::zero() })
            .collect();
        let z = linalg::solve_square(&square, &rhs).ok_or(LatticeError::DegenerateCone)?;
        let denom = z.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let zi: Vec<BigInt> = z.iter().map(|q| (q * BigRational::from_integer(denom.clone())).to_integer()).collect();
        let mut x: Vec<i128> = (0..m)
            .map(|i| {
                let v: BigInt = b[i].iter().zip(&zi).map(|(p, q)| p * q).sum();
                v.to_i128().ok_or(LatticeError::Overflow)
            })
            .collect::<Result<_>>()?;
        gcd_normalize(&mut x);
        rays.push(x);
    }

    let mut processed: Vec<usize> = chosen.clone();
    for i in 0..m {
        if chosen.contains(&i) {
            continue;
        }
        let (pos, rest): (Vec<_>, Vec<_>) = rays.iter().cloned().partition(|r| r[i] > 0);
        let (zero, neg): (Vec<_>, Vec<_>) = rest.into_iter().partition(|r| r[i] == 0);
        let mut next: Vec<Vec<i128>> = pos.clone();
        next.extend(zero.iter().cloned());
        for p in &pos {
            for n in &neg {
                let common: Vec<usize> = processed
                    .iter()
                    .copied()
                    .filter(|&q| p[q] == 0 && n[q] == 0)
                    .collect();
                if common.len() + 2 < k {
                    continue;
                }
                // algebraic adjacency test
                let rows: Vec<Vec<BigInt>> = common.iter().map(|&q| b[q].clone()).collect();
                if linalg::rank(&rows) != k - 2 {
                    continue;
                }
                let mut v: Vec<i128> = (0..m)
                    .map(|t| {
                        p[i].checked_mul(n[t])
                            .and_then(|a| n[i].checked_mul(p[t]).and_then(|c| a.checked_sub(c)))
                            .map(|x| -x)
                            .ok_or(LatticeError::Overflow)
                    })
                    .collect::<Result<_>>()?;
                // v = (p_i) n - (n_i) p, positive multiple; fix sign
                if v.iter().any(|&x| x < 0) {
                    for x in v.iter_mut() {
                        *x = -*x;
                    }
                }
                gcd_normalize(&mut v);
                if !next.contains(&v) {
                    next.push(v);
                }
            }
        }
        rays = next;
        processed.push(i);
    }
    rays.sort();
    rays.dedup();
    Ok((k, rays))
}

struct Triangulator<'a> {
    rays: &'a [Vec<i128>],
    m: usize,
    memo: HashMap<Vec<usize>, Vec<Vec<usize>>>,
}

impl Triangulator<'_> {
    fn rank(&self, face: &[usize]) -> usize {
        let rows: Vec<&Vec<i128>> = face.iter().map(|&r| &self.rays[r]).collect();
        linalg::rank(&big_rows(&rows))
    }

    /// Pulling triangulation of the face spanned by `face` (of dimension `d`),
    /// always pulling the smallest ray index so that faces are triangulated
    /// consistently.
    fn triangulate(&mut self, face: &[usize], d: usize) -> Vec<Vec<usize>> {
        if face.len() == d {
            return vec![face.to_vec()];
        }
        if let Some(t) = self.memo.get(face) {
            return t.clone();
        }
        let apex = face[0];
        let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for i in 0..self.m {
            let sub: Vec<usize> = face.iter().copied().filter(|&r| self.rays[r][i] == 0).collect();
            if sub.len() < face.len() && !sub.is_empty() && self.rank(&sub) == d - 1 {
                facets.insert(sub);
            }
        }
        let mut out = Vec::new();
        for f in facets {
            if f.contains(&apex) {
                continue;
            }
            for mut s in self.triangulate(&f, d - 1) {
                s.insert(0, apex);
                s.sort();
                out.push(s);
            }
        }
        self.memo.insert(face.to_vec(), out.clone());
        out
    }
}

/// Lattice points of the half-open parallelepiped `{sum t_j r_j : 0 < t_j <= 1}`.
fn parallelepiped_points(rays: &[&Vec<i128>], m: usize) -> Result<Vec<Vec<i128>>> {
    let f = rays.len();
    // pick f coordinates on which the rays are independent
    let mut coords: Vec<usize> = Vec::new();
    for i in 0..m {
        let mut trial = coords.clone();
        trial.push(i);
        let rows: Vec<Vec<BigInt>> = trial
            .iter()
            .map(|&c| rays.iter().map(|r| BigInt::from(r[c])).collect())
            .collect();
        if linalg::rank(&rows) == trial.len() {
            coords = trial;
            if coords.len() == f {
                break;
            }
        }
    }
    let square: Vec<Vec<BigInt>> = coords
        .iter()
        .map(|&c| rays.iter().map(|r| BigInt::from(r[c])).collect())
        .collect();
    let ech = linalg::column_echelon(&square, f);
    let diag: Vec<i128> = (0..f)
        .map(|i| ech.h[i][i].to_i128().ok_or(LatticeError::Overflow))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut rep = vec![0i128; f];
    loop {
        let rhs: Vec<BigRational> = rep.iter().map(|&y| BigRational::from_integer(y.into())).collect();
        let t = linalg::solve_square(&square, &rhs).ok_or(LatticeError::DegenerateCone)?;
        let t: Vec<BigRational> = t
            .into_iter()
            .map(|q| &q - q.ceil() + BigRational::one())
            .collect();
        let mut point = Vec::with_capacity(m);
        let mut integral = true;
        for i in 0..m {
            let v: BigRational = rays
                .iter()
                .zip(&t)
                .map(|(r, tj)| tj * BigRational::from_integer(r[i].into()))
                .sum();
            if !v.is_integer() {
                integral = false;
                break;
            }
            point.push(v.to_integer().to_i128().ok_or(LatticeError::Overflow)?);
        }
        if integral {
            out.push(point);
        }
        // odometer over 0 <= rep[i] < diag[i]
        let mut i = 0;
        loop {
            if i == f {
                out.sort();
                return Ok(out);
            }
            rep[i] += 1;
            if rep[i] < diag[i] {
                break;
            }
            rep[i] = 0;
            i += 1;
        }
    }
}

impl OpenCone {
    /// The cone `{x >= 0 : M x = 0}` in `Z^m`, with length `w·x`.
    pub fn new(equalities: &[Vec<i64>], weights: &[u64]) -> Result<OpenCone> {
        let m = weights.len();
        if weights.contains(&0) {
            return Err(LatticeError::DegenerateCone);
        }
        for row in equalities {
            if row.len() != m {
                return Err(LatticeError::DimensionMismatch { expected: m, got: row.len() });
            }
        }
        let (k, rays128) = extreme_rays(equalities, m)?;
        let to64 = |v: &Vec<i128>| v.iter().map(|&x| i64::try_from(x).map_err(|_| LatticeError::Overflow)).collect::<Result<Vec<i64>>>();
        let rays: Vec<Vec<i64>> = rays128.iter().map(to64).collect::<Result<_>>()?;
        let mut cone = OpenCone {
            ambient_dim: m,
            cone_dim: k,
            weights: weights.to_vec(),
            rays,
            simplices: Vec::new(),
            pieces: Vec::new(),
        };
        let covered = (0..m).all(|i| cone.rays.iter().any(|r| r[i] > 0));
        if k == 0 || !covered {
            return Ok(cone);
        }
        let all: Vec<usize> = (0..rays128.len()).collect();
        let mut tri = Triangulator { rays: &rays128, m, memo: HashMap::new() };
        cone.simplices = tri.triangulate(&all, k);

        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in &cone.simplices {
            for mask in 1u32..(1 << s.len()) {
                let face: Vec<usize> = (0..s.len()).filter(|b| mask & (1 << b) != 0).map(|b| s[b]).collect();
                if (0..m).all(|i| face.iter().any(|&r| cone.rays[r][i] > 0)) {
                    faces.insert(face);
                }
            }
        }
        for face in faces {
            let rays: Vec<&Vec<i128>> = face.iter().map(|&r| &rays128[r]).collect();
            let mut order = face.clone();
            order.sort_by_key(|&r| (cone.length(&cone.rays[r]), r));
            let lens: Vec<u64> = order.iter().map(|&r| cone.length(&cone.rays[r])).collect();
            for p in parallelepiped_points(&rays, m)? {
                let base: Vec<i64> = p.iter().map(|&x| i64::try_from(x).map_err(|_| LatticeError::Overflow)).collect::<Result<_>>()?;
                cone.pieces.push(Piece {
                    base_len: cone.length(&base),
                    base,
                    rays: order.clone(),
                    lens: lens.clone(),
                });
            }
        }
        Ok(cone)
    }

    fn length(&self, v: &[i64]) -> u64 {
        v.iter().zip(&self.weights).map(|(&x, &w)| x as u64 * w).sum()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the linear span of the cone.
    pub fn cone_dim(&self) -> usize {
        self.cone_dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Restrict to points of length at most `bound`.
    pub fn truncate(self: &Arc<Self>, bound: u64) -> TruncatedCone {
        let mut tables: HashMap<Vec<u64>, Arc<Vec<u128>>> = HashMap::new();
        let mut cumulative = Vec::with_capacity(self.pieces.len());
        let mut total: u128 = 0;
        for piece in &self.pieces {
            if piece.base_len <= bound {
                for j in (0..=piece.lens.len()).rev() {
                    table(&mut tables, &piece.lens[j..], bound);
                }
                total += tables[&piece.lens][(bound - piece.base_len) as usize];
            }
            cumulative.push(total);
        }
        TruncatedCone {
            cone: Arc::clone(self),
            bound,
            tables,
            cumulative,
        }
    }
}

/// `T[s] = #{c >= 0 : sum c_j lens_j <= s}` for `s = 0..=bound`.
fn table(tables: &mut HashMap<Vec<u64>, Arc<Vec<u128>>>, lens: &[u64], bound: u64) -> Arc<Vec<u128>> {
    if let Some(t) = tables.get(lens) {
        return Arc::clone(t);
    }
    let n = bound as usize + 1;
    let t = if lens.is_empty() {
        vec![1u128; n]
    } else {
        let rest = table(tables, &lens[1..], bound);
        let l = lens[0] as usize;
        let mut t = vec![0u128; n];
        for s in 0..n {
            t[s] = rest[s] + if s >= l { t[s - l] } else { 0 };
        }
        t
    };
    let t = Arc::new(t);
    tables.insert(lens.to_vec(), Arc::clone(&t));
    t
}

/// An [`OpenCone`] cut off at a fixed length, with exact counting and an
/// index-to-point bijection.
#[derive(Debug, Clone)]
pub struct TruncatedCone {
    cone: Arc<OpenCone>,
    bound: u64,
    tables: HashMap<Vec<u64>, Arc<Vec<u128>>>,
    cumulative: Vec<u128>,
}

impl TruncatedCone {
    pub fn count(&self) -> u128 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn cone(&self) -> &OpenCone {
        &self.cone
    }

    /// The point with the given zero-based index.
    pub fn point(&self, index: u128) -> Result<Vec<i64>> {
        if index >= self.count() {
            return Err(LatticeError::IndexOutOfRange {
                index: index.into(),
                count: self.count().into(),
            });
        }
        let k = self.cumulative.partition_point(|&c| c <= index);
        let piece = &self.cone.pieces[k];
        let mut i = index - if k == 0 { 0 } else { self.cumulative[k - 1] };
        let mut budget = self.bound - piece.base_len;
        let mut x = piece.base.clone();
        for (j, (&r, &l)) in piece.rays.iter().zip(&piece.lens).enumerate() {
            let rest = &self.tables[&piece.lens[j + 1..]];
            let mut c = 0u64;
            loop {
                let block = rest[(budget - c * l) as usize];
                if i < block {
                    break;
                }
                i -= block;
                c += 1;
            }
            budget -= c * l;
            for (xi, ri) in x.iter_mut().zip(&self.cone.rays[r]) {
                *xi += c as i64 * ri;
            }
        }
        Ok(x)
    }
}
