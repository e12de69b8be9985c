//! Exact integer points of bounded rational polytopes.
//!
//! A [`Polytope`] is a list of integer constraints `a·x >= b` or `a·x = b`.
//! Counting is exact: equalities are eliminated by integer substitution and
//! the remaining system is counted by fixing one coordinate at a time, with a
//! memo keyed on the canonical residual system. [`Counter::ith_point`]
//! extracts the i-th point in lexicographic order by bisecting one coordinate
//! at a time against exact counts.
//!
//! [`cone`] holds a second, independent indexer specialised to the interior
//! lattice points of a pointed cone truncated by a positive length
//! functional. It is what makes long-length experiments tractable.

pub mod cone;
mod count;
pub(crate) mod linalg;
mod lp;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{Signed, Zero};
use rand::Rng;
use thiserror::Error;

pub use count::Counter;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("constraint has no nonzero coefficient")]
    ZeroConstraint,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope has no integral points")]
    Empty,
    #[error("index {index} out of range for polytope with {count} points")]
    IndexOutOfRange { index: BigUint, count: BigUint },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("malformed polytope text: {0}")]
    Parse(String),
    #[error("cone is not pointed or has no interior")]
    DegenerateCone,
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// A point of `Z^D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoint(pub Vec<BigInt>);

impl IntPoint {
    pub fn from_i64s(values: &[i64]) -> Self {
        IntPoint(values.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    /// Coordinates as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|c| i64::try_from(c).ok()).collect()
    }
}

impl fmt::Display for IntPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `a·x >= b`
    Ge,
    /// `a·x = b`
    Eq,
}

/// `a·x >= b` or `a·x = b` over the integers.
///
/// Upper bounds and strict inequalities are normalised at construction:
/// `a·x <= b` is stored as `-a·x >= -b` and `a·x < b` as `-a·x >= 1 - b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    coefficients: Vec<BigInt>,
    bound: BigInt,
    kind: Relation,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<BigInt>, kind: Relation, bound: BigInt) -> Result<Self> {
        if coefficients.iter().all(Zero::is_zero) {
            return Err(LatticeError::ZeroConstraint);
        }
        Ok(LinearConstraint {
            coefficients,
            bound,
            kind,
        })
    }

    /// The constraint `0·x >= 0`, satisfied everywhere.
    pub fn vacuous(dim: usize) -> Self {
        LinearConstraint {
            coefficients: vec![BigInt::zero(); dim],
            bound: BigInt::zero(),
            kind: Relation::Ge,
        }
    }

    pub fn ge(coefficients: &[i64], bound: i64) -> Result<Self> {
        Self::new(big(coefficients), Relation::Ge, bound.into())
    }

    pub fn le(coefficients: &[i64], bound: i64) -> Result<Self> {
        let neg: Vec<i64> = coefficients.iter().map(|c| -c).collect();
        Self::new(big(&neg), Relation::Ge, (-bound).into())
    }

    pub fn lt(coefficients: &[i64], bound: i64) -> Result<Self> {
        Self::le(coefficients, bound - 1)
    }

    pub fn gt(coefficients: &[i64], bound: i64) -> Result<Self> {
        Self::ge(coefficients, bound + 1)
    }

    pub fn eq(coefficients: &[i64], bound: i64) -> Result<Self> {
        Self::new(big(coefficients), Relation::Eq, bound.into())
    }

    /// `x_d < g` in a space of dimension `dim`.
    pub fn coordinate_below(dim: usize, d: usize, g: &BigInt) -> Self {
        let mut coefficients = vec![BigInt::zero(); dim];
        coefficients[d] = BigInt::from(-1);
        LinearConstraint {
            coefficients,
            bound: BigInt::from(1) - g,
            kind: Relation::Ge,
        }
    }

    /// `x_d >= g` in a space of dimension `dim`.
    pub fn coordinate_at_least(dim: usize, d: usize, g: &BigInt) -> Self {
        let mut coefficients = vec![BigInt::zero(); dim];
        coefficients[d] = BigInt::from(1);
        LinearConstraint {
            coefficients,
            bound: g.clone(),
            kind: Relation::Ge,
        }
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn kind(&self) -> Relation {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_satisfied_by(&self, p: &IntPoint) -> bool {
        let lhs: BigInt = self
            .coefficients
            .iter()
            .zip(&p.0)
            .map(|(a, x)| a * x)
            .sum();
        match self.kind {
            Relation::Ge => lhs >= self.bound,
            Relation::Eq => lhs == self.bound,
        }
    }
}

fn big(values: &[i64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

/// `{x in Z^D : every constraint holds}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polytope {
    ambient_dim: usize,
    constraints: Vec<LinearConstraint>,
}

/// Exact number of integral points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointCount(pub BigUint);

impl PointCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for PointCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for PointCount {
    fn from(v: u64) -> Self {
        PointCount(BigUint::from(v))
    }
}

/// Closed integer interval `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lower: BigInt,
    pub upper: BigInt,
}

impl Polytope {
    pub fn new(ambient_dim: usize, constraints: Vec<LinearConstraint>) -> Result<Self> {
        for c in &constraints {
            if c.dim() != ambient_dim {
                return Err(LatticeError::DimensionMismatch {
                    expected: ambient_dim,
                    got: c.dim(),
                });
            }
        }
        Ok(Polytope {
            ambient_dim,
            constraints,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn contains(&self, p: &IntPoint) -> Result<bool> {
        if p.dim() != self.ambient_dim {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ambient_dim,
                got: p.dim(),
            });
        }
        Ok(self.constraints.iter().all(|c| c.is_satisfied_by(p)))
    }

    pub fn intersect(&self, c: LinearConstraint) -> Result<Polytope> {
        if c.dim() != self.ambient_dim {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ambient_dim,
                got: c.dim(),
            });
        }
        let mut out = self.clone();
        out.constraints.push(c);
        Ok(out)
    }

    /// Tight integer bounds for every coordinate, from exact rational LP.
    ///
    /// An infeasible polytope yields [`LatticeError::Empty`].
    pub fn bounding_box(&self) -> Result<Vec<Interval>> {
        let rows = count::ge_rows(self)?;
        let mut out = Vec::with_capacity(self.ambient_dim);
        for d in 0..self.ambient_dim {
            let (lo, hi) = lp::coordinate_range(&rows, self.ambient_dim, d)?;
            out.push(Interval {
                lower: lo,
                upper: hi,
            });
        }
        Ok(out)
    }

    pub fn count_points(&self) -> Result<PointCount> {
        Counter::new().count(self)
    }

    /// The `index`-th integral point in lexicographic order (zero-based).
    pub fn ith_point(&self, index: &BigUint) -> Result<IntPoint> {
        Counter::new().ith_point(self, index)
    }

    /// A uniformly random integral point.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IntPoint> {
        Counter::new().sample_uniform(self, rng)
    }

    /// `||A|| + ||b||` with `||n|| = ln|n|` and `||0|| = 0`.
    pub fn complexity(&self) -> f64 {
        fn norm(n: &BigInt) -> f64 {
            if n.is_zero() {
                0.0
            } else {
                big_ln(&n.abs())
            }
        }
        self.constraints
            .iter()
            .map(|c| c.coefficients.iter().map(norm).sum::<f64>() + norm(&c.bound))
            .sum()
    }

    /// One constraint per line: `a1 a2 ... aD  >=  b` (or `=`).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.constraints {
            let coeffs: Vec<String> = c.coefficients.iter().map(|a| a.to_string()).collect();
            let rel = match c.kind {
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            s.push_str(&format!("{}  {}  {}\n", coeffs.join(" "), rel, c.bound));
        }
        s
    }
}

impl FromStr for Polytope {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self> {
        let mut dim = None;
        let mut constraints = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let pos = tokens
                .iter()
                .position(|t| *t == ">=" || *t == "=")
                .ok_or_else(|| LatticeError::Parse(format!("no relation in `{line}`")))?;
            if pos + 2 != tokens.len() {
                return Err(LatticeError::Parse(format!("bad bound in `{line}`")));
            }
            let parse = |t: &str| {
                t.parse::<BigInt>()
                    .map_err(|_| LatticeError::Parse(format!("bad integer `{t}`")))
            };
            let coefficients = tokens[..pos]
                .iter()
                .map(|t| parse(t))
                .collect::<Result<Vec<_>>>()?;
            let kind = if tokens[pos] == ">=" {
                Relation::Ge
            } else {
                Relation::Eq
            };
            let bound = parse(tokens[pos + 1])?;
            match dim {
                None => dim = Some(coefficients.len()),
                Some(d) if d != coefficients.len() => {
                    return Err(LatticeError::DimensionMismatch {
                        expected: d,
                        got: coefficients.len(),
                    })
                }
                _ => {}
            }
            constraints.push(LinearConstraint::new(coefficients, kind, bound)?);
        }
        let dim = dim.ok_or_else(|| LatticeError::Parse("no constraints".into()))?;
        Polytope::new(dim, constraints)
    }
}

fn big_ln(n: &BigInt) -> f64 {
    // ln(n) = ln(mantissa) + shift * ln 2 for values beyond f64 range
    let bits = n.bits();
    if bits < 1000 {
        n.to_string().parse::<f64>().map(f64::ln).unwrap_or(0.0)
    } else {
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        top.to_string().parse::<f64>().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Uniform integer in `[0, bound)`.
pub(crate) fn uniform_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    rng.gen_biguint_below(bound)
}
