//! Train tracks dual to a triangulation: each branch is an arc across a
//! chosen corner of a triangle, and each side of each edge is a gate.
//!
//! Corner `i` of triangle `t` has index `3t + i`. A multicurve fully carried
//! by the track puts weight `x_k >= 1` on the `k`-th selected corner and no
//! arcs anywhere else; its weight on an edge is the total weight of the
//! selected corners touching either side of that edge.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::lattice::cone::OpenCone;
use crate::lattice::linalg;
use crate::lattice::{LatticeError, LinearConstraint, Polytope, Relation};
use crate::surface::{MulticurveCoords, SurfaceError, Triangulation};

#[derive(Debug, Error)]
pub enum TrackError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed track file: {0}")]
    Parse(String),
    #[error("corner {0} does not exist")]
    NoSuchCorner(usize),
    #[error("corner {0} selected twice")]
    DuplicateCorner(usize),
    #[error("edge {edge}: one side meets no branch, so the other side must carry weight 0")]
    EmptyGate { edge: usize },
    #[error("no weights with every branch at least 1 satisfy the switch conditions")]
    NotFullyCarried,
    #[error("expected {expected} branch weights, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("branch {branch} has weight 0; fully carried weights are at least 1")]
    ZeroWeight { branch: usize },
    #[error("switch condition fails at edge {edge}: {left} != {right}")]
    SwitchViolation { edge: usize, left: u64, right: u64 },
}

pub type Result<T> = std::result::Result<T, TrackError>;

/// Weight on each branch, in branch order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CarriedWeights(pub Vec<u64>);

impl CarriedWeights {
    pub fn length(&self) -> u64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct TrainTrack {
    base: Triangulation,
    corners: Vec<usize>,
    closed: bool,
    switches: Vec<(usize, Vec<i64>)>,
}

/// The two corners of a triangle that touch its side at `pos`.
fn touching(t: usize, pos: usize) -> [usize; 2] {
    [3 * t + pos, 3 * t + (pos + 1) % 3]
}

impl TrainTrack {
    /// A track from a list of selected corners. The order of `corners` fixes
    /// the branch labels.
    pub fn new(base: Triangulation, corners: Vec<usize>) -> Result<Self> {
        let n = 3 * base.num_triangles();
        let mut branch_of = vec![None; n];
        for (k, &c) in corners.iter().enumerate() {
            if c >= n {
                return Err(TrackError::NoSuchCorner(c));
            }
            if branch_of[c].is_some() {
                return Err(TrackError::DuplicateCorner(c));
            }
            branch_of[c] = Some(k);
        }
        let m = corners.len();
        let mut switches = Vec::new();
        for e in 0..base.num_edges() {
            let mut row = vec![0i64; m];
            let mut sides_used = [false; 2];
            for (sign, side) in [(1i64, 2 * e), (-1, 2 * e + 1)] {
                let (t, pos) = base.locate(side);
                for c in touching(t, pos) {
                    if let Some(k) = branch_of[c] {
                        row[k] += sign;
                        sides_used[side % 2] = true;
                    }
                }
            }
            if sides_used[0] != sides_used[1] {
                return Err(TrackError::EmptyGate { edge: e });
            }
            if row.iter().any(|&x| x != 0) {
                switches.push((e, row));
            }
        }
        Ok(TrainTrack {
            base,
            corners,
            closed: false,
            switches,
        })
    }

    /// Mark the punctures of the base as artificial: carried curves are to be
    /// read on the closed surface.
    pub fn closed(mut self, closed: bool) -> Self {
        self.closed = closed;
        self
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn base(&self) -> &Triangulation {
        &self.base
    }

    pub fn corners(&self) -> &[usize] {
        &self.corners
    }

    pub fn num_branches(&self) -> usize {
        self.corners.len()
    }

    /// Selected corners as a bit set, bit `k` for corner `k`.
    pub fn code(&self) -> BigUint {
        self.corners.iter().fold(BigUint::default(), |acc, &c| acc | (BigUint::from(1u8) << c))
    }

    /// One row per edge whose gates meet different branches: `row · x = 0`.
    pub fn switch_rows(&self) -> Vec<Vec<i64>> {
        self.switches.iter().map(|(_, r)| r.clone()).collect()
    }

    /// `{x : switch conditions, x_i >= 1}`.
    pub fn carrying_polytope(&self) -> Polytope {
        let m = self.num_branches();
        let mut cs = Vec::with_capacity(self.switches.len() + m);
        for (_, row) in &self.switches {
            cs.push(LinearConstraint::eq(row, 0).expect("switch rows are nonzero"));
        }
        for k in 0..m {
            let mut unit = vec![BigInt::from(0); m];
            unit[k] = BigInt::from(1);
            cs.push(LinearConstraint::new(unit, Relation::Ge, BigInt::from(1)).expect("unit row"));
        }
        Polytope::new(m, cs).expect("rows have the track's dimension")
    }

    /// The carrying polytope cut down to total branch weight at most `length`.
    pub fn length_polytope(&self, length: u64) -> Polytope {
        let m = self.num_branches();
        let row = vec![BigInt::from(-1); m];
        let cap = LinearConstraint::new(row, Relation::Ge, -BigInt::from(length)).expect("nonzero row");
        self.carrying_polytope().intersect(cap).expect("same dimension")
    }

    /// The interior of the carried cone, with length `x_1 + ... + x_m`.
    pub fn cone(&self) -> Result<Arc<OpenCone>> {
        let rows = self.switch_rows();
        let cone = OpenCone::new(&rows, &vec![1; self.num_branches()])?;
        Ok(Arc::new(cone))
    }

    /// Dimension of the space of solutions of the switch conditions.
    pub fn carried_dimension(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = self
            .switches
            .iter()
            .map(|(_, r)| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        self.num_branches() - linalg::rank(&rows)
    }

    /// Dimension of the space of measured laminations on the surface the
    /// track lives on: `6g - 6 + 2n`, with `n = 0` for a closed track.
    pub fn expected_dimension(&self) -> Option<usize> {
        let (g, n) = self.base.surface()?;
        let n = if self.closed { 0 } else { n };
        (6 * g + 2 * n).checked_sub(6)
    }

    /// Whether the track carries a full-dimensional set of laminations.
    pub fn carried_dimension_check(&self) -> bool {
        self.expected_dimension() == Some(self.carried_dimension())
    }

    /// Check the switch conditions and read off the edge weights.
    pub fn to_multicurve(&self, w: &CarriedWeights) -> Result<MulticurveCoords> {
        let m = self.num_branches();
        if w.0.len() != m {
            return Err(TrackError::WrongLength { expected: m, got: w.0.len() });
        }
        if let Some(k) = w.0.iter().position(|&x| x == 0) {
            return Err(TrackError::ZeroWeight { branch: k });
        }
        let mut corner = vec![0u64; 3 * self.base.num_triangles()];
        for (k, &c) in self.corners.iter().enumerate() {
            corner[c] = w.0[k];
        }
        let side_sum = |side: usize| {
            let (t, pos) = self.base.locate(side);
            touching(t, pos).iter().map(|&c| corner[c]).sum::<u64>()
        };
        let mut edges = Vec::with_capacity(self.base.num_edges());
        for e in 0..self.base.num_edges() {
            let (left, right) = (side_sum(2 * e), side_sum(2 * e + 1));
            if left != right {
                return Err(TrackError::SwitchViolation { edge: e, left, right });
            }
            edges.push(left);
        }
        Ok(MulticurveCoords::new(edges))
    }

    /// Branch weights read back from a multicurve's corner arcs.
    pub fn weights_of(&self, coords: &MulticurveCoords) -> Result<CarriedWeights> {
        let mut out = Vec::with_capacity(self.num_branches());
        for &c in &self.corners {
            out.push(crate::surface::corner_weight(&self.base, coords, c / 3, c % 3)?);
        }
        Ok(CarriedWeights(out))
    }

    /// Load a track file:
    ///
    /// ```text
    /// triangulation: s12.tri
    /// corners: 0 1 3 4 5 7 8 10 11
    /// closed: false
    /// ```
    ///
    /// The triangulation path is relative to the track file.
    pub fn load(path: &Path) -> Result<TrainTrack> {
        let text = fs::read_to_string(path).map_err(|source| TrackError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, |name| {
            let p = dir.join(name);
            fs::read_to_string(&p).map_err(|source| TrackError::Io { path: p, source })
        })
    }

    /// Parse a track file, resolving the triangulation reference with `open`.
    pub fn parse(text: &str, open: impl Fn(&str) -> Result<String>) -> Result<TrainTrack> {
        let mut tri = None;
        let mut corners = None;
        let mut closed = false;
        for raw in text.lines() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once(':')
                .ok_or_else(|| TrackError::Parse(format!("expected `key: value`, got {body:?}")))?;
            let value = value.trim();
            match key.trim() {
                "triangulation" => tri = Some(open(value)?.parse::<Triangulation>()?),
                "corners" => {
                    let cs = value
                        .split_whitespace()
                        .map(|c| c.parse::<usize>().map_err(|_| TrackError::Parse(format!("bad corner {c:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    corners = Some(cs);
                }
                "closed" => {
                    closed = value
                        .parse()
                        .map_err(|_| TrackError::Parse(format!("closed must be true or false, got {value:?}")))?
                }
                other => return Err(TrackError::Parse(format!("unknown key {other:?}"))),
            }
        }
        let tri = tri.ok_or_else(|| TrackError::Parse("missing `triangulation:`".into()))?;
        let corners = corners.ok_or_else(|| TrackError::Parse("missing `corners:`".into()))?;
        let track = TrainTrack::new(tri, corners)?.closed(closed);
        track.validate()?;
        Ok(track)
    }

    /// Reject tracks that fully carry nothing.
    pub fn validate(&self) -> Result<()> {
        if self.num_branches() == 0 || self.cone()?.num_pieces() == 0 {
            return Err(TrackError::NotFullyCarried);
        }
        Ok(())
    }
}
