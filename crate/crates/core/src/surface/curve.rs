use std::collections::BTreeMap;
use std::fmt;

use super::{edge_of, Result, SurfaceError, Triangulation};
use crate::dsu::Dsu;

/// A multicurve given by how many times it crosses each edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MulticurveCoords(Vec<u64>);

impl MulticurveCoords {
    pub fn new(weights: Vec<u64>) -> Self {
        MulticurveCoords(weights)
    }

    pub fn weights(&self) -> &[u64] {
        &self.0
    }

    pub fn total_weight(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn scaled(&self, k: u64) -> Self {
        MulticurveCoords(self.0.iter().map(|w| w * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        MulticurveCoords(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Check parity and the triangle inequalities in every triangle, and
    /// that the vector is nonzero.
    pub fn validate(&self, t: &Triangulation) -> Result<()> {
        if self.0.len() != t.num_edges() {
            return Err(SurfaceError::InvalidCoords(format!(
                "{} weights for {} edges",
                self.0.len(),
                t.num_edges()
            )));
        }
        if self.is_zero() {
            return Err(SurfaceError::InvalidCoords("all weights are zero".into()));
        }
        for tri in 0..t.num_triangles() {
            corner_weights(t, self, tri)?;
        }
        Ok(())
    }
}

impl fmt::Display for MulticurveCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub(crate) fn side_weights(t: &Triangulation, c: &[u64], tri: usize) -> [u64; 3] {
    let s = t.triangles()[tri];
    [c[edge_of(s[0])], c[edge_of(s[1])], c[edge_of(s[2])]]
}

/// Number of arcs around each corner of triangle `tri`.
pub(crate) fn corner_weights(t: &Triangulation, coords: &MulticurveCoords, tri: usize) -> Result<[u64; 3]> {
    let w = side_weights(t, &coords.0, tri);
    let mut out = [0u64; 3];
    for i in 0..3 {
        let (prev, this, opp) = (w[(i + 2) % 3], w[i], w[(i + 1) % 3]);
        let sum = prev + this;
        if sum < opp || (sum - opp) % 2 != 0 {
            return Err(SurfaceError::InvalidCoords(format!(
                "triangle {tri} has side weights {w:?}"
            )));
        }
        out[i] = (sum - opp) / 2;
    }
    Ok(out)
}

/// Arcs of `coords` cutting off corner `corner` of triangle `tri`: half the
/// sum of the two adjacent sides minus the opposite one.
pub fn corner_weight(t: &Triangulation, coords: &MulticurveCoords, tri: usize, corner: usize) -> Result<u64> {
    if tri >= t.num_triangles() || corner >= 3 {
        return Err(SurfaceError::InvalidCoords(format!("no corner {corner} in triangle {tri}")));
    }
    if coords.0.len() != t.num_edges() {
        return Err(SurfaceError::InvalidCoords("wrong number of weights".into()));
    }
    Ok(corner_weights(t, coords, tri)?[corner])
}

/// The intersection points of a normal multicurve with the edges, grouped
/// into connected components.
///
/// Point `k` of edge `e` is the `k`-th crossing counted along side `2e`.
pub(crate) struct Tracing {
    pub offset: Vec<usize>,
    pub component_of: Vec<usize>,
    pub components: Vec<MulticurveCoords>,
}

impl Tracing {
    pub fn new(t: &Triangulation, coords: &MulticurveCoords) -> Result<Tracing> {
        let c = coords.weights();
        if c.len() != t.num_edges() {
            return Err(SurfaceError::InvalidCoords("wrong number of weights".into()));
        }
        let mut offset = Vec::with_capacity(c.len() + 1);
        let mut acc = 0usize;
        for &w in c {
            offset.push(acc);
            acc += w as usize;
        }
        offset.push(acc);
        let point = |side: usize, pos: u64| -> usize {
            let e = edge_of(side);
            let k = if side.is_multiple_of(2) { pos } else { c[e] - 1 - pos };
            offset[e] + k as usize
        };
        let mut dsu = Dsu::new(acc);
        for tri in 0..t.num_triangles() {
            let s = t.triangles()[tri];
            let w = side_weights(t, c, tri);
            let cw = corner_weights(t, coords, tri)?;
            for i in 0..3 {
                let prev = (i + 2) % 3;
                for j in 0..cw[i] {
                    dsu.union(point(s[i], j), point(s[prev], w[prev] - 1 - j), false);
                }
            }
        }
        let mut ids = BTreeMap::new();
        let mut component_of = Vec::with_capacity(acc);
        for p in 0..acc {
            let r = dsu.root(p);
            let next = ids.len();
            component_of.push(*ids.entry(r).or_insert(next));
        }
        let mut components = vec![vec![0u64; c.len()]; ids.len()];
        for e in 0..c.len() {
            for p in offset[e]..offset[e + 1] {
                components[component_of[p]][e] += 1;
            }
        }
        Ok(Tracing {
            offset,
            component_of,
            components: components.into_iter().map(MulticurveCoords).collect(),
        })
    }

    /// Component through the point at position `pos` along side `side`.
    pub fn component_at(&self, coords: &MulticurveCoords, side: usize, pos: u64) -> usize {
        let e = edge_of(side);
        let w = coords.weights()[e];
        let k = if side.is_multiple_of(2) { pos } else { w - 1 - pos };
        self.component_of[self.offset[e] + k as usize]
    }
}

/// The connected components of a normal multicurve, each as its own
/// coordinate vector, ordered by where they first cross the edges.
pub fn trace_components(t: &Triangulation, coords: &MulticurveCoords) -> Result<Vec<MulticurveCoords>> {
    Ok(Tracing::new(t, coords)?.components)
}

/// The curve running once around vertex `v`.
pub fn vertex_link(t: &Triangulation, v: usize) -> MulticurveCoords {
    MulticurveCoords(t.ends_at(v))
}

/// Whether a connected normal curve just encircles a puncture.
pub fn is_peripheral(t: &Triangulation, curve: &MulticurveCoords) -> bool {
    (0..t.num_vertices()).any(|v| vertex_link(t, v) == *curve)
}

/// Boundary of a regular neighbourhood of edge `e` together with its end
/// punctures, as one normal multicurve. Each edge end at those punctures is
/// crossed once.
fn neighbourhood_boundary(t: &Triangulation, e: usize) -> Result<MulticurveCoords> {
    if e >= t.num_edges() {
        return Err(SurfaceError::NoSuchEdge(e));
    }
    // the inner edge of a self-folded triangle has the same neighbourhood,
    // up to isotopy, as the loop around it
    let e = if t.is_flippable(e) {
        e
    } else {
        let (tri, pos) = t.locate(2 * e);
        let others: Vec<usize> = (0..3).filter(|&i| i != pos).map(|i| edge_of(t.triangles()[tri][i])).collect();
        others.into_iter().find(|&f| f != e).unwrap_or(e)
    };
    let (u, v) = t.edge_ends(e);
    let mut total = t.ends_at(u);
    if u != v {
        for (a, b) in total.iter_mut().zip(t.ends_at(v)) {
            *a += b;
        }
    }
    total[e] = 0;
    Ok(MulticurveCoords(total))
}

/// The distinct essential curves parallel to edge `e`: components of the
/// boundary of its regular neighbourhood, up to isotopy, that do not just
/// encircle a puncture.
pub fn edge_link_curves(t: &Triangulation, e: usize) -> Result<Vec<MulticurveCoords>> {
    let mut out: Vec<MulticurveCoords> = Vec::new();
    for comp in trace_components(t, &neighbourhood_boundary(t, e)?)? {
        if !is_peripheral(t, &comp) && !out.contains(&comp) {
            out.push(comp);
        }
    }
    Ok(out)
}

/// The essential part of the boundary of a regular neighbourhood of edge
/// `e`, with parallel boundary components kept. For an edge whose ends are
/// distinct this is a single curve; for a loop it may be two.
pub fn edge_link_curve(t: &Triangulation, e: usize) -> Result<MulticurveCoords> {
    let boundary = neighbourhood_boundary(t, e)?;
    let mut total = vec![0u64; t.num_edges()];
    for comp in trace_components(t, &boundary)? {
        if !is_peripheral(t, &comp) {
            for (a, b) in total.iter_mut().zip(comp.weights()) {
                *a += b;
            }
        }
    }
    let total = MulticurveCoords(total);
    if total.is_zero() {
        return Err(SurfaceError::DegenerateLink(e));
    }
    Ok(total)
}
