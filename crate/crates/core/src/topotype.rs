//! Topological types of multicurves: crushing, partition graphs and their
//! canonical names.
//!
//! Crushing cuts the surface along the multicurve and shrinks every new
//! boundary circle to a puncture. On a triangulation this is done by
//! collapsing the regions between the curve and the triangle corners: every
//! triangle keeps exactly one central region, which becomes a triangle of the
//! crushed surface, while the strips between parallel arcs collapse to
//! edges. Annuli between parallel components contain no central region and
//! vanish, which merges parallel copies into one scar pair.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dsu::Dsu;
use crate::surface::{
    corner_weights, edge_of, is_peripheral, EulerData, MulticurveCoords, ShortForm, SurfaceError, Tracing,
    Triangulation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopotypeError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("multicurve has a component around a puncture")]
    Peripheral,
    #[error("inconsistent crush: {0}")]
    Malformed(String),
    #[error("malformed canonical name: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, TopotypeError>;

/// Where a puncture of the crushed surface came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Origin {
    /// An original puncture.
    Puncture(usize),
    /// One side of an isotopy class of the multicurve.
    Scar(usize),
}

/// A class of parallel components of the multicurve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    pub curve: MulticurveCoords,
    pub multiplicity: u64,
    /// The crushed components holding its two scars; equal when the class
    /// does not separate.
    pub sides: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct CrushResult {
    /// Euler data of each component of the crushed surface.
    pub components: Vec<EulerData>,
    pub classes: Vec<CurveClass>,
    /// Component of each original puncture, indexed by its vertex number.
    pub punctures: Vec<usize>,
    /// The crushed surface, possibly disconnected.
    pub triangulation: Triangulation,
    /// Origin and component of each vertex of `triangulation`.
    pub vertices: Vec<(Origin, usize)>,
}

impl CrushResult {
    /// Triangulations of the components, in component order.
    pub fn component_triangulations(&self) -> Result<Vec<Triangulation>> {
        let tri = &self.triangulation;
        let mut out = Vec::new();
        for tris in tri.components() {
            let mut edge_map = BTreeMap::new();
            let mut new_tris = Vec::with_capacity(tris.len());
            for &t in &tris {
                let mut nt = [0usize; 3];
                for (i, &s) in tri.triangles()[t].iter().enumerate() {
                    let next = edge_map.len();
                    let e = *edge_map.entry(edge_of(s)).or_insert(next);
                    nt[i] = 2 * e + s % 2;
                }
                new_tris.push(nt);
            }
            out.push(Triangulation::new(new_tris)?);
        }
        Ok(out)
    }

    /// `sum chi(S'_i)`, which equals `chi(S)`.
    pub fn total_chi(&self) -> i64 {
        self.components.iter().map(|c| c.chi).sum()
    }
}

/// Crush a short multicurve.
pub fn crush(sf: &ShortForm) -> Result<CrushResult> {
    crush_coords(&sf.triangulation, &sf.coords)
}

/// Crush any normal multicurve on `t`.
pub fn crush_coords(t: &Triangulation, coords: &MulticurveCoords) -> Result<CrushResult> {
    coords.validate(t)?;
    let c = coords.weights();
    let tracing = Tracing::new(t, coords)?;

    let mut classes: Vec<(MulticurveCoords, u64)> = Vec::new();
    let mut class_of = Vec::with_capacity(tracing.components.len());
    for comp in &tracing.components {
        if is_peripheral(t, comp) {
            return Err(TopotypeError::Peripheral);
        }
        match classes.iter().position(|(k, _)| k == comp) {
            Some(i) => {
                classes[i].1 += 1;
                class_of.push(i);
            }
            None => {
                class_of.push(classes.len());
                classes.push((comp.clone(), 1));
            }
        }
    }

    // segment k of edge e lies between its crossings k - 1 and k
    let mut offset = Vec::with_capacity(c.len());
    let mut total = 0usize;
    for &w in c {
        offset.push(total);
        total += w as usize + 1;
    }
    let segment = |side: usize, pos: u64| {
        let e = edge_of(side);
        let k = if side.is_multiple_of(2) { pos } else { c[e] - pos };
        offset[e] + k as usize
    };
    let mut dsu = Dsu::new(total);
    let mut corner_arcs = Vec::with_capacity(t.num_triangles());
    for tri in 0..t.num_triangles() {
        let s = t.triangles()[tri];
        let w = [c[edge_of(s[0])], c[edge_of(s[1])], c[edge_of(s[2])]];
        let cw = corner_weights(t, coords, tri)?;
        for i in 0..3 {
            let prev = (i + 2) % 3;
            // the side leaving a corner and the side arriving at it point
            // away from each other once the region between them collapses
            let flip = (s[i] % 2) == (s[prev] % 2);
            for j in 0..cw[i] {
                if !dsu.union(segment(s[i], j), segment(s[prev], w[prev] - j), flip) {
                    return Err(TopotypeError::Malformed("non-orientable collapse".into()));
                }
            }
        }
        corner_arcs.push(cw);
    }

    let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
    let mut new_tris = Vec::with_capacity(t.num_triangles());
    for tri in 0..t.num_triangles() {
        let s = t.triangles()[tri];
        let mut nt = [0usize; 3];
        for i in 0..3 {
            let (root, parity) = dsu.find(segment(s[i], corner_arcs[tri][i]));
            let next = labels.len();
            let e = *labels.entry(root).or_insert(next);
            nt[i] = 2 * e + usize::from(parity ^ (s[i] % 2 == 1));
        }
        new_tris.push(nt);
    }
    let crushed = Triangulation::new(new_tris.clone())
        .map_err(|e| TopotypeError::Malformed(format!("crushed gluing: {e}")))?;

    let component_of_tri: Vec<usize> = {
        let mut v = vec![0; crushed.num_triangles()];
        for (k, tris) in crushed.components().iter().enumerate() {
            for &tr in tris {
                v[tr] = k;
            }
        }
        v
    };
    let mut vertices: Vec<Option<(Origin, usize)>> = vec![None; crushed.num_vertices()];
    for tri in 0..t.num_triangles() {
        let s = t.triangles()[tri];
        for i in 0..3 {
            let origin = if corner_arcs[tri][i] == 0 {
                Origin::Puncture(t.corner_vertex(tri, i))
            } else {
                let comp = tracing.component_at(coords, s[i], corner_arcs[tri][i] - 1);
                Origin::Scar(class_of[comp])
            };
            let (nt, pos) = crushed.locate(new_tris[tri][i]);
            let v = crushed.corner_vertex(nt, pos);
            let entry = (origin, component_of_tri[nt]);
            match vertices[v] {
                None => vertices[v] = Some(entry),
                Some(old) if old == entry => {}
                Some(_) => return Err(TopotypeError::Malformed("vertex with two origins".into())),
            }
        }
    }
    let vertices: Vec<(Origin, usize)> = vertices
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| TopotypeError::Malformed("vertex without a corner".into()))?;

    let mut sides: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    let mut punctures = vec![usize::MAX; t.num_vertices()];
    for &(origin, comp) in &vertices {
        match origin {
            Origin::Scar(k) => sides[k].push(comp),
            Origin::Puncture(p) => punctures[p] = comp,
        }
    }
    if punctures.contains(&usize::MAX) || sides.iter().any(|s| s.len() != 2) {
        return Err(TopotypeError::Peripheral);
    }
    let classes = classes
        .into_iter()
        .zip(sides)
        .map(|((curve, multiplicity), s)| CurveClass {
            curve,
            multiplicity,
            sides: [s[0].min(s[1]), s[0].max(s[1])],
        })
        .collect();
    Ok(CrushResult {
        components: crushed.euler_data()?,
        classes,
        punctures,
        triangulation: crushed,
        vertices,
    })
}

/// A multigraph with integer vertex labels and edge labels, plus unmatched
/// half-edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledGraph {
    pub vertex_labels: Vec<i64>,
    /// `(u, v, label)`; `u == v` is a loop.
    pub edges: Vec<(usize, usize, u64)>,
    /// `(vertex, label)`
    pub half_edges: Vec<(usize, u64)>,
}

pub const DUMMY: i64 = -1;

/// One vertex per crushed component labelled by its genus, one edge per
/// class of the multicurve labelled by its multiplicity, and a half-edge
/// labelled 0 for each original puncture.
pub fn partition_graph(cr: &CrushResult) -> LabeledGraph {
    LabeledGraph {
        vertex_labels: cr.components.iter().map(|c| c.genus as i64).collect(),
        edges: cr.classes.iter().map(|k| (k.sides[0], k.sides[1], k.multiplicity)).collect(),
        half_edges: cr.punctures.iter().map(|&c| (c, 0)).collect(),
    }
}

/// Attach all half-edges to a new vertex labelled -1. A graph without
/// half-edges is returned unchanged.
pub fn complete(g: &LabeledGraph) -> LabeledGraph {
    let mut out = g.clone();
    if g.half_edges.is_empty() {
        return out;
    }
    let dummy = out.vertex_labels.len();
    out.vertex_labels.push(DUMMY);
    for &(v, label) in &g.half_edges {
        out.edges.push((v, dummy, label));
    }
    out.half_edges.clear();
    out
}

/// Drop the dummy vertex of a completed graph whose punctures are
/// artificial. A genus-0 vertex left with exactly two edge ends was an
/// annulus around the artificial puncture; its two edges are one class on
/// the closed surface and are merged.
pub fn close_up(g: &LabeledGraph) -> LabeledGraph {
    let g = complete(g);
    let keep: Vec<usize> = (0..g.vertex_labels.len()).filter(|&v| g.vertex_labels[v] != DUMMY).collect();
    let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let had_dummy: Vec<bool> = keep
        .iter()
        .map(|&v| g.edges.iter().any(|&(a, b, _)| (a == v || b == v) && (g.vertex_labels[a] == DUMMY || g.vertex_labels[b] == DUMMY)))
        .collect();
    let mut out = LabeledGraph {
        vertex_labels: keep.iter().map(|&v| g.vertex_labels[v]).collect(),
        edges: g
            .edges
            .iter()
            .filter_map(|&(a, b, l)| Some((*index.get(&a)?, *index.get(&b)?, l)))
            .collect(),
        half_edges: Vec::new(),
    };
    loop {
        let degree = |out: &LabeledGraph, v: usize| {
            out.edges.iter().map(|&(a, b, _)| usize::from(a == v) + usize::from(b == v)).sum::<usize>()
        };
        let Some(v) = (0..out.vertex_labels.len()).find(|&v| {
            had_dummy[v] && out.vertex_labels[v] == 0 && degree(&out, v) == 2 && !out.edges.iter().any(|&(a, b, _)| a == v && b == v)
        }) else {
            break;
        };
        let ends: Vec<(usize, usize, u64)> = out.edges.iter().copied().filter(|&(a, b, _)| a == v || b == v).collect();
        let other = |&(a, b, _): &(usize, usize, u64)| if a == v { b } else { a };
        let merged = (other(&ends[0]), other(&ends[1]), ends[0].2 + ends[1].2);
        out.edges.retain(|&(a, b, _)| a != v && b != v);
        out.edges.push(merged);
        // isolate v; it is removed below
        out.vertex_labels[v] = i64::MIN;
    }
    let keep: Vec<usize> = (0..out.vertex_labels.len()).filter(|&v| out.vertex_labels[v] != i64::MIN).collect();
    let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    LabeledGraph {
        vertex_labels: keep.iter().map(|&v| out.vertex_labels[v]).collect(),
        edges: out.edges.iter().map(|&(a, b, l)| (index[&a], index[&b], l)).collect(),
        half_edges: Vec::new(),
    }
}

/// The lexicographically least (vertex labels, upper-triangular cells) pair
/// over all orderings of the vertices. Multisets are compared as ascending
/// sequences, a proper prefix being smaller.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalName {
    pub vertex_labels: Vec<i64>,
    pub cells: Vec<Vec<u64>>,
}

fn cells_for(g: &LabeledGraph, order: &[usize]) -> Vec<Vec<u64>> {
    let n = order.len();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut matrix = vec![vec![Vec::new(); n]; n];
    for &(a, b, l) in &g.edges {
        let (i, j) = (pos[a].min(pos[b]), pos[a].max(pos[b]));
        matrix[i][j].push(l);
    }
    let mut cells = Vec::with_capacity(n * (n + 1) / 2);
    for (i, row) in matrix.into_iter().enumerate() {
        for mut cell in row.into_iter().skip(i) {
            cell.sort_unstable();
            cells.push(cell);
        }
    }
    cells
}

/// Canonical name of a graph, completing it first if it has half-edges.
pub fn canonical_name(g: &LabeledGraph) -> CanonicalName {
    let g = complete(g);
    let n = g.vertex_labels.len();
    let mut base: Vec<usize> = (0..n).collect();
    base.sort_by_key(|&v| (g.vertex_labels[v], v));
    let vertex_labels: Vec<i64> = base.iter().map(|&v| g.vertex_labels[v]).collect();
    // only orderings that keep the labels sorted can be minimal
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for &v in &base {
        match buckets.last_mut() {
            Some(b) if g.vertex_labels[b[0]] == g.vertex_labels[v] => b.push(v),
            _ => buckets.push(vec![v]),
        }
    }
    let mut best: Option<Vec<Vec<u64>>> = None;
    let mut order = Vec::with_capacity(n);
    search(&g, &mut buckets, 0, &mut order, &mut best);
    CanonicalName {
        vertex_labels,
        cells: best.unwrap_or_default(),
    }
}

fn search(
    g: &LabeledGraph,
    buckets: &mut Vec<Vec<usize>>,
    b: usize,
    order: &mut Vec<usize>,
    best: &mut Option<Vec<Vec<u64>>>,
) {
    if b == buckets.len() {
        let cells = cells_for(g, order);
        if best.as_ref().is_none_or(|cur| cells < *cur) {
            *best = Some(cells);
        }
        return;
    }
    permute(g, buckets, b, 0, order, best);
}

fn permute(
    g: &LabeledGraph,
    buckets: &mut Vec<Vec<usize>>,
    b: usize,
    k: usize,
    order: &mut Vec<usize>,
    best: &mut Option<Vec<Vec<u64>>>,
) {
    let len = buckets[b].len();
    if k == len {
        let start = order.len();
        order.extend_from_slice(&buckets[b]);
        search(g, buckets, b + 1, order, best);
        order.truncate(start);
        return;
    }
    for i in k..len {
        buckets[b].swap(k, i);
        permute(g, buckets, b, k + 1, order, best);
        buckets[b].swap(k, i);
    }
}

/// The name of a multicurve read on the closed surface obtained by filling
/// in every puncture.
pub fn closed_surface_name(g: &LabeledGraph) -> CanonicalName {
    canonical_name(&close_up(g))
}

impl fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.vertex_labels.iter().map(i64::to_string).collect();
        let cells: Vec<String> = self
            .cells
            .iter()
            .map(|c| {
                let items: Vec<String> = c.iter().map(u64::to_string).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "([{}], [{}])", labels.join(", "), cells.join(", "))
    }
}

impl FromStr for CanonicalName {
    type Err = TopotypeError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || TopotypeError::Parse(s.to_string());
        let s = s.trim().replace('\u{2212}', "-");
        let inner = s.strip_prefix("([").and_then(|r| r.strip_suffix("])")).ok_or_else(bad)?;
        let (labels, cells) = inner.split_once("], [").ok_or_else(bad)?;
        let vertex_labels = if labels.trim().is_empty() {
            Vec::new()
        } else {
            labels
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        let mut out = Vec::new();
        let mut rest = cells.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(bad)?;
            let end = body.find('}').ok_or_else(bad)?;
            let mut cell = if body[..end].trim().is_empty() {
                Vec::new()
            } else {
                body[..end]
                    .split(',')
                    .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?
            };
            cell.sort_unstable();
            out.push(cell);
            rest = body[end + 1..].trim_start().trim_start_matches(',').trim_start();
        }
        let n = vertex_labels.len();
        if out.len() != n * (n + 1) / 2 {
            return Err(bad());
        }
        Ok(CanonicalName {
            vertex_labels,
            cells: out,
        })
    }
}
