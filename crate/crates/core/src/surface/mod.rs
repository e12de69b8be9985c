//! Ideal triangulations of punctured surfaces and multicurves on them in
//! normal coordinates.
//!
//! Edges are numbered `0..E`. Each edge `e` has two sides: side `2e` runs
//! along the edge in its own direction, side `2e + 1` in reverse. A triangle
//! is a cyclic triple of sides; side `i` of a triangle runs from its vertex
//! `i` to vertex `i + 1`, and corner `i` sits at vertex `i`, between sides
//! `i - 1` and `i`. Every side belongs to exactly one triangle.

mod curve;
mod shorten;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dsu::Dsu;

pub use curve::{
    corner_weight, edge_link_curve, edge_link_curves, is_peripheral, trace_components, vertex_link,
    MulticurveCoords,
};
pub(crate) use curve::{corner_weights, Tracing};
pub use shorten::{
    detect_short, shorten, shorten_with, ShortComponent, ShortForm, ShortenOptions, Shortening,
    DEFAULT_MOVE_BUDGET,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("malformed triangulation: {0}")]
    Parse(String),
    #[error("inconsistent gluing: {0}")]
    Gluing(String),
    #[error("triangulation has genus {found_genus} with {found_punctures} punctures, declared S_{{{genus},{punctures}}}")]
    SurfaceMismatch {
        genus: usize,
        punctures: usize,
        found_genus: usize,
        found_punctures: usize,
    },
    #[error("component with V={vertices}, E={edges}, F={faces} has non-integral genus")]
    NonIntegralGenus {
        vertices: usize,
        edges: usize,
        faces: usize,
    },
    #[error("invalid normal coordinates: {0}")]
    InvalidCoords(String),
    #[error("edge {0} does not exist")]
    NoSuchEdge(usize),
    #[error("edge {0} cannot be flipped: both sides lie in one triangle")]
    Unflippable(usize),
    #[error("the link of edge {0} is not a single essential curve")]
    DegenerateLink(usize),
    #[error("shortening gave up after {moves} moves")]
    BudgetExhausted { moves: u64 },
}

pub type Result<T> = std::result::Result<T, SurfaceError>;

pub type Side = usize;

pub fn edge_of(side: Side) -> usize {
    side / 2
}

pub fn reverse(side: Side) -> Side {
    side ^ 1
}

/// Counts for one connected component of a triangulation. `chi` is the
/// Euler characteristic of the punctured surface, `F - E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerData {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub chi: i64,
    pub genus: usize,
    pub punctures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triangulation {
    triangles: Vec<[Side; 3]>,
    surface: Option<(usize, usize)>,
    aliases: BTreeMap<String, usize>,
    /// `location[side] = (triangle, position)`
    location: Vec<(usize, usize)>,
    /// vertex of corner `(t, i)` at index `3t + i`
    corner_vertex: Vec<usize>,
    num_vertices: usize,
}

impl Triangulation {
    /// Build from triples of sides. Each triple is stored rotated so that its
    /// smallest side comes first.
    pub fn new(mut triangles: Vec<[Side; 3]>) -> Result<Self> {
        for t in triangles.iter_mut() {
            let k = (0..3).min_by_key(|&i| t[i]).unwrap_or(0);
            t.rotate_left(k);
        }
        let f = triangles.len();
        if f == 0 {
            return Err(SurfaceError::Gluing("no triangles".into()));
        }
        if !(3 * f).is_multiple_of(2) {
            return Err(SurfaceError::Gluing(format!("{f} triangles cannot be glued in pairs")));
        }
        let sides = 3 * f;
        let mut location = vec![(usize::MAX, 0); sides];
        for (t, tri) in triangles.iter().enumerate() {
            for (i, &s) in tri.iter().enumerate() {
                if s >= sides {
                    return Err(SurfaceError::Gluing(format!(
                        "edge {} out of range for {} edges",
                        edge_of(s) + 1,
                        sides / 2
                    )));
                }
                if location[s].0 != usize::MAX {
                    return Err(SurfaceError::Gluing(format!(
                        "side {}{} used twice",
                        if s % 2 == 0 { "" } else { "-" },
                        edge_of(s) + 1
                    )));
                }
                location[s] = (t, i);
            }
        }
        let mut dsu = Dsu::new(sides);
        for (t, tri) in triangles.iter().enumerate() {
            for (i, &s) in tri.iter().enumerate() {
                let (u, j) = location[reverse(s)];
                // side s runs V_i -> V_{i+1}; its reverse runs V'_j -> V'_{j+1}
                dsu.union(3 * t + (i + 1) % 3, 3 * u + j, false);
                dsu.union(3 * t + i, 3 * u + (j + 1) % 3, false);
            }
        }
        let mut ids = BTreeMap::new();
        let corner_vertex: Vec<usize> = (0..sides)
            .map(|c| {
                let r = dsu.root(c);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect();
        Ok(Triangulation {
            triangles,
            surface: None,
            aliases: BTreeMap::new(),
            location,
            corner_vertex,
            num_vertices: ids.len(),
        })
    }

    /// Attach a declared surface `S_{g,n}`, checking it against the counts.
    pub fn with_surface(mut self, genus: usize, punctures: usize) -> Result<Self> {
        let data = self.euler_data()?;
        let mismatch = |d: Option<&EulerData>| SurfaceError::SurfaceMismatch {
            genus,
            punctures,
            found_genus: d.map_or(0, |d| d.genus),
            found_punctures: d.map_or(0, |d| d.punctures),
        };
        if data.len() != 1 {
            return Err(mismatch(None));
        }
        if data[0].genus != genus || data[0].punctures != punctures {
            return Err(mismatch(Some(&data[0])));
        }
        self.surface = Some((genus, punctures));
        Ok(self)
    }

    pub fn with_alias(mut self, name: &str, edge: usize) -> Result<Self> {
        if edge >= self.num_edges() {
            return Err(SurfaceError::NoSuchEdge(edge));
        }
        self.aliases.insert(name.to_string(), edge);
        Ok(self)
    }

    pub fn alias(&self, name: &str) -> Option<usize> {
        self.aliases.get(name).copied()
    }

    pub fn aliases(&self) -> &BTreeMap<String, usize> {
        &self.aliases
    }

    /// The declared `(genus, punctures)`, if any.
    pub fn surface(&self) -> Option<(usize, usize)> {
        self.surface
    }

    pub fn triangles(&self) -> &[[Side; 3]] {
        &self.triangles
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.triangles.len() * 3 / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// `(triangle, position)` of a side.
    pub fn locate(&self, side: Side) -> (usize, usize) {
        self.location[side]
    }

    pub fn corner_vertex(&self, t: usize, i: usize) -> usize {
        self.corner_vertex[3 * t + i]
    }

    /// Start and end vertex of edge `e`, in the direction of side `2e`.
    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        let (t, i) = self.location[2 * e];
        (self.corner_vertex(t, i), self.corner_vertex(t, (i + 1) % 3))
    }

    /// Number of ends of each edge at vertex `v`.
    pub fn ends_at(&self, v: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.num_edges()];
        for e in 0..self.num_edges() {
            let (a, b) = self.edge_ends(e);
            out[e] = u64::from(a == v) + u64::from(b == v);
        }
        out
    }

    /// Triangles grouped into connected components, each list ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = Dsu::new(self.num_triangles());
        for e in 0..self.num_edges() {
            dsu.union(self.location[2 * e].0, self.location[2 * e + 1].0, false);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for t in 0..self.num_triangles() {
            groups.entry(dsu.root(t)).or_default().push(t);
        }
        groups.into_values().collect()
    }

    /// Vertex, edge and face counts with genus and punctures, per component.
    pub fn euler_data(&self) -> Result<Vec<EulerData>> {
        self.components()
            .iter()
            .map(|tris| {
                let faces = tris.len();
                let edges = faces * 3 / 2;
                let mut verts: Vec<usize> = tris
                    .iter()
                    .flat_map(|&t| (0..3).map(move |i| (t, i)))
                    .map(|(t, i)| self.corner_vertex(t, i))
                    .collect();
                verts.sort_unstable();
                verts.dedup();
                euler_from_counts(verts.len(), edges, faces)
            })
            .collect()
    }

    pub fn is_flippable(&self, e: usize) -> bool {
        e < self.num_edges() && self.location[2 * e].0 != self.location[2 * e + 1].0
    }

    /// The two triangles around edge `e`, rotated so that they read
    /// `(e, a, b)` and `(~e, c, d)`.
    pub(crate) fn square(&self, e: usize) -> Result<([Side; 3], [Side; 3])> {
        if e >= self.num_edges() {
            return Err(SurfaceError::NoSuchEdge(e));
        }
        if !self.is_flippable(e) {
            return Err(SurfaceError::Unflippable(e));
        }
        let rot = |side: Side| {
            let (t, i) = self.location[side];
            let tri = self.triangles[t];
            [tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]]
        };
        Ok((rot(2 * e), rot(2 * e + 1)))
    }

    /// Replace edge `e` by the other diagonal of its square. The new diagonal
    /// keeps the label `e`; its direction is chosen so that flipping twice
    /// gives back the same triangulation.
    pub fn flip_edge(&self, e: usize) -> Result<Triangulation> {
        let ([se, a, b], [_, c, d]) = self.square(e)?;
        let (t1, _) = self.location[2 * e];
        let (t2, _) = self.location[2 * e + 1];
        let mut triangles = self.triangles.clone();
        // The square's sides read a, b, c, d; each choice of direction
        // rotates that reading by one step, in opposite senses.
        if a.min(c) < b.min(d) {
            triangles[t1] = [se, b, c];
            triangles[t2] = [reverse(se), d, a];
        } else {
            triangles[t1] = [se, d, a];
            triangles[t2] = [reverse(se), b, c];
        }
        let mut out = Triangulation::new(triangles)?;
        out.surface = self.surface;
        out.aliases = self.aliases.clone();
        Ok(out)
    }

    /// Flip edge `e`, carrying the multicurve along.
    pub fn flip(&self, e: usize, coords: &MulticurveCoords) -> Result<(Triangulation, MulticurveCoords)> {
        let w = shorten::flipped_weight(self, coords.weights(), e)?;
        let mut weights = coords.weights().to_vec();
        weights[e] = w;
        Ok((self.flip_edge(e)?, MulticurveCoords::new(weights)))
    }
}

pub(crate) fn euler_from_counts(vertices: usize, edges: usize, faces: usize) -> Result<EulerData> {
    let chi = faces as i64 - edges as i64;
    let twice_genus = 2 - chi - vertices as i64;
    if twice_genus < 0 || twice_genus % 2 != 0 {
        return Err(SurfaceError::NonIntegralGenus { vertices, edges, faces });
    }
    Ok(EulerData {
        vertices,
        edges,
        faces,
        chi,
        genus: (twice_genus / 2) as usize,
        punctures: vertices,
    })
}

fn parse_side(tok: &str, line: usize) -> Result<Side> {
    let v: i64 = tok
        .parse()
        .map_err(|_| SurfaceError::Parse(format!("line {line}: bad edge label {tok:?}")))?;
    if v == 0 {
        return Err(SurfaceError::Parse(format!("line {line}: edge labels start at 1")));
    }
    let e = (v.unsigned_abs() - 1) as usize;
    Ok(2 * e + usize::from(v < 0))
}

fn side_label(s: Side) -> String {
    let e = edge_of(s) + 1;
    if s.is_multiple_of(2) {
        e.to_string()
    } else {
        format!("-{e}")
    }
}

/// Text format:
///
/// ```text
/// # once-punctured torus
/// surface 1 1
/// 1 2 -3
/// 3 -1 -2
/// alias diagonal 3
/// ```
///
/// Edge labels are 1-based; a negative label is the edge traversed
/// backwards. The `surface g n` header is optional and checked when present.
impl FromStr for Triangulation {
    type Err = SurfaceError;

    fn from_str(text: &str) -> Result<Self> {
        let mut surface = None;
        let mut triangles = Vec::new();
        let mut aliases = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks[0] {
                "surface" => {
                    if toks.len() != 3 || surface.is_some() || !triangles.is_empty() {
                        return Err(SurfaceError::Parse(format!("line {line}: expected a single leading `surface g n`")));
                    }
                    let g = toks[1].parse().map_err(|_| SurfaceError::Parse(format!("line {line}: bad genus")))?;
                    let p = toks[2].parse().map_err(|_| SurfaceError::Parse(format!("line {line}: bad puncture count")))?;
                    surface = Some((g, p));
                }
                "alias" => {
                    if toks.len() != 3 {
                        return Err(SurfaceError::Parse(format!("line {line}: expected `alias NAME LABEL`")));
                    }
                    let side = parse_side(toks[2], line)?;
                    aliases.push((toks[1].to_string(), edge_of(side)));
                }
                _ => {
                    if toks.len() != 3 {
                        return Err(SurfaceError::Parse(format!("line {line}: a triangle needs three edge labels")));
                    }
                    let t = [parse_side(toks[0], line)?, parse_side(toks[1], line)?, parse_side(toks[2], line)?];
                    triangles.push(t);
                }
            }
        }
        let mut tri = Triangulation::new(triangles)?;
        if let Some((g, p)) = surface {
            tri = tri.with_surface(g, p)?;
        }
        for (name, e) in aliases {
            tri = tri.with_alias(&name, e)?;
        }
        Ok(tri)
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((g, n)) = self.surface {
            writeln!(f, "surface {g} {n}")?;
        }
        for t in &self.triangles {
            writeln!(f, "{} {} {}", side_label(t[0]), side_label(t[1]), side_label(t[2]))?;
        }
        for (name, e) in &self.aliases {
            writeln!(f, "alias {name} {}", e + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn torus() -> Triangulation {
        "surface 1 1\n1 2 -3\n3 -1 -2\n".parse().unwrap()
    }

    #[test]
    fn once_punctured_torus() {
        let t = torus();
        assert_eq!(t.num_vertices(), 1);
        let d = t.euler_data().unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].vertices, d[0].edges, d[0].faces, d[0].chi, d[0].genus), (1, 3, 2, -1, 1));
    }

    #[test]
    fn rejects_bad_gluings() {
        assert!(matches!("1 2 3\n1 -2 -3\n".parse::<Triangulation>(), Err(SurfaceError::Gluing(_))));
        assert!(matches!("1 2 -3\n3 -1 -4\n".parse::<Triangulation>(), Err(SurfaceError::Gluing(_))));
        assert!(matches!(
            "surface 0 3\n1 2 -3\n3 -1 -2\n".parse::<Triangulation>(),
            Err(SurfaceError::SurfaceMismatch { .. })
        ));
        assert!(matches!("1 0 2".parse::<Triangulation>(), Err(SurfaceError::Parse(_))));
    }

    #[test]
    fn text_round_trip() {
        let t: Triangulation = "# torus\nsurface 1 1\n1 2 -3\n3 -1 -2\nalias diag 3\n".parse().unwrap();
        assert_eq!(t.alias("diag"), Some(2));
        let back: Triangulation = t.to_string().parse().unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn flip_twice_is_identity() {
        let t = torus();
        for e in 0..3 {
            let once = t.flip_edge(e).unwrap();
            assert_eq!(once.num_vertices(), 1);
            assert_eq!(once.flip_edge(e).unwrap(), t);
        }
    }
}
