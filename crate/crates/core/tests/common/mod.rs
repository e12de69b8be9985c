#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use trackstat::topotype::{CanonicalName, LabeledGraph};
use trackstat::tracks::TrainTrack;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn track(name: &str) -> TrainTrack {
    TrainTrack::load(&data(name)).unwrap()
}

pub fn shipped() -> Vec<TrainTrack> {
    ["s11.track", "s12.track", "s06.track", "s2.track", "s21.track"]
        .into_iter()
        .map(track)
        .collect()
}

/// Branch weights whose multicurves have the listed names, found by hand
/// and by search. Closed-surface names for `s2.track`.
pub const REPRESENTATIVES: [(&str, &str, &[u64]); 10] = [
    ("s2.track", "([0], [{1,1}])", &[1, 1, 1, 1, 2, 2, 1, 1, 3, 2, 2, 2, 1, 1, 3]),
    ("s2.track", "([1], [{1}])", &[1, 1, 1, 1, 2, 2, 2, 1, 2, 1, 1, 2, 2, 1, 1]),
    ("s2.track", "([0, 0], [{1}, {1}, {1}])", &[1, 1, 1, 1, 2, 2, 2, 4, 2, 3, 4, 3, 3, 3, 4]),
    ("s2.track", "([0, 0], [{}, {1,1,1}, {}])", &[2, 2, 2, 2, 4, 4, 3, 1, 5, 3, 1, 3, 2, 2, 2]),
    ("s2.track", "([0, 1], [{1}, {1}, {}])", &[3, 1, 3, 1, 4, 4, 3, 1, 5, 3, 2, 3, 2, 2, 3]),
    ("s2.track", "([1, 1], [{}, {1}, {}])", &[2, 2, 2, 2, 4, 4, 4, 2, 4, 3, 3, 3, 3, 3, 3]),
    (
        "s06.track",
        "([-1, 0, 0], [{}, {0,0,0}, {0,0,0}, {}, {1}, {}])",
        &[3, 2, 2, 2, 4, 1, 3, 2, 2, 3, 1, 2, 1, 1, 2, 1, 1, 1],
    ),
    (
        "s06.track",
        "([-1, 0, 0], [{}, {0,0}, {0,0,0,0}, {}, {1}, {}])",
        &[4, 2, 2, 4, 6, 1, 4, 3, 3, 3, 2, 1, 2, 1, 2, 1, 2, 1],
    ),
    ("s12.track", "([-1, 0, 1], [{}, {0,0}, {}, {}, {1}, {}])", &[2, 2, 1, 1, 1, 1, 1, 1, 2, 2]),
    ("s12.track", "([-1, 0], [{}, {0,0}, {1}])", &[3, 2, 1, 1, 1, 1, 2, 1, 3, 2]),
];

/// `sum (2 - 2g - degree)` over the non-dummy vertices of a name. This is
/// the Euler characteristic of the surface the name describes.
pub fn chi_of_name(name: &CanonicalName) -> i64 {
    let n = name.vertex_labels.len();
    let mut degree = vec![0i64; n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let ends = name.cells[k].len() as i64;
            degree[i] += ends;
            degree[j] += ends;
            k += 1;
        }
    }
    (0..n)
        .filter(|&i| name.vertex_labels[i] >= 0)
        .map(|i| 2 - 2 * name.vertex_labels[i] - degree[i])
        .sum()
}

/// Components of the multicurve a name describes, with multiplicity.
pub fn components_of_name(name: &CanonicalName) -> u64 {
    name.cells.iter().flatten().sum()
}

pub fn random_graph(rng: &mut ChaCha8Rng) -> LabeledGraph {
    let n = rng.gen_range(1..=6);
    let vertex_labels: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=2)).collect();
    let edges = (0..rng.gen_range(0..=8))
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..=3)))
        .collect();
    let half_edges = (0..rng.gen_range(0..=3)).map(|_| (rng.gen_range(0..n), 0)).collect();
    LabeledGraph {
        vertex_labels,
        edges,
        half_edges,
    }
}

/// Relabel vertices, reorder edges and swap edge ends at random.
pub fn permuted(g: &LabeledGraph, rng: &mut ChaCha8Rng) -> LabeledGraph {
    let n = g.vertex_labels.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut labels = vec![0; n];
    for (v, &p) in perm.iter().enumerate() {
        labels[p] = g.vertex_labels[v];
    }
    let mut edges: Vec<(usize, usize, u64)> = g
        .edges
        .iter()
        .map(|&(a, b, l)| if rng.gen() { (perm[a], perm[b], l) } else { (perm[b], perm[a], l) })
        .collect();
    edges.shuffle(rng);
    let mut half_edges: Vec<(usize, u64)> = g.half_edges.iter().map(|&(v, l)| (perm[v], l)).collect();
    half_edges.shuffle(rng);
    LabeledGraph {
        vertex_labels: labels,
        edges,
        half_edges,
    }
}
