//! Build a labeled graph by hand, complete it and compute its canonical
//! name. Relabeling the vertices leaves the name unchanged.

use trackstat::topotype::{canonical_name, complete, CanonicalName, LabeledGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a genus-0 piece with two punctures and a genus-1 piece with one,
    // joined along two parallel curves, plus a curve from the first to itself
    let g = LabeledGraph {
        vertex_labels: vec![0, 1],
        edges: vec![(0, 1, 2), (0, 0, 1)],
        half_edges: vec![(0, 0), (0, 0), (1, 0)],
    };
    println!("completed: {:?}", complete(&g));
    let name = canonical_name(&g);
    println!("name: {name}");

    let swapped = LabeledGraph {
        vertex_labels: vec![1, 0],
        edges: vec![(1, 1, 1), (0, 1, 2)],
        half_edges: vec![(1, 0), (0, 0), (1, 0)],
    };
    println!("after relabeling: {}", canonical_name(&swapped));

    let parsed: CanonicalName = "([−1, 0, 1], [{}, {0, 0}, {0}, {1}, {2}, {}])".parse()?;
    println!("parsed back equal: {}", parsed == name);
    Ok(())
}
