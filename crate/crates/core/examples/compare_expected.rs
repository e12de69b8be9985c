//! Test counts of primitive multicurves on the closed genus-2 surface
//! against the expected distribution in `data/s2_expected.csv`.

use std::collections::BTreeMap;
use std::path::Path;

use trackstat::experiment::{compare, load_expected};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let expected = load_expected(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/s2_expected.csv"))?;

    // counts from a large sampling run
    let large_run: BTreeMap<String, u64> = [
        ("([0], [{1,1}])", 720_649),
        ("([1], [{1}])", 600_700),
        ("([0, 0], [{1}, {1}, {1}])", 59_921),
        ("([0, 0], [{}, {1,1,1}, {}])", 40_053),
        ("([0, 1], [{1}, {1}, {}])", 29_956),
        ("([1, 1], [{}, {1}, {}])", 12_496),
    ]
    .into_iter()
    .map(|(n, c)| (n.to_string(), c))
    .collect();
    println!("{}", compare(&large_run, &expected)?);

    let flat: BTreeMap<String, u64> = expected.iter().map(|(n, _)| (n.clone(), 1000)).collect();
    println!("{}", compare(&flat, &expected)?);
    Ok(())
}
