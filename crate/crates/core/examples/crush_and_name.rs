//! Crush a surface along a multicurve and name its topological type, on
//! the punctured surface and on the closed one.
//!
//!     cargo run --example crush_and_name -- 1,1,1,1,2,2,2,6,2,4,4,4,4,4,4

use std::path::Path;

use trackstat::surface::shorten;
use trackstat::topotype::{canonical_name, close_up, closed_surface_name, complete, crush, partition_graph};
use trackstat::tracks::{CarriedWeights, TrainTrack};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let weights = std::env::args().nth(1).unwrap_or_else(|| "1,1,1,1,2,2,2,6,2,4,4,4,4,4,4".into());
    let w = weights.split(',').map(str::parse).collect::<Result<Vec<u64>, _>>()?;

    let t = TrainTrack::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/s2.track"))?;
    let c = t.to_multicurve(&CarriedWeights(w))?;
    let cr = crush(&shorten(t.base(), &c)?.short_form)?;

    for (i, k) in cr.components.iter().enumerate() {
        println!("piece {i}: genus {}, {} punctures, chi {}", k.genus, k.punctures, k.chi);
    }
    for k in &cr.classes {
        println!("class of multiplicity {} between pieces {:?}", k.multiplicity, k.sides);
    }

    let g = partition_graph(&cr);
    println!("partition graph {g:?}");
    println!("completed {:?}", complete(&g));
    println!("closed up {:?}", close_up(&g));
    println!("name on the punctured surface {}", canonical_name(&g));
    println!("name on the closed surface    {}", closed_surface_name(&g));
    Ok(())
}
