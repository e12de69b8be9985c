//! Report the shape of every shipped train track: branches, carried
//! dimension, and the number of carried multicurves up to a length.

use std::path::Path;

use trackstat::tracks::TrainTrack;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for name in ["s11.track", "s12.track", "s06.track", "s2.track", "s21.track"] {
        let t = TrainTrack::load(&data.join(name))?;
        let e = &t.base().euler_data()?[0];
        let cone = t.cone()?;
        println!(
            "{name}: genus {} with {} punctures{}, {} branches, dimension {} (expected {:?}), {} points up to length 1000",
            e.genus,
            e.punctures,
            if t.is_closed() { " (named closed)" } else { "" },
            t.num_branches(),
            t.carried_dimension(),
            t.expected_dimension(),
            cone.truncate(1000).count(),
        );
    }
    Ok(())
}
