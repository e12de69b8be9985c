//! Flip a triangulation until a multicurve is short, and show the flip
//! sequence and the edges its components end up parallel to.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trackstat::experiment::sample_multicurve;
use trackstat::surface::shorten;
use trackstat::tracks::TrainTrack;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/s2.track");
    let t = TrainTrack::load(&path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = sample_multicurve(&t, 2000, &mut rng)?;
    println!("start: {:?} (total weight {})", c.weights(), c.total_weight());

    // a single flip, and back
    let e = (0..t.base().num_edges()).find(|&e| t.base().is_flippable(e)).unwrap();
    let (t1, c1) = t.base().flip(e, &c)?;
    let (_, c2) = t1.flip(e, &c1)?;
    println!("flip edge {e}: {:?}, flipped back equal: {}", c1.weights(), c2 == c);

    let s = shorten(t.base(), &c)?;
    println!("{} flips, weights {:?}", s.moves.len(), s.weights);
    for k in &s.short_form.components {
        println!("  multiplicity {} along edge {}: {:?}", k.multiplicity, k.edge, k.curve.weights());
    }
    Ok(())
}
