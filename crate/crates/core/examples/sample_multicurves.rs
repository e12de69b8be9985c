//! Draw uniform random multicurves carried by a track and show their
//! branch weights, normal coordinates and components.
//!
//!     cargo run --example sample_multicurves -- data/s12.track 500

use std::sync::Arc;

use trackstat::experiment::{sample_rng, Sampler, SamplerKind};
use trackstat::lattice::Counter;
use trackstat::surface::trace_components;
use trackstat::tracks::TrainTrack;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/s12.track").into());
    let length: u64 = args.next().map_or(Ok(500), |s| s.parse())?;

    let t = TrainTrack::load(path.as_ref())?;
    let sampler = Sampler::new(Arc::new(t), length, SamplerKind::Cone)?;
    println!("{} carried multicurves of length at most {length}", sampler.count());

    let mut counter = Counter::new();
    for i in 0..5 {
        let (w, c) = sampler.sample(&mut sample_rng(0, i), &mut counter)?;
        let parts = trace_components(sampler.track().base(), &c)?;
        println!("weights {:?}", w.0);
        println!("  coordinates {:?}, {} component(s)", c.weights(), parts.len());
    }
    Ok(())
}
