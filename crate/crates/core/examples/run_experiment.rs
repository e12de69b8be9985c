//! Sample curves on the twice-punctured torus, tally their types and
//! estimate the ratio between the two types.
//!
//!     cargo run --release --example run_experiment -- 2000

use std::path::Path;

use trackstat::experiment::{run, ExperimentConfig, Filter};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples: u64 = std::env::args().nth(1).map_or(Ok(2000), |s| s.parse())?;
    let mut config = ExperimentConfig::new(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/s12.track"), 1000, samples, 0);
    config.filter = Filter::Curves;
    config.workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    let report = run(&config)?;
    println!(
        "{} drawn, {} curves, {} filtered out, {} excluded",
        report.drawn, report.retained, report.filtered_out, report.errored
    );
    for row in report.rows() {
        println!("{:>8} {:.4}  {}", row.count, row.fraction, row.name);
    }
    let rows = report.rows();
    if rows.len() >= 2 {
        let k = report.ratio(&rows[0].name, &rows[1].name, 0.99);
        println!("K = {:.2}, 99% interval [{:.2}, {:.2}]", k.value, k.low, k.high);
    }
    Ok(())
}
