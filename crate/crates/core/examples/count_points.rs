//! Count the lattice points of a polytope and print its bounding box.
//!
//!     cargo run --example count_points -- 12

use trackstat::lattice::{LinearConstraint, Polytope};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l: i64 = std::env::args().nth(1).map_or(Ok(8), |s| s.parse())?;

    // x1 + x2 = x3, every x_i >= 1, total at most l
    let p = Polytope::new(
        3,
        vec![
            LinearConstraint::eq(&[1, 1, -1], 0)?,
            LinearConstraint::ge(&[1, 0, 0], 1)?,
            LinearConstraint::ge(&[0, 1, 0], 1)?,
            LinearConstraint::ge(&[0, 0, 1], 1)?,
            LinearConstraint::le(&[1, 1, 1], l)?,
        ],
    )?;

    for (i, b) in p.bounding_box()?.iter().enumerate() {
        println!("x{} in [{}, {}]", i + 1, b.lower, b.upper);
    }
    println!("{} lattice points", p.count_points()?.value());
    println!("complexity {:.3}", p.complexity());
    Ok(())
}
