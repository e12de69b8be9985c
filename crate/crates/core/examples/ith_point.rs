//! Walk the lattice points of a triangle in lexicographic order, then draw
//! a few uniformly at random.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trackstat::lattice::{Counter, LinearConstraint, Polytope};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Polytope::new(
        2,
        vec![
            LinearConstraint::ge(&[1, 0], 1)?,
            LinearConstraint::ge(&[0, 1], 1)?,
            LinearConstraint::le(&[1, 1], 5)?,
        ],
    )?;

    let mut counter = Counter::new();
    let n = counter.count(&p)?;
    let n: u64 = n.value().try_into()?;
    for i in 0..n {
        let x = counter.ith_point(&p, &BigUint::from(i))?;
        println!("{i}: {:?}", x.to_i64s().unwrap());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        println!("sample {:?}", counter.sample_uniform(&p, &mut rng)?.to_i64s().unwrap());
    }
    Ok(())
}
