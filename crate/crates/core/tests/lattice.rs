use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use trackstat::lattice::cone::OpenCone;
use trackstat::lattice::{Counter, IntPoint, LatticeError, LinearConstraint, Polytope};

fn triangle() -> Polytope {
    Polytope::new(
        2,
        vec![
            LinearConstraint::ge(&[1, 0], 1).unwrap(),
            LinearConstraint::ge(&[0, 1], 1).unwrap(),
            LinearConstraint::le(&[1, 1], 5).unwrap(),
        ],
    )
    .unwrap()
}

fn switch_polytope(l: i64) -> Polytope {
    Polytope::new(
        3,
        vec![
            LinearConstraint::eq(&[1, 1, -1], 0).unwrap(),
            LinearConstraint::ge(&[1, 0, 0], 1).unwrap(),
            LinearConstraint::ge(&[0, 1, 0], 1).unwrap(),
            LinearConstraint::ge(&[0, 0, 1], 1).unwrap(),
            LinearConstraint::le(&[1, 1, 1], l).unwrap(),
        ],
    )
    .unwrap()
}

/// Every lattice point of the box `[lo, hi]^D` that satisfies `p`, sorted.
fn brute_force(p: &Polytope, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let d = p.ambient_dim();
    let mut out = Vec::new();
    let mut x = vec![lo; d];
    loop {
        if p.contains(&IntPoint::from_i64s(&x)).unwrap() {
            out.push(x.clone());
        }
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if x[i] < hi {
                x[i] += 1;
                break;
            }
            x[i] = lo;
        }
    }
}

fn count(p: &Polytope) -> u64 {
    p.count_points().unwrap().value().try_into().unwrap()
}

#[test]
fn contains_examples() {
    let t = triangle();
    assert!(t.contains(&IntPoint::from_i64s(&[1, 1])).unwrap());
    assert!(!t.contains(&IntPoint::from_i64s(&[5, 1])).unwrap());
    assert!(switch_polytope(100).contains(&IntPoint::from_i64s(&[1, 1, 2])).unwrap());
    assert!(matches!(
        t.contains(&IntPoint::from_i64s(&[1])),
        Err(LatticeError::DimensionMismatch { .. })
    ));
}

#[test]
fn bounding_box_examples() {
    let b = triangle().bounding_box().unwrap();
    assert_eq!((b[0].lower.clone(), b[0].upper.clone()), (1.into(), 4.into()));
    assert_eq!((b[1].lower.clone(), b[1].upper.clone()), (1.into(), 4.into()));

    let pinned = Polytope::new(1, vec![LinearConstraint::eq(&[1], 3).unwrap()]).unwrap();
    let b = pinned.bounding_box().unwrap();
    assert_eq!((b[0].lower.clone(), b[0].upper.clone()), (3.into(), 3.into()));

    let b = switch_polytope(8).bounding_box().unwrap();
    let pairs: Vec<(i64, i64)> = b
        .iter()
        .map(|iv| (iv.lower.clone().try_into().unwrap(), iv.upper.clone().try_into().unwrap()))
        .collect();
    // min/max of each coordinate over the enumerated points
    let pts = brute_force(&switch_polytope(8), 0, 8);
    for (d, &(lo, hi)) in pairs.iter().enumerate() {
        assert_eq!(lo, pts.iter().map(|p| p[d]).min().unwrap());
        assert_eq!(hi, pts.iter().map(|p| p[d]).max().unwrap());
    }
    assert_eq!(pairs, vec![(1, 3), (1, 3), (2, 4)]);

    let open = Polytope::new(1, vec![LinearConstraint::ge(&[1], 0).unwrap()]).unwrap();
    assert_eq!(open.bounding_box().unwrap_err(), LatticeError::Unbounded);
    assert_eq!(open.count_points().unwrap_err(), LatticeError::Unbounded);
}

#[test]
fn count_examples() {
    assert_eq!(count(&triangle()), brute_force(&triangle(), -2, 8).len() as u64);
    assert_eq!(count(&triangle()), 10);
    let empty = Polytope::new(
        1,
        vec![LinearConstraint::ge(&[1], 1).unwrap(), LinearConstraint::le(&[1], 0).unwrap()],
    )
    .unwrap();
    assert_eq!(count(&empty), 0);
    let oracle = (1..=4).flat_map(|a| (1..=4).map(move |b| (a, b))).filter(|(a, b)| a + b <= 4).count();
    assert_eq!(count(&switch_polytope(8)), oracle as u64);
    assert_eq!(oracle, 6);
}

#[test]
fn intersect_examples() {
    let t = triangle();
    let cut = t.intersect(LinearConstraint::lt(&[1, 0], 2).unwrap()).unwrap();
    let pts = brute_force(&cut, 0, 6);
    assert_eq!(pts, vec![vec![1, 1], vec![1, 2], vec![1, 3], vec![1, 4]]);
    assert_eq!(count(&cut), 4);

    let same = t.intersect(LinearConstraint::vacuous(2)).unwrap();
    assert_eq!(brute_force(&same, 0, 6), brute_force(&t, 0, 6));
    assert_eq!(count(&same), 10);

    let below = t.intersect(LinearConstraint::lt(&[1, 0], 1).unwrap()).unwrap();
    assert_eq!(count(&below), 0);
}

#[test]
fn ith_point_examples() {
    let t = triangle();
    assert_eq!(t.ith_point(&BigUint::from(0u8)).unwrap(), IntPoint::from_i64s(&[1, 1]));
    let sorted = brute_force(&t, 0, 6);
    assert_eq!(sorted[4], vec![2, 1]);
    assert_eq!(t.ith_point(&BigUint::from(4u8)).unwrap(), IntPoint::from_i64s(&[2, 1]));
    let pinned = Polytope::new(1, vec![LinearConstraint::eq(&[1], 3).unwrap()]).unwrap();
    assert_eq!(pinned.ith_point(&BigUint::from(0u8)).unwrap(), IntPoint::from_i64s(&[3]));
    assert!(matches!(
        t.ith_point(&BigUint::from(10u8)),
        Err(LatticeError::IndexOutOfRange { .. })
    ));
}

#[test]
fn sampling_singleton_and_empty() {
    let pinned = Polytope::new(1, vec![LinearConstraint::eq(&[1], 3).unwrap()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        assert_eq!(pinned.sample_uniform(&mut rng).unwrap(), IntPoint::from_i64s(&[3]));
    }
    let empty = triangle().intersect(LinearConstraint::lt(&[1, 0], 1).unwrap()).unwrap();
    assert_eq!(empty.sample_uniform(&mut rng).unwrap_err(), LatticeError::Empty);
}

fn chi_square_p(observed: &[u64], total: u64) -> f64 {
    let k = observed.len() as f64;
    let expected = total as f64 / k;
    let stat: f64 = observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    1.0 - ChiSquared::new(k - 1.0).unwrap().cdf(stat)
}

#[test]
fn sampling_is_uniform() {
    let t = triangle();
    let points = brute_force(&t, 0, 6);
    let mut counter = Counter::new();
    let mut rng = ChaCha8Rng::seed_from_u64(20240501);
    let mut hist: HashMap<Vec<i64>, u64> = HashMap::new();
    let n = 50_000;
    for _ in 0..n {
        let p = counter.sample_uniform(&t, &mut rng).unwrap().to_i64s().unwrap();
        *hist.entry(p).or_default() += 1;
    }
    let observed: Vec<u64> = points.iter().map(|p| hist.get(p).copied().unwrap_or(0)).collect();
    assert_eq!(hist.len(), points.len());
    let p = chi_square_p(&observed, n);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn sampling_is_deterministic() {
    let t = switch_polytope(30);
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).map(|_| t.sample_uniform(&mut rng).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(7), draw(7));
    assert_ne!(draw(7), draw(8));
}

#[test]
fn complexity_examples() {
    let zero = Polytope::new(2, vec![LinearConstraint::vacuous(2)]).unwrap();
    assert_eq!(zero.complexity(), 0.0);
    let x2 = Polytope::new(1, vec![LinearConstraint::ge(&[1], 2).unwrap()]).unwrap();
    assert!((x2.complexity() - 2f64.ln()).abs() < 1e-12);
    assert!((triangle().complexity() - 5f64.ln()).abs() < 1e-12);
}

#[test]
fn text_dump_round_trips() {
    let p = switch_polytope(8);
    let text = p.to_text();
    assert!(text.lines().next().unwrap().contains("  =  "));
    let back: Polytope = text.parse().unwrap();
    assert_eq!(back, p);
}

#[test]
fn cone_index_matches_lexicographic_counting() {
    // two switches: x1 + x2 = x3, x3 = x4 + x5
    let eqs = vec![vec![1, 1, -1, 0, 0], vec![0, 0, 1, -1, -1]];
    let cone = Arc::new(OpenCone::new(&eqs, &[1; 5]).unwrap());
    for l in [0u64, 5, 6, 11, 17, 24] {
        let mut constraints: Vec<LinearConstraint> =
            eqs.iter().map(|r| LinearConstraint::eq(r, 0).unwrap()).collect();
        for d in 0..5 {
            let mut e = vec![0; 5];
            e[d] = 1;
            constraints.push(LinearConstraint::ge(&e, 1).unwrap());
        }
        constraints.push(LinearConstraint::le(&[1; 5], l as i64).unwrap());
        let p = Polytope::new(5, constraints).unwrap();
        let t = cone.truncate(l);
        assert_eq!(t.count() as u64, count(&p), "L = {l}");
        let mut from_cone: Vec<IntPoint> = (0..t.count())
            .map(|i| IntPoint::from_i64s(&t.point(i).unwrap()))
            .collect();
        from_cone.sort();
        assert_eq!(from_cone, Counter::new().enumerate(&p).unwrap());
    }
}

fn arb_polytope() -> impl Strategy<Value = Polytope> {
    let row = (prop::collection::vec(-3i64..=3, 3), -4i64..=6);
    (prop::collection::vec(row, 0..4), prop::bool::ANY).prop_map(|(rows, with_eq)| {
        // keep it inside a known box so the oracle can enumerate it
        let mut cs = Vec::new();
        for d in 0..3 {
            let mut e = vec![0; 3];
            e[d] = 1;
            cs.push(LinearConstraint::ge(&e, -3).unwrap());
            cs.push(LinearConstraint::le(&e, 4).unwrap());
        }
        for (i, (a, b)) in rows.into_iter().enumerate() {
            if a.iter().all(|&x| x == 0) {
                continue;
            }
            let c = if with_eq && i == 0 {
                LinearConstraint::eq(&a, b % 3).unwrap()
            } else {
                LinearConstraint::ge(&a, -b).unwrap()
            };
            cs.push(c);
        }
        Polytope::new(3, cs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_equivalence(p in arb_polytope()) {
        let oracle = brute_force(&p, -3, 4);
        prop_assert_eq!(count(&p), oracle.len() as u64);
    }

    #[test]
    fn slice_additivity(p in arb_polytope(), d in 0usize..3, g in -4i64..6) {
        let mut e = vec![0; 3];
        e[d] = 1;
        let lower = p.intersect(LinearConstraint::lt(&e, g).unwrap()).unwrap();
        let upper = p.intersect(LinearConstraint::ge(&e, g).unwrap()).unwrap();
        prop_assert_eq!(count(&p), count(&lower) + count(&upper));
    }

    #[test]
    fn enumeration_consistency(p in arb_polytope()) {
        let oracle = brute_force(&p, -3, 4);
        let mut counter = Counter::new();
        for (i, q) in oracle.iter().enumerate() {
            let got = counter.ith_point(&p, &BigUint::from(i)).unwrap();
            prop_assert_eq!(got.to_i64s().unwrap(), q.clone());
        }
    }

    #[test]
    fn monotone_under_intersection(p in arb_polytope(), a in prop::collection::vec(-2i64..=2, 3), b in -3i64..3) {
        prop_assume!(a.iter().any(|&x| x != 0));
        let q = p.intersect(LinearConstraint::ge(&a, b).unwrap()).unwrap();
        prop_assert!(count(&q) <= count(&p));
    }

    #[test]
    fn determinism(p in arb_polytope(), seed in any::<u64>()) {
        prop_assume!(count(&p) > 0);
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| p.sample_uniform(&mut rng).unwrap()).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(), draw());
    }

    #[test]
    fn cone_count_matches_brute_force(w in prop::collection::vec(1u64..=3, 4), l in 0u64..30) {
        // x1 + x2 = x3 + x4 with weighted length
        let cone = Arc::new(OpenCone::new(&[vec![1, 1, -1, -1]], &w).unwrap());
        let t = cone.truncate(l);
        let mut brute = 0u128;
        for a in 1..=30i64 { for b in 1..=30i64 { for c in 1..=30i64 {
            let d = a + b - c;
            if d >= 1 && (a as u64) * w[0] + (b as u64) * w[1] + (c as u64) * w[2] + (d as u64) * w[3] <= l {
                brute += 1;
            }
        }}}
        prop_assert_eq!(t.count(), brute);
        let mut pts: Vec<Vec<i64>> = (0..t.count()).map(|i| t.point(i).unwrap()).collect();
        let n = pts.len();
        pts.sort();
        pts.dedup();
        prop_assert_eq!(pts.len(), n);
    }
}
