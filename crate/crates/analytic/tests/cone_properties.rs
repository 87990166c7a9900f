use carrier_analytic::cone::{from_f64, sup_norm, theta_lower_bound, to_f64, Cone, ThetaGrid};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cone_strategy(dim: usize) -> impl Strategy<Value = Cone> {
    let generator = prop::collection::vec(-4i64..=4, dim);
    let piece = prop::collection::vec(generator, 1..=3);
    prop::collection::vec(piece, 1..=2).prop_map(move |pieces| {
        let pieces: Vec<Vec<Vec<BigRational>>> = pieces
            .into_iter()
            .map(|p| p.into_iter().map(|g| g.into_iter().map(|x| BigRational::from_integer(x.into())).collect()).collect())
            .collect();
        Cone::new(dim, pieces).expect("valid cone")
    })
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0f64..8.0, dim)
}

fn dyadic(dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-64i64..=64, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distance_is_one_lipschitz(k in cone_strategy(3), x in point(3), y in point(3)) {
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let gap = (k.distance(&x).unwrap() - k.distance(&y).unwrap()).abs();
        prop_assert!(gap <= sup_norm(&diff) + 1e-9);
    }

    #[test]
    fn distance_is_positively_homogeneous(k in cone_strategy(3), x in point(3), t in 0.0f64..10.0) {
        let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
        let (d, dt) = (k.distance(&x).unwrap(), k.distance(&tx).unwrap());
        prop_assert!((dt - t * d).abs() <= 1e-9 * (1.0 + t * sup_norm(&x)));
    }

    #[test]
    fn distance_vanishes_on_the_cone(k in cone_strategy(2), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let x = k.sample(&mut rng);
            prop_assert!(k.distance(&x).unwrap() <= 1e-9 * (1.0 + sup_norm(&x)));
        }
    }

    #[test]
    fn both_distance_routes_agree(k in cone_strategy(3), x in dyadic(3)) {
        let xf: Vec<f64> = x.iter().map(|&v| v as f64 / 8.0).collect();
        let xq: Vec<BigRational> = xf.iter().map(|&v| from_f64(v)).collect();
        let exact = to_f64(&k.distance_exact(&xq).unwrap());
        prop_assert!((k.distance(&xf).unwrap() - exact).abs() <= 1e-9);
    }

    #[test]
    fn neighborhood_contains_the_cone(k in cone_strategy(2), x in dyadic(2), eps in 1i64..8) {
        let nb = k.conic_neighborhood(&BigRational::new(eps.into(), 8.into()));
        let xf: Vec<f64> = x.iter().map(|&v| v as f64 / 8.0).collect();
        prop_assert!(nb.distance(&xf).unwrap() <= k.distance(&xf).unwrap() + 1e-9);
    }

    #[test]
    fn proper_functional_is_at_least_one_on_generators(k in cone_strategy(3)) {
        if let carrier_analytic::cone::Properness::Proper { functional } = k.is_proper() {
            for p in k.pieces() {
                for g in p.generators() {
                    let m = g.iter().map(|v| v.abs()).max().unwrap();
                    if m.is_zero() {
                        continue;
                    }
                    let value: BigRational = functional.iter().zip(g).map(|(a, b)| a * b).sum();
                    prop_assert!(value / m >= BigRational::from_integer(1.into()));
                }
            }
        }
    }
}

#[test]
fn theta_bound_holds_on_sampled_points() {
    let pairs = [
        (Cone::from_i64(2, &[&[&[1, 0], &[3, 1]]]).unwrap(), Cone::from_i64(2, &[&[&[1, 3], &[0, 1]]]).unwrap()),
        (Cone::from_i64(2, &[&[&[1, 0]]]).unwrap(), Cone::from_i64(2, &[&[&[0, 1]], &[&[-1, -1]]]).unwrap()),
        (
            Cone::from_i64(3, &[&[&[4, 1, 1], &[4, 0, 1], &[4, 1, 0]]]).unwrap(),
            Cone::from_i64(3, &[&[&[1, 4, 4], &[0, 4, 3], &[0, 3, 4]]]).unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (k1, k2) in &pairs {
        let bound = theta_lower_bound(k1, k2, ThetaGrid::default()).unwrap();
        assert!(bound.theta > 0.0 && bound.theta <= bound.grid_min);
        for _ in 0..2000 {
            let x = k2.sample(&mut rng);
            assert!(k1.distance(&x).unwrap() >= bound.theta * sup_norm(&x) - 1e-12);
        }
    }
}
