mod common;

use carrier_core::corpus::{random_family, random_hereditary, random_monotone_map};
use carrier_core::lattice::{validate_quasi_lattice, ElementSet};
use carrier_core::linalg::{is_zero_vec, unit_vec};
use carrier_core::localization::{check_prelocalizable, random_regular_morphism};
use carrier_core::system::{connecting_map, pushforward, pushforward_morphism, InductiveSystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn nested_sets(rng: &mut ChaCha8Rng, x: &InductiveSystem) -> (ElementSet, ElementSet, ElementSet) {
    let ql = validate_quasi_lattice(x.index()).unwrap();
    let a = random_hereditary(rng, &ql, 2);
    let b: ElementSet = a.union(&random_hereditary(rng, &ql, 2)).copied().collect();
    let c: ElementSet = b.union(&random_hereditary(rng, &ql, 2)).copied().collect();
    (a, b, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn links_compose(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3, 4);
        let (_, y, _) = random_regular_morphism(&mut rng, &fam, 2, true).unwrap();
        let p = y.index();
        for (a, b) in p.comparable_pairs() {
            for c in 0..y.len() {
                if p.leq(b, c) {
                    let composed = y.link(b, c).unwrap().mul(y.link(a, b).unwrap()).unwrap();
                    prop_assert_eq!(&composed, y.link(a, c).unwrap());
                }
            }
        }
    }

    #[test]
    fn relations_vanish_in_the_colimit(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3, 4);
        let (_, y, _) = random_regular_morphism(&mut rng, &fam, 2, true).unwrap();
        let (set, _, _) = nested_sets(&mut rng, &y);
        let col = y.colimit(&set).unwrap();
        prop_assert_eq!(col.dim(), common::member_span(&y, &set).dim() - common::relation_span(&y, &set).dim());
        prop_assert_eq!(&col.relations, &common::relation_span(&y, &set));
        for &a in &set {
            for &b in &set {
                if y.index().leq(a, b) {
                    for k in 0..y.dim(a) {
                        let s = y.sigma(&unit_vec(y.dim(a), k), a, b).unwrap();
                        prop_assert!(is_zero_vec(&col.project(&s.to_dense(&y).unwrap()).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn connecting_maps_compose(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3, 4);
        let (_, y, _) = random_regular_morphism(&mut rng, &fam, 2, false).unwrap();
        let (a, b, c) = nested_sets(&mut rng, &y);
        let (ca, cb, cc) = (y.colimit(&a).unwrap(), y.colimit(&b).unwrap(), y.colimit(&c).unwrap());
        let ab = connecting_map(&y, &ca, &cb).unwrap();
        let bc = connecting_map(&y, &cb, &cc).unwrap();
        let ac = connecting_map(&y, &ca, &cc).unwrap();
        prop_assert_eq!(bc.mul(&ab).unwrap(), ac);
        prop_assert!(connecting_map(&y, &cb, &cb).unwrap().is_identity());
    }

    #[test]
    fn morphisms_push_relations_to_relations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3, 4);
        let (x, y, l) = random_regular_morphism(&mut rng, &fam, 2, true).unwrap();
        let (set, _, _) = nested_sets(&mut rng, &y);
        let m = common::block(&x, &y, &l);
        let pushed = common::image_of(&m, &common::relation_span(&x, &set));
        prop_assert!(pushed.is_subspace_of(&common::relation_span(&y, &set)).unwrap());
    }

    #[test]
    fn pushforwards_are_functorial(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 3, 4);
        let (x, y, l) = random_regular_morphism(&mut rng, &fam, 2, true).unwrap();
        let map = random_monotone_map(&mut rng, &fam);
        let px = pushforward(&x, &map.target, &map.lambda).unwrap();
        let py = pushforward(&y, &map.target, &map.lambda).unwrap();
        pushforward_morphism(&x, &y, &l, &px, &py).unwrap();
        prop_assert_eq!(px.system.len(), map.target.len());
    }

    #[test]
    fn free_models_are_prelocalizable(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = random_family(&mut rng, 4, 5);
        let (x, y, _) = random_regular_morphism(&mut rng, &fam, 2, true).unwrap();
        prop_assert!(check_prelocalizable(&x).unwrap().all_hold());
        prop_assert!(check_prelocalizable(&y).unwrap().all_hold());
    }
}

#[test]
fn constant_systems_on_lattices_have_one_fiber_colimits() {
    for fam in carrier_core::corpus::closed_families(3) {
        let Some(&top) = fam.sets.last() else { continue };
        if !fam.sets.iter().all(|&m| m & top == m) {
            continue;
        }
        let x = InductiveSystem::constant(fam.poset(), 2).unwrap();
        assert_eq!(x.colimit(&x.whole()).unwrap().dim(), 2);
    }
}
