mod common;

use carrier_core::corpus::{random_family, random_hereditary, random_meet_closed};
use carrier_core::decomposition::{AxiomPolicy, DecompositionError, Engine};
use carrier_core::lattice::{validate_quasi_lattice, ElementSet, SetFamily};
use carrier_core::linalg::{q, Rational, Vector};
use carrier_core::localization::random_regular_morphism;
use carrier_core::replay::replay_bundle;
use carrier_core::system::SumVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_combination<R: Rng>(rng: &mut R, basis: &[Vector], len: usize) -> Vector {
    let mut v = vec![q(0); len];
    for b in basis {
        let c: Rational = q(rng.gen_range(-2..=2));
        for (a, x) in v.iter_mut().zip(b) {
            *a += &c * x;
        }
    }
    v
}

struct Instance {
    engine: Engine,
    i: ElementSet,
    j: ElementSet,
}

fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = rng.gen_range(2..=3);
    let family: SetFamily = random_family(&mut rng, points, 4);
    let scramble = rng.gen_bool(0.5);
    let (x, y, l) = random_regular_morphism(&mut rng, &family, 2, scramble).unwrap();
    let ql = validate_quasi_lattice(&family.poset()).unwrap();
    let i = random_hereditary(&mut rng, &ql, 2);
    let j = random_meet_closed(&mut rng, &ql, 3);
    Instance {
        engine: Engine::new(x, y, l, AxiomPolicy::Full).unwrap(),
        i,
        j,
    }
}

#[test]
fn engine_matches_brute_force_membership() {
    let mut inside = 0;
    let mut outside = 0;
    for seed in 0..40 {
        let inst = instance(seed);
        let e = &inst.engine;
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let lhs = common::lhs(&e.x, &e.y, &e.l, &inst.i, &inst.j);
        let rhs = common::rhs(&e.x, &e.y, &e.l, &inst.i, &inst.j);
        assert!(lhs.is_subspace_of(&rhs).unwrap(), "seed {seed}: inclusion fails");
        let n = common::total(&e.y);
        let nj = common::relation_span(&e.y, &inst.j);
        let candidates = [
            random_combination(&mut rng, lhs.basis(), n),
            random_combination(&mut rng, nj.basis(), n),
            (0..n).map(|_| q(rng.gen_range(-1..=1))).collect(),
        ];
        for v in candidates {
            let y = SumVector::from_dense(&e.y, &v).unwrap();
            let expected = lhs.contains(&v).unwrap();
            match e.membership(&inst.i, &inst.j, &y) {
                Ok(cert) => {
                    assert!(expected, "seed {seed}: engine accepted a vector outside the left side");
                    assert!(rhs.contains(&v).unwrap());
                    let json = serde_json::to_string(&e.bundle(cert)).unwrap();
                    replay_bundle(&json).unwrap();
                    inside += 1;
                }
                Err(DecompositionError::NotInLHS) => {
                    assert!(!expected, "seed {seed}: engine rejected a left-side vector");
                    outside += 1;
                }
                Err(other) => panic!("seed {seed}: {other}"),
            }
        }
    }
    assert!(inside > 40 && outside > 10, "inside {inside}, outside {outside}");
}

#[test]
fn tampered_certificates_are_rejected() {
    let mut checked = 0;
    for seed in 0..80 {
        let inst = instance(seed);
        let e = &inst.engine;
        let lhs = common::lhs(&e.x, &e.y, &e.l, &inst.i, &inst.j);
        let Some(b) = lhs.basis().last() else { continue };
        let cert = e.membership(&inst.i, &inst.j, &SumVector::from_dense(&e.y, b).unwrap()).unwrap();
        let mut bundle = e.bundle(cert);
        let stage = bundle.certificate.stages.last_mut().unwrap();
        let Some(term) = stage.tilde_x.first_mut().or(stage.tilde_y.first_mut()) else { continue };
        term.vector[0] += q(1);
        let err = replay_bundle(&serde_json::to_string(&bundle).unwrap()).unwrap_err();
        assert!(err.to_string().contains("identity failed"), "{err}");
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} certificates had terms to tamper with");
}

#[test]
fn minimal_policy_gives_the_same_certificates() {
    for seed in 0..10 {
        let inst = instance(seed);
        let e = &inst.engine;
        let relaxed = Engine::new(e.x.clone(), e.y.clone(), e.l.clone(), AxiomPolicy::Minimal).unwrap();
        let lhs = common::lhs(&e.x, &e.y, &e.l, &inst.i, &inst.j);
        for b in lhs.basis() {
            let y = SumVector::from_dense(&e.y, b).unwrap();
            assert_eq!(
                e.membership(&inst.i, &inst.j, &y).unwrap(),
                relaxed.membership(&inst.i, &inst.j, &y).unwrap()
            );
        }
    }
}

#[test]
fn stage_order_strictly_increases_and_ends_past_j() {
    for seed in 0..15 {
        let inst = instance(seed);
        let e = &inst.engine;
        let lhs = common::lhs(&e.x, &e.y, &e.l, &inst.i, &inst.j);
        for b in lhs.basis() {
            let cert = e.membership(&inst.i, &inst.j, &SumVector::from_dense(&e.y, b).unwrap()).unwrap();
            for w in cert.stages.windows(2) {
                assert_eq!(w[1].order, w[0].order + 1);
            }
            assert_eq!(cert.final_order, inst.j.len() + 1);
            assert!(cert.final_stage().pending.is_empty());
        }
    }
}
