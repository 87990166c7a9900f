//! Seeded instance generators: set families, index subsets and monotone maps.

use crate::lattice::{ElementSet, Poset, QuasiLattice, SetFamily};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every nonempty family of subsets of `points` points that is closed under
/// intersections and under unions of pairs bounded in the family, one
/// representative per orbit of point permutations.
pub fn closed_families(points: usize) -> Vec<SetFamily> {
    assert!(points <= 4, "exhaustive enumeration is limited to 4 points");
    let universe = 1usize << points;
    let perms = permutations(points);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for selection in 1u64..(1u64 << universe) {
        let sets: Vec<u32> = (0..universe as u32).filter(|&m| selection >> m & 1 == 1).collect();
        let fam = SetFamily::new(points, sets);
        if fam.intersection_witness().is_some() || fam.bounded_union_witness().is_some() {
            continue;
        }
        let canon = perms.iter().map(|p| fam.permuted(p).sets).min().expect("at least one permutation");
        if seen.insert(canon) {
            out.push(fam);
        }
    }
    out
}

/// Closes a seed collection of masks under intersections and bounded unions.
pub fn close_family(points: usize, seeds: &[u32]) -> SetFamily {
    let mut sets: BTreeSet<u32> = seeds.iter().copied().collect();
    loop {
        let cur: Vec<u32> = sets.iter().copied().collect();
        let mut grew = false;
        for &a in &cur {
            for &b in &cur {
                grew |= sets.insert(a & b);
                let u = a | b;
                if cur.iter().any(|&c| c & u == u) {
                    grew |= sets.insert(u);
                }
            }
        }
        if !grew {
            return SetFamily::new(points, sets.into_iter().collect());
        }
    }
}

pub fn random_family<R: Rng>(rng: &mut R, points: usize, seeds: usize) -> SetFamily {
    let full = (1u32 << points) - 1;
    let picks: Vec<u32> = (0..seeds).map(|_| rng.gen_range(0..=full)).collect();
    close_family(points, &picks)
}

/// Down-closure of up to `max_gens` random elements (possibly empty).
pub fn random_hereditary<R: Rng>(rng: &mut R, ql: &QuasiLattice, max_gens: usize) -> ElementSet {
    let count = rng.gen_range(0..=max_gens);
    let gens: ElementSet = (0..count).map(|_| rng.gen_range(0..ql.len())).collect();
    ql.down_closure(&gens)
}

/// Meet-closure of 1 to `max_gens` random elements.
pub fn random_meet_closed<R: Rng>(rng: &mut R, ql: &QuasiLattice, max_gens: usize) -> ElementSet {
    let count = rng.gen_range(1..=max_gens.max(1));
    let gens: ElementSet = (0..count).map(|_| rng.gen_range(0..ql.len())).collect();
    ql.meet_closure(&gens)
}

/// A monotone map from a family's inclusion order to some target poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    pub label: String,
    pub target: Poset,
    pub lambda: Vec<usize>,
}

pub fn identity_map(family: &SetFamily) -> MonotoneMap {
    MonotoneMap {
        label: "identity".into(),
        target: family.poset(),
        lambda: (0..family.len()).collect(),
    }
}

/// `γ ↦ γ ∩ S` onto the family of traces.
pub fn restriction_map(family: &SetFamily, keep: u32) -> MonotoneMap {
    let traces = SetFamily::new(family.points, family.sets.iter().map(|&m| m & keep).collect());
    MonotoneMap {
        label: format!("restrict to {}", SetFamily::label(keep)),
        target: traces.poset(),
        lambda: family.sets.iter().map(|&m| traces.index_of(m & keep).expect("trace present")).collect(),
    }
}

/// `γ ↦ |γ|` into a chain.
pub fn cardinality_map(family: &SetFamily) -> MonotoneMap {
    MonotoneMap {
        label: "cardinality".into(),
        target: Poset::chain(family.points + 1),
        lambda: family.sets.iter().map(|&m| m.count_ones() as usize).collect(),
    }
}

pub fn constant_map(family: &SetFamily) -> MonotoneMap {
    MonotoneMap {
        label: "constant".into(),
        target: Poset::chain(1),
        lambda: vec![0; family.len()],
    }
}

pub fn random_monotone_map<R: Rng>(rng: &mut R, family: &SetFamily) -> MonotoneMap {
    let full = (1u32 << family.points) - 1;
    let choices = [0, 1, 2, 3];
    match choices.choose(rng).copied().unwrap_or(0) {
        0 => identity_map(family),
        1 => restriction_map(family, rng.gen_range(0..=full)),
        2 => cardinality_map(family),
        _ => constant_map(family),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::validate_quasi_lattice;
    use crate::system::check_monotone;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_family_counts() {
        // one point: {∅}, {{1}}, {∅,{1}}
        assert_eq!(closed_families(1).len(), 3);
        for n in 1..=3 {
            for fam in closed_families(n) {
                assert!(validate_quasi_lattice(&fam.poset()).unwrap().is_distributive());
            }
        }
    }

    #[test]
    fn generated_maps_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let fam = random_family(&mut rng, 4, 4);
            let m = random_monotone_map(&mut rng, &fam);
            check_monotone(&fam.poset(), &m.target, &m.lambda).unwrap();
        }
    }

    #[test]
    fn random_subsets_have_their_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = random_family(&mut rng, 3, 3);
        let ql = validate_quasi_lattice(&fam.poset()).unwrap();
        for _ in 0..20 {
            assert!(ql.is_hereditary(&random_hereditary(&mut rng, &ql, 2)));
            assert!(ql.is_meet_closed(&random_meet_closed(&mut rng, &ql, 3)));
        }
    }
}
