//! Finite posets and quasi-lattices.
//!
//! A quasi-lattice has all binary meets and joins of every pair that is
//! bounded above. Elements are referred to by their position in the element
//! list; sets of elements are `BTreeSet<usize>` so iteration order is fixed.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub const MAX_ELEMENTS: usize = 64;

pub type ElementSet = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosetAxiom {
    Reflexivity,
    Antisymmetry,
    Transitivity,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("relation is not a partial order: {axiom:?} fails at {witness:?}")]
    NotAPoset { axiom: PosetAxiom, witness: Vec<usize> },
    #[error("pair ({0}, {1}) has no infimum")]
    NoInfimum(usize, usize),
    #[error("bounded pair ({0}, {1}) has no supremum")]
    NoSupremum(usize, usize),
    #[error("poset has {0} elements, the limit is {MAX_ELEMENTS}")]
    TooLarge(usize),
    #[error("leq table is {rows}x{cols} but there are {elements} elements")]
    Shape { elements: usize, rows: usize, cols: usize },
    #[error("set is not closed under meets: {0} ∧ {1} is missing")]
    JNotMeetClosed(usize, usize),
    #[error("element {0} is out of range")]
    OutOfRange(usize),
}

/// Finite poset stored as an explicit `≤` table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poset {
    pub elements: Vec<String>,
    pub leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds a poset from a `≤` predicate and validates it.
    pub fn from_fn(elements: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self, LatticeError> {
        let n = elements.len();
        let table = (0..n).map(|i| (0..n).map(|j| leq(i, j)).collect()).collect();
        let p = Poset { elements, leq: table };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let n = self.elements.len();
        if n > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge(n));
        }
        if self.leq.len() != n || self.leq.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Shape {
                elements: n,
                rows: self.leq.len(),
                cols: self.leq.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
            });
        }
        for a in 0..n {
            if !self.leq[a][a] {
                return Err(LatticeError::NotAPoset {
                    axiom: PosetAxiom::Reflexivity,
                    witness: vec![a],
                });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq[a][b] && self.leq[b][a] {
                    return Err(LatticeError::NotAPoset {
                        axiom: PosetAxiom::Antisymmetry,
                        witness: vec![a, b],
                    });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !self.leq[a][b] {
                    continue;
                }
                for c in 0..n {
                    if self.leq[b][c] && !self.leq[a][c] {
                        return Err(LatticeError::NotAPoset {
                            axiom: PosetAxiom::Transitivity,
                            witness: vec![a, b, c],
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    /// All pairs `a ≤ b`, including `a = b`, in lexicographic order.
    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.leq[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn down_set(&self, a: usize) -> ElementSet {
        (0..self.len()).filter(|&x| self.leq[x][a]).collect()
    }

    pub fn up_set(&self, a: usize) -> ElementSet {
        (0..self.len()).filter(|&x| self.leq[a][x]).collect()
    }

    pub fn chain(n: usize) -> Self {
        Poset::from_fn((0..n).map(|i| format!("c{i}")).collect(), |a, b| a <= b).expect("chain is a poset")
    }

    /// Subsets of an `n`-point set ordered by inclusion.
    pub fn powerset(n: usize) -> Self {
        let masks: Vec<u32> = (0..1u32 << n).collect();
        SetFamily::new(n, masks).poset()
    }

    /// The diamond: bottom, three pairwise incomparable atoms, top.
    pub fn m3() -> Self {
        let names = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        Poset::from_fn(names, |x, y| x == y || x == 0 || y == 4).expect("M3 is a poset")
    }

    /// The pentagon: 0 < a < b < 1 and 0 < c < 1.
    pub fn n5() -> Self {
        let names = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        Poset::from_fn(names, |x, y| x == y || x == 0 || y == 4 || (x == 1 && y == 2)).expect("N5 is a poset")
    }
}

/// A poset with its meet table and partial join table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiLattice {
    pub poset: Poset,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<Option<usize>>>,
}

/// Greatest element of `set` with respect to `leq`, if one exists.
fn greatest(p: &Poset, set: &[usize]) -> Option<usize> {
    set.iter().copied().find(|&g| set.iter().all(|&x| p.leq(x, g)))
}

fn least(p: &Poset, set: &[usize]) -> Option<usize> {
    set.iter().copied().find(|&g| set.iter().all(|&x| p.leq(g, x)))
}

pub fn validate_quasi_lattice(p: &Poset) -> Result<QuasiLattice, LatticeError> {
    p.validate()?;
    let n = p.len();
    let mut meet = vec![vec![0; n]; n];
    let mut join = vec![vec![None; n]; n];
    for a in 0..n {
        for b in a..n {
            let lower: Vec<usize> = (0..n).filter(|&x| p.leq(x, a) && p.leq(x, b)).collect();
            let m = greatest(p, &lower).ok_or(LatticeError::NoInfimum(a, b))?;
            meet[a][b] = m;
            meet[b][a] = m;
            let upper: Vec<usize> = (0..n).filter(|&x| p.leq(a, x) && p.leq(b, x)).collect();
            if !upper.is_empty() {
                let j = least(p, &upper).ok_or(LatticeError::NoSupremum(a, b))?;
                join[a][b] = Some(j);
                join[b][a] = Some(j);
            }
        }
    }
    Ok(QuasiLattice {
        poset: p.clone(),
        meet,
        join,
    })
}

impl QuasiLattice {
    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.poset.leq(a, b)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    /// `None` when the pair has no upper bound.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        self.join[a][b]
    }

    /// Iterated join of a nonempty set; `None` if some partial join is undefined.
    pub fn join_all(&self, set: &ElementSet) -> Option<usize> {
        let mut it = set.iter().copied();
        let first = it.next()?;
        it.try_fold(first, |acc, x| self.join(acc, x))
    }

    /// Iterated meet of a nonempty set.
    pub fn meet_all(&self, set: &ElementSet) -> Option<usize> {
        let mut it = set.iter().copied();
        let first = it.next()?;
        Some(it.fold(first, |acc, x| self.meet(acc, x)))
    }

    pub fn elements(&self) -> ElementSet {
        (0..self.len()).collect()
    }

    /// The first `(γ₁, γ₂, γ₃)` with `γ₂ ∨ γ₃` defined and
    /// `γ₁ ∧ (γ₂ ∨ γ₃) ≠ (γ₁ ∧ γ₂) ∨ (γ₁ ∧ γ₃)`, or `None` if distributive.
    pub fn distributivity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let Some(bc) = self.join(b, c) else { continue };
                    let lhs = self.meet(a, bc);
                    // Both meets lie below `a`, so their join always exists.
                    let rhs = self.join(self.meet(a, b), self.meet(a, c));
                    if rhs != Some(lhs) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    fn check_range(&self, set: &ElementSet) -> Result<(), LatticeError> {
        match set.iter().find(|&&x| x >= self.len()) {
            Some(&x) => Err(LatticeError::OutOfRange(x)),
            None => Ok(()),
        }
    }

    pub fn is_hereditary(&self, set: &ElementSet) -> bool {
        set.iter().all(|&g| (0..self.len()).all(|x| !self.leq(x, g) || set.contains(&x)))
    }

    pub fn meet_closed_witness(&self, set: &ElementSet) -> Option<(usize, usize)> {
        for &a in set {
            for &b in set {
                if a < b && !set.contains(&self.meet(a, b)) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_meet_closed(&self, set: &ElementSet) -> bool {
        self.meet_closed_witness(set).is_none()
    }

    /// Infima of all nonempty subsets of `generators`.
    pub fn meet_closure(&self, generators: &ElementSet) -> ElementSet {
        // Saturating under binary meets reaches exactly the subset infima.
        let mut out = generators.clone();
        loop {
            let mut added = Vec::new();
            for &a in &out {
                for &b in &out {
                    let m = self.meet(a, b);
                    if !out.contains(&m) {
                        added.push(m);
                    }
                }
            }
            if added.is_empty() {
                return out;
            }
            out.extend(added);
        }
    }

    /// Hereditary sets are exactly the down-closures; this returns the down-closure.
    pub fn down_closure(&self, set: &ElementSet) -> ElementSet {
        (0..self.len()).filter(|&x| set.iter().any(|&g| self.leq(x, g))).collect()
    }

    /// `{γ ∈ Γ : λ(γ) ≤ δ}` for an element map `lambda` into `target`.
    pub fn preimage_down(&self, lambda: &[usize], target: &Poset, delta: usize) -> ElementSet {
        (0..self.len()).filter(|&g| target.leq(lambda[g], delta)).collect()
    }

    pub fn order_statistics(&self, j: &ElementSet) -> Result<OrderStatistics, LatticeError> {
        self.check_range(j)?;
        if let Some((a, b)) = self.meet_closed_witness(j) {
            return Err(LatticeError::JNotMeetClosed(a, b));
        }
        let k: Vec<(usize, usize)> = j
            .iter()
            .map(|&g| (g, j.iter().filter(|&&h| self.leq(g, h)).count()))
            .collect();
        let size = j.len();
        let chain: Vec<ElementSet> = (1..=size)
            .map(|n| k.iter().filter(|(_, c)| *c >= n).map(|(g, _)| *g).collect())
            .collect();
        if let Some(last) = chain.last() {
            let bottom = self.meet_all(j).expect("J is nonempty");
            debug_assert_eq!(last, &ElementSet::from([bottom]));
        }
        Ok(OrderStatistics { k, chain })
    }
}

/// `k(γ) = |{γ' ∈ J : γ' ≥ γ}|` and the sets `C_n = {γ ∈ J : k(γ) ≥ n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderStatistics {
    /// `(γ, k(γ))` for each γ in J, ascending by γ.
    pub k: Vec<(usize, usize)>,
    /// `chain[n - 1] = C_n` for `n = 1..=|J|`.
    pub chain: Vec<ElementSet>,
}

impl OrderStatistics {
    pub fn k_of(&self, g: usize) -> Option<usize> {
        self.k.iter().find(|(x, _)| *x == g).map(|(_, c)| *c)
    }

    /// `C_n`; empty for `n > |J|`.
    pub fn c(&self, n: usize) -> ElementSet {
        if n == 0 {
            return self.k.iter().map(|(g, _)| *g).collect();
        }
        self.chain.get(n - 1).cloned().unwrap_or_default()
    }
}

/// A family of subsets of `{0, …, points-1}` given as bitmasks, ordered by inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetFamily {
    pub points: usize,
    /// Sorted by cardinality, then by mask value.
    pub sets: Vec<u32>,
}

impl SetFamily {
    pub fn new(points: usize, mut sets: Vec<u32>) -> Self {
        sets.sort_by_key(|&m| (m.count_ones(), m));
        sets.dedup();
        SetFamily { points, sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.sets.contains(&mask)
    }

    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.sets.iter().position(|&m| m == mask)
    }

    pub fn label(mask: u32) -> String {
        let members: Vec<String> = (0..32).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", members.join(","))
    }

    pub fn intersection_witness(&self) -> Option<(u32, u32)> {
        for &a in &self.sets {
            for &b in &self.sets {
                if !self.contains(a & b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// A pair with a common superset in the family whose union is missing.
    pub fn bounded_union_witness(&self) -> Option<(u32, u32)> {
        for &a in &self.sets {
            for &b in &self.sets {
                let u = a | b;
                if !self.contains(u) && self.sets.iter().any(|&c| c & u == u) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn poset(&self) -> Poset {
        let names = self.sets.iter().map(|&m| Self::label(m)).collect();
        let sets = &self.sets;
        Poset::from_fn(names, |a, b| sets[a] & !sets[b] == 0).expect("inclusion is a partial order")
    }

    /// Image of the family under a permutation of the points.
    pub fn permuted(&self, perm: &[usize]) -> SetFamily {
        let map = |m: u32| {
            (0..self.points).filter(|&i| m >> i & 1 == 1).fold(0u32, |acc, i| acc | 1 << perm[i])
        };
        SetFamily::new(self.points, self.sets.iter().map(|&m| map(m)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn boolean_lattice_meets_and_joins() {
        let q = validate_quasi_lattice(&Poset::powerset(2)).unwrap();
        // sets are ordered ∅, {1}, {2}, {1,2}
        assert_eq!(q.meet(1, 2), 0);
        assert_eq!(q.join(1, 2), Some(3));
        assert!(q.is_distributive());
    }

    #[test]
    fn powerset_without_top_is_a_quasi_lattice() {
        let fam = SetFamily::new(3, (0..7).collect());
        let q = validate_quasi_lattice(&fam.poset()).unwrap();
        let a = fam.index_of(0b011).unwrap();
        let b = fam.index_of(0b110).unwrap();
        assert_eq!(q.join(a, b), None);
        assert_eq!(q.join(fam.index_of(0b001).unwrap(), fam.index_of(0b010).unwrap()), Some(a));
    }

    #[test]
    fn m3_is_a_lattice_but_not_distributive() {
        let q = validate_quasi_lattice(&Poset::m3()).unwrap();
        let (a, b, c) = q.distributivity_witness().unwrap();
        let lhs = q.meet(a, q.join(b, c).unwrap());
        let rhs = q.join(q.meet(a, b), q.meet(a, c)).unwrap();
        assert_ne!(lhs, rhs);
        assert!(!validate_quasi_lattice(&Poset::n5()).unwrap().is_distributive());
    }

    #[test]
    fn chains_are_distributive() {
        for n in 1..6 {
            assert!(validate_quasi_lattice(&Poset::chain(n)).unwrap().is_distributive());
        }
    }

    #[test]
    fn missing_infimum_is_reported() {
        // two minimal elements, no common lower bound
        let p = Poset::from_fn(vec!["a".into(), "b".into()], |x, y| x == y).unwrap();
        assert_eq!(validate_quasi_lattice(&p), Err(LatticeError::NoInfimum(0, 1)));
    }

    #[test]
    fn missing_supremum_is_reported() {
        // 0 < a, b < c, d with a, b having two minimal upper bounds
        let names = ["0", "a", "b", "c", "d"].map(String::from).to_vec();
        let p = Poset::from_fn(names, |x, y| x == y || x == 0 || ((x == 1 || x == 2) && (y == 3 || y == 4))).unwrap();
        assert_eq!(validate_quasi_lattice(&p), Err(LatticeError::NoSupremum(1, 2)));
    }

    #[test]
    fn non_transitive_relation_names_a_triple() {
        let p = Poset {
            elements: vec!["a".into(), "b".into(), "c".into()],
            leq: vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]],
        };
        assert_eq!(
            p.validate(),
            Err(LatticeError::NotAPoset {
                axiom: PosetAxiom::Transitivity,
                witness: vec![0, 1, 2]
            })
        );
    }

    #[test]
    fn meet_closure_of_two_atoms() {
        let q = validate_quasi_lattice(&Poset::powerset(2)).unwrap();
        assert_eq!(q.meet_closure(&set(&[1, 2])), set(&[0, 1, 2]));
    }

    #[test]
    fn order_statistics_of_a_chain_and_a_square() {
        let c = validate_quasi_lattice(&Poset::chain(3)).unwrap();
        let s = c.order_statistics(&set(&[0, 1, 2])).unwrap();
        assert_eq!(s.k, vec![(0, 3), (1, 2), (2, 1)]);
        let b = validate_quasi_lattice(&Poset::powerset(2)).unwrap();
        let s = b.order_statistics(&b.elements()).unwrap();
        assert_eq!(s.k, vec![(0, 4), (1, 2), (2, 2), (3, 1)]);
        assert_eq!(s.c(4), set(&[0]));
        assert!(s.c(5).is_empty());
        assert_eq!(b.order_statistics(&set(&[1, 2])), Err(LatticeError::JNotMeetClosed(1, 2)));
    }

    #[test]
    fn principal_down_sets_are_hereditary() {
        let q = validate_quasi_lattice(&Poset::powerset(3)).unwrap();
        for g in 0..q.len() {
            let d = q.poset.down_set(g);
            assert!(q.is_hereditary(&d));
            assert!(q.is_meet_closed(&d));
        }
    }

    fn family_strategy() -> impl Strategy<Value = SetFamily> {
        prop::collection::vec(0u32..16, 1..8).prop_map(|seeds| {
            // close under intersections and bounded unions
            let mut sets: BTreeSet<u32> = seeds.into_iter().collect();
            loop {
                let cur: Vec<u32> = sets.iter().copied().collect();
                let mut grew = false;
                for &a in &cur {
                    for &b in &cur {
                        let bounded = cur.iter().any(|&c| c & (a | b) == a | b);
                        grew |= sets.insert(a & b);
                        if bounded {
                            grew |= sets.insert(a | b);
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            SetFamily::new(4, sets.into_iter().collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn meet_is_greatest_lower_bound(fam in family_strategy()) {
            let q = validate_quasi_lattice(&fam.poset()).unwrap();
            for a in 0..q.len() {
                for b in 0..q.len() {
                    let m = q.meet(a, b);
                    prop_assert!(q.leq(m, a) && q.leq(m, b));
                    for x in 0..q.len() {
                        if q.leq(x, a) && q.leq(x, b) {
                            prop_assert!(q.leq(x, m));
                        }
                    }
                    let bounded = (0..q.len()).any(|x| q.leq(a, x) && q.leq(b, x));
                    prop_assert_eq!(q.join(a, b).is_some(), bounded);
                }
            }
        }

        #[test]
        fn hereditary_sets_are_meet_closed(fam in family_strategy(), pick in prop::collection::vec(0usize..16, 0..4)) {
            let q = validate_quasi_lattice(&fam.poset()).unwrap();
            let gens: ElementSet = pick.into_iter().map(|i| i % q.len()).collect();
            let h = q.down_closure(&gens);
            prop_assert!(q.is_hereditary(&h));
            prop_assert!(q.is_meet_closed(&h));
        }

        #[test]
        fn meet_closure_is_small_and_closed(fam in family_strategy(), pick in prop::collection::vec(0usize..16, 1..5)) {
            let q = validate_quasi_lattice(&fam.poset()).unwrap();
            let gens: ElementSet = pick.into_iter().map(|i| i % q.len()).collect();
            let c = q.meet_closure(&gens);
            prop_assert!(q.is_meet_closed(&c));
            prop_assert!(gens.is_subset(&c));
            prop_assert!(c.len() <= 1usize << gens.len());
        }

        #[test]
        fn meet_of_larger_k_strictly_raises_k(fam in family_strategy()) {
            let q = validate_quasi_lattice(&fam.poset()).unwrap();
            let j = q.elements();
            let s = q.order_statistics(&j).unwrap();
            for &a in &j {
                for &b in &j {
                    let (ka, kb) = (s.k_of(a).unwrap(), s.k_of(b).unwrap());
                    if a != b && kb >= ka {
                        prop_assert!(s.k_of(q.meet(a, b)).unwrap() > ka);
                    }
                }
            }
        }

        #[test]
        fn closed_families_are_distributive(fam in family_strategy()) {
            let q = validate_quasi_lattice(&fam.poset()).unwrap();
            prop_assert!(q.is_distributive());
        }
    }
}
