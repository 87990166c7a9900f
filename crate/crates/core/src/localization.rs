//! Prelocalizability axioms, regular morphisms, and model generators.
//!
//! The axioms for a system `X` over a quasi-lattice:
//! (I) every link is injective;
//! (II) for a bounded pair, `X(γ₁) ⊕ X(γ₂) → X(γ₁ ∨ γ₂)` is onto;
//! (III) whenever `x₁, x₂` agree in some common upper bound, they come from
//! one `x ∈ X(γ₁ ∧ γ₂)`.

use crate::lattice::{validate_quasi_lattice, LatticeError, QuasiLattice, SetFamily};
use crate::linalg::{is_zero_vec, null_space, q, solve, unit_vec, Matrix, Rational, Subspace, Vector};
use crate::system::{InductiveSystem, SystemError, SystemMorphism};
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalizationError {
    #[error("index set is not a quasi-lattice: {0}")]
    NotQuasiLattice(LatticeError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("family is not closed under intersection: {0:#b} ∩ {1:#b}")]
    NotIntersectionClosed(u32, u32),
    #[error("family is not closed under bounded unions: {0:#b} ∪ {1:#b}")]
    NotJoinClosed(u32, u32),
    #[error("family is empty")]
    EmptyFamily,
    #[error("multiplicity list has {found} entries for {expected} points")]
    Multiplicities { expected: usize, found: usize },
}

impl From<crate::linalg::LinalgError> for LocalizationError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        LocalizationError::System(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    I,
    II,
    III,
}

/// A concrete falsification of one axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomWitness {
    /// Nonzero `x ∈ X(a)` with `ρ_ab x = 0`.
    Injectivity {
        a: usize,
        b: usize,
        #[serde(with = "crate::linalg::serde_q::vec")]
        x: Vector,
    },
    /// `target ∈ X(a ∨ b)` outside the image of `X(a) ⊕ X(b)`.
    Decomposition {
        a: usize,
        b: usize,
        join: usize,
        #[serde(with = "crate::linalg::serde_q::vec")]
        target: Vector,
    },
    /// `ρ_{a,upper} x1 = ρ_{b,upper} x2` with no common preimage in `X(a ∧ b)`.
    Gluing {
        a: usize,
        b: usize,
        upper: usize,
        #[serde(with = "crate::linalg::serde_q::vec")]
        x1: Vector,
        #[serde(with = "crate::linalg::serde_q::vec")]
        x2: Vector,
    },
}

/// Solved instance of (II) for one basis vector, kept as evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionSample {
    pub a: usize,
    pub b: usize,
    pub join: usize,
    pub basis_index: usize,
    #[serde(with = "crate::linalg::serde_q::vec")]
    pub x1: Vector,
    #[serde(with = "crate::linalg::serde_q::vec")]
    pub x2: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<AxiomWitness>,
}

impl AxiomVerdict {
    fn pass(checked: usize) -> Self {
        AxiomVerdict {
            holds: true,
            checked,
            witness: None,
        }
    }

    fn fail(checked: usize, w: AxiomWitness) -> Self {
        AxiomVerdict {
            holds: false,
            checked,
            witness: Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrelocReport {
    pub injective: AxiomVerdict,
    pub decomposition: AxiomVerdict,
    pub gluing: AxiomVerdict,
    pub samples: Vec<DecompositionSample>,
}

impl PrelocReport {
    pub fn all_hold(&self) -> bool {
        self.injective.holds && self.decomposition.holds && self.gluing.holds
    }

    pub fn holds(&self, axiom: Axiom) -> bool {
        match axiom {
            Axiom::I => self.injective.holds,
            Axiom::II => self.decomposition.holds,
            Axiom::III => self.gluing.holds,
        }
    }

    pub fn failing(&self) -> Vec<Axiom> {
        [Axiom::I, Axiom::II, Axiom::III].into_iter().filter(|&a| !self.holds(a)).collect()
    }
}

const SAMPLE_PAIRS: usize = 4;

pub fn quasi_lattice_of(x: &InductiveSystem) -> Result<QuasiLattice, LocalizationError> {
    validate_quasi_lattice(x.index()).map_err(LocalizationError::NotQuasiLattice)
}

pub fn check_prelocalizable(x: &InductiveSystem) -> Result<PrelocReport, LocalizationError> {
    let ql = quasi_lattice_of(x)?;
    let (decomposition, samples) = check_decomposition(x, &ql)?;
    Ok(PrelocReport {
        injective: check_injective(x)?,
        decomposition,
        gluing: check_gluing(x, &ql)?,
        samples,
    })
}

pub fn check_injective(x: &InductiveSystem) -> Result<AxiomVerdict, LocalizationError> {
    let mut checked = 0;
    for (&(a, b), m) in x.links() {
        if a == b {
            continue;
        }
        checked += 1;
        if let Some(k) = null_space(m).into_iter().next() {
            return Ok(AxiomVerdict::fail(checked, AxiomWitness::Injectivity { a, b, x: k }));
        }
    }
    Ok(AxiomVerdict::pass(checked))
}

fn check_decomposition(
    x: &InductiveSystem,
    ql: &QuasiLattice,
) -> Result<(AxiomVerdict, Vec<DecompositionSample>), LocalizationError> {
    let mut checked = 0;
    let mut samples = Vec::new();
    for a in 0..x.len() {
        for b in a + 1..x.len() {
            let Some(j) = ql.join(a, b) else { continue };
            checked += 1;
            let combined = x.link(a, j)?.hstack(x.link(b, j)?)?;
            if combined.rank() < x.dim(j) {
                let image = combined.image();
                let target = (0..x.dim(j))
                    .map(|i| unit_vec(x.dim(j), i))
                    .find(|e| !image.contains(e).unwrap_or(true))
                    .expect("a rank deficit leaves some unit vector outside the image");
                return Ok((
                    AxiomVerdict::fail(checked, AxiomWitness::Decomposition { a, b, join: j, target }),
                    samples,
                ));
            }
            if samples.len() < SAMPLE_PAIRS * 8 && a != j && b != j {
                for i in 0..x.dim(j) {
                    let sol = solve(&combined, &unit_vec(x.dim(j), i))?.expect("surjective");
                    let (x1, x2) = sol.particular.split_at(x.dim(a));
                    samples.push(DecompositionSample {
                        a,
                        b,
                        join: j,
                        basis_index: i,
                        x1: x1.to_vec(),
                        x2: x2.to_vec(),
                    });
                }
            }
        }
    }
    Ok((AxiomVerdict::pass(checked), samples))
}

/// Equalizer of the two links into `upper`, as a subspace of `X(a) ⊕ X(b)`.
fn equalizer(x: &InductiveSystem, a: usize, b: usize, upper: usize) -> Result<Subspace, SystemError> {
    let neg = x.link(b, upper)?.scale(&-Rational::one());
    let m = x.link(a, upper)?.hstack(&neg)?;
    Ok(Subspace::span(x.dim(a) + x.dim(b), &null_space(&m))?)
}

/// `{(ρ_{m,a} x, ρ_{m,b} x)}` for `m = a ∧ b`.
fn diagonal(x: &InductiveSystem, a: usize, b: usize, m: usize) -> Result<(Matrix, Subspace), SystemError> {
    let stacked = x.link(m, a)?.vstack(x.link(m, b)?)?;
    let image = stacked.image();
    Ok((stacked, image))
}

fn check_gluing(x: &InductiveSystem, ql: &QuasiLattice) -> Result<AxiomVerdict, LocalizationError> {
    let mut checked = 0;
    for a in 0..x.len() {
        for b in a..x.len() {
            let m = ql.meet(a, b);
            let (_, diag) = diagonal(x, a, b, m)?;
            for upper in 0..x.len() {
                if !(ql.leq(a, upper) && ql.leq(b, upper)) {
                    continue;
                }
                checked += 1;
                let eq = equalizer(x, a, b, upper)?;
                if let Some(v) = eq.basis().iter().find(|v| !diag.contains(v).unwrap_or(true)) {
                    let (x1, x2) = v.split_at(x.dim(a));
                    return Ok(AxiomVerdict::fail(
                        checked,
                        AxiomWitness::Gluing {
                            a,
                            b,
                            upper,
                            x1: x1.to_vec(),
                            x2: x2.to_vec(),
                        },
                    ));
                }
            }
        }
    }
    Ok(AxiomVerdict::pass(checked))
}

impl AxiomWitness {
    /// Re-checks the witness directly against the definitions.
    pub fn falsifies(&self, x: &InductiveSystem) -> Result<bool, LocalizationError> {
        let ql = quasi_lattice_of(x)?;
        match self {
            AxiomWitness::Injectivity { a, b, x: v } => {
                Ok(!is_zero_vec(v) && is_zero_vec(&x.link(*a, *b)?.apply(v)?))
            }
            AxiomWitness::Decomposition { a, b, join, target } => {
                if ql.join(*a, *b) != Some(*join) {
                    return Ok(false);
                }
                let combined = x.link(*a, *join)?.hstack(x.link(*b, *join)?)?;
                Ok(solve(&combined, target)?.is_none())
            }
            AxiomWitness::Gluing { a, b, upper, x1, x2 } => {
                if x.link(*a, *upper)?.apply(x1)? != x.link(*b, *upper)?.apply(x2)? {
                    return Ok(false);
                }
                let (stacked, _) = diagonal(x, *a, *b, ql.meet(*a, *b))?;
                let mut rhs = x1.clone();
                rhs.extend(x2.iter().cloned());
                Ok(solve(&stacked, &rhs)?.is_none())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularWitness {
    /// Nonzero `x` with `l_γ x = 0`.
    NotInjective {
        index: usize,
        #[serde(with = "crate::linalg::serde_q::vec")]
        x: Vector,
    },
    /// `y ∈ Y(a)` outside `im l_a` with `ρ_ab y = l_b x'`.
    NoLift {
        a: usize,
        b: usize,
        #[serde(with = "crate::linalg::serde_q::vec")]
        y: Vector,
        #[serde(with = "crate::linalg::serde_q::vec")]
        x_upper: Vector,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularReport {
    pub injective: bool,
    pub lifting: bool,
    pub witness: Option<RegularWitness>,
}

impl RegularReport {
    pub fn is_regular(&self) -> bool {
        self.injective && self.lifting
    }
}

pub fn check_regular(
    x: &InductiveSystem,
    y: &InductiveSystem,
    l: &SystemMorphism,
) -> Result<RegularReport, LocalizationError> {
    l.validate(x, y)?;
    let mut report = RegularReport {
        injective: true,
        lifting: true,
        witness: None,
    };
    for (g, m) in l.maps.iter().enumerate() {
        if let Some(k) = null_space(m).into_iter().next() {
            report.injective = false;
            report.witness = Some(RegularWitness::NotInjective { index: g, x: k });
            break;
        }
    }
    for (a, b) in x.index().comparable_pairs() {
        if a == b {
            continue;
        }
        // {(y, x') : ρ_ab y = l_b x'}
        let neg = l.maps[b].scale(&-Rational::one());
        let m = y.link(a, b)?.hstack(&neg)?;
        let image = l.maps[a].image();
        for v in null_space(&m) {
            let (yy, xx) = v.split_at(y.dim(a));
            if !image.contains(yy)? {
                report.lifting = false;
                if report.witness.is_none() {
                    report.witness = Some(RegularWitness::NoLift {
                        a,
                        b,
                        y: yy.to_vec(),
                        x_upper: xx.to_vec(),
                    });
                }
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Multiplicity of each point in a free model.
pub type Multiplicities = Vec<usize>;

/// Coordinates of the fiber over `mask`: for each member point in order, its copies.
fn fiber_layout(mask: u32, mult: &[usize]) -> Vec<(usize, usize)> {
    (0..mult.len())
        .filter(|&p| mask >> p & 1 == 1)
        .flat_map(|p| (0..mult[p]).map(move |c| (p, c)))
        .collect()
}

pub fn validate_family(family: &SetFamily) -> Result<(), LocalizationError> {
    if family.is_empty() {
        return Err(LocalizationError::EmptyFamily);
    }
    if let Some((a, b)) = family.intersection_witness() {
        return Err(LocalizationError::NotIntersectionClosed(a, b));
    }
    if let Some((a, b)) = family.bounded_union_witness() {
        return Err(LocalizationError::NotJoinClosed(a, b));
    }
    Ok(())
}

/// `X(γ)` is free on the points of `γ`, each point repeated `mult[p]` times;
/// links are the coordinate inclusions.
pub fn generate_free_model(family: &SetFamily, mult: &[usize]) -> Result<InductiveSystem, LocalizationError> {
    validate_family(family)?;
    if mult.len() != family.points {
        return Err(LocalizationError::Multiplicities {
            expected: family.points,
            found: mult.len(),
        });
    }
    let layouts: Vec<Vec<(usize, usize)>> = family.sets.iter().map(|&m| fiber_layout(m, mult)).collect();
    let dims = layouts.iter().map(Vec::len).collect();
    let x = InductiveSystem::from_fn(family.poset(), dims, |a, b| {
        let (src, dst) = (&layouts[a], &layouts[b]);
        let mut m = Matrix::zeros(dst.len(), src.len());
        for (c, key) in src.iter().enumerate() {
            let r = dst.iter().position(|k| k == key).expect("subset inclusion");
            m.set(r, c, Rational::one());
        }
        m
    })?;
    Ok(x)
}

/// Free model with one copy of every point.
pub fn generate_simple_free_model(family: &SetFamily) -> Result<InductiveSystem, LocalizationError> {
    generate_free_model(family, &vec![1; family.points])
}

/// The inclusion of the free model on `mult_x` into the one on `mult_y`,
/// twisted pointwise by injective blocks `A_p`.
pub fn free_morphism(
    family: &SetFamily,
    mult_x: &[usize],
    mult_y: &[usize],
    blocks: &[Matrix],
) -> Result<(InductiveSystem, InductiveSystem, SystemMorphism), LocalizationError> {
    let x = generate_free_model(family, mult_x)?;
    let y = generate_free_model(family, mult_y)?;
    let maps = family
        .sets
        .iter()
        .map(|&mask| {
            let src = fiber_layout(mask, mult_x);
            let dst = fiber_layout(mask, mult_y);
            let mut m = Matrix::zeros(dst.len(), src.len());
            for (c, &(p, i)) in src.iter().enumerate() {
                for (r, &(p2, j)) in dst.iter().enumerate() {
                    if p == p2 {
                        m.set(r, c, blocks[p].get(j, i).clone());
                    }
                }
            }
            m
        })
        .collect();
    let l = SystemMorphism { maps };
    l.validate(&x, &y)?;
    Ok((x, y, l))
}

/// Replaces every fiber `Y(γ)` by its image under `T_γ`; links become
/// `T_b ρ T_a⁻¹`. The result is isomorphic to the input.
pub fn change_fiber_bases(
    y: &InductiveSystem,
    transforms: &[Matrix],
    inverses: &[Matrix],
) -> Result<InductiveSystem, SystemError> {
    let mut links = BTreeMap::new();
    for (&(a, b), m) in y.links() {
        links.insert((a, b), transforms[b].mul(m)?.mul(&inverses[a])?);
    }
    InductiveSystem::new(y.index().clone(), y.dims().to_vec(), links)
}

/// Random `n×n` unimodular integer matrix and its inverse:
/// a product of a unit lower and a unit upper triangular factor.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> (Matrix, Matrix) {
    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, q(rng.gen_range(-1..=1)));
            upper.set(j, i, q(rng.gen_range(-1..=1)));
        }
    }
    let m = lower.mul(&upper).expect("square factors");
    let inv = invert(&m).expect("unimodular");
    (m, inv)
}

pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let cols: Option<Vec<Vector>> = (0..n)
        .map(|i| solve(m, &unit_vec(n, i)).ok().flatten().map(|s| s.particular))
        .collect();
    let inv = Matrix::from_columns(n, &cols?).ok()?;
    inv.mul(m).ok()?.is_identity().then_some(inv)
}

/// Random injective `rows×cols` integer matrix (`rows ≥ cols`).
pub fn random_injective<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    loop {
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, q(rng.gen_range(-2..=2)));
            }
        }
        if m.is_injective() {
            return m;
        }
    }
}

/// A random regular morphism between free models over `family`, with fibers
/// of `Y` optionally scrambled by unimodular basis changes.
pub fn random_regular_morphism<R: Rng>(
    rng: &mut R,
    family: &SetFamily,
    max_mult: usize,
    scramble: bool,
) -> Result<(InductiveSystem, InductiveSystem, SystemMorphism), LocalizationError> {
    let mult_y: Vec<usize> = (0..family.points).map(|_| rng.gen_range(1..=max_mult)).collect();
    let mult_x: Vec<usize> = mult_y.iter().map(|&m| rng.gen_range(0..=m)).collect();
    let blocks: Vec<Matrix> = mult_x
        .iter()
        .zip(&mult_y)
        .map(|(&c, &r)| random_injective(rng, r, c))
        .collect();
    let (x, y, l) = free_morphism(family, &mult_x, &mult_y, &blocks)?;
    if !scramble {
        return Ok((x, y, l));
    }
    let pairs: Vec<(Matrix, Matrix)> = y.dims().iter().map(|&d| random_unimodular(rng, d)).collect();
    let (ts, invs): (Vec<Matrix>, Vec<Matrix>) = pairs.into_iter().unzip();
    let y2 = change_fiber_bases(&y, &ts, &invs)?;
    let maps: Result<Vec<Matrix>, _> = ts.iter().zip(&l.maps).map(|(t, m)| t.mul(m)).collect();
    let l2 = SystemMorphism { maps: maps? };
    l2.validate(&x, &y2)?;
    Ok((x, y2, l2))
}

/// Systems over the square `{∅, {1}, {2}, {1,2}}` that break exactly one axiom.
pub fn generate_counterexample(axiom: Axiom) -> InductiveSystem {
    let family = SetFamily::new(2, vec![0b00, 0b01, 0b10, 0b11]);
    let p = family.poset();
    match axiom {
        // Zero link between nonzero fibers on a two-element chain.
        Axiom::I => {
            let chain = SetFamily::new(1, vec![0, 1]).poset();
            InductiveSystem::from_fn(chain, vec![1, 1], |a, b| {
                if a == b {
                    Matrix::identity(1)
                } else {
                    Matrix::zeros(1, 1)
                }
            })
            .expect("valid system")
        }
        // Only the top fiber is nonzero: 0 ⊕ 0 cannot reach it.
        Axiom::II => InductiveSystem::from_fn(p, vec![0, 0, 0, 1], |a, b| {
            let d = |g: usize| usize::from(g == 3);
            if a == b {
                Matrix::identity(d(a))
            } else {
                Matrix::zeros(d(b), d(a))
            }
        })
        .expect("valid system"),
        // Bottom fiber zero, the rest Q with identity links: the two atoms
        // agree at the top but share no preimage.
        Axiom::III => InductiveSystem::from_fn(p, vec![0, 1, 1, 1], |a, b| {
            let d = |g: usize| usize::from(g != 0);
            if d(a) == 1 {
                Matrix::identity(1)
            } else {
                Matrix::zeros(d(b), 0)
            }
        })
        .expect("valid system"),
    }
}

/// Trivial system with all fibers zero over the same index set.
pub fn zero_system(y: &InductiveSystem) -> InductiveSystem {
    InductiveSystem::from_fn(y.index().clone(), vec![0; y.len()], |_, _| Matrix::zeros(0, 0)).expect("zero system")
}

/// Recovers a split `x = ρ_{a,j} x₁ + ρ_{b,j} x₂` as in (II), canonically.
pub fn split_along_join(
    x: &InductiveSystem,
    a: usize,
    b: usize,
    j: usize,
    v: &[Rational],
) -> Result<Option<(Vector, Vector)>, LocalizationError> {
    let combined = x.link(a, j)?.hstack(x.link(b, j)?)?;
    Ok(solve(&combined, v)?.map(|s| {
        let (x1, x2) = s.particular.split_at(x.dim(a));
        (x1.to_vec(), x2.to_vec())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singleton_point_model() {
        let x = generate_simple_free_model(&SetFamily::new(1, vec![0, 1])).unwrap();
        assert_eq!(x.dims(), &[0, 1]);
    }

    #[test]
    fn boolean_and_topless_models_pass() {
        for fam in [SetFamily::new(3, (0..8).collect()), SetFamily::new(3, (0..7).collect())] {
            let x = generate_simple_free_model(&fam).unwrap();
            let r = check_prelocalizable(&x).unwrap();
            assert!(r.all_hold(), "{r:?}");
        }
    }

    #[test]
    fn unclosed_families_are_rejected() {
        assert_eq!(
            generate_simple_free_model(&SetFamily::new(2, vec![0b01, 0b10])),
            Err(LocalizationError::NotIntersectionClosed(0b01, 0b10))
        );
        let fam = SetFamily::new(3, vec![0, 0b001, 0b010, 0b100, 0b111]);
        assert!(matches!(generate_simple_free_model(&fam), Err(LocalizationError::NotJoinClosed(..))));
    }

    #[test]
    fn counterexamples_fail_their_axiom() {
        let r = check_prelocalizable(&generate_counterexample(Axiom::III)).unwrap();
        assert_eq!(r.failing(), vec![Axiom::III]);
        match r.gluing.witness.as_ref().unwrap() {
            AxiomWitness::Gluing { x1, x2, .. } => {
                assert_eq!(x1, x2);
                assert!(!is_zero_vec(x1));
            }
            w => panic!("unexpected witness {w:?}"),
        }
        let r = check_prelocalizable(&generate_counterexample(Axiom::II)).unwrap();
        assert_eq!(r.failing(), vec![Axiom::II]);
        let x = generate_counterexample(Axiom::I);
        let r = check_prelocalizable(&x).unwrap();
        assert!(!r.injective.holds);
        for v in [&r.injective, &r.decomposition, &r.gluing] {
            if let Some(w) = &v.witness {
                assert!(w.falsifies(&x).unwrap());
            }
        }
    }

    #[test]
    fn identity_is_regular_and_zero_is_not() {
        let fam = SetFamily::new(2, (0..4).collect());
        let x = generate_simple_free_model(&fam).unwrap();
        assert!(check_regular(&x, &x, &SystemMorphism::identity(&x)).unwrap().is_regular());
        let r = check_regular(&x, &x, &SystemMorphism::zero(&x, &x)).unwrap();
        assert!(!r.injective);
        // Zero from the trivial system is regular because the links of x are injective.
        let z = zero_system(&x);
        assert!(check_regular(&z, &x, &SystemMorphism::zero(&z, &x)).unwrap().is_regular());
        // On a chain, l_0 = 0 into Q while l_1 is the identity: the lift fails at 0.
        let chain = SetFamily::new(1, vec![0, 1]);
        let src = generate_simple_free_model(&chain).unwrap();
        let dst = InductiveSystem::constant(chain.poset(), 1).unwrap();
        let l = SystemMorphism {
            maps: vec![Matrix::zeros(1, 0), Matrix::identity(1)],
        };
        let r = check_regular(&src, &dst, &l).unwrap();
        assert!(r.injective);
        assert!(!r.lifting);
        assert!(matches!(r.witness, Some(RegularWitness::NoLift { a: 0, b: 1, .. })));
    }

    #[test]
    fn random_morphisms_are_regular_between_prelocalizable_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fam = SetFamily::new(3, (0..8).collect());
        for scramble in [false, true] {
            let (x, y, l) = random_regular_morphism(&mut rng, &fam, 2, scramble).unwrap();
            assert!(check_regular(&x, &y, &l).unwrap().is_regular());
            assert!(check_prelocalizable(&x).unwrap().all_hold());
            assert!(check_prelocalizable(&y).unwrap().all_hold());
        }
    }

    #[test]
    fn unimodular_inverse_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (m, inv) = random_unimodular(&mut rng, 5);
        assert!(m.mul(&inv).unwrap().is_identity());
    }
}
