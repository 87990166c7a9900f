//! Constructive membership for `N^Y_J ∩ (M^Y_I + L(M^X)) ⊆ N^Y_I + L(N^X_J)`
//! and its consequences for pushforwards along monotone maps.
//!
//! The engine raises the order of a decomposition
//! `y = ỹ + Σ σ^Y(y_{γγ'}, γ, γ')` (first index in `C_n`, second in `J ∖ I`)
//! one stage at a time until no terms remain. Every stage is recorded in a
//! certificate that can be replayed with exact arithmetic.

use crate::lattice::{ElementSet, LatticeError, Poset, QuasiLattice};
use crate::linalg::{add_vec, is_zero_vec, neg_vec, serde_q, solve, sub_vec, unit_vec, zero_vec, Matrix, Rational, Vector};
use crate::localization::{check_prelocalizable, check_regular, quasi_lattice_of, Axiom, LocalizationError};
use crate::system::{
    check_monotone, pushforward, pushforward_morphism, InductiveSystem, Pushforward, SumVector, SystemError,
    SystemMorphism,
};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "hypothesis", rename_all = "snake_case")]
pub enum Precondition {
    QuasiLattice { detail: String },
    Distributive { witness: (usize, usize, usize) },
    SourceAxiom { axiom: Axiom },
    TargetAxiom { axiom: Axiom },
    Morphism { detail: String },
    Regular,
    Hereditary,
    MeetClosed,
    Monotone { detail: String },
    InputShape { detail: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("precondition failed: {0:?}")]
    PreconditionFailed(Precondition),
    #[error("input is not in N^Y_J ∩ (M^Y_I + L(M^X))")]
    NotInLHS,
    #[error("the compatibility relation between the two classes does not hold")]
    RelationNotSatisfied,
    #[error("internal invariant violated: {0}")]
    EngineInvariant(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Localization(#[from] LocalizationError),
}

impl From<crate::linalg::LinalgError> for DecompositionError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        DecompositionError::System(e.into())
    }
}

impl From<LatticeError> for DecompositionError {
    fn from(e: LatticeError) -> Self {
        DecompositionError::System(e.into())
    }
}

type Result<T> = std::result::Result<T, DecompositionError>;

fn invariant(msg: impl Into<String>) -> DecompositionError {
    DecompositionError::EngineInvariant(msg.into())
}

/// Which axioms the engine insists on before running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomPolicy {
    /// (I)–(III) for both systems.
    #[default]
    Full,
    /// Only what the construction uses: (II) for the source, (II) and (III) for the target.
    Minimal,
}

/// `σ(vector, from, to)` in one of the two systems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaTerm {
    pub from: usize,
    pub to: usize,
    #[serde(with = "serde_q::vec")]
    pub vector: Vector,
}

type Terms = BTreeMap<(usize, usize), Vector>;

fn add_term(terms: &mut Terms, from: usize, to: usize, v: &[Rational]) {
    if is_zero_vec(v) {
        return;
    }
    let slot = terms.entry((from, to)).or_insert_with(|| zero_vec(v.len()));
    *slot = add_vec(slot, v);
    if is_zero_vec(slot) {
        terms.remove(&(from, to));
    }
}

fn to_list(terms: &Terms) -> Vec<SigmaTerm> {
    terms
        .iter()
        .map(|(&(from, to), v)| SigmaTerm {
            from,
            to,
            vector: v.clone(),
        })
        .collect()
}

/// State after reaching a given order:
/// `input = Σ σ^Y(tilde_y) + L Σ σ^X(tilde_x) + Σ σ^Y(pending)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub order: usize,
    /// Terms of `ỹ` lying in `N^Y_I`.
    pub tilde_y: Vec<SigmaTerm>,
    /// Terms `x` with `L σ^X(x)` part of `ỹ`, lying in `N^X_J`.
    pub tilde_x: Vec<SigmaTerm>,
    /// The family `y_{γγ'}` with `γ ∈ C_order`, `γ' ∈ J ∖ I`.
    pub pending: Vec<SigmaTerm>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCounts {
    pub empty_lambda: usize,
    pub nonempty_lambda: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub hereditary: Vec<usize>,
    pub meet_closed: Vec<usize>,
    pub input: SumVector,
    pub stages: Vec<Stage>,
    pub final_order: usize,
    pub branches: BranchCounts,
}

impl DecompositionCertificate {
    pub fn final_stage(&self) -> &Stage {
        self.stages.last().expect("certificates have at least one stage")
    }
}

/// Everything the independent replayer needs, in one JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateBundle {
    pub source: InductiveSystem,
    pub target: InductiveSystem,
    pub morphism: SystemMorphism,
    pub certificate: DecompositionCertificate,
}

/// Validated inputs `X`, `Y`, `l` over a distributive quasi-lattice.
#[derive(Debug, Clone)]
pub struct Engine {
    pub x: InductiveSystem,
    pub y: InductiveSystem,
    pub l: SystemMorphism,
    pub ql: QuasiLattice,
    pub policy: AxiomPolicy,
}

fn precondition(p: Precondition) -> DecompositionError {
    DecompositionError::PreconditionFailed(p)
}

impl Engine {
    pub fn new(x: InductiveSystem, y: InductiveSystem, l: SystemMorphism, policy: AxiomPolicy) -> Result<Self> {
        let ql = quasi_lattice_of(&y).map_err(|e| precondition(Precondition::QuasiLattice { detail: e.to_string() }))?;
        if let Some(w) = ql.distributivity_witness() {
            return Err(precondition(Precondition::Distributive { witness: w }));
        }
        l.validate(&x, &y)
            .map_err(|e| precondition(Precondition::Morphism { detail: e.to_string() }))?;
        let (need_x, need_y): (&[Axiom], &[Axiom]) = match policy {
            AxiomPolicy::Full => (&[Axiom::I, Axiom::II, Axiom::III], &[Axiom::I, Axiom::II, Axiom::III]),
            AxiomPolicy::Minimal => (&[Axiom::II], &[Axiom::II, Axiom::III]),
        };
        let rx = check_prelocalizable(&x)?;
        if let Some(&a) = need_x.iter().find(|&&a| !rx.holds(a)) {
            return Err(precondition(Precondition::SourceAxiom { axiom: a }));
        }
        let ry = check_prelocalizable(&y)?;
        if let Some(&a) = need_y.iter().find(|&&a| !ry.holds(a)) {
            return Err(precondition(Precondition::TargetAxiom { axiom: a }));
        }
        if !check_regular(&x, &y, &l)?.is_regular() {
            return Err(precondition(Precondition::Regular));
        }
        Ok(Engine { x, y, l, ql, policy })
    }

    fn check_sets(&self, i: &ElementSet, j: &ElementSet) -> Result<()> {
        if i.iter().chain(j).any(|&g| g >= self.ql.len()) {
            return Err(precondition(Precondition::InputShape {
                detail: "index out of range".into(),
            }));
        }
        if !self.ql.is_hereditary(i) {
            return Err(precondition(Precondition::Hereditary));
        }
        if !self.ql.is_meet_closed(j) {
            return Err(precondition(Precondition::MeetClosed));
        }
        Ok(())
    }

    /// Exact test of `y ∈ N^Y_J ∩ (M^Y_I + L(M^X))`.
    pub fn in_lhs(&self, i: &ElementSet, j: &ElementSet, y: &SumVector) -> Result<bool> {
        let dense = y.to_dense(&self.y)?;
        if !self.y.relation_space(j)?.contains(&dense)? {
            return Ok(false);
        }
        let image = self.l.block_matrix(&self.x, &self.y).image();
        Ok(self.y.member_space(i).sum(&image)?.contains(&dense)?)
    }

    fn sigma_y(&self, terms: &Terms) -> Result<SumVector> {
        let mut s = SumVector::zero();
        for (&(a, b), v) in terms {
            s = s.add(&self.y.sigma(v, a, b)?);
        }
        Ok(s)
    }

    fn l_sigma_x(&self, terms: &Terms) -> Result<SumVector> {
        let mut s = SumVector::zero();
        for (&(a, b), v) in terms {
            s = s.add(&self.l.apply_sum(&self.x.sigma(v, a, b)?)?);
        }
        Ok(s)
    }

    fn solve_l(&self, g: usize, v: &[Rational]) -> Result<Vector> {
        solve(&self.l.maps[g], v)?
            .map(|s| s.particular)
            .ok_or_else(|| invariant(format!("no preimage under l at {g}")))
    }

    /// Runs the order-raising iteration, or reports `NotInLHS`.
    pub fn membership(&self, i: &ElementSet, j: &ElementSet, y: &SumVector) -> Result<DecompositionCertificate> {
        self.check_sets(i, j)?;
        y.check(&self.y)
            .map_err(|e| precondition(Precondition::InputShape { detail: e.to_string() }))?;
        if !self.in_lhs(i, j, y)? {
            return Err(DecompositionError::NotInLHS);
        }
        let mut tilde_y = Terms::new();
        let mut tilde_x = Terms::new();
        let mut pending = Terms::new();
        let mut branches = BranchCounts::default();

        // Order one: write y over the σ generators of cover pairs inside J.
        let covers = self.y.covers_within(j);
        let mut gens = Vec::new();
        let mut labels = Vec::new();
        for &(a, b) in &covers {
            for k in 0..self.y.dim(a) {
                gens.push(self.y.sigma(&unit_vec(self.y.dim(a), k), a, b)?.to_dense(&self.y)?);
                labels.push((a, b, k));
            }
        }
        let total = self.y.total_dim();
        let coeffs = if gens.is_empty() {
            if !y.is_zero() {
                return Err(invariant("nonzero input with an empty relation space"));
            }
            Vec::new()
        } else {
            let g = Matrix::from_columns(total, &gens)?;
            solve(&g, &y.to_dense(&self.y)?)?
                .ok_or_else(|| invariant("input in N_J has no σ expansion"))?
                .particular
        };
        for (&(a, b, k), c) in labels.iter().zip(&coeffs) {
            if c.is_zero() {
                continue;
            }
            let mut v = zero_vec(self.y.dim(a));
            v[k] = c.clone();
            // I is hereditary, so b ∈ I puts the whole term in N_I.
            if i.contains(&b) {
                add_term(&mut tilde_y, a, b, &v);
            } else {
                add_term(&mut pending, a, b, &v);
            }
        }

        let mut stages = Vec::new();
        if j.is_empty() {
            stages.push(self.stage(1, y, &tilde_y, &tilde_x, &pending)?);
            return Ok(DecompositionCertificate {
                hereditary: i.iter().copied().collect(),
                meet_closed: Vec::new(),
                input: y.clone(),
                stages,
                final_order: 1,
                branches,
            });
        }
        let stats = self.ql.order_statistics(j)?;
        let k = |g: usize| stats.k_of(g).expect("element of J");
        stages.push(self.stage(1, y, &tilde_y, &tilde_x, &pending)?);

        for n in 1..=j.len() {
            let c_n = stats.c(n);
            let snapshot = pending.clone();
            let mut next = Terms::new();
            for (&(g, g2), v) in &snapshot {
                if k(g) > n {
                    add_term(&mut next, g, g2, v);
                    continue;
                }
                if k(g) != n {
                    return Err(invariant(format!("term ({g},{g2}) below order {n}")));
                }
                let lambda: ElementSet = c_n
                    .iter()
                    .copied()
                    .filter(|&b| b != g && self.ql.poset.lt(b, g2))
                    .collect();
                let term = |b: usize| snapshot.get(&(b, g2)).cloned().unwrap_or_else(|| zero_vec(self.y.dim(b)));

                // The g2-component of ỹ − y is l_{g2} x'.
                let mut at_top = self.y.link(g, g2)?.apply(v)?;
                for &b in &lambda {
                    at_top = add_vec(&at_top, &self.y.link(b, g2)?.apply(&term(b))?);
                }
                self.solve_l(g2, &at_top)?;

                if lambda.is_empty() {
                    branches.empty_lambda += 1;
                    let x = self.solve_l(g, v)?;
                    add_term(&mut tilde_x, g, g2, &x);
                    continue;
                }
                branches.nonempty_lambda += 1;
                let (eta, parts) = self.split_nonempty(g, v, &lambda, &term)?;
                add_term(&mut tilde_x, g, g2, &eta);
                for (b, w) in parts {
                    let t = self.ql.meet(g, b);
                    add_term(&mut next, t, g2, &w);
                    if i.contains(&g) {
                        add_term(&mut tilde_y, t, g, &neg_vec(&w));
                    } else {
                        add_term(&mut next, t, g, &neg_vec(&w));
                    }
                }
            }
            pending = next;
            stages.push(self.stage(n + 1, y, &tilde_y, &tilde_x, &pending)?);
        }
        if !pending.is_empty() {
            return Err(invariant("terms remain after the last order"));
        }
        Ok(DecompositionCertificate {
            hereditary: i.iter().copied().collect(),
            meet_closed: j.iter().copied().collect(),
            input: y.clone(),
            stages,
            final_order: j.len() + 1,
            branches,
        })
    }

    /// The branch with a nonempty Λ: returns `η` and the family `w_β`.
    fn split_nonempty(
        &self,
        g: usize,
        v: &[Rational],
        lambda: &ElementSet,
        term: &dyn Fn(usize) -> Vector,
    ) -> Result<(Vector, Vec<(usize, Vector)>)> {
        let (x, y, ql) = (&self.x, &self.y, &self.ql);
        let bt = ql
            .join_all(lambda)
            .ok_or_else(|| invariant("Λ has no supremum although bounded by γ'"))?;
        let mut z = zero_vec(y.dim(bt));
        for &b in lambda {
            z = add_vec(&z, &y.link(b, bt)?.apply(&term(b))?);
        }
        let u = ql.join(g, bt).ok_or_else(|| invariant("γ ∨ β̃ undefined"))?;
        let at_u = add_vec(&y.link(g, u)?.apply(v)?, &y.link(bt, u)?.apply(&z)?);
        let xu = self.solve_l(u, &at_u)?;

        // (II) in X along γ ∨ β̃.
        let combined = x.link(g, u)?.hstack(x.link(bt, u)?)?;
        let split = solve(&combined, &xu)?
            .ok_or_else(|| invariant("source fails (II) at γ ∨ β̃"))?
            .particular;
        let (eta, zeta) = split.split_at(x.dim(g));

        // (III) in Y: glue along β̃ ∧ γ.
        let m = ql.meet(bt, g);
        let x1 = sub_vec(v, &self.l.maps[g].apply(eta)?);
        let x2 = neg_vec(&sub_vec(&z, &self.l.maps[bt].apply(zeta)?));
        let stacked = y.link(m, g)?.vstack(y.link(m, bt)?)?;
        let mut rhs = x1;
        rhs.extend(x2);
        let w = solve(&stacked, &rhs)?
            .ok_or_else(|| invariant("target fails (III) at β̃ ∧ γ"))?
            .particular;

        // β̃ ∧ γ is the join of the β ∧ γ; peel w apart one β at a time with (II).
        let betas: Vec<usize> = lambda.iter().copied().collect();
        let meets: Vec<usize> = betas.iter().map(|&b| ql.meet(b, g)).collect();
        let mut partial = vec![meets[0]];
        for &t in &meets[1..] {
            let prev = *partial.last().expect("nonempty");
            partial.push(ql.join(prev, t).ok_or_else(|| invariant("β ∧ γ pair unbounded"))?);
        }
        if *partial.last().expect("nonempty") != m {
            return Err(invariant("distributive identity failed for β̃ ∧ γ"));
        }
        let mut parts = Vec::with_capacity(betas.len());
        let mut cur = w;
        for idx in (1..betas.len()).rev() {
            let (s_prev, t, s) = (partial[idx - 1], meets[idx], partial[idx]);
            let combined = y.link(s_prev, s)?.hstack(y.link(t, s)?)?;
            let sol = solve(&combined, &cur)?
                .ok_or_else(|| invariant("target fails (II) while splitting w"))?
                .particular;
            let (rest, piece) = sol.split_at(y.dim(s_prev));
            parts.push((betas[idx], piece.to_vec()));
            cur = rest.to_vec();
        }
        parts.push((betas[0], cur));
        parts.reverse();
        Ok((eta.to_vec(), parts))
    }

    fn stage(&self, order: usize, y: &SumVector, ty: &Terms, tx: &Terms, pending: &Terms) -> Result<Stage> {
        let total = self.sigma_y(ty)?.add(&self.l_sigma_x(tx)?).add(&self.sigma_y(pending)?);
        if &total != y {
            return Err(invariant(format!("decomposition identity fails at order {order}")));
        }
        Ok(Stage {
            order,
            tilde_y: to_list(ty),
            tilde_x: to_list(tx),
            pending: to_list(pending),
        })
    }

    pub fn bundle(&self, certificate: DecompositionCertificate) -> CertificateBundle {
        CertificateBundle {
            source: self.x.clone(),
            target: self.y.clone(),
            morphism: self.l.clone(),
            certificate,
        }
    }

    /// Sums the final stage back into `(ỹ part in N^Y_I, x̃ ∈ N^X_J)`.
    pub fn final_parts(&self, cert: &DecompositionCertificate) -> Result<(SumVector, SumVector)> {
        let st = cert.final_stage();
        let collect = |terms: &[SigmaTerm], sys: &InductiveSystem| -> Result<SumVector> {
            let mut s = SumVector::zero();
            for t in terms {
                s = s.add(&sys.sigma(&t.vector, t.from, t.to)?);
            }
            Ok(s)
        };
        Ok((collect(&st.tilde_y, &self.y)?, collect(&st.tilde_x, &self.x)?))
    }
}

/// `N^Y_Γ ∩ M^Y_I` against `N^Y_I`, with a certificate per basis vector of
/// the left side from the engine run on the zero source system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleSystemReport {
    pub hereditary: Vec<usize>,
    pub equal: bool,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub certificates: Vec<DecompositionCertificate>,
}

pub fn lemmaa1_check(y: &InductiveSystem, i: &ElementSet) -> Result<SingleSystemReport> {
    let zero = crate::localization::zero_system(y);
    let l = SystemMorphism::zero(&zero, y);
    let engine = Engine::new(zero, y.clone(), l, AxiomPolicy::Full)?;
    engine.check_sets(i, &y.whole())?;
    let lhs = y.relation_space(&y.whole())?.intersect(&y.member_space(i))?;
    let rhs = y.relation_space(i)?;
    let mut certificates = Vec::new();
    for b in lhs.basis() {
        let v = SumVector::from_dense(y, b)?;
        certificates.push(engine.membership(i, &y.whole(), &v)?);
    }
    Ok(SingleSystemReport {
        hereditary: i.iter().copied().collect(),
        equal: lhs == rhs,
        lhs_dim: lhs.dim(),
        rhs_dim: rhs.dim(),
        certificates,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityVerdict {
    pub delta: usize,
    pub injective: bool,
    #[serde(with = "serde_q::vec")]
    pub kernel_vector: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftResult {
    #[serde(with = "serde_q::vec")]
    pub xi: Vector,
    pub certificate: DecompositionCertificate,
}

/// Pushforwards of `X`, `Y`, `l` along a monotone map into `Δ`.
#[derive(Debug, Clone)]
pub struct PushforwardSetting {
    pub engine: Engine,
    pub px: Pushforward,
    pub py: Pushforward,
    pub induced: SystemMorphism,
}

impl PushforwardSetting {
    pub fn new(engine: Engine, target: &Poset, lambda: &[usize]) -> Result<Self> {
        check_monotone(engine.y.index(), target, lambda)
            .map_err(|e| precondition(Precondition::Monotone { detail: e.to_string() }))?;
        let px = pushforward(&engine.x, target, lambda)?;
        let py = pushforward(&engine.y, target, lambda)?;
        let induced = pushforward_morphism(&engine.x, &engine.y, &engine.l, &px, &py)?;
        Ok(PushforwardSetting {
            engine,
            px,
            py,
            induced,
        })
    }

    pub fn injectivity(&self) -> Vec<InjectivityVerdict> {
        self.induced
            .maps
            .iter()
            .enumerate()
            .map(|(delta, m)| {
                let kernel = crate::linalg::null_space(m).into_iter().next();
                InjectivityVerdict {
                    delta,
                    injective: kernel.is_none(),
                    kernel_vector: kernel.unwrap_or_default(),
                }
            })
            .collect()
    }

    /// Given `ρ_{δδ'} η = λ(l)_{δ'} ξ'`, finds `ξ` at `δ` with
    /// `λ(l)_δ ξ = η` and `ρ_{δδ'} ξ = ξ'`.
    pub fn lift(&self, delta: usize, delta2: usize, eta: &[Rational], xi2: &[Rational]) -> Result<LiftResult> {
        let e = &self.engine;
        let (fx, fy, fx2, fy2) = (
            &self.px.fibers[delta],
            &self.py.fibers[delta],
            &self.px.fibers[delta2],
            &self.py.fibers[delta2],
        );
        let rho_y = self
            .py
            .system
            .link(delta, delta2)
            .map_err(|_| precondition(Precondition::InputShape { detail: "δ ≰ δ'".into() }))?;
        if eta.len() != fy.dim() || xi2.len() != fx2.dim() {
            return Err(precondition(Precondition::InputShape {
                detail: "class length does not match the fiber".into(),
            }));
        }
        if rho_y.apply(eta)? != self.induced.maps[delta2].apply(xi2)? {
            return Err(DecompositionError::RelationNotSatisfied);
        }
        let yv = fy.lift(eta)?;
        let x2 = fx2.lift(xi2)?;
        let lx2 = e.l.apply_dense(&e.x, &e.y, &x2)?;
        let diff = SumVector::from_dense(&e.y, &sub_vec(&lx2, &yv))?;
        let cert = e.membership(&fy.subset, &fy2.subset, &diff)?;
        let (_, tilde_x) = e.final_parts(&cert)?;
        let x = sub_vec(&x2, &tilde_x.to_dense(&e.x)?);
        let xi = fx.project(&x).map_err(|_| invariant("lifted vector left the member space at δ"))?;
        if self.induced.maps[delta].apply(&xi)? != eta {
            return Err(invariant("lift does not map to η"));
        }
        if self.px.system.link(delta, delta2)?.apply(&xi)? != xi2 {
            return Err(invariant("lift does not restrict to ξ'"));
        }
        Ok(LiftResult { xi, certificate: cert })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SetFamily;
    use crate::linalg::q;
    use crate::localization::{generate_simple_free_model, random_regular_morphism};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn cube_identity() -> Engine {
        let x = generate_simple_free_model(&SetFamily::new(3, (0..8).collect())).unwrap();
        let l = SystemMorphism::identity(&x);
        Engine::new(x.clone(), x, l, AxiomPolicy::Full).unwrap()
    }

    #[test]
    fn zero_input_gives_an_empty_certificate() {
        let e = cube_identity();
        let c = e.membership(&set(&[0]), &e.y.whole(), &SumVector::zero()).unwrap();
        assert!(c.stages.iter().all(|s| s.pending.is_empty() && s.tilde_x.is_empty() && s.tilde_y.is_empty()));
        assert_eq!(c.final_order, e.y.len() + 1);
    }

    #[test]
    fn input_outside_lhs_is_rejected() {
        let e = cube_identity();
        let y = SumVector::component(1, vec![q(1)]);
        assert_eq!(e.membership(&set(&[]), &e.y.whole(), &y), Err(DecompositionError::NotInLHS));
    }

    #[test]
    fn preconditions_are_named() {
        let e = cube_identity();
        let not_hereditary = set(&[7]);
        assert_eq!(
            e.membership(&not_hereditary, &e.y.whole(), &SumVector::zero()),
            Err(DecompositionError::PreconditionFailed(Precondition::Hereditary))
        );
        // singletons {1} and {2} without their meet ∅
        assert_eq!(
            e.membership(&set(&[]), &set(&[1, 2]), &SumVector::zero()),
            Err(DecompositionError::PreconditionFailed(Precondition::MeetClosed))
        );
        let bad = crate::localization::generate_counterexample(Axiom::III);
        let r = Engine::new(bad.clone(), bad.clone(), SystemMorphism::identity(&bad), AxiomPolicy::Full);
        assert_eq!(
            r.unwrap_err(),
            DecompositionError::PreconditionFailed(Precondition::SourceAxiom { axiom: Axiom::III })
        );
        let r = Engine::new(bad.clone(), bad.clone(), SystemMorphism::identity(&bad), AxiomPolicy::Minimal);
        assert_eq!(
            r.unwrap_err(),
            DecompositionError::PreconditionFailed(Precondition::TargetAxiom { axiom: Axiom::III })
        );
    }

    #[test]
    fn both_branches_fire_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fam = SetFamily::new(3, (0..8).collect());
        let mut branches = BranchCounts::default();
        // {1} ⊂ {1,2} ⊂ {1,2,3}, {1} ⊂ {1,2}, and the whole cube
        let js = [set(&[1, 4, 7]), set(&[1, 4]), (0..8).collect::<ElementSet>()];
        for round in 0..6 {
            let (x, y, l) = random_regular_morphism(&mut rng, &fam, 2, true).unwrap();
            let e = Engine::new(x, y, l, AxiomPolicy::Full).unwrap();
            let i = if round % 2 == 0 { set(&[]) } else { set(&[0, 1]) };
            for j in &js {
                let image = e.l.block_matrix(&e.x, &e.y).image();
                let lhs = e
                    .y
                    .relation_space(j)
                    .unwrap()
                    .intersect(&e.y.member_space(&i).sum(&image).unwrap())
                    .unwrap();
                for b in lhs.basis() {
                    let c = e.membership(&i, j, &SumVector::from_dense(&e.y, b).unwrap()).unwrap();
                    branches.empty_lambda += c.branches.empty_lambda;
                    branches.nonempty_lambda += c.branches.nonempty_lambda;
                }
            }
        }
        assert!(branches.empty_lambda > 0, "{branches:?}");
        assert!(branches.nonempty_lambda > 0, "{branches:?}");
    }

    #[test]
    fn single_system_identity_on_the_cube() {
        let y = generate_simple_free_model(&SetFamily::new(3, (0..8).collect())).unwrap();
        let ql = crate::localization::quasi_lattice_of(&y).unwrap();
        for g in 0..y.len() {
            let i = ql.poset.down_set(g);
            let r = lemmaa1_check(&y, &i).unwrap();
            assert!(r.equal);
            assert_eq!(r.lhs_dim, r.rhs_dim);
        }
        let r = lemmaa1_check(&y, &set(&[])).unwrap();
        assert!(r.equal && r.lhs_dim == 0);
        let r = lemmaa1_check(&y, &y.whole()).unwrap();
        assert!(r.equal && r.lhs_dim == y.relation_space(&y.whole()).unwrap().dim());
    }

    #[test]
    fn trivial_lifts() {
        let x = generate_simple_free_model(&SetFamily::new(2, (0..4).collect())).unwrap();
        let e = Engine::new(x.clone(), x.clone(), SystemMorphism::identity(&x), AxiomPolicy::Full).unwrap();
        let target = Poset::chain(3);
        let s = PushforwardSetting::new(e, &target, &[0, 1, 1, 2]).unwrap();
        assert!(s.injectivity().iter().all(|v| v.injective));
        for (d, d2) in target.comparable_pairs() {
            let eta = zero_vec(s.py.fibers[d].dim());
            let xi2 = zero_vec(s.px.fibers[d2].dim());
            assert!(is_zero_vec(&s.lift(d, d2, &eta, &xi2).unwrap().xi));
        }
        // identity l: λ(l)_δ is the identity, so ξ = η
        let eta: Vector = (0..s.py.fibers[1].dim()).map(|k| q(k as i64 + 1)).collect();
        let xi2 = s.px.system.link(1, 1).unwrap().apply(&eta).unwrap();
        assert_eq!(s.lift(1, 1, &eta, &xi2).unwrap().xi, eta);
        let bad = vec![q(1); s.px.fibers[2].dim()];
        assert_eq!(
            s.lift(1, 2, &zero_vec(s.py.fibers[1].dim()), &bad),
            Err(DecompositionError::RelationNotSatisfied)
        );
    }
}
