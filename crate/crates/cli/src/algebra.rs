//! Subcommands for the exact algebra: lattices, systems, regular morphisms,
//! the decomposition engine, the single-system identity, and lifting.

use crate::config::RunConfig;
use crate::oracle;
use crate::report::Outcome;
use crate::{input_error, parse_json, CliError};
use carrier_core::corpus::{closed_families, random_family, random_hereditary, random_meet_closed, random_monotone_map};
use carrier_core::decomposition::{
    lemmaa1_check, AxiomPolicy, CertificateBundle, DecompositionError, Engine, PushforwardSetting,
};
use carrier_core::lattice::{validate_quasi_lattice, ElementSet, Poset, SetFamily};
use carrier_core::linalg::{q, serde_q, Matrix, Rational, Vector};
use carrier_core::localization::{
    change_fiber_bases, check_prelocalizable, check_regular, generate_counterexample, generate_free_model,
    random_regular_morphism, random_unimodular, Axiom, PrelocReport, RegularReport,
};
use carrier_core::replay::{replay_bundle, ReplayError};
use carrier_core::system::{format_vector, InductiveSystem, SumVector, SystemMorphism};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------- lattices

#[derive(Debug, Clone, Serialize)]
pub struct LatticeVerdict {
    pub name: String,
    pub elements: usize,
    pub quasi_lattice: bool,
    pub error: Option<String>,
    pub distributive: bool,
    /// `(a, b, c)` with `a ∧ (b ∨ c) ≠ (a ∧ b) ∨ (a ∧ c)`.
    pub witness: Option<(usize, usize, usize)>,
}

pub fn lattice_verdict(name: &str, p: &Poset) -> LatticeVerdict {
    let mut v = LatticeVerdict {
        name: name.to_string(),
        elements: p.elements.len(),
        quasi_lattice: false,
        error: None,
        distributive: false,
        witness: None,
    };
    if let Err(e) = p.validate() {
        v.error = Some(e.to_string());
        return v;
    }
    match validate_quasi_lattice(p) {
        Ok(ql) => {
            v.quasi_lattice = true;
            v.witness = ql.distributivity_witness();
            v.distributive = v.witness.is_none();
        }
        Err(e) => v.error = Some(e.to_string()),
    }
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct Expected<T> {
    pub expected_distributive: bool,
    #[serde(flatten)]
    pub verdict: T,
}

/// Two minimal elements below two maximal ones: the pair has no join.
fn bowtie() -> Poset {
    let names = ["a", "b", "c", "d"].map(String::from).to_vec();
    Poset::from_fn(names, |x, y| x == y || (x < 2 && y >= 2)).expect("bowtie is a poset")
}

pub fn verify_lattice(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    if let Some(text) = input {
        let p: Poset = parse_json(text, "input", "poset")?;
        p.validate().map_err(input_error)?;
        let v = lattice_verdict("input", &p);
        return Ok(Outcome::new(v.quasi_lattice && v.distributive, v));
    }
    let mut rows = Vec::new();
    for p in 1..=cfg.budget_usize("points") {
        for fam in closed_families(p) {
            let name = format!("family{p}:{}", fam.sets.iter().map(|&m| SetFamily::label(m)).collect::<Vec<_>>().join(","));
            rows.push(Expected { expected_distributive: true, verdict: lattice_verdict(&name, &fam.poset()) });
        }
    }
    for (name, p) in [("M3", Poset::m3()), ("N5", Poset::n5()), ("bowtie", bowtie())] {
        rows.push(Expected { expected_distributive: false, verdict: lattice_verdict(name, &p) });
    }
    let agree = |r: &Expected<LatticeVerdict>| r.expected_distributive == (r.verdict.quasi_lattice && r.verdict.distributive);
    let mismatches: Vec<&str> = rows.iter().filter(|r| !agree(r)).map(|r| r.verdict.name.as_str()).collect();
    #[derive(Serialize)]
    struct Body<'a> {
        posets: usize,
        mismatches: Vec<&'a str>,
        verdicts: &'a [Expected<LatticeVerdict>],
    }
    let passed = mismatches.is_empty();
    Ok(Outcome::new(passed, Body { posets: rows.len(), mismatches, verdicts: &rows }))
}

// ----------------------------------------------------------------- systems

fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let mut m = Matrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            m.set(r, c, a.get(r, c).clone());
        }
    }
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            m.set(a.rows() + r, a.cols() + c, b.get(r, c).clone());
        }
    }
    m
}

/// Fiberwise direct sum of two systems over the same index poset.
pub fn direct_sum(a: &InductiveSystem, b: &InductiveSystem) -> InductiveSystem {
    let dims = a.dims().iter().zip(b.dims()).map(|(x, y)| x + y).collect();
    InductiveSystem::from_fn(a.index().clone(), dims, |s, t| {
        block_diag(a.link(s, t).expect("comparable"), b.link(s, t).expect("comparable"))
    })
    .expect("direct sum of systems")
}

/// Replaces each fiber basis by a random unimodular change.
pub fn scramble<R: Rng>(rng: &mut R, x: &InductiveSystem) -> InductiveSystem {
    let pairs: Vec<(Matrix, Matrix)> = x.dims().iter().map(|&d| random_unimodular(rng, d)).collect();
    let (ts, invs): (Vec<Matrix>, Vec<Matrix>) = pairs.into_iter().unzip();
    change_fiber_bases(x, &ts, &invs).expect("basis change")
}

/// One member of the prelocalizability corpus with the axioms it should fail.
#[derive(Debug, Clone)]
pub struct CorpusSystem {
    pub name: String,
    pub system: InductiveSystem,
    pub expected_failing: Vec<Axiom>,
}

/// Free models on every closed family of up to `points` points (one per
/// symmetry class), scrambled copies with random multiplicities for the
/// families on at most three points, and counterexamples to each axiom,
/// alone and summed with free models.
pub fn prelocalizability_corpus(points: usize, seed: u64) -> Vec<CorpusSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for p in 1..=points {
        for fam in closed_families(p) {
            let label = fam.sets.iter().map(|&m| SetFamily::label(m)).collect::<Vec<_>>().join(",");
            let x = generate_free_model(&fam, &vec![1; p]).expect("closed family");
            out.push(CorpusSystem { name: format!("free{p}[{label}]"), system: x, expected_failing: vec![] });
            if p <= 3 {
                let mult: Vec<usize> = (0..p).map(|_| rng.gen_range(1..=2)).collect();
                let x = scramble(&mut rng, &generate_free_model(&fam, &mult).expect("closed family"));
                out.push(CorpusSystem {
                    name: format!("scrambled{p}{mult:?}[{label}]"),
                    system: x,
                    expected_failing: vec![],
                });
            }
        }
    }
    for axiom in [Axiom::I, Axiom::II, Axiom::III] {
        let bad = generate_counterexample(axiom);
        // (III) with equal indices forces injective links, so (I) never fails alone
        let expected = if axiom == Axiom::I { vec![Axiom::I, Axiom::III] } else { vec![axiom] };
        out.push(CorpusSystem { name: format!("counterexample-{axiom:?}"), system: bad.clone(), expected_failing: expected.clone() });
        let fam = if axiom == Axiom::I {
            SetFamily::new(1, vec![0, 1])
        } else {
            SetFamily::new(2, vec![0b00, 0b01, 0b10, 0b11])
        };
        for mult in 1..=2 {
            let free = generate_free_model(&fam, &vec![mult; fam.points]).expect("closed family");
            let sum = scramble(&mut rng, &direct_sum(&bad, &free));
            out.push(CorpusSystem {
                name: format!("counterexample-{axiom:?}+free{mult}"),
                system: sum,
                expected_failing: expected.clone(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemVerdict {
    pub name: String,
    pub index_size: usize,
    pub total_dim: usize,
    pub expected_failing: Option<Vec<Axiom>>,
    pub failing: Vec<Axiom>,
    pub oracle_failing: Vec<Axiom>,
    /// Every reported witness falsifies its axiom when re-checked.
    pub witnesses_confirmed: bool,
    pub agrees: bool,
}

pub fn system_verdict(name: &str, x: &InductiveSystem, expected: Option<&[Axiom]>) -> Result<(SystemVerdict, PrelocReport), CliError> {
    let report = check_prelocalizable(x).map_err(input_error)?;
    let failing = report.failing();
    let oracle_failing = oracle::failing_axioms(x);
    let witnesses_confirmed = [&report.injective, &report.decomposition, &report.gluing]
        .iter()
        .filter_map(|v| v.witness.as_ref())
        .all(|w| w.falsifies(x).unwrap_or(false));
    let agrees = failing == oracle_failing && witnesses_confirmed && expected.is_none_or(|e| e == failing.as_slice());
    Ok((
        SystemVerdict {
            name: name.to_string(),
            index_size: x.len(),
            total_dim: x.total_dim(),
            expected_failing: expected.map(<[Axiom]>::to_vec),
            failing,
            oracle_failing,
            witnesses_confirmed,
            agrees,
        },
        report,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemCorpusReport {
    pub systems: usize,
    pub free_models: usize,
    pub counterexamples: usize,
    pub disagreements: Vec<String>,
    pub verdicts: Vec<SystemVerdict>,
}

pub fn system_corpus(points: usize, seed: u64) -> Result<SystemCorpusReport, CliError> {
    let corpus = prelocalizability_corpus(points, seed);
    let verdicts: Vec<SystemVerdict> = corpus
        .par_iter()
        .map(|c| system_verdict(&c.name, &c.system, Some(&c.expected_failing)).map(|v| v.0))
        .collect::<Result<_, _>>()?;
    Ok(SystemCorpusReport {
        systems: verdicts.len(),
        free_models: corpus.iter().filter(|c| c.expected_failing.is_empty()).count(),
        counterexamples: corpus.iter().filter(|c| !c.expected_failing.is_empty()).count(),
        disagreements: verdicts.iter().filter(|v| !v.agrees).map(|v| v.name.clone()).collect(),
        verdicts,
    })
}

pub fn verify_system(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    if let Some(text) = input {
        let x: InductiveSystem = parse_json(text, "input", "inductive-system")?;
        let (v, report) = system_verdict("input", &x, None)?;
        #[derive(Serialize)]
        struct Body {
            verdict: SystemVerdict,
            report: PrelocReport,
        }
        let passed = v.failing.is_empty() && v.agrees;
        return Ok(Outcome::new(passed, Body { verdict: v, report }));
    }
    let seed = cfg.seed_for("verify-system.corpus");
    let r = system_corpus(cfg.budget_usize("points"), seed)?;
    Ok(Outcome::new(r.disagreements.is_empty(), r).with_seed("corpus", seed))
}

// --------------------------------------------------------------- morphisms

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismInput {
    pub source: InductiveSystem,
    pub target: InductiveSystem,
    pub morphism: SystemMorphism,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularVerdict {
    pub name: String,
    pub expected_regular: Option<bool>,
    pub report: RegularReport,
    pub oracle_injective: bool,
    pub oracle_lifting: bool,
    pub agrees: bool,
}

fn regular_verdict(name: &str, m: &MorphismInput, expected: Option<bool>) -> Result<RegularVerdict, CliError> {
    let report = check_regular(&m.source, &m.target, &m.morphism).map_err(input_error)?;
    let (oi, ol) = oracle::regularity(&m.source, &m.target, &m.morphism);
    let agrees = report.injective == oi
        && (!oi || report.lifting == ol)
        && expected.is_none_or(|e| e == report.is_regular());
    Ok(RegularVerdict {
        name: name.to_string(),
        expected_regular: expected,
        report,
        oracle_injective: oi,
        oracle_lifting: ol,
        agrees,
    })
}

/// Regular morphisms between random free models and two that are not:
/// a zero map out of a nonzero system, and one that fails the lifting
/// property on a two-element chain.
pub fn regular_corpus(instances: usize, seed: u64) -> Vec<(String, MorphismInput, bool)> {
    let mut out = Vec::new();
    for i in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::config::derive_seed(seed, &format!("regular{i}")));
        let points = rng.gen_range(1..=3);
        let fam = random_family(&mut rng, points, 4);
        let (x, y, l) = random_regular_morphism(&mut rng, &fam, 2, true).expect("closed family");
        out.push((format!("random{i}"), MorphismInput { source: x, target: y, morphism: l }, true));
    }
    let chain = SetFamily::new(1, vec![0, 1]).poset();
    let y = InductiveSystem::constant(chain.clone(), 1).expect("constant");
    let zero = SystemMorphism { maps: vec![Matrix::zeros(1, 1), Matrix::zeros(1, 1)] };
    out.push(("zero-map".into(), MorphismInput { source: y.clone(), target: y.clone(), morphism: zero }, false));
    let x = InductiveSystem::from_fn(chain, vec![0, 1], |a, b| {
        if a == b {
            Matrix::identity([0, 1][a])
        } else {
            Matrix::zeros(1, 0)
        }
    })
    .expect("system");
    let l = SystemMorphism { maps: vec![Matrix::zeros(1, 0), Matrix::identity(1)] };
    out.push(("no-lift".into(), MorphismInput { source: x, target: y, morphism: l }, false));
    out
}

pub fn verify_regular(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    if let Some(text) = input {
        let m: MorphismInput = parse_json(text, "input", "morphism")?;
        let v = regular_verdict("input", &m, None)?;
        return Ok(Outcome::new(v.report.is_regular() && v.agrees, v));
    }
    let seed = cfg.seed_for("verify-regular.corpus");
    let verdicts: Vec<RegularVerdict> = regular_corpus(cfg.budget_usize("instances"), seed)
        .iter()
        .map(|(n, m, e)| regular_verdict(n, m, Some(*e)))
        .collect::<Result<_, _>>()?;
    let disagreements: Vec<String> = verdicts.iter().filter(|v| !v.agrees).map(|v| v.name.clone()).collect();
    #[derive(Serialize)]
    struct Body {
        morphisms: usize,
        disagreements: Vec<String>,
        verdicts: Vec<RegularVerdict>,
    }
    let passed = disagreements.is_empty();
    Ok(Outcome::new(passed, Body { morphisms: verdicts.len(), disagreements, verdicts }).with_seed("corpus", seed))
}

// ------------------------------------------------------------- decomposition

/// Inputs of one membership query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipInput {
    pub source: InductiveSystem,
    pub target: InductiveSystem,
    pub morphism: SystemMorphism,
    pub hereditary: ElementSet,
    pub meet_closed: ElementSet,
    pub vector: SumVector,
}

/// A seeded query setting: regular morphism, hereditary `I`, ∧-closed `J`.
pub struct Lemma31Instance {
    pub engine: Engine,
    pub i: ElementSet,
    pub j: ElementSet,
}

pub fn lemma31_instance(seed: u64) -> Lemma31Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = rng.gen_range(2..=3);
    let family = random_family(&mut rng, points, 4);
    let scrambled = rng.gen_bool(0.5);
    let (x, y, l) = random_regular_morphism(&mut rng, &family, 2, scrambled).expect("closed family");
    let ql = validate_quasi_lattice(&family.poset()).expect("closed families are quasi-lattices");
    let i = random_hereditary(&mut rng, &ql, 2);
    let j = random_meet_closed(&mut rng, &ql, 3);
    Lemma31Instance { engine: Engine::new(x, y, l, AxiomPolicy::Full).expect("free models satisfy the axioms"), i, j }
}

fn combination<R: Rng>(rng: &mut R, basis: &[Vector], len: usize) -> Vector {
    let mut v = vec![q(0); len];
    for b in basis {
        let c: Rational = q(rng.gen_range(-2..=2));
        for (a, x) in v.iter_mut().zip(b) {
            *a += &c * x;
        }
    }
    v
}

/// Query vectors for an instance: a combination of the accepted subspace,
/// one of `N^Y_J`, and a random ±1 vector, cycling for larger counts.
pub fn lemma31_vectors(inst: &Lemma31Instance, seed: u64, count: usize) -> Vec<Vector> {
    let e = &inst.engine;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = e.y.total_dim();
    let lhs = oracle::lhs(&e.x, &e.y, &e.l, &inst.i, &inst.j);
    let nj = oracle::relation_span(&e.y, &inst.j);
    (0..count)
        .map(|k| match k % 3 {
            0 => combination(&mut rng, lhs.basis(), n),
            1 => combination(&mut rng, nj.basis(), n),
            _ => (0..n).map(|_| q(rng.gen_range(-1..=1))).collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipVerdict {
    pub accepted: bool,
    pub oracle_accepts: bool,
    /// `Some(true)` when an emitted certificate replays.
    pub replayed: Option<bool>,
    pub replay_error: Option<String>,
    /// The accepted vector also lies in `N^Y_I + L(N^X_J)`.
    pub in_rhs: Option<bool>,
    pub stages: usize,
}

impl MembershipVerdict {
    pub fn ok(&self) -> bool {
        self.accepted == self.oracle_accepts && self.replayed != Some(false) && self.in_rhs != Some(false)
    }
}

pub fn membership(
    e: &Engine,
    i: &ElementSet,
    j: &ElementSet,
    v: &SumVector,
) -> Result<(MembershipVerdict, Option<CertificateBundle>), CliError> {
    let dense = v.to_dense(&e.y).map_err(input_error)?;
    let oracle_accepts = oracle::lhs(&e.x, &e.y, &e.l, i, j).contains(&dense).map_err(input_error)?;
    match e.membership(i, j, v) {
        Ok(cert) => {
            let stages = cert.stages.len();
            let bundle = e.bundle(cert);
            let json = serde_json::to_string(&bundle).expect("bundle serializes");
            let replay = replay_bundle(&json);
            let in_rhs = oracle::rhs(&e.x, &e.y, &e.l, i, j).contains(&dense).map_err(input_error)?;
            Ok((
                MembershipVerdict {
                    accepted: true,
                    oracle_accepts,
                    replayed: Some(replay.is_ok()),
                    replay_error: replay.err().map(|e| e.to_string()),
                    in_rhs: Some(in_rhs),
                    stages,
                },
                Some(bundle),
            ))
        }
        Err(DecompositionError::NotInLHS) => Ok((
            MembershipVerdict { accepted: false, oracle_accepts, replayed: None, replay_error: None, in_rhs: None, stages: 0 },
            None,
        )),
        Err(DecompositionError::PreconditionFailed(p)) => Err(CliError::Input(format!("precondition failed: {p:?}"))),
        Err(other) => Err(CliError::Input(other.to_string())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma31Report {
    pub instances: usize,
    pub queries: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub certificates_replayed: usize,
    pub mismatches: Vec<String>,
}

pub fn lemma31_corpus(instances: usize, vectors: usize, seed: u64) -> Result<Lemma31Report, CliError> {
    let rows: Vec<Vec<(String, MembershipVerdict)>> = (0..instances)
        .into_par_iter()
        .map(|k| {
            let inst = lemma31_instance(crate::config::derive_seed(seed, &format!("instance{k}")));
            let vs = lemma31_vectors(&inst, crate::config::derive_seed(seed, &format!("vectors{k}")), vectors);
            vs.iter()
                .enumerate()
                .map(|(t, v)| {
                    let y = SumVector::from_dense(&inst.engine.y, v).map_err(input_error)?;
                    let (verdict, _) = membership(&inst.engine, &inst.i, &inst.j, &y)?;
                    Ok((format!("instance{k}/query{t}"), verdict))
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    let flat: Vec<(String, MembershipVerdict)> = rows.into_iter().flatten().collect();
    Ok(Lemma31Report {
        instances,
        queries: flat.len(),
        accepted: flat.iter().filter(|r| r.1.accepted).count(),
        rejected: flat.iter().filter(|r| !r.1.accepted).count(),
        certificates_replayed: flat.iter().filter(|r| r.1.replayed == Some(true)).count(),
        mismatches: flat.iter().filter(|r| !r.1.ok()).map(|r| r.0.clone()).collect(),
    })
}

pub fn lemma31(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    if let Some(text) = input {
        let m: MembershipInput = parse_json(text, "input", "membership")?;
        let e = Engine::new(m.source, m.target, m.morphism, AxiomPolicy::Full)
            .map_err(|e| CliError::Input(e.to_string()))?;
        let (verdict, bundle) = membership(&e, &m.hereditary, &m.meet_closed, &m.vector)?;
        #[derive(Serialize)]
        struct Body {
            verdict: MembershipVerdict,
            certificate: Option<CertificateBundle>,
        }
        return Ok(Outcome::new(verdict.ok(), Body { verdict, certificate: bundle }));
    }
    let seed = cfg.seed_for("lemma31.corpus");
    let r = lemma31_corpus(cfg.budget_usize("instances"), cfg.budget_usize("vectors"), seed)?;
    Ok(Outcome::new(r.mismatches.is_empty(), r).with_seed("corpus", seed))
}

// ------------------------------------------------------------ single system

#[derive(Debug, Clone, Serialize)]
pub struct SingleSystemVerdict {
    pub system: String,
    pub hereditary_sets: usize,
    pub failures: Vec<Vec<usize>>,
    pub certificates: usize,
    pub certificates_replayed: usize,
}

/// Free models on every closed family of up to `points` points and the
/// targets of seeded random regular morphisms.
pub fn lemmaa1_corpus(points: usize, random: usize, seed: u64) -> Vec<(String, InductiveSystem)> {
    let mut out = Vec::new();
    for p in 1..=points {
        for fam in closed_families(p) {
            let label = fam.sets.iter().map(|&m| SetFamily::label(m)).collect::<Vec<_>>().join(",");
            out.push((format!("free{p}[{label}]"), generate_free_model(&fam, &vec![1; p]).expect("closed family")));
        }
    }
    for k in 0..random {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::config::derive_seed(seed, &format!("system{k}")));
        let fam = random_family(&mut rng, 4, 5);
        let (_, y, _) = random_regular_morphism(&mut rng, &fam, 2, true).expect("closed family");
        out.push((format!("random{k}"), y));
    }
    out
}

pub fn single_system(name: &str, y: &InductiveSystem) -> Result<SingleSystemVerdict, CliError> {
    let sets = oracle::hereditary_sets(y);
    let zero_source = carrier_core::localization::zero_system(y);
    let zero_map = SystemMorphism::zero(&zero_source, y);
    let whole: ElementSet = (0..y.len()).collect();
    let mut failures = Vec::new();
    let mut certificates = 0;
    let mut replayed = 0;
    for i in &sets {
        let report = lemmaa1_check(y, i).map_err(|e| CliError::Input(e.to_string()))?;
        let lhs = oracle::relation_span(y, &whole).intersect(&oracle::member_span(y, i)).map_err(input_error)?;
        if !report.equal || lhs != oracle::relation_span(y, i) || report.lhs_dim != lhs.dim() {
            failures.push(i.iter().copied().collect());
        }
        for cert in report.certificates {
            certificates += 1;
            let bundle = CertificateBundle {
                source: zero_source.clone(),
                target: y.clone(),
                morphism: zero_map.clone(),
                certificate: cert,
            };
            if replay_bundle(&serde_json::to_string(&bundle).expect("bundle serializes")).is_ok() {
                replayed += 1;
            }
        }
    }
    Ok(SingleSystemVerdict {
        system: name.to_string(),
        hereditary_sets: sets.len(),
        failures,
        certificates,
        certificates_replayed: replayed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleSystemReport {
    pub systems: usize,
    pub pairs: usize,
    pub failures: usize,
    pub verdicts: Vec<SingleSystemVerdict>,
}

impl SingleSystemReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.verdicts.iter().all(|v| v.certificates == v.certificates_replayed)
    }
}

pub fn lemmaa1_report(systems: &[(String, InductiveSystem)]) -> Result<SingleSystemReport, CliError> {
    let verdicts: Vec<SingleSystemVerdict> =
        systems.par_iter().map(|(n, y)| single_system(n, y)).collect::<Result<_, _>>()?;
    Ok(SingleSystemReport {
        systems: verdicts.len(),
        pairs: verdicts.iter().map(|v| v.hereditary_sets).sum(),
        failures: verdicts.iter().map(|v| v.failures.len()).sum(),
        verdicts,
    })
}

pub fn lemmaa1(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    let seed = cfg.seed_for("lemmaa1.corpus");
    let systems = match input {
        Some(text) => vec![("input".to_string(), parse_json::<InductiveSystem>(text, "input", "inductive-system")?)],
        None => lemmaa1_corpus(cfg.budget_usize("points"), cfg.budget_usize("random_systems"), seed),
    };
    let r = lemmaa1_report(&systems)?;
    let out = Outcome::new(r.passed(), r);
    Ok(if input.is_none() { out.with_seed("corpus", seed) } else { out })
}

// ----------------------------------------------------------------- lifting

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftRequest {
    pub delta: usize,
    pub delta2: usize,
    #[serde(with = "serde_q::vec")]
    pub eta: Vector,
    #[serde(with = "serde_q::vec")]
    pub xi2: Vector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PushforwardInput {
    pub source: InductiveSystem,
    pub target: InductiveSystem,
    pub morphism: SystemMorphism,
    /// The target poset `Δ` of the monotone map.
    pub delta: Poset,
    pub lambda: Vec<usize>,
    #[serde(default)]
    pub lifts: Vec<LiftRequest>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityRow {
    pub delta: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub injective: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftRow {
    pub delta: usize,
    pub delta2: usize,
    pub eta: Vec<String>,
    pub xi2: Vec<String>,
    pub xi: Option<Vec<String>>,
    pub error: Option<String>,
    /// `λ(l)_δ ξ = η`, re-checked.
    pub maps_to_eta: bool,
    /// `ρ_{δδ'} ξ = ξ'`, re-checked.
    pub restricts_to_xi2: bool,
    /// For generated requests: `ξ` equals the class `η` was made from.
    pub recovers_seed: Option<bool>,
}

impl LiftRow {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.maps_to_eta && self.restricts_to_xi2 && self.recovers_seed != Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PushforwardVerdict {
    pub name: String,
    pub injectivity: Vec<InjectivityRow>,
    pub lifts: Vec<LiftRow>,
}

impl PushforwardVerdict {
    pub fn ok(&self) -> bool {
        self.injectivity.iter().all(|r| r.injective) && self.lifts.iter().all(LiftRow::ok)
    }
}

fn lift_row(s: &PushforwardSetting, req: &LiftRequest, seed_xi: Option<&Vector>) -> LiftRow {
    let mut row = LiftRow {
        delta: req.delta,
        delta2: req.delta2,
        eta: format_vector(&req.eta),
        xi2: format_vector(&req.xi2),
        xi: None,
        error: None,
        maps_to_eta: false,
        restricts_to_xi2: false,
        recovers_seed: None,
    };
    match s.lift(req.delta, req.delta2, &req.eta, &req.xi2) {
        Ok(r) => {
            row.maps_to_eta = s.induced.maps[req.delta].apply(&r.xi).ok().as_ref() == Some(&req.eta);
            row.restricts_to_xi2 =
                s.px.system.link(req.delta, req.delta2).ok().and_then(|m| m.apply(&r.xi).ok()).as_ref() == Some(&req.xi2);
            row.recovers_seed = seed_xi.map(|x| *x == r.xi);
            row.xi = Some(format_vector(&r.xi));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Generated requests: for every comparable `δ ≤ δ'`, a random class `ξ`
/// at `δ` with `η = λ(l)_δ ξ` and `ξ' = ρ_{δδ'} ξ`.
fn generated_lifts<R: Rng>(s: &PushforwardSetting, rng: &mut R) -> Vec<(LiftRequest, Vector)> {
    s.px.target
        .comparable_pairs()
        .into_iter()
        .map(|(d, d2)| {
            let xi: Vector = (0..s.px.fibers[d].dim()).map(|_| q(rng.gen_range(-3..=3))).collect();
            let eta = s.induced.maps[d].apply(&xi).expect("shape");
            let xi2 = s.px.system.link(d, d2).expect("comparable").apply(&xi).expect("shape");
            (LiftRequest { delta: d, delta2: d2, eta, xi2 }, xi)
        })
        .collect()
}

fn injectivity_rows(s: &PushforwardSetting) -> Vec<InjectivityRow> {
    s.induced
        .maps
        .iter()
        .enumerate()
        .map(|(delta, m)| {
            let rank = m.rank();
            InjectivityRow { delta, rows: m.rows(), cols: m.cols(), rank, injective: rank == m.cols() }
        })
        .collect()
}

pub fn pushforward_setting(seed: u64) -> (String, PushforwardSetting) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = random_family(&mut rng, 3, 4);
    let (x, y, l) = random_regular_morphism(&mut rng, &family, 2, true).expect("closed family");
    let map = random_monotone_map(&mut rng, &family);
    let engine = Engine::new(x, y, l, AxiomPolicy::Full).expect("free models satisfy the axioms");
    let s = PushforwardSetting::new(engine, &map.target, &map.lambda).expect("monotone map");
    (map.label, s)
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftingReport {
    pub settings: usize,
    pub round_trips: usize,
    pub injective_maps: usize,
    pub failures: Vec<String>,
    pub verdicts: Vec<PushforwardVerdict>,
}

/// Seeded settings until at least `round_trips` lifts have been made.
pub fn lifting_corpus(round_trips: usize, seed: u64) -> LiftingReport {
    let mut verdicts = Vec::new();
    let mut trips = 0;
    let mut k = 0;
    while trips < round_trips {
        let (label, s) = pushforward_setting(crate::config::derive_seed(seed, &format!("setting{k}")));
        let mut rng = ChaCha8Rng::seed_from_u64(crate::config::derive_seed(seed, &format!("classes{k}")));
        let lifts: Vec<LiftRow> = generated_lifts(&s, &mut rng).iter().map(|(r, xi)| lift_row(&s, r, Some(xi))).collect();
        trips += lifts.len();
        verdicts.push(PushforwardVerdict { name: format!("setting{k} ({label})"), injectivity: injectivity_rows(&s), lifts });
        k += 1;
    }
    LiftingReport {
        settings: verdicts.len(),
        round_trips: trips,
        injective_maps: verdicts.iter().flat_map(|v| &v.injectivity).filter(|r| r.injective).count(),
        failures: verdicts.iter().filter(|v| !v.ok()).map(|v| v.name.clone()).collect(),
        verdicts,
    }
}

pub fn theorem6(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    let seed = cfg.seed_for("theorem6.corpus");
    let Some(text) = input else {
        let r = lifting_corpus(cfg.budget_usize("round_trips"), seed);
        return Ok(Outcome::new(r.failures.is_empty(), r).with_seed("corpus", seed));
    };
    let p: PushforwardInput = parse_json(text, "input", "pushforward")?;
    let engine = Engine::new(p.source, p.target, p.morphism, AxiomPolicy::Full).map_err(|e| CliError::Input(e.to_string()))?;
    p.delta.validate().map_err(input_error)?;
    let s = PushforwardSetting::new(engine, &p.delta, &p.lambda).map_err(|e| CliError::Input(e.to_string()))?;
    let lifts: Vec<LiftRow> = if p.lifts.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        generated_lifts(&s, &mut rng).iter().map(|(r, xi)| lift_row(&s, r, Some(xi))).collect()
    } else {
        for r in &p.lifts {
            if r.delta >= p.delta.elements.len() || r.delta2 >= p.delta.elements.len() {
                return Err(CliError::Input(format!("lift request ({}, {}) is out of range", r.delta, r.delta2)));
            }
        }
        p.lifts.iter().map(|r| lift_row(&s, r, None)).collect()
    };
    let v = PushforwardVerdict { name: "input".into(), injectivity: injectivity_rows(&s), lifts };
    let out = Outcome::new(v.ok(), v);
    Ok(if p.lifts.is_empty() { out.with_seed("classes", seed) } else { out })
}

// ------------------------------------------------------------------ replay

pub fn replay_certificate(input: Option<&str>) -> Result<Outcome, CliError> {
    let text = input.ok_or_else(|| CliError::Input("replay-certificate needs --input <bundle.json>".into()))?;
    #[derive(Serialize)]
    struct Body {
        stages: Option<usize>,
        final_order: Option<usize>,
        failure: Option<String>,
    }
    match replay_bundle(text) {
        Ok(s) => Ok(Outcome::new(true, Body { stages: Some(s.stages), final_order: Some(s.final_order), failure: None })),
        Err(ReplayError::Failed(msg)) => Ok(Outcome::new(false, Body { stages: None, final_order: None, failure: Some(msg) })),
        Err(ReplayError::Malformed(msg)) => Err(CliError::Json {
            source_name: "input".into(),
            detail: msg,
            schema: "certificate-bundle".into(),
        }),
    }
}
