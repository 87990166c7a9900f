//! Subcommands for the analytic side: cones, the weight builders, the
//! plurisubharmonicity tester and the grid demonstrations.

use crate::config::RunConfig;
use crate::report::Outcome;
use crate::{input_error, parse_json, CliError};
use carrier_analytic::cone::{sup_norm, theta_lower_bound, to_f64, Cone, Properness, ThetaBound, ThetaGrid};
use carrier_analytic::demos::dbar::{
    hormander_check, refinement_study, residual, CauchyQuadrature, HormanderReport, MollifiedDisc, RadialTable,
    RefinementReport, ResidualReport,
};
use carrier_analytic::demos::norms::{lemma2_sequence, sup_norm_growth, BoxGrid, EntireSample, SequenceParams};
use carrier_analytic::demos::splitting::{mollifier_splitting, SplittingParams};
use carrier_analytic::phi::{build_phi, verify_phi};
use carrier_analytic::psh::{check_plurisubharmonic, log_radii, random_cases, PshReport};
use carrier_analytic::report::InequalityCheck;
use carrier_analytic::rho::{build_rho, verify_rho, RhoInput};
use carrier_analytic::theta::{theta, verify_lemma4, verify_mu_bounds};
use carrier_analytic::weights::{
    build_gs_oracle, build_psi, default_terms, verify_gs_oracle, verify_psi, FnWeight, GsOracle, Weight, WeightParams,
};
use carrier_core::linalg::{q, qr, serde_q, Rational, Vector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

fn all_passed(checks: &[InequalityCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// A single object or a list of them.
#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    Many(Vec<T>),
    One(T),
}

fn parse_instances<T: serde::de::DeserializeOwned>(text: &str, schema: &str) -> Result<Vec<T>, CliError> {
    Ok(match parse_json::<OneOrMany<T>>(text, "input", schema)? {
        OneOrMany::Many(v) => v,
        OneOrMany::One(t) => vec![t],
    })
}

// ------------------------------------------------------------------- cones

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedCone {
    pub name: String,
    pub cone: Cone,
    #[serde(default)]
    pub expect_proper: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeCorpus {
    pub cones: Vec<NamedCone>,
    /// `(K₁, K₂)` by index, for the angular separation bound.
    #[serde(default)]
    pub pairs: Vec<(usize, usize)>,
}

fn cone(dim: usize, pieces: &[&[&[i64]]]) -> Cone {
    Cone::from_i64(dim, pieces).expect("valid cone")
}

pub fn default_cones() -> ConeCorpus {
    let named = |name: &str, cone: Cone, p: bool| NamedCone { name: name.into(), cone, expect_proper: Some(p) };
    ConeCorpus {
        cones: vec![
            named("orthant2", Cone::orthant(2), true),
            named("orthant3", Cone::orthant(3), true),
            named("ray", Cone::ray(vec![q(1), q(0)]).expect("ray"), true),
            named("wedge", cone(2, &[&[&[2, 1], &[1, 2]]]), true),
            named("k1-plane", cone(2, &[&[&[1, 0], &[3, 1]]]), true),
            named("k2-plane", cone(2, &[&[&[1, 3], &[0, 1]]]), true),
            named("two-quadrants", cone(2, &[&[&[1, 0], &[0, -1]], &[&[0, 1], &[-1, 0]]]), false),
            named("k1-space", cone(3, &[&[&[4, 1, 1], &[4, 0, 1], &[4, 1, 0]]]), true),
            named("k2-space", cone(3, &[&[&[1, 4, 4], &[0, 4, 3], &[0, 3, 4]]]), true),
            named("orthant3-widened", Cone::orthant(3).conic_neighborhood(&qr(1, 8)), true),
            named("whole2", Cone::whole(2), false),
            named("zero3", Cone::zero(3), true),
        ],
        pairs: vec![(4, 5), (5, 4), (7, 8), (8, 7), (2, 3)],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeVerdict {
    pub name: String,
    pub dim: usize,
    pub properness: Properness,
    pub expect_proper: Option<bool>,
    /// Largest gap between the dual-vertex and exact primal distances.
    pub route_gap: f64,
    pub checks: Vec<InequalityCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairVerdict {
    pub k1: String,
    pub k2: String,
    pub bound: Option<ThetaBound>,
    pub error: Option<String>,
    pub check: Option<InequalityCheck>,
    pub passed: bool,
}

fn record(t: &mut carrier_analytic::report::Tally, lhs: f64, rhs: f64, point: &[f64]) {
    t.record(lhs, rhs, || point.to_vec());
}

/// A point with small dyadic coordinates, exact in both routes.
fn dyadic_point<R: Rng>(rng: &mut R, k: usize) -> (Vec<f64>, Vector) {
    let exact: Vector = (0..k).map(|_| qr(rng.gen_range(-64..=64), 16)).collect();
    (exact.iter().map(to_f64).collect(), exact)
}

pub fn cone_verdict(c: &NamedCone, seed: u64, samples: usize, route_tol: f64, slack: f64) -> Result<ConeVerdict, CliError> {
    use carrier_analytic::report::Tally;
    let k = c.cone.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut route_gap = 0.0f64;
    let mut lip = Tally::new("lipschitz", slack);
    let mut hom = Tally::new("homogeneity", slack);
    let mut inside = Tally::new("zero_on_cone", slack);
    let exact_samples = samples.min(200);
    for s in 0..samples {
        let (x, xe) = dyadic_point(&mut rng, k);
        let dx = c.cone.distance(&x).map_err(input_error)?;
        if s < exact_samples {
            let de = to_f64(&c.cone.distance_exact(&xe).map_err(input_error)?);
            route_gap = route_gap.max((dx - de).abs() / (1.0 + sup_norm(&x)));
        }
        let (y, _) = dyadic_point(&mut rng, k);
        let dy = c.cone.distance(&y).map_err(input_error)?;
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        record(&mut lip, (dx - dy).abs(), sup_norm(&diff) * (1.0 + f64::EPSILON * 8.0), &x);
        let t: f64 = rng.gen_range(0.0..8.0);
        let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
        let dtx = c.cone.distance(&tx).map_err(input_error)?;
        record(&mut hom, (dtx - t * dx).abs(), f64::EPSILON * 16.0 * (1.0 + t * sup_norm(&x)), &x);
        let p = c.cone.sample(&mut rng);
        record(&mut inside, c.cone.distance(&p).map_err(input_error)?, f64::EPSILON * 16.0 * (1.0 + sup_norm(&p)), &p);
    }
    let properness = c.cone.is_proper();
    let checks = vec![lip.finish(), hom.finish(), inside.finish()];
    let passed = route_gap <= route_tol
        && all_passed(&checks)
        && c.expect_proper.is_none_or(|e| e == properness.is_proper());
    Ok(ConeVerdict { name: c.name.clone(), dim: k, properness, expect_proper: c.expect_proper, route_gap, checks, passed })
}

fn pair_verdict(k1: &NamedCone, k2: &NamedCone, seed: u64, samples: usize, slack: f64) -> PairVerdict {
    use carrier_analytic::report::Tally;
    let mut v = PairVerdict { k1: k1.name.clone(), k2: k2.name.clone(), bound: None, error: None, check: None, passed: false };
    match theta_lower_bound(&k1.cone, &k2.cone, ThetaGrid::default()) {
        Ok(b) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = Tally::new("distance_bound_on_k2", slack);
            for _ in 0..samples {
                let x = k2.cone.sample(&mut rng);
                let d = k1.cone.distance(&x).unwrap_or(f64::NAN);
                t.record(b.theta * sup_norm(&x), d, || x.clone());
            }
            let check = t.finish();
            v.passed = check.passed && b.theta > 0.0;
            v.check = Some(check);
            v.bound = Some(b);
        }
        Err(e) => v.error = Some(e.to_string()),
    }
    v
}

pub fn verify_cones(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    let corpus = match input {
        Some(text) => parse_json::<ConeCorpus>(text, "input", "cones")?,
        None => default_cones(),
    };
    for &(a, b) in &corpus.pairs {
        if a >= corpus.cones.len() || b >= corpus.cones.len() {
            return Err(CliError::Input(format!("pair ({a}, {b}) is out of range")));
        }
    }
    let seed = cfg.seed_for("verify-cones.samples");
    let samples = cfg.budget_usize("samples");
    let (route_tol, slack) = (cfg.tol("route_agreement"), cfg.tol("slack"));
    let cones: Vec<ConeVerdict> = corpus
        .cones
        .iter()
        .enumerate()
        .map(|(i, c)| cone_verdict(c, crate::config::derive_seed(seed, &format!("cone{i}")), samples, route_tol, slack))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<PairVerdict> = corpus
        .pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            pair_verdict(&corpus.cones[a], &corpus.cones[b], crate::config::derive_seed(seed, &format!("pair{i}")), samples, slack)
        })
        .collect();
    #[derive(Serialize)]
    struct Body {
        cones: Vec<ConeVerdict>,
        pairs: Vec<PairVerdict>,
    }
    let passed = cones.iter().all(|c| c.passed) && pairs.iter().all(|p| p.passed);
    Ok(Outcome::new(passed, Body { cones, pairs }).with_seed("samples", seed))
}

// --------------------------------------------------------------- lemma 4

pub fn lemma4(cfg: &RunConfig, _input: Option<&str>) -> Result<Outcome, CliError> {
    let seed = cfg.seed_for("verify-lemma4.samples");
    let mu_seed = cfg.seed_for("verify-lemma4.mu");
    let samples = cfg.budget_usize("samples");
    let report = verify_lemma4(seed, samples, cfg.budget_usize("grid"), cfg.tol("slack"));
    let mu_bounds = verify_mu_bounds(mu_seed, samples, cfg.tol("slack"));
    let passed = report.passed() && all_passed(&mu_bounds);
    #[derive(Serialize)]
    struct Body {
        report: carrier_analytic::theta::Lemma4Report,
        mu_bounds: Vec<InequalityCheck>,
    }
    Ok(Outcome::new(passed, Body { report, mu_bounds }).with_seed("samples", seed).with_seed("mu", mu_seed))
}

// ------------------------------------------------------------------ Ψ

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsiInput {
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
}

pub fn default_psi() -> Vec<PsiInput> {
    vec![
        PsiInput { a: 1.0, b: 2.0, kappa: 1.0 },
        PsiInput { a: 0.5, b: 3.0, kappa: 0.25 },
        PsiInput { a: 2.0, b: 2.5, kappa: 4.0 },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct BuilderVerdict<C> {
    pub name: String,
    pub constants: Option<C>,
    pub error: Option<String>,
    pub checks: Vec<InequalityCheck>,
    pub passed: bool,
}

fn builder_verdict<C>(name: String, built: Result<(C, Vec<InequalityCheck>), String>) -> BuilderVerdict<C> {
    match built {
        Ok((c, checks)) => {
            let passed = !checks.is_empty() && all_passed(&checks);
            BuilderVerdict { name, constants: Some(c), error: None, checks, passed }
        }
        Err(e) => BuilderVerdict { name, constants: None, error: Some(e), checks: vec![], passed: false },
    }
}

fn verdicts_outcome<C: Serialize>(verdicts: Vec<BuilderVerdict<C>>, seed: u64) -> Outcome {
    let passed = verdicts.iter().all(|v| v.passed);
    #[derive(Serialize)]
    struct Body<C> {
        instances: Vec<BuilderVerdict<C>>,
    }
    Outcome::new(passed, Body { instances: verdicts }).with_seed("samples", seed)
}

pub fn lemma5(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    let instances = match input {
        Some(text) => parse_instances::<PsiInput>(text, "psi")?,
        None => default_psi(),
    };
    let seed = cfg.seed_for("verify-lemma5.samples");
    let verdicts = instances
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let name = format!("a={} b={} kappa={}", p.a, p.b, p.kappa);
            let built = build_psi(p.a, p.b, p.kappa).map_err(|e| e.to_string()).map(|psi| {
                let checks = verify_psi(&psi, crate::config::derive_seed(seed, &format!("psi{i}")), cfg.budget_usize("samples"), cfg.tol("slack"));
                (psi, checks)
            });
            builder_verdict(name, built)
        })
        .collect();
    Ok(verdicts_outcome(verdicts, seed))
}

// ------------------------------------------------------------------ Φ

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiInput {
    pub name: String,
    pub k: Cone,
    /// Closed cone whose complement, with the origin, is the neighborhood `V`.
    pub outside: Cone,
    #[serde(with = "serde_q::vec")]
    pub l: Vec<Rational>,
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub x_box: f64,
}

pub fn default_phi() -> Vec<PhiInput> {
    vec![
        PhiInput {
            name: "wedge in R^2".into(),
            k: cone(2, &[&[&[2, 1], &[1, 2]]]),
            outside: cone(2, &[&[&[1, 0], &[0, -1]], &[&[0, 1], &[-1, 0]]]),
            l: vec![q(1), q(1)],
            a: 1.0,
            b: 2.0,
            tau: 1.0,
            x_box: 10.0,
        },
        PhiInput {
            name: "widened orthant in R^3".into(),
            k: Cone::orthant(3).conic_neighborhood(&qr(1, 8)),
            outside: cone(3, &[&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]]),
            l: vec![q(1), q(1), q(1)],
            a: 1.0,
            b: 2.0,
            tau: 1.0,
            x_box: 10.0,
        },
    ]
}

pub fn lemma6(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    let instances = match input {
        Some(text) => parse_instances::<PhiInput>(text, "phi")?,
        None => default_phi(),
    };
    let seed = cfg.seed_for("verify-lemma6.samples");
    let verdicts = instances
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let s = crate::config::derive_seed(seed, &format!("phi{i}"));
            let built = build_phi(&p.k, &p.outside, &p.l, p.a, p.b, p.tau, s).map_err(|e| e.to_string()).map(|phi| {
                let checks = verify_phi(&phi, &p.outside, s, cfg.budget_usize("samples"), cfg.tol("slack"), p.x_box);
                (phi.constants.clone(), checks)
            });
            builder_verdict(p.name.clone(), built)
        })
        .collect();
    Ok(verdicts_outcome(verdicts, seed))
}

// ------------------------------------------------------------------ ϱ

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedRho {
    pub name: String,
    #[serde(flatten)]
    pub input: RhoInput,
}

pub fn default_rho() -> Vec<NamedRho> {
    vec![
        NamedRho {
            name: "quadrant in R^2".into(),
            input: RhoInput {
                alpha: 2.0,
                u: Cone::orthant(2),
                k1: cone(2, &[&[&[1, 0], &[3, 1]]]),
                k2: cone(2, &[&[&[1, 3], &[0, 1]]]),
                kappa: 1.0,
                d: 0.5,
                box_radius: 12.0,
            },
        },
        NamedRho {
            name: "orthant in R^3".into(),
            input: RhoInput {
                alpha: 2.0,
                u: Cone::orthant(3),
                k1: cone(3, &[&[&[4, 1, 1], &[4, 0, 1], &[4, 1, 0]]]),
                k2: cone(3, &[&[&[1, 4, 4], &[0, 4, 3], &[0, 3, 4]]]),
                kappa: 1.0,
                d: 0.5,
                box_radius: 12.0,
            },
        },
    ]
}

pub fn lemma7(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    let instances = match input {
        Some(text) => parse_instances::<NamedRho>(text, "rho")?,
        None => default_rho(),
    };
    let seed = cfg.seed_for("verify-lemma7.samples");
    let verdicts = instances
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let s = crate::config::derive_seed(seed, &format!("rho{i}"));
            let built = build_rho(&r.input, s).map_err(|e| e.to_string()).map(|rho| {
                let checks = verify_rho(&rho, s, cfg.budget_usize("samples"), cfg.tol("slack"));
                (rho.constants.clone(), checks)
            });
            builder_verdict(r.name.clone(), built)
        })
        .collect();
    Ok(verdicts_outcome(verdicts, seed))
}

// -------------------------------------------------------------- gs oracle

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GsInput {
    pub alpha: f64,
    pub c: f64,
    pub dim: usize,
    pub box_radius: f64,
    #[serde(default)]
    pub terms: Option<usize>,
}

impl Default for GsInput {
    fn default() -> Self {
        GsInput { alpha: 2.0, c: 1.0, dim: 2, box_radius: 10.0, terms: None }
    }
}

fn gs(p: &GsInput) -> Result<GsOracle, CliError> {
    let terms = p.terms.unwrap_or_else(|| default_terms(p.alpha, p.c, p.box_radius));
    build_gs_oracle(p.alpha, p.c, terms, p.dim, p.box_radius).map_err(input_error)
}

pub fn gs_oracle(cfg: &RunConfig, input: Option<&str>) -> Result<Outcome, CliError> {
    let p = match input {
        Some(text) => parse_json::<GsInput>(text, "input", "gs-oracle")?,
        None => GsInput::default(),
    };
    let g = gs(&p)?;
    let seed = cfg.seed_for("gs-oracle.samples");
    let psh_seed = cfg.seed_for("gs-oracle.psh");
    let checks = verify_gs_oracle(&g, seed, cfg.budget_usize("samples"), cfg.tol("slack"));
    let radii = log_radii(-2, 0, 2);
    let cases = random_cases(psh_seed, g.dim, 8, 2, &radii, g.box_radius / 2.0);
    let psh = check_plurisubharmonic(&g, &cases, 1e-8);
    let passed = all_passed(&checks) && psh.passed;
    #[derive(Serialize)]
    struct Body {
        oracle: GsOracle,
        checks: Vec<InequalityCheck>,
        plurisubharmonic: PshReport,
    }
    Ok(Outcome::new(passed, Body { oracle: g, checks, plurisubharmonic: psh })
        .with_seed("samples", seed)
        .with_seed("psh", psh_seed))
}

// -------------------------------------------------------------------- psh

#[derive(Debug, Clone, Serialize)]
pub struct PshVerdict {
    pub weight: String,
    /// `false` for the negative control, which must fail.
    pub expect_pass: bool,
    pub report: PshReport,
    pub agrees: bool,
}

pub fn verify_psh(cfg: &RunConfig, _input: Option<&str>) -> Result<Outcome, CliError> {
    let tol = cfg.tol("quadrature");
    let seed = cfg.seed_for("verify-psh.cases");
    let (centers, dirs) = (cfg.budget_usize("centers"), cfg.budget_usize("directions"));
    let radii = log_radii(-2, 0, cfg.budget_usize("per_decade"));
    let case_seed = |label: &str| crate::config::derive_seed(seed, label);

    // |z| stays below π, away from the zeros of sin z / z
    let theta_w = FnWeight { dim: 1, f: |z: &[Complex64]| theta(z[0]) };
    let gs_w = gs(&GsInput::default())?;
    let phi_in = &default_phi()[0];
    let phi = build_phi(&phi_in.k, &phi_in.outside, &phi_in.l, phi_in.a, phi_in.b, phi_in.tau, case_seed("phi"))
        .map_err(input_error)?;
    let cusp = FnWeight { dim: 1, f: |z: &[Complex64]| -z[0].re.abs().sqrt() };

    let run = |name: &str, w: &dyn Weight, center_box: f64, expect_pass: bool| {
        let cases = random_cases(case_seed(name), w.dim(), centers, dirs, &radii, center_box);
        let report = check_plurisubharmonic(w, &cases, tol);
        PshVerdict { weight: name.to_string(), expect_pass, agrees: report.passed == expect_pass, report }
    };
    let verdicts = vec![
        run("theta", &theta_w, 1.5, true),
        run("gs-oracle", &gs_w, 4.0, true),
        run("phi-surrogate", &phi, 3.0, true),
        run("cusp-control", &cusp, 1e-3, false),
    ];
    let passed = verdicts.iter().all(|v| v.agrees);
    #[derive(Serialize)]
    struct Body {
        radii: Vec<f64>,
        verdicts: Vec<PshVerdict>,
    }
    Ok(Outcome::new(passed, Body { radii, verdicts }).with_seed("cases", seed))
}

// ------------------------------------------------------------------- ∂̄

fn ring(r: f64, count: usize) -> Vec<Complex64> {
    (0..count).map(|j| Complex64::from_polar(r, 0.3 + TAU * j as f64 / count as f64)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DbarReport {
    pub refinement: RefinementReport,
    /// Largest `|ψ − z̄|` inside the disc at the finest level.
    pub inside_error: f64,
    pub residual: ResidualReport,
    pub hormander: Vec<HormanderReport>,
    pub splitting: Option<carrier_analytic::demos::splitting::SplittingReport>,
    pub splitting_error: Option<String>,
    pub passed: bool,
}

fn hormander_ok(r: &HormanderReport) -> bool {
    r.lhs.is_finite() && r.rhs.is_finite() && r.rhs > 0.0 && (r.passed || r.correction.as_ref().is_some_and(|c| c.passed))
}

pub fn dbar_demo(cfg: &RunConfig, _input: Option<&str>) -> Result<Outcome, CliError> {
    let disc = MollifiedDisc::new(1.0, 1.5);
    let n_phi = cfg.budget_usize("n_phi");
    let coarsest = cfg.budget_usize("coarsest");
    let levels: Vec<usize> = (0..cfg.budget("levels") as u32).map(|i| coarsest << i).collect();
    let finest = *levels.last().ok_or_else(|| CliError::Input("levels must be positive".into()))?;
    let inside = ring(0.5, 4);
    let points = [inside.clone(), ring(1.25, 5)].concat();
    let refinement = refinement_study(&disc, &points, n_phi, &levels, cfg.tol("min_order"));
    let quad = CauchyQuadrature { n_rho: finest, n_phi };
    let inside_error = carrier_analytic::demos::dbar::dbar_solve_1d(&disc, &inside, quad)
        .iter()
        .zip(&inside)
        .map(|(p, z)| (p - z.conj()).norm())
        .fold(0.0, f64::max);
    let res_points = [ring(0.5, 2), ring(1.25, 3), ring(2.0, 2)].concat();
    let residual = residual(&disc, quad, &res_points, 1e-3, cfg.tol("residual"));

    let box_radius = 20.0;
    let n = cfg.budget_usize("hormander_grid");
    let table = RadialTable::build(&disc, CauchyQuadrature { n_rho: 256, n_phi: 256 }, 1.5 * box_radius, 3 * n / 2)
        .map_err(input_error)?;
    let flat = FnWeight { dim: 1, f: |_: &[Complex64]| 0.0 };
    let gs_w = gs(&GsInput { dim: 1, box_radius: 1.5 * box_radius, ..GsInput::default() })?;
    let slack = cfg.tol("hormander_slack");
    let hormander = vec![
        hormander_check(&disc, &table, &flat, "zero", box_radius, n, slack),
        hormander_check(&disc, &table, &gs_w, "gs-oracle", box_radius, n, slack),
    ];

    let seed = cfg.seed_for("dbar-demo.splitting");
    let params = SplittingParams {
        holomorphy_limit: cfg.tol("holomorphy"),
        quadrature_tol: cfg.tol("partition_of_unity"),
        ..SplittingParams::default()
    };
    let (splitting, splitting_error) = match mollifier_splitting(&params, seed) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let passed = refinement.passed
        && inside_error < cfg.tol("residual")
        && residual.passed
        && hormander.iter().all(hormander_ok)
        && splitting.as_ref().is_some_and(|s| s.passed);
    let report = DbarReport { refinement, inside_error, residual, hormander, splitting, splitting_error, passed };
    Ok(Outcome::new(passed, report).with_seed("splitting", seed))
}

// ------------------------------------------------------------------ norms

pub fn norms_demo(cfg: &RunConfig, _input: Option<&str>) -> Result<Outcome, CliError> {
    let tol = cfg.tol("boundary");
    let f = EntireSample::Exponential { coeffs: vec![1.0] };
    let left = Cone::ray(vec![q(-1)]).map_err(input_error)?;
    let right = Cone::ray(vec![q(1)]).map_err(input_error)?;
    let params = |u: &Cone| WeightParams::new(2.0, 1.0, 2.0, u.clone()).map_err(input_error);
    let radii = [8.0, 16.0, 32.0, 48.0];
    // e^z is bounded against the weight exactly when U points away from growth
    let bounded = sup_norm_growth(&f, &params(&left)?, &radii, 0.25, tol).map_err(input_error)?;
    let unbounded = sup_norm_growth(&f, &params(&right)?, &radii, 0.25, tol).map_err(input_error)?;
    let g = EntireSample::Exponential { coeffs: vec![-1.0] };
    let p = SequenceParams {
        alpha: 2.0,
        a_big: 2.0,
        b_big: 2.0,
        a_small: 2.0,
        b_small: 2.0,
        a_prime: 3.0,
        max_n: 4,
        grid: BoxGrid { radius: 40.0, n: cfg.budget_usize("grid") },
        slack: cfg.tol("slack"),
    };
    let sequence = lemma2_sequence(&g, &g, &right, &right, &p).map_err(input_error)?;
    let passed = bounded.bounded && !unbounded.bounded && sequence.passed;
    #[derive(Serialize)]
    struct Body {
        bounded: carrier_analytic::demos::norms::GrowthReport,
        unbounded: carrier_analytic::demos::norms::GrowthReport,
        sequence: carrier_analytic::demos::norms::SequenceReport,
    }
    Ok(Outcome::new(passed, Body { bounded, unbounded, sequence }))
}
