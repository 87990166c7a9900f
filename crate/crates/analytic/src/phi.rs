//! A plurisubharmonic `Φ` that is at least `l(x)` on a cone `K`, at most
//! `r|y|` off a neighborhood of `K`, and bounded by `max(l(x), 0) + r|y|`.
//!
//! `Φ` is the supremum over `ξ ∈ Q = K ∩ {l = 1}` and `s > 0` of
//! `s Φ_{ξ,τ}(z/s)` where `Φ_{ξ,τ}(z) = Ψ(l̂(z)) + τ Σ_j Θ(l̂^j_ξ(z))` and
//! `l^j_ξ(x) = p_j(x − l(x)ξ)` for coordinate functionals `p_j` on `Ker l`.
//! The evaluator takes the maximum over a fixed finite family of `(ξ, s)`
//! plus the `s → 0` limit `R|l(y)| + τ Σ_j |l^j_ξ(y)|`, so it is a finite
//! maximum of plurisubharmonic functions and never exceeds the supremum.

use crate::cone::{dot, sup_norm, to_f64, to_f64_vec, Cone};
use crate::report::{sharded, InequalityCheck, Tally};
use crate::theta::{mu, theta};
use crate::weights::{build_psi, re_parts, Psi, Weight, WeightError};
use carrier_core::linalg::{abs_max, format_rational, null_space, q, solve, Matrix, Rational, Vector};
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Extra interior points of `Q` drawn per piece.
const Q_EXTRA: usize = 2;
/// Scales `s = 2^j` for `|j| ≤ S_RANGE`.
const S_RANGE: i32 = 8;
/// Relative tolerance for treating a floating point as a member of `K`.
const MEMBER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct PhiConstants {
    pub dim: usize,
    pub l: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub r: f64,
    pub r_prime: f64,
    /// Exact `m`, `M`, `d` and `inf_{K, |x|=1} l`, as fractions.
    pub m: String,
    pub big_m: String,
    pub d: String,
    pub lambda_k: String,
    pub h_tau: f64,
    pub psi: Option<Psi>,
}

#[derive(Debug, Clone)]
struct Section {
    /// `P ξ`, the kernel coordinates of `ξ`.
    p_xi: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Kind {
    /// `K = {0}`: `Φ = 0`.
    Zero,
    /// `k = 1`: `Φ = max(l(x), 0)`.
    Line,
    Full {
        psi: Psi,
        proj: Vec<Vec<f64>>,
        sections: Vec<Section>,
        scales: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct Phi {
    pub constants: PhiConstants,
    cone: Cone,
    kind: Kind,
}

/// `P` with `P v` the `Ker l` coordinates of `v − l(v)w` in the basis `E`,
/// for some `w` with `l(w) = 1`: rows `1..` of `[w | E]⁻¹`.
fn kernel_coordinates(l: &[Rational]) -> (Vec<Vector>, Vec<Vector>) {
    let k = l.len();
    let e = null_space(&Matrix::from_rows(vec![l.to_vec()], k).expect("one row"));
    let i = l.iter().position(|v| !v.is_zero()).expect("nonzero functional");
    let mut w = vec![q(0); k];
    w[i] = q(1) / &l[i];
    let mut cols = vec![w];
    cols.extend(e.iter().cloned());
    let a = Matrix::from_columns(k, &cols).expect("square");
    let mut inv_cols = Vec::with_capacity(k);
    for j in 0..k {
        let mut unit = vec![q(0); k];
        unit[j] = q(1);
        let s = solve(&a, &unit).expect("dims").expect("invertible");
        inv_cols.push(s.particular);
    }
    let inv = Matrix::from_columns(k, &inv_cols).expect("square");
    ((1..k).map(|r| inv.row(r).to_vec()).collect(), e)
}

/// `|x|_ξ = |l(x)| + Σ_j |p_j(x − l(x)ξ)|`.
fn xi_norm(l: &[Rational], proj: &[Vector], xi: &[Rational], x: &[Rational]) -> Rational {
    let lx = dot(l, x);
    let mut s = lx.abs();
    for p in proj {
        s += (dot(p, x) - &lx * dot(p, xi)).abs();
    }
    s
}

fn cube_vertices(k: usize) -> Vec<Vector> {
    (0..1u32 << k)
        .map(|mask| (0..k).map(|i| if mask >> i & 1 == 1 { q(-1) } else { q(1) }).collect())
        .collect()
}

/// Builds `Φ` for the cone `K`, where `outside` is the closed cone whose
/// complement (with the origin) is the neighborhood `V` of `K`.
pub fn build_phi(
    k_cone: &Cone,
    outside: &Cone,
    l: &[Rational],
    a: f64,
    b: f64,
    tau_request: f64,
    seed: u64,
) -> Result<Phi, WeightError> {
    let k = k_cone.dim();
    if l.len() != k || outside.dim() != k {
        return Err(WeightError::InvalidParameter(format!("dimension mismatch in R^{k}")));
    }
    if !(0.0 < a && a < b) || !(tau_request >= 0.0) {
        return Err(WeightError::InvalidParameter(format!("a={a}, b={b}, tau={tau_request}")));
    }
    if let Err(e) = k_cone.trivial_intersection(outside) {
        return Err(WeightError::NotANeighborhood(e.to_string()));
    }
    let mut constants = PhiConstants {
        dim: k,
        l: to_f64_vec(l),
        a,
        b,
        tau: 0.0,
        r: 0.0,
        r_prime: 0.0,
        m: "0".into(),
        big_m: "0".into(),
        d: "0".into(),
        lambda_k: "0".into(),
        h_tau: 0.0,
        psi: None,
    };
    if k_cone.is_zero() {
        return Ok(Phi { constants, cone: k_cone.clone(), kind: Kind::Zero });
    }
    let lambda_k = k_cone.inf_on_sphere(l).expect("nonzero cone");
    if !lambda_k.is_positive() {
        return Err(WeightError::NotPositive);
    }
    constants.lambda_k = format_rational(&lambda_k);
    if k == 1 {
        return Ok(Phi { constants, cone: k_cone.clone(), kind: Kind::Line });
    }

    let (proj, basis) = kernel_coordinates(l);
    let vertices: Vec<(usize, Vector)> = k_cone
        .pieces()
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            p.generators()
                .iter()
                .map(move |g| (i, g.iter().map(|v| v / dot(l, g)).collect::<Vector>()))
                .collect::<Vec<_>>()
        })
        .collect();
    let spread = vertices
        .iter()
        .map(|(_, xi)| abs_max(xi))
        .chain(basis.iter().map(|e| abs_max(e)))
        .max()
        .expect("nonempty");
    let m = q(1) / spread;
    let cube = cube_vertices(k);
    let big_m = vertices
        .iter()
        .flat_map(|(_, xi)| cube.iter().map(|v| xi_norm(l, &proj, xi, v)).collect::<Vec<_>>())
        .max()
        .expect("nonempty");

    let (ra, rb) = (Rational::from_float(a).expect("finite"), Rational::from_float(b).expect("finite"));
    let to_origin = k_cone.slab_distance(l, &ra, &rb, &Cone::zero(k)).expect("slab meets K");
    let d = if outside.is_zero() {
        to_origin
    } else {
        to_origin.min(k_cone.slab_distance(l, &ra, &rb, outside).expect("slab meets K"))
    };

    let psi = build_psi(a, b, 1.0)?;
    let (mf, big_mf, df) = (to_f64(&m), to_f64(&big_m), to_f64(&d));
    let threshold = -b / mu(mf * df / (k - 1) as f64);
    let tau = tau_request.max(threshold);
    let h_tau = psi.strip_lower - tau * (k - 1) as f64 * mu(1.0);

    let proj_f: Vec<Vec<f64>> = proj.iter().map(|p| to_f64_vec(p)).collect();
    let section = |xi: &[f64]| Section {
        p_xi: proj_f.iter().map(|p| p.iter().zip(xi).map(|(a, b)| a * b).sum()).collect(),
    };
    let mut sections: Vec<Section> = vertices.iter().map(|(_, xi)| section(&to_f64_vec(xi))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, _) in k_cone.pieces().iter().enumerate() {
        let vs: Vec<Vec<f64>> = vertices.iter().filter(|(j, _)| *j == i).map(|(_, v)| to_f64_vec(v)).collect();
        if vs.len() < 2 {
            continue;
        }
        for _ in 0..Q_EXTRA {
            let w: Vec<f64> = vs.iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
            let total: f64 = w.iter().sum();
            let xi: Vec<f64> = (0..k).map(|c| vs.iter().zip(&w).map(|(v, wi)| v[c] * wi).sum::<f64>() / total).collect();
            sections.push(section(&xi));
        }
    }
    let scales = (-S_RANGE..=S_RANGE).map(|j| 2f64.powi(j)).collect();

    constants.tau = tau;
    constants.r = big_mf * (psi.r + tau);
    constants.r_prime = big_mf * h_tau;
    constants.m = format_rational(&m);
    constants.big_m = format_rational(&big_m);
    constants.d = format_rational(&d);
    constants.h_tau = h_tau;
    constants.psi = Some(psi.clone());
    Ok(Phi {
        constants,
        cone: k_cone.clone(),
        kind: Kind::Full { psi, proj: proj_f, sections, scales },
    })
}

impl Phi {
    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    fn lin(&self, z: &[Complex64]) -> Complex64 {
        self.constants.l.iter().zip(z).map(|(a, w)| w * a).sum()
    }

    /// `s Φ_{ξ,τ}(z/s)` given `l̂(z)` and the kernel coordinates `P̂ z`.
    fn term(&self, psi: &Psi, p_xi: &[f64], s: f64, lz: Complex64, pz: &[Complex64]) -> f64 {
        let tau = self.constants.tau;
        let mut v = psi.eval(lz / s);
        for (pj, xj) in pz.iter().zip(p_xi) {
            v += tau * theta((pj - lz * xj) / s);
        }
        s * v
    }

    fn limit(&self, psi: &Psi, p_xi: &[f64], lz: Complex64, pz: &[Complex64]) -> f64 {
        let tau = self.constants.tau;
        let mut v = psi.r * lz.im.abs();
        for (pj, xj) in pz.iter().zip(p_xi) {
            v += tau * (pj - lz * xj).im.abs();
        }
        v
    }

    /// The finite-family maximum; plurisubharmonic.
    pub fn eval(&self, z: &[Complex64]) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Line => self.lin(z).re.max(0.0),
            Kind::Full { psi, proj, sections, scales } => {
                let lz = self.lin(z);
                let pz: Vec<Complex64> = proj.iter().map(|p| p.iter().zip(z).map(|(a, w)| w * a).sum()).collect();
                let mut best = f64::NEG_INFINITY;
                for sec in sections {
                    best = best.max(self.limit(psi, &sec.p_xi, lz, &pz));
                    for &s in scales {
                        best = best.max(self.term(psi, &sec.p_xi, s, lz, &pz));
                    }
                }
                best
            }
        }
    }

    /// [`Phi::eval`] with two point-dependent members of the family added:
    /// `s = |x|_ξ` for the first section, and `ξ = x/l(x)`, `s = l(x)/x₀`
    /// when `x ∈ K`. Still a lower bound for the full supremum.
    pub fn eval_with_witness(&self, z: &[Complex64]) -> f64 {
        let base = self.eval(z);
        let Kind::Full { psi, proj, sections, .. } = &self.kind else {
            return base;
        };
        let x = re_parts(z);
        let lz = self.lin(z);
        let pz: Vec<Complex64> = proj.iter().map(|p| p.iter().zip(z).map(|(a, w)| w * a).sum()).collect();
        let mut best = base;
        let first = &sections[0].p_xi;
        let s0 = lz.re.abs() + pz.iter().zip(first).map(|(p, xi)| (p.re - lz.re * xi).abs()).sum::<f64>();
        if s0 > 0.0 {
            best = best.max(self.term(psi, first, s0, lz, &pz));
        }
        let nx = sup_norm(&x);
        if lz.re > 0.0 && self.cone.distance(&x).expect("dim") <= MEMBER_TOL * nx {
            let p_xi: Vec<f64> = pz.iter().map(|p| p.re / lz.re).collect();
            best = best.max(self.term(psi, &p_xi, lz.re / psi.x0, lz, &pz));
        }
        best
    }
}

impl Weight for Phi {
    fn dim(&self) -> usize {
        self.constants.dim
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.eval(z)
    }
}

fn uniform_vec<R: Rng>(rng: &mut R, k: usize, bound: f64) -> Vec<f64> {
    (0..k)
        .map(|_| {
            let v = if rng.gen_bool(0.2) {
                bound * 10f64.powf(rng.gen_range(-6.0..0.0))
            } else {
                rng.gen_range(0.0..bound)
            };
            if rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect()
}

fn complexify(x: &[f64], y: &[f64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| Complex64::new(*a, *b)).collect()
}

/// Samples `−r'|x| ≤ Φ ≤ max(l(x),0) + r|y|`, `Φ ≤ r|y|` on `outside`,
/// and `Φ ≥ l(x)` on `K`, using the witness evaluator.
pub fn verify_phi(phi: &Phi, outside: &Cone, seed: u64, samples: usize, slack: f64, x_box: f64) -> Vec<InequalityCheck> {
    let c = &phi.constants;
    let k = c.dim;
    let lx = |x: &[f64]| c.l.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    let rows = sharded(seed, samples, |rng| {
        let x = uniform_vec(rng, k, x_box);
        let y = uniform_vec(rng, k, 10.0);
        let z = complexify(&x, &y);
        let v = phi.eval_with_witness(&z);
        let bounds = (-c.r_prime * sup_norm(&x), v, lx(&x).max(0.0) + c.r * sup_norm(&y));
        let point: Vec<f64> = x.iter().chain(&y).copied().collect();

        let y2 = uniform_vec(rng, k, 10.0);
        let out = (!outside.is_zero()).then(|| {
            let t = rng.gen_range(0.0..x_box);
            let xo: Vec<f64> = outside.sample(rng).iter().map(|v| v * t).collect();
            let v = phi.eval_with_witness(&complexify(&xo, &y2));
            (xo.iter().chain(&y2).copied().collect::<Vec<_>>(), v, c.r * sup_norm(&y2))
        });

        let t = rng.gen_range(0.0..x_box);
        let xk: Vec<f64> = phi.cone.sample(rng).iter().map(|v| v * t).collect();
        let y3 = uniform_vec(rng, k, 10.0);
        let vk = phi.eval_with_witness(&complexify(&xk, &y3));
        let inside = (xk.iter().chain(&y3).copied().collect::<Vec<_>>(), lx(&xk), vk);
        (point, bounds, out, inside)
    });
    let mut lower = Tally::new("phi_lower", slack);
    let mut upper = Tally::new("phi_upper", slack);
    let mut off = Tally::new("phi_small_off_neighborhood", slack);
    let mut on = Tally::new("phi_above_l_on_cone", slack);
    for (p, b, out, inside) in rows {
        lower.record(b.0, b.1, || p.clone());
        upper.record(b.1, b.2, || p.clone());
        if let Some((po, v, rhs)) = out {
            off.record(v, rhs, || po);
        }
        on.record(inside.1, inside.2, || inside.0);
    }
    vec![lower.finish(), upper.finish(), off.finish(), on.finish()]
}
