//! The plurisubharmonic `ϱ = Φ + σ − l(x)` that sits below `σ^α_{U}`-type
//! weights, decays like `−κ|x|` near `K₁`, and stays above
//! `−|x|^{1/α} − H` near `K₂`.
//!
//! Neighborhoods `V̄ᵢ` are the cube enlargements of `Kᵢ` with ratio `ε`.
//! If `|x − u| < ε|x|/(1+ε)` for some `u ∈ Kᵢ`, then `|x − u| < ε|u|` and `x`
//! lies inside `V̄ᵢ`; so off the interior of `V̄ᵢ`, `δ_{Kᵢ}(x) ≥ θ|x|` with
//! `θ = ε/(1+ε)` and no sampling is needed. The comparison weight `σ` is
//! only certified for `|x| ≤ X`, so the bounds below hold on that box.

use crate::cone::{functional_norm, separating_functional_with_margin, sup_norm, to_f64, to_f64_vec, Cone, ConeError};
use crate::phi::{build_phi, Phi, PhiConstants};
use crate::report::{sharded, InequalityCheck, Tally};
use crate::weights::{build_gs_oracle, default_terms, GsOracle, Weight, WeightError};
use carrier_core::linalg::{format_rational, qr, Rational, Vector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

const EPS_HALVINGS: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhoInput {
    pub alpha: f64,
    pub u: Cone,
    pub k1: Cone,
    pub k2: Cone,
    pub kappa: f64,
    pub d: f64,
    /// Half-width `X` of the box on which the bounds are certified.
    pub box_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoConstants {
    pub alpha: f64,
    pub kappa: f64,
    pub d: f64,
    pub box_radius: f64,
    pub epsilon: String,
    pub l: Vec<String>,
    pub l_norm: f64,
    /// `δ_{K₂}(x) ≥ θ|x|` off `V̄₂`.
    pub theta: f64,
    /// `δ_{K₁}(x) ≥ θ'|x|` off `V̄₁`.
    pub theta_prime: f64,
    pub b: f64,
    pub h: f64,
    pub phi: PhiConstants,
    pub sigma: GsOracle,
}

#[derive(Debug, Clone)]
pub struct Rho {
    pub constants: RhoConstants,
    pub v1: Cone,
    pub v2: Cone,
    input: RhoInput,
    phi: Phi,
    sigma: GsOracle,
    l: Vec<f64>,
}

fn within(inner: &Cone, outer: &Cone) -> Result<(), WeightError> {
    for p in inner.pieces() {
        for g in p.generators() {
            if !outer.contains_exact(g)? {
                return Err(WeightError::NotContained(g.iter().map(format_rational).collect()));
            }
        }
    }
    Ok(())
}

/// Smallest `ε = 2^{-j}/4` for which the enlargements are disjoint away
/// from 0 and a functional with margin `κ` on `V̄₁` is positive on `U ∪ V̄₂`.
fn neighborhoods(input: &RhoInput, kappa: &Rational) -> Result<(Rational, Cone, Cone, Vector), WeightError> {
    let mut eps = qr(1, 4);
    let mut last = WeightError::Cone(ConeError::NotProper);
    for _ in 0..EPS_HALVINGS {
        let v1 = input.k1.conic_neighborhood(&eps);
        let v2 = input.k2.conic_neighborhood(&eps);
        match v1.trivial_intersection(&v2) {
            Ok(()) => match separating_functional_with_margin(&v1, kappa, Some(&input.u.union(&v2)?)) {
                Ok(l) => return Ok((eps, v1, v2, l)),
                Err(e) => last = e.into(),
            },
            Err(e) => last = e.into(),
        }
        eps /= qr(2, 1);
    }
    Err(last)
}

pub fn build_rho(input: &RhoInput, seed: u64) -> Result<Rho, WeightError> {
    let k = input.u.dim();
    if input.k1.dim() != k || input.k2.dim() != k {
        return Err(WeightError::InvalidParameter("cones live in different dimensions".into()));
    }
    if !(input.alpha > 1.0) || !(input.kappa >= 0.0) || !(input.d >= 0.0) || !(input.box_radius > 0.0) {
        return Err(WeightError::InvalidParameter(format!(
            "alpha={}, kappa={}, d={}, X={}",
            input.alpha, input.kappa, input.d, input.box_radius
        )));
    }
    if !input.u.is_proper().is_proper() {
        return Err(WeightError::Cone(ConeError::NotProper));
    }
    input.k1.trivial_intersection(&input.k2)?;
    within(&input.k1, &input.u)?;
    within(&input.k2, &input.u)?;

    let kappa_q = Rational::from_float(input.kappa).expect("finite");
    let (eps, v1, v2, l) = neighborhoods(input, &kappa_q)?;
    let theta_enl = to_f64(&(&eps / (&eps + qr(1, 1))));
    let theta = if input.k2.is_zero() { 1.0 } else { theta_enl };
    let theta_prime = if input.k1.is_zero() { 1.0 } else { theta_enl };

    let phi = build_phi(&v2, &v1, &l, 1.0, 2.0, 1.0, seed)?;
    let sigma = build_gs_oracle(
        input.alpha,
        1.0,
        default_terms(input.alpha, 1.0, input.box_radius),
        k,
        input.box_radius,
    )?;
    let l_norm = to_f64(&functional_norm(&l));
    let pc = phi.constants.clone();
    let b = pc.r + sigma.b_coef + (input.kappa + l_norm) / theta_prime;
    let h = sigma.h + (pc.r_prime + l_norm) * input.d / theta;
    Ok(Rho {
        constants: RhoConstants {
            alpha: input.alpha,
            kappa: input.kappa,
            d: input.d,
            box_radius: input.box_radius,
            epsilon: format_rational(&eps),
            l: l.iter().map(format_rational).collect(),
            l_norm,
            theta,
            theta_prime,
            b,
            h,
            phi: pc,
            sigma: sigma.clone(),
        },
        v1,
        v2,
        input: input.clone(),
        phi,
        sigma,
        l: to_f64_vec(&l),
    })
}

impl Rho {
    fn linear(&self, z: &[Complex64]) -> f64 {
        self.l.iter().zip(z).map(|(a, w)| a * w.re).sum()
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        self.phi.eval(z) + self.sigma.eval(z) - self.linear(z)
    }

    /// Uses [`Phi::eval_with_witness`]; still a lower bound for the full supremum.
    pub fn eval_with_witness(&self, z: &[Complex64]) -> f64 {
        self.phi.eval_with_witness(z) + self.sigma.eval(z) - self.linear(z)
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn sigma(&self) -> &GsOracle {
        &self.sigma
    }
}

impl Weight for Rho {
    fn dim(&self) -> usize {
        self.constants.sigma.dim
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.eval(z)
    }
}

fn signed<R: Rng>(rng: &mut R, bound: f64) -> f64 {
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
}

fn scaled_sample<R: Rng>(rng: &mut R, cone: &Cone, radius: f64) -> Vec<f64> {
    let x = cone.sample(rng);
    let n = sup_norm(&x);
    if n == 0.0 {
        return x;
    }
    let t = rng.gen_range(0.0..radius) / n;
    x.iter().map(|v| v * t).collect()
}

fn join(x: &[f64], y: &[f64]) -> (Vec<Complex64>, Vec<f64>) {
    let z = x.iter().zip(y).map(|(a, b)| Complex64::new(*a, *b)).collect();
    (z, x.iter().chain(y).copied().collect())
}

/// Samples the three target bounds, the bound on `V̄₁`, and
/// `max(−l(x), 0) ≤ b δ_U(x)`, all for `|x| ≤ X`.
pub fn verify_rho(rho: &Rho, seed: u64, samples: usize, slack: f64) -> Vec<InequalityCheck> {
    let c = &rho.constants;
    let input = &rho.input;
    let k = c.sigma.dim;
    let x_box = c.box_radius;
    let inv = 1.0 / c.alpha;
    let rows = sharded(seed, samples, |rng| {
        let x: Vec<f64> = (0..k).map(|_| signed(rng, x_box)).collect();
        let y: Vec<f64> = (0..k).map(|_| signed(rng, 10.0)).collect();
        let (z, p) = join(&x, &y);
        let v = rho.eval_with_witness(&z);
        let (nx, ny) = (sup_norm(&x), sup_norm(&y));
        let du = input.u.distance(&x).expect("dim");
        let dk1 = input.k1.distance(&x).expect("dim");
        let t30 = (v, -nx.powf(inv) + c.b * du + c.b * ny);
        let t31 = (v, -c.kappa * nx + c.b * dk1 + c.b * ny);
        let lx = rho.linear(&z);
        let tl = ((-lx).max(0.0), c.b * du);

        // K₂^d: a point of K₂ moved by at most d, kept inside the box
        let u = scaled_sample(rng, &input.k2, (x_box - c.d).max(0.0));
        let x2: Vec<f64> = u.iter().map(|v| v + rng.gen_range(-1.0..=1.0) * c.d).collect();
        let y2: Vec<f64> = (0..k).map(|_| signed(rng, 10.0)).collect();
        let (z2, p2) = join(&x2, &y2);
        let t32 = (-sup_norm(&x2).powf(inv) - c.h, rho.eval_with_witness(&z2));

        let x3 = scaled_sample(rng, &rho.v1, x_box);
        let y3: Vec<f64> = (0..k).map(|_| signed(rng, 10.0)).collect();
        let (z3, p3) = join(&x3, &y3);
        let t35 = (
            rho.eval_with_witness(&z3),
            -c.kappa * sup_norm(&x3) + (c.phi.r + c.sigma.b_coef) * sup_norm(&y3),
        );
        (p, t30, t31, tl, p2, t32, p3, t35)
    });
    let mut a = Tally::new("rho_below_sigma_u", slack);
    let mut b = Tally::new("rho_below_kappa_k1", slack);
    let mut cc = Tally::new("rho_above_decay_near_k2", slack);
    let mut d = Tally::new("rho_on_v1", slack);
    let mut e = Tally::new("negative_part_of_l_below_distance_to_u", slack);
    for (p, t30, t31, tl, p2, t32, p3, t35) in rows {
        a.record(t30.0, t30.1, || p.clone());
        b.record(t31.0, t31.1, || p.clone());
        e.record(tl.0, tl.1, || p[..k].to_vec());
        cc.record(t32.0, t32.1, || p2);
        d.record(t35.0, t35.1, || p3);
    }
    vec![a.finish(), b.finish(), cc.finish(), d.finish(), e.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrant_input() -> RhoInput {
        RhoInput {
            alpha: 2.0,
            u: Cone::orthant(2),
            k1: Cone::from_i64(2, &[&[&[1, 0], &[3, 1]]]).unwrap(),
            k2: Cone::from_i64(2, &[&[&[1, 3], &[0, 1]]]).unwrap(),
            kappa: 1.0,
            d: 0.5,
            box_radius: 12.0,
        }
    }

    #[test]
    fn constants_are_consistent() {
        let rho = build_rho(&quadrant_input(), 1).unwrap();
        let c = &rho.constants;
        assert!(c.theta > 0.0 && c.theta < 1.0);
        let want = c.phi.r + c.sigma.b_coef + (c.kappa + c.l_norm) / c.theta_prime;
        assert_eq!(c.b, want);
        assert!(rho.v1.trivial_intersection(&rho.v2).is_ok());
    }

    #[test]
    fn sampled_bounds_hold_in_the_plane() {
        let rho = build_rho(&quadrant_input(), 1).unwrap();
        for ch in verify_rho(&rho, 4, 2000, 1e-9) {
            assert!(ch.passed, "{ch:?}");
        }
    }

    #[test]
    fn degenerate_cones() {
        let mut input = quadrant_input();
        input.k2 = Cone::zero(2);
        let rho = build_rho(&input, 1).unwrap();
        assert_eq!(rho.constants.theta, 1.0);
        for ch in verify_rho(&rho, 4, 500, 1e-9) {
            assert!(ch.passed, "{ch:?}");
        }
        input.k1 = Cone::zero(2);
        input.k2 = Cone::orthant(2);
        assert!(build_rho(&input, 1).is_ok());
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut input = quadrant_input();
        input.k2 = input.k1.clone();
        assert!(build_rho(&input, 1).is_err());
        let mut input = quadrant_input();
        input.k1 = Cone::from_i64(2, &[&[&[-1, 0]]]).unwrap();
        assert!(matches!(build_rho(&input, 1), Err(WeightError::NotContained(_))));
        let mut input = quadrant_input();
        input.u = Cone::whole(2);
        assert!(build_rho(&input, 1).is_err());
    }
}
