//! Smooth splitting `f = g₁f + g₂f` on `ℂ` for the half-line `W = [0, ∞)`,
//! and the holomorphic correction `f₁ = g₁f − ψ`, `f₂ = g₂f + ψ` with
//! `∂̄ψ = ∂̄(g₁f)`.

use super::dbar::{dbar_fd, CauchyQuadrature, Rect, Source};
use super::{simpson, DemoError};
use crate::cone::Cone;
use crate::report::{sharded, InequalityCheck, Tally};
use crate::weights::{sigma_weight, WeightParams};
use carrier_core::linalg::q;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

const PANELS: usize = 2000;

/// `g₀(t) = c exp(−1/(1 − (t/δ)²))` on `|t| < δ`, with unit mass.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bump {
    pub delta: f64,
    pub scale: f64,
}

impl Bump {
    pub fn new(delta: f64) -> Result<Self, DemoError> {
        if !(delta > 0.0) {
            return Err(DemoError::Invalid(format!("delta={delta}")));
        }
        let raw = Bump { delta, scale: 1.0 };
        let mass = simpson(|t| raw.eval(t), -delta, delta, PANELS);
        Ok(Bump { delta, scale: 1.0 / mass })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = t / self.delta;
        if u.abs() >= 1.0 {
            0.0
        } else {
            self.scale * (-1.0 / (1.0 - u * u)).exp()
        }
    }

    /// `g₂(x) = ∫_W g₀(x − ξ) dξ = ∫_{−δ}^{x} g₀`.
    pub fn g2(&self, x: f64) -> f64 {
        simpson(|t| self.eval(t), -self.delta, x.clamp(-self.delta, self.delta), PANELS)
    }

    /// `g₁(x) = ∫_{ℝ∖W} g₀(x − ξ) dξ = ∫_{x}^{δ} g₀`, computed separately.
    pub fn g1(&self, x: f64) -> f64 {
        simpson(|t| self.eval(t), x.clamp(-self.delta, self.delta), self.delta, PANELS)
    }
}

/// `η = ∂̄(g₁f) = −½ f(z) g₀(x)` for `f = e^{z²}`, cut off at `|y| ≤ Y`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitSource {
    pub bump: Bump,
    pub y_cut: f64,
}

pub fn entire(z: Complex64) -> Complex64 {
    (z * z).exp()
}

impl Source for SplitSource {
    fn eval(&self, w: Complex64) -> Complex64 {
        if w.im.abs() > self.y_cut {
            return Complex64::new(0.0, 0.0);
        }
        let g = self.bump.eval(w.re);
        if g == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        -0.5 * entire(w) * g
    }

    fn support(&self) -> Rect {
        let d = self.bump.delta;
        Rect { x0: -d, x1: d, y0: -self.y_cut, y1: self.y_cut }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingParams {
    pub delta: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub samples: usize,
    pub x_box: f64,
    pub fd_steps: Vec<f64>,
    pub quad: CauchyQuadrature,
    pub y_cut: f64,
    pub points: Vec<[f64; 2]>,
    pub holomorphy_limit: f64,
    /// Allowed `|g₁ + g₂ − 1|`.
    pub quadrature_tol: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Refinement {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingReport {
    pub partition_of_unity: f64,
    pub checks: Vec<InequalityCheck>,
    pub dbar_identity: Refinement,
    pub dbar_f1_minus_psi: f64,
    pub dbar_f2_plus_psi: f64,
    pub holomorphy_limit: f64,
    pub passed: bool,
}

fn params(alpha: f64, a: f64, b: f64, u: Cone) -> Result<WeightParams, DemoError> {
    WeightParams::new(alpha, a, b, u).map_err(|e| DemoError::Invalid(e.to_string()))
}

/// Checks `g₁ + g₂ = 1`, the support of `g₂'`, the two weight comparisons
/// on the supports of `g₂` and `g₁`, the identity `∂̄(g₁f) = −½ f g₂'`
/// under step refinement, and that `g₁f − ψ` and `g₂f + ψ` are holomorphic.
pub fn mollifier_splitting(p: &SplittingParams, seed: u64) -> Result<SplittingReport, DemoError> {
    let bump = Bump::new(p.delta)?;
    let d = p.delta;
    let w = Cone::ray(vec![q(1)]).map_err(|e| DemoError::Invalid(e.to_string()))?;
    let sw = params(p.alpha, p.a, p.b, w.clone())?;
    let sr = params(p.alpha, p.a, p.b, Cone::whole(1))?;
    let b_tilde = p.b + 1.0 / p.epsilon;
    let sv = params(1.0, p.epsilon, b_tilde, w)?;
    let r_const = d / p.epsilon;

    let rows = sharded(seed, p.samples, |rng| {
        let x = rng.gen_range(-p.x_box..=p.x_box);
        let y = rng.gen_range(-10.0..=10.0);
        let z = [Complex64::new(x, y)];
        let (g1, g2) = (bump.g1(x), bump.g2(x));
        let s_w = sigma_weight(&sw, &z).expect("dim");
        let on2 = (g2 > 0.0).then(|| (s_w, sigma_weight(&sr, &z).expect("dim") + p.b * d));
        let on1 = (g1 > 0.0).then(|| (s_w, sigma_weight(&sv, &z).expect("dim") + r_const));
        // away from the boundary the derivative vanishes identically
        let far = (x.abs() >= d).then(|| bump.eval(x).abs());
        ([x, y], (g1 + g2 - 1.0).abs(), on2, on1, far)
    });
    let mut pou = 0.0f64;
    let mut t38 = Tally::new("weight_on_support_of_g2", p.slack);
    let mut t39 = Tally::new("weight_on_support_of_g1", p.slack);
    let mut sup = Tally::new("derivative_supported_near_boundary", 0.0);
    for (pt, dev, on2, on1, far) in rows {
        pou = pou.max(dev);
        if let Some((l, r)) = on2 {
            t38.record(l, r, || pt.to_vec());
        }
        if let Some((l, r)) = on1 {
            t39.record(l, r, || pt.to_vec());
        }
        if let Some(v) = far {
            sup.record(v, 0.0, || pt.to_vec());
        }
    }

    let pts: Vec<Complex64> = p.points.iter().map(|v| Complex64::new(v[0], v[1])).collect();
    let f1 = |z: Complex64| entire(z) * bump.g1(z.re);
    let f2 = |z: Complex64| entire(z) * bump.g2(z.re);
    let errors: Vec<f64> = p
        .fd_steps
        .iter()
        .map(|&h| {
            pts.iter()
                .map(|z| (dbar_fd(f1, *z, h) + 0.5 * entire(*z) * bump.eval(z.re)).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let orders = errors.windows(2).zip(p.fd_steps.windows(2)).map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect();

    let source = SplitSource { bump, y_cut: p.y_cut };
    let h = *p.fd_steps.last().ok_or_else(|| DemoError::Invalid("no finite-difference steps".into()))?;
    let hol: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|z| {
            let dpsi = dbar_fd(|w| p.quad.solve_at(&source, w), *z, h);
            ((dbar_fd(f1, *z, h) - dpsi).norm(), (dbar_fd(f2, *z, h) + dpsi).norm())
        })
        .collect();
    let m1 = hol.iter().map(|v| v.0).fold(0.0, f64::max);
    let m2 = hol.iter().map(|v| v.1).fold(0.0, f64::max);

    let checks = vec![t38.finish(), t39.finish(), sup.finish()];
    let passed = pou <= p.quadrature_tol && checks.iter().all(|c| c.passed) && m1 < p.holomorphy_limit && m2 < p.holomorphy_limit;
    Ok(SplittingReport {
        partition_of_unity: pou,
        checks,
        dbar_identity: Refinement { steps: p.fd_steps.clone(), errors, orders },
        dbar_f1_minus_psi: m1,
        dbar_f2_plus_psi: m2,
        holomorphy_limit: p.holomorphy_limit,
        passed,
    })
}

impl Default for SplittingParams {
    fn default() -> Self {
        SplittingParams {
            delta: 0.5,
            alpha: 2.0,
            a: 1.0,
            b: 1.0,
            epsilon: 0.5,
            samples: 2000,
            x_box: 6.0,
            fd_steps: vec![1e-2, 5e-3, 2.5e-3],
            quad: CauchyQuadrature { n_rho: 2048, n_phi: 1024 },
            y_cut: 6.0,
            points: vec![[0.1, 0.2], [-0.3, 0.5], [0.45, -0.4], [0.8, 0.1]],
            holomorphy_limit: 1e-3,
            quadrature_tol: 1e-8,
            slack: 1e-12,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_mass_and_splits_one() {
        let b = Bump::new(0.5).unwrap();
        assert!((simpson(|t| b.eval(t), -0.5, 0.5, 4000) - 1.0).abs() < 1e-12);
        for x in [-1.0, -0.49, -0.1, 0.0, 0.3, 0.6] {
            assert!((b.g1(x) + b.g2(x) - 1.0).abs() < 1e-10);
        }
        // deep inside W
        assert!((b.g2(2.0) - 1.0).abs() < 1e-14);
        assert_eq!((b.g1(2.0), b.eval(2.0)), (0.0, 0.0));
        assert!((b.g2(0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dbar_identity_is_second_order() {
        let p = SplittingParams { samples: 200, quad: CauchyQuadrature { n_rho: 1024, n_phi: 512 }, ..Default::default() };
        let r = mollifier_splitting(&p, 3).unwrap();
        assert!(r.dbar_identity.orders.iter().all(|o| *o > 1.8), "{:?}", r.dbar_identity);
        assert!(r.partition_of_unity < 1e-10);
        for c in &r.checks {
            assert!(c.passed && c.samples > 0, "{c:?}");
        }
    }
}
