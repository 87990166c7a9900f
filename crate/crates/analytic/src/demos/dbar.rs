//! `∂̄ψ = η` on `ℂ` through the Cauchy transform
//! `ψ(z) = (1/π) ∫ η(w)/(z − w) dλ(w)`, evaluated in polar coordinates
//! about `z` as `(1/π) ∫₀^{ρ_max} ∫₀^{2π} η(z − ρe^{iφ}) e^{−iφ} dφ dρ`.
//! The trapezoid rule in `φ` is spectrally accurate for smooth `η`; the
//! trapezoid rule in `ρ` is second order because of the endpoint `ρ = 0`.

use super::{simpson, DemoError};
use crate::weights::Weight;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    fn farthest(&self, z: Complex64) -> f64 {
        [
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x0, self.y1),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
        ]
        .iter()
        .map(|c| (c - z).norm())
        .fold(0.0, f64::max)
    }
}

/// Right-hand side `η` with support inside [`Source::support`].
pub trait Source: Sync {
    fn eval(&self, w: Complex64) -> Complex64;
    fn support(&self) -> Rect;
}

/// `e^{−1/t}` for `t > 0`, else 0.
fn flat(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let (a, b) = (flat(t), flat(1.0 - t));
    a / (a + b)
}

/// `η = h(|w − c|)` with `h = 1` on `[0, r₁]`, `h = 0` beyond `r₂`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MollifiedDisc {
    pub center_re: f64,
    pub center_im: f64,
    pub r1: f64,
    pub r2: f64,
}

impl MollifiedDisc {
    pub fn new(r1: f64, r2: f64) -> Self {
        MollifiedDisc { center_re: 0.0, center_im: 0.0, r1, r2 }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center_re, self.center_im)
    }

    pub fn translated(&self, shift: Complex64) -> Self {
        MollifiedDisc { center_re: self.center_re + shift.re, center_im: self.center_im + shift.im, ..*self }
    }

    pub fn profile(&self, r: f64) -> f64 {
        smooth_step((self.r2 - r) / (self.r2 - self.r1))
    }

    /// Radial formula `ψ(z) = (2/(z−c)) ∫₀^{|z−c|} h(r) r dr`, which is
    /// `conj(z − c)` for `|z − c| ≤ r₁`.
    pub fn radial_solution(&self, z: Complex64) -> Complex64 {
        let u = z - self.center();
        let s = u.norm();
        if s == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let inner = s.min(self.r1);
        let mut m = inner * inner / 2.0;
        if s > self.r1 {
            m += simpson(|r| self.profile(r) * r, self.r1, s.min(self.r2), 20_000);
        }
        2.0 * m / u
    }
}

impl Source for MollifiedDisc {
    fn eval(&self, w: Complex64) -> Complex64 {
        Complex64::new(self.profile((w - self.center()).norm()), 0.0)
    }

    fn support(&self) -> Rect {
        let c = self.center();
        Rect { x0: c.re - self.r2, x1: c.re + self.r2, y0: c.im - self.r2, y1: c.im + self.r2 }
    }
}

pub struct ZeroSource;

impl Source for ZeroSource {
    fn eval(&self, _: Complex64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn support(&self) -> Rect {
        Rect { x0: 0.0, x1: 0.0, y0: 0.0, y1: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CauchyQuadrature {
    pub n_rho: usize,
    pub n_phi: usize,
}

impl CauchyQuadrature {
    pub fn solve_at(&self, eta: &dyn Source, z: Complex64) -> Complex64 {
        let rmax = eta.support().farthest(z);
        if rmax == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let h = rmax / self.n_rho as f64;
        let dirs: Vec<Complex64> = (0..self.n_phi).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / self.n_phi as f64)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        // the ρ = 0 column integrates e^{−iφ} against a constant and vanishes
        for i in 1..=self.n_rho {
            let rho = h * i as f64;
            let w = if i == self.n_rho { 0.5 } else { 1.0 };
            let mut ring = Complex64::new(0.0, 0.0);
            for d in &dirs {
                ring += eta.eval(z - d * rho) * d.conj();
            }
            total += ring * w;
        }
        total * h * (TAU / self.n_phi as f64) / PI
    }
}

pub fn dbar_solve_1d(eta: &dyn Source, points: &[Complex64], quad: CauchyQuadrature) -> Vec<Complex64> {
    points.par_iter().map(|z| quad.solve_at(eta, *z)).collect()
}

/// Central-difference `∂̄f = ½(∂_x + i∂_y)f`.
pub fn dbar_fd(f: impl Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let dx = (f(z + h) - f(z - h)) / (2.0 * h);
    let dy = (f(z + i * h) - f(z - i * h)) / (2.0 * h);
    (dx + i * dy) * 0.5
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementReport {
    pub n_rho: Vec<usize>,
    pub n_phi: usize,
    pub errors: Vec<f64>,
    /// `log₂(e_i / e_{i+1})` for consecutive levels.
    pub orders: Vec<f64>,
    pub observed_order: f64,
    pub min_order: f64,
    pub passed: bool,
}

/// Maximum error against the radial formula at `points` as the radial
/// node count doubles; passes when the last order is at least `min_order`.
pub fn refinement_study(disc: &MollifiedDisc, points: &[Complex64], n_phi: usize, levels: &[usize], min_order: f64) -> RefinementReport {
    let exact: Vec<Complex64> = points.iter().map(|z| disc.radial_solution(*z)).collect();
    let errors: Vec<f64> = levels
        .iter()
        .map(|&n| {
            let got = dbar_solve_1d(disc, points, CauchyQuadrature { n_rho: n, n_phi });
            got.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let observed_order = orders.last().copied().unwrap_or(f64::NAN);
    RefinementReport {
        n_rho: levels.to_vec(),
        n_phi,
        errors,
        orders,
        observed_order,
        min_order,
        passed: observed_order >= min_order,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub points: usize,
    pub step: f64,
    pub max_residual: f64,
    pub limit: f64,
    pub passed: bool,
}

/// `max |∂̄ψ − η|` over `points`, with `∂̄` by central differences.
pub fn residual(eta: &dyn Source, quad: CauchyQuadrature, points: &[Complex64], step: f64, limit: f64) -> ResidualReport {
    let worst = points
        .par_iter()
        .map(|z| (dbar_fd(|w| quad.solve_at(eta, w), *z, step) - eta.eval(*z)).norm())
        .reduce(|| 0.0, f64::max);
    ResidualReport { points: points.len(), step, max_residual: worst, limit, passed: worst < limit }
}

/// `ψ` at radii `0..r_max` along the positive real axis for a disc at the origin.
#[derive(Debug, Clone)]
pub struct RadialTable {
    step: f64,
    values: Vec<Complex64>,
}

impl RadialTable {
    pub fn build(disc: &MollifiedDisc, quad: CauchyQuadrature, r_max: f64, n: usize) -> Result<Self, DemoError> {
        if disc.center() != Complex64::new(0.0, 0.0) {
            return Err(DemoError::Invalid("the radial table needs a disc at the origin".into()));
        }
        let step = r_max / n as f64;
        let pts: Vec<Complex64> = (0..=n).map(|i| Complex64::new(step * i as f64, 0.0)).collect();
        Ok(RadialTable { step, values: dbar_solve_1d(disc, &pts, quad) })
    }

    /// `ψ(z) = (|z|/z) ψ(|z|)` with linear interpolation in `|z|`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let t = r / self.step;
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let f = t - i as f64;
        let v = self.values[i] * (1.0 - f) + self.values[i + 1] * f;
        v * r / z
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Correction {
    pub degree: usize,
    pub lhs: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HormanderReport {
    pub weight: String,
    pub box_radius: f64,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
    /// Least-squares polynomial subtracted from `ψ` when the bound fails;
    /// `ψ − p` still solves the equation.
    pub correction: Option<Correction>,
}

/// Solves the square complex system `a x = b` by Gaussian elimination.
fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))?;
        if a[p][c].norm() == 0.0 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
            let v = b[c];
            b[r] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let s: Complex64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

pub const CORRECTION_DEGREE: usize = 4;

/// `2∫|ψ|² e^{−ρ} (1+|z|²)^{−2} ≤ ∫|η|² e^{−ρ}` by the midpoint rule on
/// `[−X, X]²`. A failure triggers the polynomial correction.
pub fn hormander_check(
    disc: &MollifiedDisc,
    psi: &RadialTable,
    weight: &dyn Weight,
    label: &str,
    box_radius: f64,
    n: usize,
    slack: f64,
) -> HormanderReport {
    let h = 2.0 * box_radius / n as f64;
    let cells: Vec<(Complex64, f64, Complex64, f64)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let z = Complex64::new(-box_radius + h * ((idx % n) as f64 + 0.5), -box_radius + h * ((idx / n) as f64 + 0.5));
            let e = (-weight.value(&[z])).exp();
            let w = e / (1.0 + z.norm_sqr()).powi(2);
            (z, w, psi.eval(z), disc.eval(z).norm_sqr() * e)
        })
        .collect();
    let area = h * h;
    let lhs = 2.0 * cells.iter().map(|c| c.2.norm_sqr() * c.1).sum::<f64>() * area;
    let rhs = cells.iter().map(|c| c.3).sum::<f64>() * area;
    let passed = lhs <= rhs * (1.0 + slack);
    let correction = (!passed).then(|| {
        let d = CORRECTION_DEGREE + 1;
        let mut gram = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        let mut rhs_v = vec![Complex64::new(0.0, 0.0); d];
        for (z, w, p, _) in &cells {
            let basis: Vec<Complex64> = (0..d).map(|j| (z / box_radius).powu(j as u32)).collect();
            for i in 0..d {
                for j in 0..d {
                    gram[i][j] += basis[i].conj() * basis[j] * w;
                }
                rhs_v[i] += basis[i].conj() * p * w;
            }
        }
        let coef = solve_complex(gram, rhs_v).unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); d]);
        let lhs_c = 2.0
            * cells
                .iter()
                .map(|(z, w, p, _)| {
                    let q: Complex64 = coef.iter().enumerate().map(|(j, c)| c * (z / box_radius).powu(j as u32)).sum();
                    (p - q).norm_sqr() * w
                })
                .sum::<f64>()
            * area;
        Correction { degree: CORRECTION_DEGREE, lhs: lhs_c, passed: lhs_c <= rhs * (1.0 + slack) }
    });
    HormanderReport {
        weight: label.to_string(),
        box_radius,
        n,
        lhs,
        rhs,
        slack,
        passed,
        correction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::FnWeight;

    fn ring_points(r: f64, count: usize) -> Vec<Complex64> {
        (0..count).map(|j| Complex64::from_polar(r, 0.3 + TAU * j as f64 / count as f64)).collect()
    }

    #[test]
    fn radial_formula_is_conj_inside() {
        let d = MollifiedDisc::new(1.0, 1.5);
        let z = Complex64::new(0.3, -0.4);
        assert!((d.radial_solution(z) - z.conj()).norm() < 1e-15);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_conj_inside_the_disc() {
        let d = MollifiedDisc::new(1.0, 1.5);
        let quad = CauchyQuadrature { n_rho: 512, n_phi: 512 };
        for z in ring_points(0.5, 4) {
            assert!((quad.solve_at(&d, z) - z.conj()).norm() < 1e-4, "{z}");
        }
    }

    #[test]
    fn zero_source_gives_zero() {
        let quad = CauchyQuadrature { n_rho: 16, n_phi: 16 };
        assert_eq!(quad.solve_at(&ZeroSource, Complex64::new(1.0, 2.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn translation_equivariance() {
        let d = MollifiedDisc::new(1.0, 1.5);
        let shift = Complex64::new(2.0, -1.0);
        let moved = d.translated(shift);
        let quad = CauchyQuadrature { n_rho: 128, n_phi: 128 };
        for z in ring_points(1.2, 3) {
            let a = quad.solve_at(&d, z);
            let b = quad.solve_at(&moved, z + shift);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn second_order_in_the_radial_step() {
        let d = MollifiedDisc::new(1.0, 1.5);
        let r = refinement_study(&d, &ring_points(1.25, 5), 512, &[64, 128, 256, 512], 1.8);
        assert!(r.passed, "{r:?}");
        assert!(r.errors.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn finite_difference_residual_is_small() {
        let d = MollifiedDisc::new(1.0, 1.5);
        let pts = [ring_points(0.5, 2), ring_points(1.25, 3), ring_points(2.0, 2)].concat();
        let r = residual(&d, CauchyQuadrature { n_rho: 512, n_phi: 512 }, &pts, 1e-3, 1e-3);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn complex_solver() {
        let a = vec![
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.0)],
        ];
        let x = vec![Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.5)];
        let b: Vec<Complex64> = a.iter().map(|r| r[0] * x[0] + r[1] * x[1]).collect();
        let got = solve_complex(a, b).unwrap();
        assert!((got[0] - x[0]).norm() < 1e-14 && (got[1] - x[1]).norm() < 1e-14);
    }

    #[test]
    fn hormander_with_flat_weight() {
        let d = MollifiedDisc::new(1.0, 1.5);
        let table = RadialTable::build(&d, CauchyQuadrature { n_rho: 256, n_phi: 256 }, 30.0, 600).unwrap();
        let flat = FnWeight { dim: 1, f: |_: &[Complex64]| 0.0 };
        let r = hormander_check(&d, &table, &flat, "zero", 20.0, 400, 1e-6);
        assert!(r.lhs.is_finite() && r.rhs > 0.0, "{r:?}");
        // ∫ h² over the plane lies between the areas of the two discs
        assert!(r.rhs > PI && r.rhs < PI * 2.25);
    }
}
