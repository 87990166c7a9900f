//! The weight `σ^α_{U,A,B}`, the one-variable building block `Ψ`, and a
//! plurisubharmonic comparison weight with `|x|^{1/α}` decay.

use crate::cone::{sup_norm, Cone, ConeError};
use crate::report::{sharded, InequalityCheck, Tally};
use crate::theta::{mu, theta, theta_shifted};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("maximization of the ratio failed: {0}")]
    MaximizationFailed(String),
    #[error("cone: {0}")]
    Cone(#[from] ConeError),
    #[error("the given region is not a conic neighborhood: {0}")]
    NotANeighborhood(String),
    #[error("functional is not positive on the cone")]
    NotPositive,
    #[error("cone is not contained in U: generator {0:?}")]
    NotContained(Vec<String>),
}

pub fn re_parts(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|w| w.re).collect()
}

pub fn im_parts(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|w| w.im).collect()
}

/// A function on `ℂᵏ` with values in `[−∞, ∞)`.
pub trait Weight: Sync {
    fn dim(&self) -> usize;
    fn value(&self, z: &[Complex64]) -> f64;
}

/// Wraps a closure as a [`Weight`].
pub struct FnWeight<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&[Complex64]) -> f64 + Sync> Weight for FnWeight<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        (self.f)(z)
    }
}

/// `(α, A, B, U)` for `σ^α_{U,A,B}`.
#[derive(Debug, Clone)]
pub struct WeightParams {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub cone: Cone,
}

impl WeightParams {
    pub fn new(alpha: f64, a: f64, b: f64, cone: Cone) -> Result<Self, WeightError> {
        if !(alpha >= 1.0) || !(a > 0.0) || !(b > 0.0) {
            return Err(WeightError::InvalidParameter(format!("alpha={alpha}, A={a}, B={b}")));
        }
        Ok(WeightParams { alpha, a, b, cone })
    }
}

/// `−|x/A|^{1/α} + δ_U(Bx) + |By|`.
pub fn sigma_weight(p: &WeightParams, z: &[Complex64]) -> Result<f64, WeightError> {
    let x = re_parts(z);
    let bx: Vec<f64> = x.iter().map(|v| p.b * v).collect();
    let decay = (sup_norm(&x) / p.a).powf(1.0 / p.alpha);
    Ok(-decay + p.cone.distance(&bx)? + p.b * sup_norm(&im_parts(z)))
}

/// Subharmonic `Ψ(z) = λ⁻¹[Θ(t(z)) − μ(h)]` with `t(z) = c(z − (a+b)/2)`,
/// `c = π/(2(b+κ))`, `h = t(b)`.
#[derive(Debug, Clone, Serialize)]
pub struct Psi {
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    pub scale: f64,
    pub center: f64,
    pub h: f64,
    pub lambda: f64,
    pub x0: f64,
    /// Coefficient of `|y|` in the upper bound, `c/λ`.
    pub r: f64,
    /// `H` with `Ψ ≥ −H` on the strip `|Re z| ≤ κ`.
    pub strip_lower: f64,
}

impl Psi {
    pub fn t(&self, z: Complex64) -> Complex64 {
        (z - self.center) * self.scale
    }

    /// `μ(|t(x)|) − μ(h)`, positive exactly on `(a, b)`.
    pub fn mu_tilde(&self, x: f64) -> f64 {
        mu(self.t(Complex64::new(x, 0.0)).re.abs()) - mu(self.h)
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        (theta(self.t(z)) - mu(self.h)) / self.lambda
    }
}

const SCAN: usize = 4096;
const GOLDEN_TOL: f64 = 1e-10;

/// Maximizes a continuous `f` on `[lo, hi]`: first index of the largest
/// value on a uniform scan, then golden-section search on the neighbouring
/// bracket. Ties go to the smaller abscissa.
pub fn maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let step = (hi - lo) / SCAN as f64;
    let mut best = (lo, f(lo));
    for i in 1..=SCAN {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let (mut p, mut q) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = q - g * (q - p);
    let mut d = p + g * (q - p);
    let (mut fc, mut fd) = (f(c), f(d));
    while q - p > GOLDEN_TOL {
        if fc >= fd {
            q = d;
            d = c;
            fd = fc;
            c = q - g * (q - p);
            fc = f(c);
        } else {
            p = c;
            c = d;
            fc = fd;
            d = p + g * (q - p);
            fd = f(d);
        }
    }
    let x = 0.5 * (p + q);
    let v = f(x);
    if v > best.1 {
        (x, v)
    } else {
        best
    }
}

pub fn build_psi(a: f64, b: f64, kappa: f64) -> Result<Psi, WeightError> {
    if !(0.0 < a && a < b) || !(kappa > 0.0) {
        return Err(WeightError::InvalidParameter(format!("a={a}, b={b}, kappa={kappa}")));
    }
    let scale = std::f64::consts::PI / (2.0 * (b + kappa));
    let center = (a + b) / 2.0;
    let mut psi = Psi {
        a,
        b,
        kappa,
        scale,
        center,
        h: scale * (b - center),
        lambda: f64::NAN,
        x0: f64::NAN,
        r: f64::NAN,
        strip_lower: f64::NAN,
    };
    let (x0, lambda) = maximize(|x| psi.mu_tilde(x) / x, a, b);
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(WeightError::MaximizationFailed(format!("lambda={lambda} at x0={x0}")));
    }
    psi.x0 = x0;
    psi.lambda = lambda;
    psi.r = scale / lambda;
    psi.strip_lower = (mu(psi.h) - mu(FRAC_PI_2)) / lambda;
    Ok(psi)
}

fn mixed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if rng.gen_bool(0.2) {
        let mid = 0.5 * (lo + hi);
        let v = (hi - mid) * 10f64.powf(rng.gen_range(-9.0..0.0));
        if rng.gen_bool(0.5) {
            mid + v
        } else {
            mid - v
        }
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Samples the upper bound `Ψ ≤ xχ(x) + R|y|`, the lower bound on the line
/// `Re z = x₀`, and the strip bound `Ψ ≥ −H` for `|Re z| ≤ κ`.
pub fn verify_psi(psi: &Psi, seed: u64, samples: usize, slack: f64) -> Vec<InequalityCheck> {
    let (a, b) = (psi.a, psi.b);
    let span = 2.0 * (b - a) + 2.0 + psi.kappa;
    let rows = sharded(seed, samples, |rng| {
        let x = if rng.gen_bool(0.5) { rng.gen_range(a..=b) } else { mixed(rng, a - span, b + span) };
        let y = mixed(rng, -10.0, 10.0);
        let chi = if (a..=b).contains(&x) { x } else { 0.0 };
        let upper = (psi.eval(Complex64::new(x, y)), chi + psi.r * y.abs());
        let y2 = mixed(rng, -10.0, 10.0);
        let line = (psi.x0, psi.eval(Complex64::new(psi.x0, y2)));
        let (xs, ys) = (rng.gen_range(-psi.kappa..=psi.kappa), mixed(rng, -10.0, 10.0));
        let strip = (-psi.strip_lower, psi.eval(Complex64::new(xs, ys)));
        ([x, y], upper, y2, line, [xs, ys], strip)
    });
    let mut up = Tally::new("psi_upper", slack);
    let mut line = Tally::new("psi_lower_on_line", slack);
    let mut strip = Tally::new("psi_bounded_below_on_strip", slack);
    for (p, u, y2, l, ps, s) in rows {
        up.record(u.0, u.1, || p.to_vec());
        line.record(l.0, l.1, || vec![psi.x0, y2]);
        strip.record(s.0, s.1, || ps.to_vec());
    }
    vec![up.finish(), line.finish(), strip.finish()]
}

/// Plurisubharmonic `σ` with `−|x|^{1/α} − H ≤ σ(x+iy) ≤ −|x|^{1/α} + B|y|`
/// on `|x| ≤ X`:
///
/// `σ(z) = Σ_j Σ_{n≤N} [Θ_β(c z_j / n^α) − Θ(iβ)] − C₀`
///
/// where `Θ_β(w) = Θ(Re w + i(|Im w| + β))`. Each summand is a maximum of
/// two translates of `Θ`, hence subharmonic, and `Θ_β` is nondecreasing in
/// `|Im w|`, so `σ(x+iy) ≥ σ(x)`. From `Θ(u+iv) ≤ μ(|u|) + |v|` the
/// coefficient `B = k c Σ n^{−α}` is exact, and `C₀` is the supremum over
/// `[0, X]` of `g(t) + t^{1/α}` plus the constant `Nk(β − Θ(iβ))`, with
/// `g(t) = Σ_n μ(ct/n^α)`. `H` uses `Θ_β(w) ≥ log sinh β − log(|Re w| + β)`.
/// Both suprema are taken on a grid with monotone bracketing, so they are
/// upper bounds.
#[derive(Debug, Clone, Serialize)]
pub struct GsOracle {
    pub alpha: f64,
    pub c: f64,
    pub terms: usize,
    pub beta: f64,
    pub dim: usize,
    pub box_radius: f64,
    pub shift: f64,
    pub b_coef: f64,
    pub h: f64,
    #[serde(skip)]
    scales: Vec<f64>,
    #[serde(skip)]
    offset: f64,
}

pub const GS_BETA: f64 = 0.5;
const GS_GRID: usize = 20_000;

impl GsOracle {
    /// The sum before the shift; vanishes at the origin.
    pub fn raw(&self, z: &[Complex64]) -> f64 {
        let mut s = 0.0;
        for w in z {
            for &k in &self.scales {
                s += theta_shifted(*w * k, self.beta) - self.offset;
            }
        }
        s
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        self.raw(z) - self.shift
    }
}

impl Weight for GsOracle {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.eval(z)
    }
}

pub fn build_gs_oracle(alpha: f64, c: f64, terms: usize, dim: usize, box_radius: f64) -> Result<GsOracle, WeightError> {
    if !(alpha > 1.0) || !(c > 0.0) || terms == 0 || dim == 0 || !(box_radius > 0.0) {
        return Err(WeightError::InvalidParameter(format!(
            "alpha={alpha}, c={c}, N={terms}, k={dim}, X={box_radius}"
        )));
    }
    let beta = GS_BETA;
    let scales: Vec<f64> = (1..=terms).map(|n| c / (n as f64).powf(alpha)).collect();
    let offset = theta(Complex64::new(0.0, beta));
    let k = dim as f64;
    let b_coef = k * scales.iter().sum::<f64>();
    let g = |t: f64| scales.iter().map(|s| mu(s * t)).sum::<f64>();
    let lower_log = |t: f64| k * scales.iter().map(|s| (s * t / beta).ln_1p()).sum::<f64>();
    let root = |t: f64| t.powf(1.0 / alpha);
    let grid: Vec<f64> = (0..=GS_GRID).map(|i| box_radius * i as f64 / GS_GRID as f64).collect();
    let mut up = f64::NEG_INFINITY;
    let mut lo = f64::NEG_INFINITY;
    for w in grid.windows(2) {
        // g is decreasing and t^{1/α} increasing, so on [t₀, t₁] the sum is at most g(t₀) + t₁^{1/α}
        up = up.max(g(w[0]) + root(w[1]));
        lo = lo.max(lower_log(w[1]) - root(w[0]));
    }
    let shift = terms as f64 * k * (beta - offset) + up;
    Ok(GsOracle {
        alpha,
        c,
        terms,
        beta,
        dim,
        box_radius,
        shift,
        b_coef,
        h: lo + shift,
        scales,
        offset,
    })
}

/// Number of terms that covers the box: `2(cX)^{1/α} + 4`.
pub fn default_terms(alpha: f64, c: f64, box_radius: f64) -> usize {
    (2.0 * (c * box_radius).powf(1.0 / alpha)).ceil() as usize + 4
}

/// Samples the two-sided bound and `σ(x+iy) ≥ σ(x)` on the box.
pub fn verify_gs_oracle(g: &GsOracle, seed: u64, samples: usize, slack: f64) -> Vec<InequalityCheck> {
    let x_box = g.box_radius;
    let rows = sharded(seed, samples, |rng| {
        let x: Vec<f64> = (0..g.dim).map(|_| mixed(rng, -x_box, x_box)).collect();
        let y: Vec<f64> = (0..g.dim).map(|_| mixed(rng, -10.0, 10.0)).collect();
        let z: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let zr: Vec<Complex64> = x.iter().map(|a| Complex64::new(*a, 0.0)).collect();
        let s = g.eval(&z);
        let decay = sup_norm(&x).powf(1.0 / g.alpha);
        let point: Vec<f64> = x.iter().chain(&y).copied().collect();
        (point, s, g.eval(&zr), decay, sup_norm(&y))
    });
    let mut upper = Tally::new("gs_upper", slack);
    let mut lower = Tally::new("gs_lower", slack);
    let mut off = Tally::new("gs_grows_off_axis", slack);
    for (p, s, sr, decay, ny) in rows {
        upper.record(s, -decay + g.b_coef * ny, || p.clone());
        lower.record(-decay - g.h, s, || p.clone());
        off.record(sr, s, || p.clone());
    }
    vec![upper.finish(), lower.finish(), off.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_weight_examples() {
        let zero = Complex64::new(0.0, 0.0);
        let p = WeightParams::new(1.0, 1.0, 1.0, Cone::orthant(2)).unwrap();
        assert_eq!(sigma_weight(&p, &[zero, zero]).unwrap(), 0.0);
        let z = [Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert_eq!(sigma_weight(&p, &z).unwrap(), 0.0);
        let whole = WeightParams::new(2.0, 1.0, 3.0, Cone::whole(2)).unwrap();
        let z = [Complex64::new(-4.0, 1.0), Complex64::new(2.0, -2.0)];
        assert!((sigma_weight(&whole, &z).unwrap() - (-2.0 + 6.0)).abs() < 1e-15);
        assert!(WeightParams::new(0.5, 1.0, 1.0, Cone::zero(1)).is_err());
    }

    #[test]
    fn maximize_finds_interior_peak() {
        let (x, v) = maximize(|x| -(x - 1.3).powi(2), 1.0, 2.0);
        assert!((x - 1.3).abs() < 1e-8 && v.abs() < 1e-15);
        // a tie goes to the left end
        let (x, _) = maximize(|_| 1.0, 0.0, 1.0);
        assert_eq!(x, 0.0);
    }

    /// Independent λ from a brute dense scan of μ̃(x)/x.
    fn brute_lambda(psi: &Psi) -> (f64, f64) {
        let n = 2_000_000;
        let mut best = (psi.a, f64::NEG_INFINITY);
        for i in 0..=n {
            let x = psi.a + (psi.b - psi.a) * i as f64 / n as f64;
            let v = psi.mu_tilde(x) / x;
            if v > best.1 {
                best = (x, v);
            }
        }
        best
    }

    #[test]
    fn psi_constants_match_a_dense_scan() {
        let psi = build_psi(1.0, 2.0, 1.0).unwrap();
        let (x, v) = brute_lambda(&psi);
        assert!((psi.lambda - v).abs() < 1e-12, "{} vs {v}", psi.lambda);
        assert!((psi.x0 - x).abs() < 1e-5, "{} vs {x}", psi.x0);
        assert!((psi.r - psi.scale / psi.lambda).abs() < 1e-15);
        assert!(psi.eval(Complex64::new(psi.x0, 0.0)) >= psi.x0 - 1e-12);
        assert!(psi.mu_tilde(1.0).abs() < 1e-15 && psi.mu_tilde(2.0).abs() < 1e-15);
    }

    #[test]
    fn psi_bounds_hold() {
        for (a, b, k) in [(1.0, 2.0, 1.0), (0.5, 3.0, 0.25), (2.0, 2.5, 4.0)] {
            let psi = build_psi(a, b, k).unwrap();
            for c in verify_psi(&psi, 5, 4000, 1e-9) {
                assert!(c.passed, "{a} {b} {k}: {c:?}");
            }
        }
        assert!(build_psi(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gs_oracle_bounds_hold() {
        for (alpha, dim) in [(2.0, 1), (2.0, 2), (1.5, 3)] {
            let x = 20.0;
            let g = build_gs_oracle(alpha, 1.0, default_terms(alpha, 1.0, x), dim, x).unwrap();
            let zero = vec![Complex64::new(0.0, 0.0); dim];
            assert!(g.raw(&zero).abs() < 1e-15);
            for c in verify_gs_oracle(&g, 9, 3000, 1e-9) {
                assert!(c.passed, "{alpha} {dim}: {c:?}");
            }
        }
    }
}
