//! `Θ(z) = log|sin z / z|`, the radial profile `μ`, and their inequalities.

use crate::report::{sharded, InequalityCheck, Tally};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

/// `log|sin z / z|`, with `Θ(0) = 0` and `−∞` where `sin z` vanishes in floating point.
pub fn theta(z: Complex64) -> f64 {
    let (x, y) = (z.re, z.im.abs());
    if x == 0.0 && y == 0.0 {
        return 0.0;
    }
    let denom = x.hypot(y).ln();
    if y < 20.0 {
        let s = x.sin();
        let num = s * s + y.sinh().powi(2);
        if num == 0.0 {
            return f64::NEG_INFINITY;
        }
        // log1p keeps the removable singularity accurate
        if x.abs() < 0.5 && y < 0.5 {
            return 0.5 * sinc_sq_minus_one(z).ln_1p();
        }
        return 0.5 * num.ln() - denom;
    }
    // |sin z|² = sinh²y (1 + sin²x / sinh²y), sinh y = e^y (1 − e^{−2y}) / 2
    let e = (-2.0 * y).exp();
    let log_sinh = y - LN_2 + (-e).ln_1p();
    let ratio = x.sin().powi(2) * 4.0 * e / (1.0 - e).powi(2);
    log_sinh + 0.5 * ratio.ln_1p() - denom
}

/// `|sin z / z|² − 1` from the power series, for small `z`.
fn sinc_sq_minus_one(z: Complex64) -> f64 {
    let z2 = z * z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..12 {
        term = -term * z2 / ((2 * n) as f64 * (2 * n + 1) as f64);
        d += term;
    }
    2.0 * d.re + d.norm_sqr()
}

/// `μ(t) = Θ(t)` on `[0, π/2]` and `−log t` beyond.
pub fn mu(t: f64) -> f64 {
    if t <= FRAC_PI_2 {
        theta(Complex64::new(t, 0.0))
    } else {
        -t.ln()
    }
}

/// `Θ(Re w + i(|Im w| + β))`, the larger of the two translates `Θ(w ± iβ)`.
/// It never takes the value `−∞` for `β > 0`.
pub fn theta_shifted(w: Complex64, beta: f64) -> f64 {
    theta(Complex64::new(w.re, w.im.abs() + beta))
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma4Report {
    pub seed: u64,
    pub checks: Vec<InequalityCheck>,
    pub monotone_grid: usize,
    pub monotone: bool,
    /// First grid index where `Θ` fails to decrease strictly.
    pub monotone_witness: Option<usize>,
}

impl Lemma4Report {
    pub fn passed(&self) -> bool {
        self.monotone && self.checks.iter().all(|c| c.passed)
    }
}

fn sample_real<R: Rng>(rng: &mut R, bound: f64) -> f64 {
    // half uniform, half log-uniform in magnitude to stress small arguments
    let v = if rng.gen_bool(0.5) {
        rng.gen_range(0.0..bound)
    } else {
        bound * 10f64.powf(rng.gen_range(-12.0..0.0))
    };
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// Lower side of the intermediate bound: `cos 2x (1−e^{−2|y|})/2 − (1−e^{−4|y|})/4`.
pub fn lemma4_intermediate_lhs(x: f64, y: f64) -> f64 {
    let a = y.abs();
    (2.0 * x).cos() * (-(-2.0 * a).exp_m1()) / 2.0 + (-4.0 * a).exp_m1() / 4.0
}

/// `(sin²x / x²) y²`, continuous at `x = 0`.
pub fn lemma4_intermediate_rhs(x: f64, y: f64) -> f64 {
    let s = if x == 0.0 { 1.0 } else { (x.sin() / x).powi(2) };
    s * y * y
}

/// Samples the lower and upper bounds of `Θ` off the real axis, the
/// intermediate trigonometric bound, and strict decrease on `[0, π]`.
pub fn verify_lemma4(seed: u64, samples: usize, grid: usize, slack: f64) -> Lemma4Report {
    let three_quarter = 0.75 * PI;
    let rows = sharded(seed, samples, |rng| {
        let (x, y) = (sample_real(rng, 4.0 * PI), sample_real(rng, 12.0));
        let (xs, ys) = (sample_real(rng, three_quarter), sample_real(rng, 12.0));
        let (xt, yt) = (sample_real(rng, three_quarter), sample_real(rng, 12.0));
        let lower = (theta(Complex64::new(x, 0.0)), theta(Complex64::new(x, y)));
        let upper = (
            theta(Complex64::new(xs, ys)),
            theta(Complex64::new(xs, 0.0)) + ys.abs(),
        );
        let inter = (lemma4_intermediate_lhs(xt, yt), lemma4_intermediate_rhs(xt, yt));
        ([x, y], lower, [xs, ys], upper, [xt, yt], inter)
    });
    let mut t12 = Tally::new("theta_lower_off_axis", slack);
    let mut t13 = Tally::new("theta_upper_off_axis", slack);
    let mut t15 = Tally::new("intermediate_trig_bound", slack);
    for (p, l, ps, u, pt, i) in rows {
        t12.record(l.0, l.1, || p.to_vec());
        t13.record(u.0, u.1, || ps.to_vec());
        t15.record(i.0, i.1, || pt.to_vec());
    }
    let values: Vec<f64> = (0..=grid).map(|i| theta(Complex64::new(PI * i as f64 / grid as f64, 0.0))).collect();
    let monotone_witness = values.windows(2).position(|w| w[1] >= w[0]);
    Lemma4Report {
        seed,
        checks: vec![t12.finish(), t13.finish(), t15.finish()],
        monotone_grid: grid,
        monotone: monotone_witness.is_none(),
        monotone_witness,
    }
}

/// Checks `Θ(x+iy) ≥ μ(|x|)` for `|x| ≤ π/2` and `Θ(x+iy) ≤ μ(|x|) + |y|`.
pub fn verify_mu_bounds(seed: u64, samples: usize, slack: f64) -> Vec<InequalityCheck> {
    let rows = sharded(seed, samples, |rng| {
        let (x, y) = (sample_real(rng, FRAC_PI_2), sample_real(rng, 12.0));
        let (xu, yu) = (sample_real(rng, 6.0 * PI), sample_real(rng, 12.0));
        (
            [x, y],
            (mu(x.abs()), theta(Complex64::new(x, y))),
            [xu, yu],
            (theta(Complex64::new(xu, yu)), mu(xu.abs()) + yu.abs()),
        )
    });
    let mut lo = Tally::new("theta_above_mu_in_strip", slack);
    let mut hi = Tally::new("theta_below_mu_plus_y", slack);
    for (p, a, q, b) in rows {
        lo.record(a.0, a.1, || p.to_vec());
        hi.record(b.0, b.1, || q.to_vec());
    }
    vec![lo.finish(), hi.finish()]
}
