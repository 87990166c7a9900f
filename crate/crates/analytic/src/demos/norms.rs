//! Grid estimates of `‖f‖^α_{U,A,B} = sup |f| e^{−σ}` and of the
//! `L²` counterpart `[∫ |f|² e^{−2σ} dλ]^{1/2}`, and the approximating
//! sequence `g_n(z) = g(z) f(z/n)`.

use super::DemoError;
use crate::weights::{sigma_weight, WeightParams};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Closed-form entire functions on `ℂᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EntireSample {
    Zero,
    /// `exp(Σ c_j z_j)`.
    Exponential { coeffs: Vec<f64> },
    /// `exp(Σ z_j²)`.
    ExpSquare,
    /// `Π sin(s z_j) / (s z_j)`.
    Sinc { scale: f64 },
}

impl EntireSample {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            EntireSample::Zero => Complex64::new(0.0, 0.0),
            EntireSample::Exponential { coeffs } => coeffs.iter().zip(z).map(|(c, w)| w * c).sum::<Complex64>().exp(),
            EntireSample::ExpSquare => z.iter().map(|w| w * w).sum::<Complex64>().exp(),
            EntireSample::Sinc { scale } => z
                .iter()
                .map(|w| {
                    let u = w * scale;
                    if u.norm() < 1e-8 {
                        Complex64::new(1.0, 0.0) - u * u / 6.0
                    } else {
                        u.sin() / u
                    }
                })
                .product(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EntireSample::Zero => "0".into(),
            EntireSample::Exponential { coeffs } => format!("exp({coeffs:?}·z)"),
            EntireSample::ExpSquare => "exp(z·z)".into(),
            EntireSample::Sinc { scale } => format!("prod sinc({scale} z_j)"),
        }
    }
}

/// Uniform grid of `n` points per real axis on `[−R, R]^{2k}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoxGrid {
    pub radius: f64,
    pub n: usize,
}

impl BoxGrid {
    fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| -self.radius + 2.0 * self.radius * i as f64 / (self.n - 1) as f64).collect()
    }

    /// `(f(z), z on the boundary)` for every grid point.
    fn fold<F>(&self, k: usize, f: F) -> Vec<(f64, bool)>
    where
        F: Fn(&[Complex64]) -> f64 + Sync,
    {
        let axis = self.axis();
        let n = self.n;
        let total = n.pow(2 * k as u32);
        (0..total)
            .into_par_iter()
            .map(|mut idx| {
                let mut z = vec![Complex64::new(0.0, 0.0); k];
                let mut edge = false;
                for w in z.iter_mut() {
                    let (i, j) = (idx % n, (idx / n) % n);
                    idx /= n * n;
                    edge |= i == 0 || j == 0 || i == n - 1 || j == n - 1;
                    *w = Complex64::new(axis[i], axis[j]);
                }
                (f(&z), edge)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub boundary: f64,
    /// `boundary / value`, or 0 when both vanish.
    pub boundary_ratio: f64,
    pub grid: BoxGrid,
}

fn ratio(boundary: f64, value: f64) -> f64 {
    if boundary == 0.0 {
        0.0
    } else {
        boundary / value
    }
}

/// `|f| e^{−σ}` without overflow for large exponents.
fn weighted_abs(f: &EntireSample, p: &WeightParams, z: &[Complex64]) -> f64 {
    let s = sigma_weight(p, z).expect("dimension checked");
    let v = f.eval(z).norm();
    if v == 0.0 {
        0.0
    } else {
        (v.ln() - s).exp()
    }
}

fn check_dim(f: &EntireSample, p: &WeightParams) -> Result<usize, DemoError> {
    let k = p.cone.dim();
    if let EntireSample::Exponential { coeffs } = f {
        if coeffs.len() != k {
            return Err(DemoError::Invalid(format!("{} coefficients in C^{k}", coeffs.len())));
        }
    }
    Ok(k)
}

fn sup_unchecked(f: &EntireSample, p: &WeightParams, grid: BoxGrid) -> Result<NormEstimate, DemoError> {
    let k = check_dim(f, p)?;
    let vals = grid.fold(k, |z| weighted_abs(f, p, z));
    let value = vals.iter().fold(0.0f64, |m, v| m.max(v.0));
    let boundary = vals.iter().filter(|v| v.1).fold(0.0f64, |m, v| m.max(v.0));
    Ok(NormEstimate { value, boundary, boundary_ratio: ratio(boundary, value), grid })
}

/// Grid maximum of `|f| e^{−σ}`; fails if the boundary maximum is not
/// below `tol` times the value.
pub fn sup_norm_estimate(f: &EntireSample, p: &WeightParams, grid: BoxGrid, tol: f64) -> Result<NormEstimate, DemoError> {
    let e = sup_unchecked(f, p, grid)?;
    if e.boundary_ratio > tol {
        return Err(DemoError::BoundaryNotNegligible { ratio: e.boundary_ratio, tol });
    }
    Ok(e)
}

/// Midpoint-rule `[∫ |f|² e^{−2σ}]^{1/2}` over the box; the boundary figure
/// is the largest integrand value on the boundary relative to the largest overall.
pub fn l2_norm_estimate(f: &EntireSample, p: &WeightParams, grid: BoxGrid, tol: f64) -> Result<NormEstimate, DemoError> {
    let k = check_dim(f, p)?;
    let vals = grid.fold(k, |z| weighted_abs(f, p, z).powi(2));
    let cell = (2.0 * grid.radius / (grid.n - 1) as f64).powi(2 * k as i32);
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.0));
    let boundary = vals.iter().filter(|v| v.1).fold(0.0f64, |m, v| m.max(v.0));
    let value = (vals.iter().map(|v| v.0).sum::<f64>() * cell).sqrt();
    let r = ratio(boundary, top);
    if r > tol {
        return Err(DemoError::BoundaryNotNegligible { ratio: r, tol });
    }
    Ok(NormEstimate { value, boundary, boundary_ratio: r, grid })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub label: String,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub boundary_ratios: Vec<f64>,
    /// The last boundary ratio is below tolerance and the last two values agree to it.
    pub bounded: bool,
}

/// Sup-norm estimates on expanding boxes with the same spacing.
pub fn sup_norm_growth(f: &EntireSample, p: &WeightParams, radii: &[f64], spacing: f64, tol: f64) -> Result<GrowthReport, DemoError> {
    let mut values = Vec::new();
    let mut ratios = Vec::new();
    for &r in radii {
        let n = (2.0 * r / spacing).round() as usize + 1;
        let e = sup_unchecked(f, p, BoxGrid { radius: r, n })?;
        values.push(e.value);
        ratios.push(e.boundary_ratio);
    }
    let m = values.len();
    let bounded = m >= 2
        && ratios[m - 1] <= tol
        && (values[m - 1] - values[m - 2]).abs() <= tol * values[m - 1].abs().max(f64::MIN_POSITIVE);
    Ok(GrowthReport {
        label: f.label(),
        radii: radii.to_vec(),
        values,
        boundary_ratios: ratios,
        bounded,
    })
}

/// `g(z) f(z/n)` as an entire sample when both are exponentials.
pub fn scaled_product(g: &EntireSample, f: &EntireSample, n: u32) -> Result<EntireSample, DemoError> {
    match (g, f) {
        (EntireSample::Exponential { coeffs: a }, EntireSample::Exponential { coeffs: b }) if a.len() == b.len() => {
            Ok(EntireSample::Exponential {
                coeffs: a.iter().zip(b).map(|(x, y)| x + y / n as f64).collect(),
            })
        }
        _ => Err(DemoError::Invalid("the sequence is built for exponential samples".into())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceParams {
    pub alpha: f64,
    pub a_big: f64,
    pub b_big: f64,
    pub a_small: f64,
    pub b_small: f64,
    /// `A' > A` for the decay factor.
    pub a_prime: f64,
    pub max_n: u32,
    pub grid: BoxGrid,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceRow {
    pub n: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub g: String,
    pub f: String,
    pub rows: Vec<SequenceRow>,
    /// `min(A^{−1/α} − A'^{−1/α}, A^{−1} − A'^{−1})`.
    pub eta: f64,
    /// Largest pointwise gap `|g_n − g|` on the grid, per `n`.
    pub convergence: Vec<f64>,
    pub passed: bool,
}

/// For `n = 1..N` compares the three norms of `g_n` against
/// `‖f‖¹_{W',a,b}(‖g‖¹_{W,A,B} + ‖g‖^α_{W',A,B})` with `B̃ = B + b`.
pub fn lemma2_sequence(
    g: &EntireSample,
    f: &EntireSample,
    w: &crate::cone::Cone,
    w_prime: &crate::cone::Cone,
    p: &SequenceParams,
) -> Result<SequenceReport, DemoError> {
    let zero = vec![Complex64::new(0.0, 0.0); w.dim()];
    if (f.eval(&zero) - 1.0).norm() > 1e-15 {
        return Err(DemoError::Invalid("f(0) must be 1".into()));
    }
    let params = |alpha, a, b, u: &crate::cone::Cone| WeightParams::new(alpha, a, b, u.clone()).map_err(|e| DemoError::Invalid(e.to_string()));
    let tol = 1e-6;
    let f_norm = sup_norm_estimate(f, &params(1.0, p.a_small, p.b_small, w_prime)?, p.grid, tol)?.value;
    let g1 = sup_norm_estimate(g, &params(1.0, p.a_big, p.b_big, w)?, p.grid, tol)?.value;
    let ga = sup_norm_estimate(g, &params(p.alpha, p.a_big, p.b_big, w_prime)?, p.grid, tol)?.value;
    let rhs = f_norm * (g1 + ga);
    let bt = p.b_big + p.b_small;
    let mut rows = Vec::new();
    let mut convergence = Vec::new();
    for n in 1..=p.max_n {
        let gn = scaled_product(g, f, n)?;
        let lhs = [
            sup_norm_estimate(&gn, &params(1.0, p.a_big, bt, w)?, p.grid, tol)?.value,
            sup_norm_estimate(&gn, &params(1.0, n as f64 * p.a_small, bt, w_prime)?, p.grid, tol)?.value,
            sup_norm_estimate(&gn, &params(p.alpha, p.a_big, bt, w_prime)?, p.grid, tol)?.value,
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        rows.push(SequenceRow { n, lhs, rhs, passed: lhs <= rhs * (1.0 + p.slack) });
        let gap = p
            .grid
            .fold(w.dim(), |z| (gn.eval(z) - g.eval(z)).norm())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.0));
        convergence.push(gap);
    }
    let (a, ap, al) = (p.a_big, p.a_prime, p.alpha);
    let eta = (a.powf(-1.0 / al) - ap.powf(-1.0 / al)).min(1.0 / a - 1.0 / ap);
    let passed = rows.iter().all(|r| r.passed) && eta > 0.0;
    Ok(SequenceReport { g: g.label(), f: f.label(), rows, eta, convergence, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Cone;
    use carrier_core::linalg::q;

    fn params(alpha: f64, a: f64, b: f64, u: Cone) -> WeightParams {
        WeightParams::new(alpha, a, b, u).unwrap()
    }

    #[test]
    fn zero_has_zero_norm() {
        let p = params(2.0, 1.0, 1.0, Cone::ray(vec![q(1)]).unwrap());
        let e = sup_norm_estimate(&EntireSample::Zero, &p, BoxGrid { radius: 4.0, n: 41 }, 1e-6).unwrap();
        assert_eq!(e.value, 0.0);
        let e = l2_norm_estimate(&EntireSample::Zero, &p, BoxGrid { radius: 4.0, n: 41 }, 1e-6).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn exponential_norm_depends_on_the_cone() {
        let f = EntireSample::Exponential { coeffs: vec![1.0] };
        let radii = [8.0, 16.0, 32.0, 48.0];
        let good = params(2.0, 1.0, 2.0, Cone::ray(vec![q(-1)]).unwrap());
        let r = sup_norm_growth(&f, &good, &radii, 0.25, 1e-6).unwrap();
        assert!(r.bounded, "{r:?}");
        // the maximum of e^{−t+√t} is e^{1/4} at t = 1/4, a grid point
        assert!((r.values[3] - 0.25f64.exp()).abs() < 1e-12);
        let bad = params(2.0, 1.0, 2.0, Cone::ray(vec![q(1)]).unwrap());
        let r = sup_norm_growth(&f, &bad, &radii, 0.25, 1e-6).unwrap();
        assert!(!r.bounded);
        assert!(r.values.windows(2).all(|w| w[1] > 2.0 * w[0]));
    }

    #[test]
    fn boundary_mass_is_flagged() {
        let f = EntireSample::Exponential { coeffs: vec![1.0] };
        let bad = params(2.0, 1.0, 2.0, Cone::ray(vec![q(1)]).unwrap());
        let err = sup_norm_estimate(&f, &bad, BoxGrid { radius: 8.0, n: 65 }, 1e-6).unwrap_err();
        assert!(matches!(err, DemoError::BoundaryNotNegligible { .. }));
    }

    #[test]
    fn l2_norm_of_a_gaussian_profile() {
        // |e^{z}| e^{−σ} with U = R₋, α = 1, A = 2, B = 2 is e^{−|x|/2 − 2|y|}
        let f = EntireSample::Exponential { coeffs: vec![1.0] };
        let p = params(1.0, 2.0, 2.0, Cone::ray(vec![q(-1)]).unwrap());
        let e = l2_norm_estimate(&f, &p, BoxGrid { radius: 40.0, n: 4001 }, 1e-6).unwrap();
        // ∫ e^{−|x|} dx · ∫ e^{−4|y|} dy = 2 · 1/2
        assert!((e.value - 1.0).abs() < 1e-3, "{}", e.value);
    }

    #[test]
    fn sequence_bound_holds() {
        let g = EntireSample::Exponential { coeffs: vec![-1.0] };
        let f = EntireSample::Exponential { coeffs: vec![-1.0] };
        let w = Cone::ray(vec![q(1)]).unwrap();
        let p = SequenceParams {
            alpha: 2.0,
            a_big: 2.0,
            b_big: 2.0,
            a_small: 2.0,
            b_small: 2.0,
            a_prime: 3.0,
            max_n: 4,
            grid: BoxGrid { radius: 40.0, n: 321 },
            slack: 1e-9,
        };
        let r = lemma2_sequence(&g, &f, &w, &w, &p).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.eta > 0.0);
    }
}
