//! Numerical sub-mean-value test along complex lines.

use crate::weights::Weight;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

pub const MIN_NODES: usize = 256;
pub const MAX_NODES: usize = 16_384;

/// The circle `z₀ + r e^{iφ} u`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Serialize)]
pub struct PshCase {
    pub center_re: Vec<f64>,
    pub center_im: Vec<f64>,
    pub direction_re: Vec<f64>,
    pub direction_im: Vec<f64>,
    pub radius: f64,
}

impl PshCase {
    pub fn new(center: &[Complex64], direction: &[Complex64], radius: f64) -> Self {
        PshCase {
            center_re: center.iter().map(|w| w.re).collect(),
            center_im: center.iter().map(|w| w.im).collect(),
            direction_re: direction.iter().map(|w| w.re).collect(),
            direction_im: direction.iter().map(|w| w.im).collect(),
            radius,
        }
    }

    fn center(&self) -> Vec<Complex64> {
        self.center_re.iter().zip(&self.center_im).map(|(a, b)| Complex64::new(*a, *b)).collect()
    }

    fn direction(&self) -> Vec<Complex64> {
        self.direction_re.iter().zip(&self.direction_im).map(|(a, b)| Complex64::new(*a, *b)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PshReport {
    pub cases: usize,
    pub tolerance: f64,
    pub min_nodes: usize,
    /// Largest node count any case needed.
    pub nodes_used: usize,
    pub failures: usize,
    /// Largest `w(z₀) − mean` at the finest node count tried.
    pub max_excess: f64,
    pub witness: Option<PshCase>,
    pub passed: bool,
}

/// Trapezoid mean of `w` over the circle with `n` nodes.
pub fn circle_mean(w: &dyn Weight, center: &[Complex64], direction: &[Complex64], radius: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    let mut z = center.to_vec();
    for j in 0..n {
        let e = Complex64::from_polar(radius, TAU * j as f64 / n as f64);
        for ((zi, ci), ui) in z.iter_mut().zip(center).zip(direction) {
            *zi = ci + e * ui;
        }
        sum += w.value(&z);
    }
    sum / n as f64
}

/// Excess `w(z₀) − mean` after doubling the node count from `MIN_NODES`
/// until it is within `tol` or `MAX_NODES` is reached.
fn test_case(w: &dyn Weight, case: &PshCase, tol: f64) -> (f64, usize) {
    let (c, u) = (case.center(), case.direction());
    let v0 = w.value(&c);
    if v0 == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0);
    }
    let mut n = MIN_NODES;
    loop {
        let excess = v0 - circle_mean(w, &c, &u, case.radius, n);
        if excess <= tol || n >= MAX_NODES {
            return (if excess.is_nan() { f64::INFINITY } else { excess }, n);
        }
        n *= 2;
    }
}

pub fn check_plurisubharmonic(w: &dyn Weight, cases: &[PshCase], tol: f64) -> PshReport {
    let results: Vec<(f64, usize)> = cases.par_iter().map(|c| test_case(w, c, tol)).collect();
    let mut worst: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        if worst.is_none_or(|j| r.0 > results[j].0) {
            worst = Some(i);
        }
    }
    let failures = results.iter().filter(|r| r.0 > tol).count();
    PshReport {
        cases: cases.len(),
        tolerance: tol,
        min_nodes: MIN_NODES,
        nodes_used: results.iter().map(|r| r.1).max().unwrap_or(0),
        failures,
        max_excess: worst.map_or(f64::NEG_INFINITY, |i| results[i].0),
        witness: worst.map(|i| cases[i].clone()),
        passed: failures == 0,
    }
}

/// `centers` random centers in `[−box, box]^{2k}`, each paired with
/// `directions` random unit directions and every radius in `radii`.
pub fn random_cases(seed: u64, dim: usize, centers: usize, directions: usize, radii: &[f64], center_box: f64) -> Vec<PshCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..centers {
        let c: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-center_box..=center_box), rng.gen_range(-center_box..=center_box)))
            .collect();
        for _ in 0..directions {
            let u: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect();
            let n = u.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let u: Vec<Complex64> = u.iter().map(|w| w / n).collect();
            for &r in radii {
                out.push(PshCase::new(&c, &u, r));
            }
        }
    }
    out
}

/// Radii `10^{lo}, …, 10^{hi}` at `per_decade` points per decade.
pub fn log_radii(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
    let steps = (hi - lo) as usize * per_decade;
    (0..=steps).map(|i| 10f64.powf(lo as f64 + i as f64 / per_decade as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::theta;
    use crate::weights::FnWeight;

    #[test]
    fn harmonic_functions_are_means() {
        let w = FnWeight { dim: 2, f: |z: &[Complex64]| 3.0 * z[0].re - 2.0 * z[1].im + 1.0 };
        let cases = random_cases(1, 2, 4, 2, &[0.1, 1.0, 10.0], 3.0);
        let r = check_plurisubharmonic(&w, &cases, 1e-10);
        assert!(r.passed && r.max_excess.abs() < 1e-10, "{r:?}");
        assert_eq!(r.nodes_used, MIN_NODES);
    }

    #[test]
    fn theta_is_subharmonic() {
        let w = FnWeight { dim: 1, f: |z: &[Complex64]| theta(z[0]) };
        let mut cases = random_cases(2, 1, 16, 1, &log_radii(-2, 0, 2), 4.0);
        // a center on a zero of sin passes vacuously
        cases.push(PshCase::new(&[Complex64::new(std::f64::consts::PI, 0.0)], &[Complex64::new(1.0, 0.0)], 0.1));
        let r = check_plurisubharmonic(&w, &cases, 1e-8);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn cusp_fails() {
        let w = FnWeight { dim: 1, f: |z: &[Complex64]| -z[0].re.abs().sqrt() };
        let cases = vec![PshCase::new(&[Complex64::new(0.0, 0.3)], &[Complex64::new(1.0, 0.0)], 0.01)];
        let r = check_plurisubharmonic(&w, &cases, 1e-8);
        assert!(!r.passed && r.failures == 1 && r.max_excess > 1e-3);
        assert_eq!(r.nodes_used, MAX_NODES);
    }
}
