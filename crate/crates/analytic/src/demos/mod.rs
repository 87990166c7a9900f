//! Grid demonstrations: weighted norms, the approximating sequence,
//! the smooth splitting, and the one-variable `∂̄` problem.

pub mod dbar;
pub mod norms;
pub mod splitting;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DemoError {
    #[error("boundary contribution {ratio:.3e} exceeds tolerance {tol:.3e}")]
    BoundaryNotNegligible { ratio: f64, tol: f64 },
    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudgetExceeded(String),
    #[error("residual {residual:.3e} exceeds {limit:.3e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
