//! Inequality tallies and deterministic sharded sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const SHARD: usize = 1024;

/// Outcome of checking `lhs ≤ rhs + slack` over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub samples: usize,
    pub slack: f64,
    /// Largest `lhs − rhs` seen; `−∞` when every left side was `−∞`.
    pub max_excess: f64,
    pub witness: Option<Vec<f64>>,
    pub passed: bool,
}

/// Accumulates `lhs − rhs` values and keeps the worst point.
#[derive(Debug, Clone)]
pub struct Tally {
    name: String,
    slack: f64,
    samples: usize,
    worst: f64,
    witness: Option<Vec<f64>>,
    failed: bool,
}

impl Tally {
    pub fn new(name: &str, slack: f64) -> Self {
        Tally {
            name: name.to_string(),
            slack,
            samples: 0,
            worst: f64::NEG_INFINITY,
            witness: None,
            failed: false,
        }
    }

    /// Records `lhs − rhs`; NaN counts as a violation.
    pub fn record(&mut self, lhs: f64, rhs: f64, point: impl FnOnce() -> Vec<f64>) {
        self.samples += 1;
        let excess = if lhs == f64::NEG_INFINITY && rhs.is_finite() {
            f64::NEG_INFINITY
        } else {
            lhs - rhs
        };
        if excess.is_nan() {
            if !self.failed || self.worst.is_finite() {
                self.worst = f64::NAN;
                self.witness = Some(point());
            }
            self.failed = true;
            return;
        }
        if excess > self.slack {
            self.failed = true;
        }
        if !self.worst.is_nan() && (excess > self.worst || self.witness.is_none()) {
            self.worst = excess;
            self.witness = Some(point());
        }
    }

    pub fn finish(self) -> InequalityCheck {
        InequalityCheck {
            name: self.name,
            samples: self.samples,
            slack: self.slack,
            max_excess: self.worst,
            witness: self.witness,
            passed: !self.failed,
        }
    }
}

/// Runs `f` once per sample index with a per-shard generator derived from
/// `seed`, in parallel, and returns the results in index order.
pub fn sharded<T, F>(seed: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let shards = count.div_ceil(SHARD);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64 + 1);
            let n = SHARD.min(count - s * SHARD);
            (0..n).map(|_| f(&mut rng)).collect::<Vec<T>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
