//! Independent verifier for decomposition certificates.
//!
//! Reads its own copy of the JSON layout and uses nothing from the engine
//! beyond the rational linear algebra: links, σ, the counts `k(γ)` and the
//! order conditions are all recomputed here from the raw tables.

use crate::linalg::{parse_rational, Matrix, Rational, Vector};
use num_traits::Zero;
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("malformed bundle: {0}")]
    Malformed(String),
    #[error("identity failed: {0}")]
    Failed(String),
}

#[derive(Deserialize)]
struct RawPoset {
    leq: Vec<Vec<bool>>,
}

#[derive(Deserialize)]
struct RawSystem {
    index: RawPoset,
    dims: Vec<usize>,
    links: BTreeMap<String, Matrix>,
}

#[derive(Deserialize)]
struct RawMorphism {
    maps: Vec<Matrix>,
}

#[derive(Deserialize)]
struct RawComponent {
    index: usize,
    value: Vec<String>,
}

#[derive(Deserialize)]
struct RawTerm {
    from: usize,
    to: usize,
    vector: Vec<String>,
}

#[derive(Deserialize)]
struct RawStage {
    order: usize,
    tilde_y: Vec<RawTerm>,
    tilde_x: Vec<RawTerm>,
    pending: Vec<RawTerm>,
}

#[derive(Deserialize)]
struct RawCertificate {
    hereditary: Vec<usize>,
    meet_closed: Vec<usize>,
    input: Vec<RawComponent>,
    stages: Vec<RawStage>,
    final_order: usize,
}

#[derive(Deserialize)]
struct RawBundle {
    source: RawSystem,
    target: RawSystem,
    morphism: RawMorphism,
    certificate: RawCertificate,
}

struct Sys {
    leq: Vec<Vec<bool>>,
    dims: Vec<usize>,
    links: BTreeMap<(usize, usize), Matrix>,
}

fn malformed(s: impl Into<String>) -> ReplayError {
    ReplayError::Malformed(s.into())
}

fn failed(s: impl Into<String>) -> ReplayError {
    ReplayError::Failed(s.into())
}

fn parse_vec(v: &[String]) -> Result<Vector, ReplayError> {
    v.iter().map(|s| parse_rational(s).map_err(|e| malformed(e.to_string()))).collect()
}

impl Sys {
    fn from_raw(r: RawSystem) -> Result<Self, ReplayError> {
        let n = r.dims.len();
        if r.index.leq.len() != n || r.index.leq.iter().any(|row| row.len() != n) {
            return Err(malformed("leq table does not match dims"));
        }
        let mut links = BTreeMap::new();
        for (k, m) in r.links {
            let (a, b) = k.split_once("<=").ok_or_else(|| malformed(format!("link key {k}")))?;
            let a: usize = a.parse().map_err(|_| malformed(format!("link key {k}")))?;
            let b: usize = b.parse().map_err(|_| malformed(format!("link key {k}")))?;
            if a >= n || b >= n || m.rows() != r.dims[b] || m.cols() != r.dims[a] {
                return Err(malformed(format!("link {k} has the wrong shape")));
            }
            links.insert((a, b), m);
        }
        for g in 0..n {
            links.insert((g, g), Matrix::identity(r.dims[g]));
        }
        Ok(Sys {
            leq: r.index.leq,
            dims: r.dims,
            links,
        })
    }

    fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    /// σ(v, a, b) added into a dense per-index accumulator.
    fn add_sigma(&self, acc: &mut [Vector], t: &RawTerm, what: &str) -> Result<(), ReplayError> {
        let n = self.dims.len();
        if t.from >= n || t.to >= n || !self.leq[t.from][t.to] {
            return Err(failed(format!("{what} term ({}, {}) is not a comparable pair", t.from, t.to)));
        }
        let v = parse_vec(&t.vector)?;
        if v.len() != self.dims[t.from] {
            return Err(malformed(format!("{what} term ({}, {}) has the wrong length", t.from, t.to)));
        }
        let image = self.links[&(t.from, t.to)].apply(&v).map_err(|e| malformed(e.to_string()))?;
        for (a, x) in acc[t.from].iter_mut().zip(&v) {
            *a += x;
        }
        for (a, x) in acc[t.to].iter_mut().zip(&image) {
            *a -= x;
        }
        Ok(())
    }

    fn zero(&self) -> Vec<Vector> {
        self.dims.iter().map(|&d| vec![Rational::zero(); d]).collect()
    }
}

/// What a successful replay established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplaySummary {
    pub stages: usize,
    pub final_order: usize,
}

/// Verifies a JSON bundle `{source, target, morphism, certificate}`.
pub fn replay_bundle(json: &str) -> Result<ReplaySummary, ReplayError> {
    let raw: RawBundle = serde_json::from_str(json).map_err(|e| malformed(e.to_string()))?;
    let x = Sys::from_raw(raw.source)?;
    let y = Sys::from_raw(raw.target)?;
    let n = y.dims.len();
    if x.dims.len() != n || x.leq != y.leq {
        return Err(malformed("source and target use different index sets"));
    }
    if raw.morphism.maps.len() != n {
        return Err(malformed("morphism has the wrong number of maps"));
    }
    for (g, m) in raw.morphism.maps.iter().enumerate() {
        if m.rows() != y.dims[g] || m.cols() != x.dims[g] {
            return Err(malformed(format!("morphism block {g} has the wrong shape")));
        }
    }
    let c = raw.certificate;
    let in_i: Vec<bool> = (0..n).map(|g| c.hereditary.contains(&g)).collect();
    let in_j: Vec<bool> = (0..n).map(|g| c.meet_closed.contains(&g)).collect();
    if c.hereditary.iter().chain(&c.meet_closed).any(|&g| g >= n) {
        return Err(malformed("index out of range in I or J"));
    }
    // I must be a down-set for ỹ terms inside I to lie in N_I.
    for g in 0..n {
        for h in 0..n {
            if in_i[g] && y.leq[h][g] && !in_i[h] {
                return Err(failed(format!("I is not hereditary: {h} <= {g}")));
            }
        }
    }
    let k = |g: usize| (0..n).filter(|&h| in_j[h] && y.leq[g][h]).count();

    let mut input = y.zero();
    for comp in &c.input {
        if comp.index >= n {
            return Err(malformed("input component out of range"));
        }
        let v = parse_vec(&comp.value)?;
        if v.len() != y.dims[comp.index] {
            return Err(malformed("input component has the wrong length"));
        }
        for (a, b) in input[comp.index].iter_mut().zip(v) {
            *a += b;
        }
    }

    if c.stages.is_empty() {
        return Err(failed("certificate has no stages"));
    }
    let j_size = in_j.iter().filter(|&&b| b).count();
    for (pos, st) in c.stages.iter().enumerate() {
        if st.order != pos + 1 {
            return Err(failed(format!("stage {pos} claims order {}", st.order)));
        }
        let mut acc = y.zero();
        for t in &st.tilde_y {
            if !(in_i[t.from] && in_i[t.to]) {
                return Err(failed(format!("order {}: ỹ term ({}, {}) leaves I", st.order, t.from, t.to)));
            }
            y.add_sigma(&mut acc, t, "ỹ")?;
        }
        let mut xs = x.zero();
        for t in &st.tilde_x {
            if !(in_j[t.from] && in_j[t.to]) {
                return Err(failed(format!("order {}: x̃ term ({}, {}) leaves J", st.order, t.from, t.to)));
            }
            x.add_sigma(&mut xs, t, "x̃")?;
        }
        for (g, v) in xs.iter().enumerate() {
            let image = raw.morphism.maps[g].apply(v).map_err(|e| malformed(e.to_string()))?;
            for (a, b) in acc[g].iter_mut().zip(image) {
                *a += b;
            }
        }
        for t in &st.pending {
            if !(in_j[t.from] && k(t.from) >= st.order) {
                return Err(failed(format!("order {}: first index {} is not in C_{}", st.order, t.from, st.order)));
            }
            if !in_j[t.to] || in_i[t.to] || !y.lt(t.from, t.to) {
                return Err(failed(format!("order {}: pair ({}, {}) is not admissible", st.order, t.from, t.to)));
            }
            y.add_sigma(&mut acc, t, "pending")?;
        }
        if acc != input {
            let bad = (0..n).find(|&g| acc[g] != input[g]).unwrap_or(0);
            return Err(failed(format!("order {}: decomposition differs from the input at index {bad}", st.order)));
        }
    }
    let last = c.stages.last().expect("nonempty");
    if c.final_order != last.order {
        return Err(failed("final order does not match the last stage"));
    }
    if j_size > 0 && last.order <= j_size {
        return Err(failed(format!("final order {} does not exceed |J| = {j_size}", last.order)));
    }
    if !last.pending.is_empty() {
        return Err(failed("terms remain at the final order"));
    }
    Ok(ReplaySummary {
        stages: c.stages.len(),
        final_order: c.final_order,
    })
}
