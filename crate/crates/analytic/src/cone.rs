//! Closed cones in ℝᵏ under the uniform norm, represented as finite unions
//! of polyhedral pieces given by generators.
//!
//! The sup-norm distance to a piece `C = cone(g_1, …, g_m)` is the value of
//! the linear program `min |x − Σλ_j g_j|_∞`. Its dual is
//! `max { u·x : |u|_1 ≤ 1, u·g_j ≤ 0 }`, a polytope independent of `x`, so
//! each piece caches the exact vertices of that polytope and evaluates the
//! distance as a maximum of linear forms. The primal program is kept as an
//! exact second route ([`Cone::distance_exact`]).

use crate::lp::{LinearProgram, LpOutcome, Relation};
use carrier_core::linalg::{abs_max, q, serde_q, solve, Matrix, Rational, Vector};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub const MAX_DIM: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("cone has no pieces")]
    EmptyCone,
    #[error("expected a vector in R^{expected}, got length {got}")]
    Dimension { expected: usize, got: usize },
    #[error("ambient dimension {0} is outside 1..={MAX_DIM}")]
    TooLarge(usize),
    #[error("cones share the nonzero vector {0:?}")]
    ConesIntersect(Vec<String>),
    #[error("grid at resolution {resolution} gives min {grid_min:.3e} against slack {slack:.3e}")]
    GridTooCoarse { resolution: usize, grid_min: f64, slack: f64 },
    #[error("cone is not proper")]
    NotProper,
    #[error("piece {0} contains a line")]
    NotPointed(usize),
}

/// One polyhedral piece, the nonnegative hull of its generators.
#[derive(Debug, Clone)]
pub struct Piece {
    generators: Vec<Vector>,
    dual: Vec<Vector>,
    dual_f64: Vec<Vec<f64>>,
}

impl Piece {
    fn new(dim: usize, generators: Vec<Vector>) -> Self {
        let generators: Vec<Vector> = generators.into_iter().filter(|g| g.iter().any(|v| !v.is_zero())).collect();
        let dual = dual_vertices(dim, &generators);
        let dual_f64 = dual.iter().map(|v| to_f64_vec(v)).collect();
        Piece {
            generators,
            dual,
            dual_f64,
        }
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    /// Exact vertices of `{u : |u|_1 ≤ 1, u·g ≤ 0}`.
    pub fn dual_vertices(&self) -> &[Vector] {
        &self.dual
    }

    fn distance(&self, x: &[f64]) -> f64 {
        self.dual_f64
            .iter()
            .map(|v| v.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct RawPiece {
    #[serde(with = "serde_q::vec_vec")]
    generators: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
struct RawCone {
    dim: usize,
    pieces: Vec<RawPiece>,
}

/// A finite union of polyhedral cones.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawCone", into = "RawCone")]
pub struct Cone {
    dim: usize,
    pieces: Vec<Piece>,
}

impl TryFrom<RawCone> for Cone {
    type Error = ConeError;
    fn try_from(r: RawCone) -> Result<Self, ConeError> {
        Cone::new(r.dim, r.pieces.into_iter().map(|p| p.generators).collect())
    }
}

impl From<Cone> for RawCone {
    fn from(c: Cone) -> Self {
        RawCone {
            dim: c.dim,
            pieces: c
                .pieces
                .into_iter()
                .map(|p| RawPiece { generators: p.generators })
                .collect(),
        }
    }
}

/// Result of the properness test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Properness {
    /// `l(g) ≥ 1` on every generator.
    Proper {
        #[serde(with = "serde_q::vec")]
        functional: Vector,
    },
    /// A convex combination of generators, `(piece, generator, weight)`, that sums to zero.
    NotProper { combination: Vec<(usize, usize, String)> },
}

impl Properness {
    pub fn is_proper(&self) -> bool {
        matches!(self, Properness::Proper { .. })
    }
}

/// Certified lower bound for `δ_{K₁}(x) ≥ θ|x|` on `K₂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaBound {
    pub theta: f64,
    pub grid_min: f64,
    pub slack: f64,
    pub resolution: usize,
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("finite rational")
}

pub fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

pub fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn normalized(g: &[Rational]) -> Vector {
    let n = abs_max(g);
    g.iter().map(|v| v / &n).collect()
}

/// All sign vectors in {±1}^k.
fn sign_vectors(k: usize) -> Vec<Vector> {
    (0..1u32 << k)
        .map(|mask| (0..k).map(|i| if mask >> i & 1 == 1 { q(-1) } else { q(1) }).collect())
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn dual_vertices(dim: usize, generators: &[Vector]) -> Vec<Vector> {
    let mut rows: Vec<(Vector, Rational)> = sign_vectors(dim).into_iter().map(|s| (s, q(1))).collect();
    rows.extend(generators.iter().map(|g| (g.clone(), q(0))));
    let mut found = BTreeSet::new();
    for idx in subsets(rows.len(), dim) {
        let a = Matrix::from_rows(idx.iter().map(|&i| rows[i].0.clone()).collect(), dim).expect("square");
        if a.rank() < dim {
            continue;
        }
        let b: Vector = idx.iter().map(|&i| rows[i].1.clone()).collect();
        let u = solve(&a, &b).expect("shape").expect("full rank").particular;
        if rows.iter().all(|(r, c)| dot(r, &u) <= *c) {
            found.insert(u);
        }
    }
    found.into_iter().collect()
}

impl Cone {
    pub fn new(dim: usize, pieces: Vec<Vec<Vector>>) -> Result<Self, ConeError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(ConeError::TooLarge(dim));
        }
        if pieces.is_empty() {
            return Err(ConeError::EmptyCone);
        }
        for g in pieces.iter().flatten() {
            if g.len() != dim {
                return Err(ConeError::Dimension {
                    expected: dim,
                    got: g.len(),
                });
            }
        }
        Ok(Cone {
            dim,
            pieces: pieces.into_iter().map(|p| Piece::new(dim, p)).collect(),
        })
    }

    pub fn from_i64(dim: usize, pieces: &[&[&[i64]]]) -> Result<Self, ConeError> {
        Cone::new(
            dim,
            pieces
                .iter()
                .map(|p| p.iter().map(|g| g.iter().map(|&v| q(v)).collect()).collect())
                .collect(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        Cone::new(dim, vec![vec![]]).expect("valid")
    }

    pub fn whole(dim: usize) -> Self {
        let gens = sign_vectors(1)
            .into_iter()
            .flat_map(|s| (0..dim).map(move |i| (0..dim).map(|j| if i == j { s[0].clone() } else { q(0) }).collect()))
            .collect();
        Cone::new(dim, vec![gens]).expect("valid")
    }

    pub fn orthant(dim: usize) -> Self {
        let gens = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { q(1) } else { q(0) }).collect())
            .collect();
        Cone::new(dim, vec![gens]).expect("valid")
    }

    pub fn ray(direction: Vector) -> Result<Self, ConeError> {
        Cone::new(direction.len(), vec![vec![direction]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn union(&self, other: &Cone) -> Result<Cone, ConeError> {
        other.check_len(self.dim)?;
        let pieces = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .map(|p| p.generators.clone())
            .collect();
        Cone::new(self.dim, pieces)
    }

    /// True when every piece is `{0}`.
    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.generators.is_empty())
    }

    fn check_len(&self, n: usize) -> Result<(), ConeError> {
        if n != self.dim {
            return Err(ConeError::Dimension {
                expected: self.dim,
                got: n,
            });
        }
        Ok(())
    }

    /// `δ(x) = inf_{x'∈cone} |x − x'|_∞`.
    pub fn distance(&self, x: &[f64]) -> Result<f64, ConeError> {
        self.check_len(x.len())?;
        Ok(self.pieces.iter().map(|p| p.distance(x)).fold(f64::INFINITY, f64::min))
    }

    /// The same distance from the primal program, in exact arithmetic.
    pub fn distance_exact(&self, x: &[Rational]) -> Result<Rational, ConeError> {
        self.check_len(x.len())?;
        let mut best: Option<Rational> = None;
        for p in &self.pieces {
            let d = primal_distance(&p.generators, x);
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
        Ok(best.expect("nonempty"))
    }

    pub fn contains_exact(&self, x: &[Rational]) -> Result<bool, ConeError> {
        Ok(self.distance_exact(x)?.is_zero())
    }

    /// Whether `δ(x) ≤ d`.
    pub fn in_d_neighborhood(&self, x: &[f64], d: f64) -> Result<bool, ConeError> {
        Ok(self.distance(x)? <= d)
    }

    fn nonzero_generators(&self) -> Vec<(usize, usize, Vector)> {
        self.pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.generators.iter().enumerate().map(move |(j, g)| (i, j, normalized(g))))
            .collect()
    }

    pub fn is_proper(&self) -> Properness {
        let gens = self.nonzero_generators();
        if let Some(l) = positive_functional(self.dim, gens.iter().map(|g| &g.2), false) {
            return Properness::Proper { functional: l };
        }
        // Gordan: some convex combination of the generators vanishes.
        let m = gens.len();
        let mut lp = LinearProgram::<Rational>::new(m);
        for i in 0..self.dim {
            lp.constrain(gens.iter().map(|g| g.2[i].clone()).collect(), Relation::Eq, q(0));
        }
        lp.constrain(vec![q(1); m], Relation::Eq, q(1));
        let LpOutcome::Optimal { x, .. } = lp.solve() else {
            unreachable!("Gordan alternative")
        };
        Properness::NotProper {
            combination: gens
                .iter()
                .zip(x)
                .filter(|(_, w)| !w.is_zero())
                .map(|(g, w)| (g.0, g.1, carrier_core::linalg::format_rational(&w)))
                .collect(),
        }
    }

    /// `Ok` when the cones meet only at 0, else a common nonzero vector.
    pub fn trivial_intersection(&self, other: &Cone) -> Result<(), ConeError> {
        self.check_len(other.dim)?;
        for p in &self.pieces {
            for r in &other.pieces {
                if let Some(w) = common_vector(self.dim, &p.generators, &r.generators) {
                    return Err(ConeError::ConesIntersect(w.iter().map(carrier_core::linalg::format_rational).collect()));
                }
            }
        }
        Ok(())
    }

    /// Polyhedral enlargement: every generator `g` is replaced by the
    /// vertices of the cube `g + ε|g|[−1,1]^k`, then redundant generators
    /// are pruned. The interior contains the original cone minus 0.
    pub fn conic_neighborhood(&self, eps: &Rational) -> Cone {
        let signs = sign_vectors(self.dim);
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let gens: Vec<Vector> = p
                    .generators
                    .iter()
                    .flat_map(|g| {
                        let r = eps * abs_max(g);
                        signs
                            .iter()
                            .map(|s| g.iter().zip(s).map(|(a, b)| a + &r * b).collect::<Vector>())
                            .collect::<Vec<_>>()
                    })
                    .collect();
                prune(gens)
            })
            .collect();
        Cone::new(self.dim, pieces).expect("valid")
    }

    /// `inf { l(x) : x ∈ cone, |x| = 1 }`, or `None` for the zero cone.
    pub fn inf_on_sphere(&self, l: &[Rational]) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for p in &self.pieces {
            let m = p.generators.len();
            if m == 0 {
                continue;
            }
            for i in 0..self.dim {
                for s in [q(1), q(-1)] {
                    let mut lp = LinearProgram::<Rational>::new(m);
                    lp.objective = p.generators.iter().map(|g| dot(l, g)).collect();
                    for j in 0..self.dim {
                        let row: Vector = p.generators.iter().map(|g| g[j].clone()).collect();
                        if j == i {
                            lp.constrain(row, Relation::Eq, s.clone());
                        } else {
                            lp.constrain(row.clone(), Relation::Le, q(1));
                            lp.constrain(row, Relation::Ge, q(-1));
                        }
                    }
                    if let LpOutcome::Optimal { value, .. } = lp.solve() {
                        if best.as_ref().is_none_or(|b| value < *b) {
                            best = Some(value);
                        }
                    }
                }
            }
        }
        best
    }

    /// `min { δ_F(x) : x ∈ cone, a ≤ l(x) ≤ b }`, exact; `None` if the slab is empty.
    pub fn slab_distance(&self, l: &[Rational], a: &Rational, b: &Rational, f: &Cone) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for p in &self.pieces {
            let m = p.generators.len();
            if m == 0 {
                continue;
            }
            for fp in &f.pieces {
                // variables: λ_1..λ_m ≥ 0, t free
                let mut lp = LinearProgram::<Rational>::new(m + 1);
                lp.objective[m] = q(1);
                lp.free[m] = true;
                let lg: Vector = p.generators.iter().map(|g| dot(l, g)).collect();
                let mut row = lg.clone();
                row.push(q(0));
                lp.constrain(row.clone(), Relation::Ge, a.clone());
                lp.constrain(row, Relation::Le, b.clone());
                for v in &fp.dual {
                    let mut row: Vector = p.generators.iter().map(|g| -dot(v, g)).collect();
                    row.push(q(1));
                    lp.constrain(row, Relation::Ge, q(0));
                }
                if let LpOutcome::Optimal { value, .. } = lp.solve() {
                    if best.as_ref().is_none_or(|b| value < *b) {
                        best = Some(value);
                    }
                }
            }
        }
        best
    }

    /// Random point of the cone with generator weights in [0, 1).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let live: Vec<&Piece> = self.pieces.iter().filter(|p| !p.generators.is_empty()).collect();
        let mut x = vec![0.0; self.dim];
        if live.is_empty() {
            return x;
        }
        let p = live[rng.gen_range(0..live.len())];
        for g in &p.generators {
            let w: f64 = rng.gen();
            for (xi, gi) in x.iter_mut().zip(g) {
                *xi += w * to_f64(gi);
            }
        }
        x
    }
}

fn primal_distance(generators: &[Vector], x: &[Rational]) -> Rational {
    if generators.is_empty() {
        return abs_max(x);
    }
    let m = generators.len();
    let mut lp = LinearProgram::<Rational>::new(m + 1);
    lp.objective[m] = q(1);
    for (i, xi) in x.iter().enumerate() {
        let mut row: Vector = generators.iter().map(|g| g[i].clone()).collect();
        row.push(q(1));
        lp.constrain(row.clone(), Relation::Ge, xi.clone());
        let mut neg: Vector = row[..m].iter().map(|v| -v).collect();
        neg.push(q(1));
        lp.constrain(neg, Relation::Ge, -xi.clone());
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => value,
        other => unreachable!("distance program is bounded and feasible: {other:?}"),
    }
}

fn common_vector(dim: usize, p: &[Vector], r: &[Vector]) -> Option<Vector> {
    let (m, n) = (p.len(), r.len());
    if m == 0 || n == 0 {
        return None;
    }
    for i in 0..dim {
        for s in [q(1), q(-1)] {
            let mut lp = LinearProgram::<Rational>::new(m + n);
            for j in 0..dim {
                let row: Vector = p.iter().map(|g| g[j].clone()).chain(r.iter().map(|h| -h[j].clone())).collect();
                lp.constrain(row, Relation::Eq, q(0));
            }
            let row: Vector = p.iter().map(|g| g[i].clone()).chain(std::iter::repeat_n(q(0), n)).collect();
            lp.constrain(row, Relation::Eq, s.clone());
            if let LpOutcome::Optimal { x, .. } = lp.solve() {
                let mut w = vec![q(0); dim];
                for (c, g) in x.iter().zip(p) {
                    for (wi, gi) in w.iter_mut().zip(g) {
                        *wi += c * gi;
                    }
                }
                return Some(w);
            }
        }
    }
    None
}

/// Smallest-ℓ¹ functional with `l(g) ≥ 1` on the given generators.
fn positive_functional<'a>(dim: usize, gens: impl Iterator<Item = &'a Vector>, minimize: bool) -> Option<Vector> {
    // variables: l_1..l_k free, u_1..u_k ≥ 0 with |l_i| ≤ u_i
    let mut lp = LinearProgram::<Rational>::new(2 * dim);
    for i in 0..dim {
        lp.free[i] = true;
        if minimize {
            lp.objective[dim + i] = q(1);
        }
        let mut up = vec![q(0); 2 * dim];
        up[i] = q(-1);
        up[dim + i] = q(1);
        lp.constrain(up.clone(), Relation::Ge, q(0));
        up[i] = q(1);
        lp.constrain(up, Relation::Ge, q(0));
    }
    for g in gens {
        let mut row = g.clone();
        row.extend(std::iter::repeat_n(q(0), dim));
        lp.constrain(row, Relation::Ge, q(1));
    }
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some(x[..dim].to_vec()),
        _ => None,
    }
}

/// Drops generators that are nonnegative combinations of the others.
fn prune(mut gens: Vec<Vector>) -> Vec<Vector> {
    let mut i = 0;
    while i < gens.len() {
        let others: Vec<Vector> = gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
        if !others.is_empty() && primal_distance(&others, &gens[i]).is_zero() {
            gens.remove(i);
        } else {
            i += 1;
        }
    }
    gens
}

/// `l` with `l ≥ κ` on the unit sphere of `v1` and `l > 0` on `containing ∖ {0}`.
///
/// Solves for the ℓ¹-smallest `l` with `l(g) ≥ 1` on the sup-normalized
/// generators of both cones. For `x = Σλ_j g_j`, `|x| ≤ Σλ_j`, so
/// `l(x)/|x| ≥ min_j l(g_j)`, and rescaling by `κ / min_j l(g_j)` gives the margin.
pub fn separating_functional_with_margin(
    v1: &Cone,
    kappa: &Rational,
    containing: Option<&Cone>,
) -> Result<Vector, ConeError> {
    let mut gens: Vec<Vector> = v1.nonzero_generators().into_iter().map(|g| g.2).collect();
    if let Some(u) = containing {
        v1.check_len(u.dim)?;
        gens.extend(u.nonzero_generators().into_iter().map(|g| g.2));
    }
    let l = positive_functional(v1.dim, gens.iter(), true).ok_or(ConeError::NotProper)?;
    let margin = v1
        .nonzero_generators()
        .iter()
        .map(|g| dot(&l, &g.2))
        .min()
        .unwrap_or_else(Rational::one);
    if kappa.is_positive() {
        let s = kappa / margin;
        Ok(l.iter().map(|v| v * &s).collect())
    } else {
        Ok(l)
    }
}

/// Compositions of `n` into `m` nonnegative parts.
fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, m - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Grid budget for [`theta_lower_bound`].
#[derive(Debug, Clone, Copy)]
pub struct ThetaGrid {
    pub start: usize,
    pub max_resolution: usize,
    pub max_points: usize,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        ThetaGrid {
            start: 16,
            max_resolution: 4096,
            max_points: 2_000_000,
        }
    }
}

/// Positive `θ` with `δ_{K₁}(x) ≥ θ|x|` for `x ∈ K₂`.
///
/// For each piece of `K₂` with sup-normalized generators `G`, the grid is
/// `Gλ/|Gλ|` over the simplex points `λ ∈ (1/N)ℤ^m`. Rounding a simplex
/// point to the grid moves each coordinate by less than `1/N` with the moves
/// summing to zero, so the ℓ¹ move is at most `2⌊m/2⌋/N`. With `ν = min_λ |Gλ|`
/// (an exact LP) the normalized points move by at most twice that over `ν`,
/// and since δ is 1-Lipschitz this is the slack subtracted from the grid minimum.
pub fn theta_lower_bound(k1: &Cone, k2: &Cone, grid: ThetaGrid) -> Result<ThetaBound, ConeError> {
    k1.check_len(k2.dim)?;
    k1.trivial_intersection(k2)?;
    let mut out: Option<ThetaBound> = None;
    for (pi, p) in k2.pieces.iter().enumerate() {
        let m = p.generators.len();
        if m == 0 {
            continue;
        }
        let gens: Vec<Vector> = p.generators.iter().map(|g| normalized(g)).collect();
        let nu = to_f64(&min_norm_on_simplex(&gens));
        if nu <= 0.0 {
            return Err(ConeError::NotPointed(pi));
        }
        let gf: Vec<Vec<f64>> = gens.iter().map(|g| to_f64_vec(g)).collect();
        let mut n = grid.start.max(1);
        let bound = loop {
            let slack = 4.0 * (m / 2) as f64 / (n as f64 * nu) + 1e-12;
            let grid_min = compositions(n, m)
                .par_iter()
                .map(|c| {
                    let mut x = vec![0.0; k2.dim];
                    for (w, g) in c.iter().zip(&gf) {
                        for (xi, gi) in x.iter_mut().zip(g) {
                            *xi += *w as f64 / n as f64 * gi;
                        }
                    }
                    let s = sup_norm(&x);
                    x.iter_mut().for_each(|v| *v /= s);
                    k1.distance(&x).expect("dimension checked")
                })
                .reduce(|| f64::INFINITY, f64::min);
            if grid_min - slack > 0.0 {
                break ThetaBound {
                    theta: grid_min - slack,
                    grid_min,
                    slack,
                    resolution: n,
                };
            }
            let next = 2 * n;
            if next > grid.max_resolution || binomial(next + m - 1, m - 1) > grid.max_points as f64 {
                return Err(ConeError::GridTooCoarse {
                    resolution: n,
                    grid_min,
                    slack,
                });
            }
            n = next;
        };
        if out.as_ref().is_none_or(|o| bound.theta < o.theta) {
            out = Some(bound);
        }
    }
    Ok(out.unwrap_or(ThetaBound {
        theta: 1.0,
        grid_min: 1.0,
        slack: 0.0,
        resolution: 0,
    }))
}

/// `min { |Gλ|_∞ : λ ≥ 0, Σλ = 1 }`.
fn min_norm_on_simplex(gens: &[Vector]) -> Rational {
    let m = gens.len();
    let dim = gens[0].len();
    let mut lp = LinearProgram::<Rational>::new(m + 1);
    lp.objective[m] = q(1);
    let mut sum = vec![q(1); m];
    sum.push(q(0));
    lp.constrain(sum, Relation::Eq, q(1));
    for i in 0..dim {
        let mut row: Vector = gens.iter().map(|g| -g[i].clone()).collect();
        row.push(q(1));
        lp.constrain(row.clone(), Relation::Ge, q(0));
        for v in row.iter_mut().take(m) {
            *v = -v.clone();
        }
        lp.constrain(row, Relation::Ge, q(0));
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => value,
        other => unreachable!("bounded program: {other:?}"),
    }
}

/// `|l| = sup_{|x|=1} |l(x)|`, which under the uniform norm is the ℓ¹ norm.
pub fn functional_norm(l: &[Rational]) -> Rational {
    l.iter().fold(Rational::zero(), |acc, v| acc + v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use carrier_core::linalg::qr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quadrant() -> Cone {
        Cone::orthant(2)
    }

    /// Brute-force δ: minimize over a fine grid of cone points in a box.
    fn grid_distance(c: &Cone, x: &[f64], steps: usize, box_r: f64) -> f64 {
        let mut best = f64::INFINITY;
        for p in c.pieces() {
            let g: Vec<Vec<f64>> = p.generators().iter().map(|g| to_f64_vec(g)).collect();
            if g.is_empty() {
                best = best.min(sup_norm(x));
                continue;
            }
            for comp in compositions(steps, g.len() + 1) {
                let mut y = vec![0.0; x.len()];
                for (w, gi) in comp.iter().zip(&g) {
                    for (yi, v) in y.iter_mut().zip(gi) {
                        *yi += box_r * *w as f64 / steps as f64 * v;
                    }
                }
                let d = x.iter().zip(&y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                best = best.min(d);
            }
        }
        best
    }

    #[test]
    fn distance_examples() {
        let c = quadrant();
        assert_eq!(c.distance(&[2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(c.distance(&[-1.0, -1.0]).unwrap(), 1.0);
        assert_eq!(Cone::zero(3).distance(&[0.5, -2.0, 1.0]).unwrap(), 2.0);
        assert_eq!(c.distance_exact(&[q(-1), q(-1)]).unwrap(), q(1));
        assert!((grid_distance(&c, &[-1.0, -1.0], 200, 4.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_and_bad_shapes() {
        assert_eq!(Cone::new(2, vec![]).unwrap_err(), ConeError::EmptyCone);
        assert!(matches!(c_err(), ConeError::Dimension { .. }));
        fn c_err() -> ConeError {
            Cone::orthant(2).distance(&[1.0]).unwrap_err()
        }
    }

    #[test]
    fn vertex_route_matches_primal_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cones = [
            Cone::from_i64(2, &[&[&[1, 2], &[3, -1]]]).unwrap(),
            Cone::from_i64(3, &[&[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]], &[&[-1, -1, 2]]]).unwrap(),
            Cone::whole(2),
        ];
        for c in &cones {
            for _ in 0..40 {
                let x: Vector = (0..c.dim()).map(|_| qr(rng.gen_range(-40..=40), rng.gen_range(1..=7))).collect();
                let exact = to_f64(&c.distance_exact(&x).unwrap());
                let fast = c.distance(&to_f64_vec(&x)).unwrap();
                assert!((exact - fast).abs() < 1e-12, "{x:?}: {exact} vs {fast}");
            }
        }
    }

    #[test]
    fn grid_oracle_agrees_on_a_wedge() {
        let c = Cone::from_i64(2, &[&[&[2, 1], &[1, 3]]]).unwrap();
        for x in [[-1.0, 0.5], [3.0, -2.0], [0.0, 1.0]] {
            let d = c.distance(&x).unwrap();
            let g = grid_distance(&c, &x, 400, 3.0);
            assert!(g >= d - 1e-12 && g - d < 0.05, "{x:?}: {d} vs grid {g}");
        }
    }

    #[test]
    fn properness() {
        match quadrant().is_proper() {
            Properness::Proper { functional } => assert_eq!(functional.len(), 2),
            other => panic!("{other:?}"),
        }
        let half = Cone::from_i64(2, &[&[&[1, 0], &[-1, 0], &[0, 1]]]).unwrap();
        match half.is_proper() {
            Properness::NotProper { combination } => assert_eq!(combination.len(), 2),
            other => panic!("{other:?}"),
        }
        assert!(Cone::zero(2).is_proper().is_proper());
        let split = Cone::from_i64(2, &[&[&[1, 1]], &[&[-1, -1]]]).unwrap();
        assert!(!split.is_proper().is_proper());
    }

    #[test]
    fn intersections() {
        let x_axis = Cone::from_i64(2, &[&[&[1, 0]]]).unwrap();
        let y_axis = Cone::from_i64(2, &[&[&[0, 1]]]).unwrap();
        assert!(x_axis.trivial_intersection(&y_axis).is_ok());
        assert!(matches!(
            quadrant().trivial_intersection(&x_axis),
            Err(ConeError::ConesIntersect(_))
        ));
    }

    #[test]
    fn theta_examples() {
        let x_axis = Cone::from_i64(2, &[&[&[1, 0]]]).unwrap();
        let y_axis = Cone::from_i64(2, &[&[&[0, 1]]]).unwrap();
        let t = theta_lower_bound(&x_axis, &y_axis, ThetaGrid::default()).unwrap();
        assert!(t.theta <= 1.0 && t.theta > 0.9, "{t:?}");
        assert_eq!(theta_lower_bound(&x_axis, &Cone::zero(2), ThetaGrid::default()).unwrap().theta, 1.0);
        assert!(matches!(
            theta_lower_bound(&quadrant(), &x_axis, ThetaGrid::default()),
            Err(ConeError::ConesIntersect(_))
        ));
    }

    #[test]
    fn neighborhoods() {
        let ray = Cone::from_i64(2, &[&[&[1, 0]]]).unwrap();
        let w = ray.conic_neighborhood(&qr(1, 10));
        assert_eq!(w.distance(&[5.0, 0.0]).unwrap(), 0.0);
        assert_eq!(w.distance(&[5.0, 0.4]).unwrap(), 0.0);
        assert!(w.distance(&[5.0, 0.6]).unwrap() > 0.0);
        assert!(ray.in_d_neighborhood(&[5.0, 0.5], 1.0).unwrap());
        assert!(!ray.in_d_neighborhood(&[5.0, 1.5], 1.0).unwrap());
        assert!(ray.in_d_neighborhood(&[2.0, 0.0], 0.0).unwrap());
    }

    #[test]
    fn separating_functionals() {
        let ray = Cone::from_i64(2, &[&[&[1, 0]]]).unwrap();
        assert_eq!(separating_functional_with_margin(&ray, &q(2), None).unwrap(), vec![q(2), q(0)]);
        assert_eq!(separating_functional_with_margin(&quadrant(), &q(1), None).unwrap(), vec![q(1), q(1)]);
        let half = Cone::from_i64(2, &[&[&[1, 0], &[-1, 0], &[0, 1]]]).unwrap();
        assert_eq!(separating_functional_with_margin(&half, &q(1), None), Err(ConeError::NotProper));
    }

    #[test]
    fn inf_on_sphere_and_slab_distance() {
        let c = Cone::from_i64(2, &[&[&[1, 0], &[1, 1]]]).unwrap();
        assert_eq!(c.inf_on_sphere(&[q(1), q(1)]), Some(q(1)));
        assert_eq!(c.inf_on_sphere(&[q(1), q(2)]), Some(q(1)));
        let y_axis = Cone::from_i64(2, &[&[&[0, 1]]]).unwrap();
        // points (s, 0) with 1 ≤ s ≤ 2 are the closest, at distance 1
        assert_eq!(c.slab_distance(&[q(1), q(0)], &q(1), &q(2), &y_axis), Some(q(1)));
    }

    #[test]
    fn json_round_trip() {
        let c = Cone::from_i64(3, &[&[&[1, 0, 0], &[0, 1, 0]], &[]]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: Cone = serde_json::from_str(&s).unwrap();
        assert_eq!(back.pieces().len(), 2);
        assert_eq!(back.pieces()[0].generators(), c.pieces()[0].generators());
    }
}
