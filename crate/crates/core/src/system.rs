//! Inductive systems of finite-dimensional rational spaces over a finite poset,
//! direct sums, relation spaces, colimits and pushforwards.

use crate::lattice::{ElementSet, LatticeError, Poset};
use crate::linalg::{
    axpy, format_rational, is_zero_vec, neg_vec, parse_rational, serde_q, unit_vec, zero_vec, LinalgError, Matrix,
    Rational, Subspace, Vector,
};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use thiserror::Error;

pub const MAX_FIBER_DIM: usize = 8;
pub const MAX_INDEX: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("index set has {0} elements, the limit is {MAX_INDEX}")]
    IndexTooLarge(usize),
    #[error("fiber at {index} has dimension {dim}, the limit is {MAX_FIBER_DIM}")]
    FiberTooLarge { index: usize, dim: usize },
    #[error("expected {expected} fiber dimensions, found {found}")]
    DimsLength { expected: usize, found: usize },
    #[error("no link for the comparable pair ({0}, {1})")]
    MissingLink(usize, usize),
    #[error("link ({0}, {1}) given for an incomparable pair")]
    NotComparable(usize, usize),
    #[error("link ({a}, {b}) has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    LinkShape {
        a: usize,
        b: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("link ({0}, {0}) is not the identity")]
    NotIdentity(usize),
    #[error("links along {0} <= {1} <= {2} do not compose")]
    NotFunctorial(usize, usize, usize),
    #[error("vector at index {index} has length {found}, expected {expected}")]
    WrongDimension { index: usize, expected: usize, found: usize },
    #[error("map is not monotone: {0} <= {1} but their images are not ordered")]
    NotMonotone(usize, usize),
    #[error("index map has {found} entries, expected {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("index set is not contained in the larger one")]
    NotNested,
    #[error("vector is not supported on the index set")]
    NotInMemberSpace,
    #[error("morphism square at ({0}, {1}) does not commute")]
    NotCommuting(usize, usize),
    #[error("source and target are indexed by different posets")]
    IndexMismatch,
    #[error("identity {0} failed on a basis vector")]
    IdentityFailed(&'static str),
}

/// Element of the direct sum over all indices, stored sparsely.
/// Zero components are never stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SumVector {
    components: BTreeMap<usize, Vector>,
}

impl SumVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn component(index: usize, v: Vector) -> Self {
        let mut s = Self::zero();
        s.add_at(index, &v);
        s
    }

    pub fn components(&self) -> &BTreeMap<usize, Vector> {
        &self.components
    }

    pub fn get(&self, index: usize) -> Option<&Vector> {
        self.components.get(&index)
    }

    pub fn support(&self) -> ElementSet {
        self.components.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Adds `v` to the component at `index`.
    pub fn add_at(&mut self, index: usize, v: &[Rational]) {
        self.axpy_at(index, &Rational::one(), v);
    }

    pub fn axpy_at(&mut self, index: usize, c: &Rational, v: &[Rational]) {
        if c.is_zero() || is_zero_vec(v) {
            return;
        }
        let slot = self.components.entry(index).or_insert_with(|| zero_vec(v.len()));
        axpy(slot, c, v);
        if is_zero_vec(slot) {
            self.components.remove(&index);
        }
    }

    pub fn add(&self, other: &SumVector) -> SumVector {
        let mut out = self.clone();
        for (&i, v) in &other.components {
            out.add_at(i, v);
        }
        out
    }

    pub fn sub(&self, other: &SumVector) -> SumVector {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> SumVector {
        let mut out = SumVector::zero();
        for (&i, v) in &self.components {
            out.axpy_at(i, c, v);
        }
        out
    }

    pub fn check(&self, x: &InductiveSystem) -> Result<(), SystemError> {
        for (&i, v) in &self.components {
            if i >= x.len() {
                return Err(LatticeError::OutOfRange(i).into());
            }
            if v.len() != x.dim(i) {
                return Err(SystemError::WrongDimension {
                    index: i,
                    expected: x.dim(i),
                    found: v.len(),
                });
            }
        }
        Ok(())
    }

    pub fn to_dense(&self, x: &InductiveSystem) -> Result<Vector, SystemError> {
        self.check(x)?;
        let mut out = zero_vec(x.total_dim());
        for (&i, v) in &self.components {
            let o = x.offset(i);
            out[o..o + v.len()].clone_from_slice(v);
        }
        Ok(out)
    }

    pub fn from_dense(x: &InductiveSystem, v: &[Rational]) -> Result<SumVector, SystemError> {
        if v.len() != x.total_dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: x.total_dim(),
                found: v.len(),
            }
            .into());
        }
        let mut out = SumVector::zero();
        for i in 0..x.len() {
            let o = x.offset(i);
            out.add_at(i, &v[o..o + x.dim(i)]);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    index: usize,
    #[serde(with = "serde_q::vec")]
    value: Vector,
}

impl Serialize for SumVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<ComponentRepr> = self
            .components
            .iter()
            .map(|(&index, v)| ComponentRepr { index, value: v.clone() })
            .collect();
        list.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SumVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let list: Vec<ComponentRepr> = Vec::deserialize(d)?;
        let mut out = SumVector::zero();
        for c in list {
            if out.components.contains_key(&c.index) {
                return Err(serde::de::Error::custom(format!("duplicate component {}", c.index)));
            }
            out.add_at(c.index, &c.value);
        }
        Ok(out)
    }
}

/// Fibers `X(γ)` of the given dimensions and a link matrix for every `γ ≤ γ'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductiveSystem {
    index: Poset,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    links: BTreeMap<(usize, usize), Matrix>,
}

impl InductiveSystem {
    /// Validates shapes, identities on the diagonal and functoriality.
    pub fn new(index: Poset, dims: Vec<usize>, links: BTreeMap<(usize, usize), Matrix>) -> Result<Self, SystemError> {
        index.validate()?;
        let n = index.len();
        if n > MAX_INDEX {
            return Err(SystemError::IndexTooLarge(n));
        }
        if dims.len() != n {
            return Err(SystemError::DimsLength {
                expected: n,
                found: dims.len(),
            });
        }
        if let Some((i, &d)) = dims.iter().enumerate().find(|(_, &d)| d > MAX_FIBER_DIM) {
            return Err(SystemError::FiberTooLarge { index: i, dim: d });
        }
        for &(a, b) in links.keys() {
            if a >= n || b >= n || !index.leq(a, b) {
                return Err(SystemError::NotComparable(a, b));
            }
        }
        for (a, b) in index.comparable_pairs() {
            let m = links.get(&(a, b)).ok_or(SystemError::MissingLink(a, b))?;
            if m.rows() != dims[b] || m.cols() != dims[a] {
                return Err(SystemError::LinkShape {
                    a,
                    b,
                    rows: m.rows(),
                    cols: m.cols(),
                    expected_rows: dims[b],
                    expected_cols: dims[a],
                });
            }
            if a == b && !m.is_identity() {
                return Err(SystemError::NotIdentity(a));
            }
        }
        for (a, b) in index.comparable_pairs() {
            for c in 0..n {
                if a != b && b != c && index.leq(b, c) {
                    let composed = links[&(b, c)].mul(&links[&(a, b)])?;
                    if composed != links[&(a, c)] {
                        return Err(SystemError::NotFunctorial(a, b, c));
                    }
                }
            }
        }
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        Ok(InductiveSystem {
            index,
            dims,
            offsets,
            links,
        })
    }

    /// Builds the link table from a function on comparable pairs.
    pub fn from_fn(index: Poset, dims: Vec<usize>, link: impl Fn(usize, usize) -> Matrix) -> Result<Self, SystemError> {
        let links = index.comparable_pairs().into_iter().map(|(a, b)| ((a, b), link(a, b))).collect();
        Self::new(index, dims, links)
    }

    /// Every fiber equal to `Q^d`, every link the identity.
    pub fn constant(index: Poset, d: usize) -> Result<Self, SystemError> {
        let n = index.len();
        Self::from_fn(index, vec![d; n], |_, _| Matrix::identity(d))
    }

    pub fn index(&self) -> &Poset {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn dim(&self, g: usize) -> usize {
        self.dims[g]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn offset(&self, g: usize) -> usize {
        self.offsets[g]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn link(&self, a: usize, b: usize) -> Result<&Matrix, SystemError> {
        self.links.get(&(a, b)).ok_or(SystemError::NotComparable(a, b))
    }

    pub fn links(&self) -> &BTreeMap<(usize, usize), Matrix> {
        &self.links
    }

    /// `ι_γ x − ι_γ' ρ_γγ' x`
    pub fn sigma(&self, x: &[Rational], a: usize, b: usize) -> Result<SumVector, SystemError> {
        let m = self.link(a, b)?;
        if x.len() != self.dims[a] {
            return Err(SystemError::WrongDimension {
                index: a,
                expected: self.dims[a],
                found: x.len(),
            });
        }
        let mut s = SumVector::component(a, x.to_vec());
        s.add_at(b, &neg_vec(&m.apply(x)?));
        Ok(s)
    }

    /// Dense coordinates of `ι_γ x`.
    pub fn inject(&self, g: usize, x: &[Rational]) -> Vector {
        let mut v = zero_vec(self.total_dim());
        v[self.offsets[g]..self.offsets[g] + self.dims[g]].clone_from_slice(x);
        v
    }

    /// Global coordinates belonging to the fibers over `set`.
    pub fn coordinates_of(&self, set: &ElementSet) -> Vec<usize> {
        set.iter()
            .flat_map(|&g| self.offsets[g]..self.offsets[g] + self.dims[g])
            .collect()
    }

    /// Pairs `a < b` in `set` with nothing from `set` strictly between them.
    pub fn covers_within(&self, set: &ElementSet) -> Vec<(usize, usize)> {
        let p = &self.index;
        let mut out = Vec::new();
        for &a in set {
            for &b in set {
                if p.lt(a, b) && !set.iter().any(|&c| p.lt(a, c) && p.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The relation space: span of `σ(x, γ, γ')` over `γ ≤ γ'` in `set`.
    ///
    /// Cover pairs suffice, since `σ(x,a,c) = σ(x,a,b) + σ(ρ_ab x,b,c)`.
    pub fn relation_space(&self, set: &ElementSet) -> Result<Subspace, SystemError> {
        let mut gens = Vec::new();
        for (a, b) in self.covers_within(set) {
            for i in 0..self.dims[a] {
                let s = self.sigma(&unit_vec(self.dims[a], i), a, b)?;
                gens.push(s.to_dense(self)?);
            }
        }
        Ok(Subspace::span(self.total_dim(), &gens)?)
    }

    /// Same space as [`relation_space`](Self::relation_space), spanned over every comparable pair.
    pub fn relation_space_all_pairs(&self, set: &ElementSet) -> Result<Subspace, SystemError> {
        let mut gens = Vec::new();
        for &a in set {
            for &b in set {
                if self.index.lt(a, b) {
                    for i in 0..self.dims[a] {
                        gens.push(self.sigma(&unit_vec(self.dims[a], i), a, b)?.to_dense(self)?);
                    }
                }
            }
        }
        Ok(Subspace::span(self.total_dim(), &gens)?)
    }

    pub fn member_space(&self, set: &ElementSet) -> Subspace {
        Subspace::coordinate(self.total_dim(), self.coordinates_of(set))
    }

    pub fn colimit(&self, set: &ElementSet) -> Result<Colimit, SystemError> {
        if let Some(&g) = set.iter().find(|&&g| g >= self.len()) {
            return Err(LatticeError::OutOfRange(g).into());
        }
        let relations = self.relation_space(set)?;
        let member = self.coordinates_of(set);
        let pivots: ElementSet = relations.pivots().iter().copied().collect();
        let free = member.iter().copied().filter(|c| !pivots.contains(c)).collect();
        Ok(Colimit {
            subset: set.clone(),
            ambient: self.total_dim(),
            member,
            relations,
            free,
        })
    }

    pub fn whole(&self) -> ElementSet {
        (0..self.len()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    index: Poset,
    dims: Vec<usize>,
    /// Keys are `"a<=b"` with element positions.
    links: BTreeMap<String, Matrix>,
}

impl Serialize for InductiveSystem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SystemRepr {
            index: self.index.clone(),
            dims: self.dims.clone(),
            links: self
                .links
                .iter()
                .filter(|((a, b), _)| a != b)
                .map(|((a, b), m)| (format!("{a}<={b}"), m.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for InductiveSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = SystemRepr::deserialize(d)?;
        let mut links = BTreeMap::new();
        for (k, m) in r.links {
            let (a, b) = k.split_once("<=").ok_or_else(|| D::Error::custom(format!("bad link key {k:?}")))?;
            let a: usize = a.trim().parse().map_err(D::Error::custom)?;
            let b: usize = b.trim().parse().map_err(D::Error::custom)?;
            links.insert((a, b), m);
        }
        for (g, &dim) in r.dims.iter().enumerate() {
            links.entry((g, g)).or_insert_with(|| Matrix::identity(dim));
        }
        InductiveSystem::new(r.index, r.dims, links).map_err(D::Error::custom)
    }
}

/// The colimit over an index subset `I`, presented as `M_I / N_I`.
///
/// Classes are written in the coordinates of `M_I` that are not pivots of the
/// canonical basis of `N_I`; reducing a vector modulo `N_I` and reading those
/// coordinates gives the class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colimit {
    pub subset: ElementSet,
    pub ambient: usize,
    pub member: Vec<usize>,
    pub relations: Subspace,
    pub free: Vec<usize>,
}

impl Colimit {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// The quotient map `j_I` on vectors of `M_I`.
    pub fn project(&self, v: &[Rational]) -> Result<Vector, SystemError> {
        let r = self.relations.reduce(v)?;
        let member: ElementSet = self.member.iter().copied().collect();
        if r.iter().enumerate().any(|(i, x)| !x.is_zero() && !member.contains(&i)) {
            return Err(SystemError::NotInMemberSpace);
        }
        Ok(self.free.iter().map(|&c| r[c].clone()).collect())
    }

    /// Canonical representative of a class.
    pub fn lift(&self, class: &[Rational]) -> Result<Vector, SystemError> {
        if class.len() != self.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim(),
                found: class.len(),
            }
            .into());
        }
        let mut v = zero_vec(self.ambient);
        for (&c, x) in self.free.iter().zip(class) {
            v[c] = x.clone();
        }
        Ok(v)
    }

    pub fn same_class(&self, u: &[Rational], v: &[Rational]) -> Result<bool, SystemError> {
        Ok(self.project(u)? == self.project(v)?)
    }

    /// Matrix of `ρ_γ = j_I ι_γ` for `γ ∈ I`.
    pub fn canonical_map(&self, x: &InductiveSystem, g: usize) -> Result<Matrix, SystemError> {
        if !self.subset.contains(&g) {
            return Err(SystemError::NotInMemberSpace);
        }
        let cols: Result<Vec<Vector>, _> = (0..x.dim(g))
            .map(|i| self.project(&x.inject(g, &unit_vec(x.dim(g), i))))
            .collect();
        Ok(Matrix::from_columns(self.dim(), &cols?)?)
    }
}

/// Map `τ_{I,J}` between colimit presentations for `I ⊆ J`, checked against
/// `τ j_I x = j_J x` on every basis vector of `M_I`.
pub fn connecting_map(x: &InductiveSystem, from: &Colimit, to: &Colimit) -> Result<Matrix, SystemError> {
    if !from.subset.is_subset(&to.subset) {
        return Err(SystemError::NotNested);
    }
    let cols: Result<Vec<Vector>, _> = (0..from.dim()).map(|k| to.project(&from.lift(&unit_vec(from.dim(), k))?)).collect();
    let tau = Matrix::from_columns(to.dim(), &cols?)?;
    for &c in &from.member {
        let e = unit_vec(x.total_dim(), c);
        if tau.apply(&from.project(&e)?)? != to.project(&e)? {
            return Err(SystemError::IdentityFailed("connecting map"));
        }
    }
    Ok(tau)
}

/// Fiberwise linear maps `l_γ : X(γ) → Y(γ)` commuting with the links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemMorphism {
    pub maps: Vec<Matrix>,
}

impl SystemMorphism {
    pub fn validate(&self, x: &InductiveSystem, y: &InductiveSystem) -> Result<(), SystemError> {
        if x.index() != y.index() {
            return Err(SystemError::IndexMismatch);
        }
        if self.maps.len() != x.len() {
            return Err(SystemError::MapLength {
                expected: x.len(),
                found: self.maps.len(),
            });
        }
        for (g, m) in self.maps.iter().enumerate() {
            if m.rows() != y.dim(g) || m.cols() != x.dim(g) {
                return Err(SystemError::LinkShape {
                    a: g,
                    b: g,
                    rows: m.rows(),
                    cols: m.cols(),
                    expected_rows: y.dim(g),
                    expected_cols: x.dim(g),
                });
            }
        }
        for (a, b) in x.index().comparable_pairs() {
            if a == b {
                continue;
            }
            let left = self.maps[b].mul(x.link(a, b)?)?;
            let right = y.link(a, b)?.mul(&self.maps[a])?;
            if left != right {
                return Err(SystemError::NotCommuting(a, b));
            }
        }
        Ok(())
    }

    pub fn identity(x: &InductiveSystem) -> Self {
        SystemMorphism {
            maps: x.dims().iter().map(|&d| Matrix::identity(d)).collect(),
        }
    }

    pub fn zero(x: &InductiveSystem, y: &InductiveSystem) -> Self {
        SystemMorphism {
            maps: (0..x.len()).map(|g| Matrix::zeros(y.dim(g), x.dim(g))).collect(),
        }
    }

    /// The induced map `L` on direct sums, applied to dense coordinates.
    pub fn apply_dense(&self, x: &InductiveSystem, y: &InductiveSystem, v: &[Rational]) -> Result<Vector, SystemError> {
        Ok(self.apply_sum(&SumVector::from_dense(x, v)?)?.to_dense(y)?)
    }

    pub fn apply_sum(&self, v: &SumVector) -> Result<SumVector, SystemError> {
        let mut out = SumVector::zero();
        for (&g, c) in v.components() {
            out.add_at(g, &self.maps[g].apply(c)?);
        }
        Ok(out)
    }

    /// Dense block-diagonal matrix of `L`.
    pub fn block_matrix(&self, x: &InductiveSystem, y: &InductiveSystem) -> Matrix {
        let mut m = Matrix::zeros(y.total_dim(), x.total_dim());
        for g in 0..x.len() {
            for r in 0..y.dim(g) {
                for c in 0..x.dim(g) {
                    m.set(y.offset(g) + r, x.offset(g) + c, self.maps[g].get(r, c).clone());
                }
            }
        }
        m
    }

    pub fn compose(&self, after: &SystemMorphism) -> Result<SystemMorphism, SystemError> {
        let maps: Result<Vec<Matrix>, _> = self.maps.iter().zip(&after.maps).map(|(f, g)| g.mul(f)).collect();
        Ok(SystemMorphism { maps: maps? })
    }
}

/// The system `λ(X)` over `Δ` with `λ(X)(δ) = colim X` over `Γ_δ = {γ : λ(γ) ≤ δ}`.
#[derive(Debug, Clone)]
pub struct Pushforward {
    pub target: Poset,
    pub lambda: Vec<usize>,
    pub fibers: Vec<Colimit>,
    pub system: InductiveSystem,
}

pub fn check_monotone(source: &Poset, target: &Poset, lambda: &[usize]) -> Result<(), SystemError> {
    if lambda.len() != source.len() {
        return Err(SystemError::MapLength {
            expected: source.len(),
            found: lambda.len(),
        });
    }
    if let Some(&bad) = lambda.iter().find(|&&d| d >= target.len()) {
        return Err(LatticeError::OutOfRange(bad).into());
    }
    for (a, b) in source.comparable_pairs() {
        if !target.leq(lambda[a], lambda[b]) {
            return Err(SystemError::NotMonotone(a, b));
        }
    }
    Ok(())
}

pub fn down_preimage(source: &Poset, target: &Poset, lambda: &[usize], delta: usize) -> ElementSet {
    (0..source.len()).filter(|&g| target.leq(lambda[g], delta)).collect()
}

pub fn pushforward(x: &InductiveSystem, target: &Poset, lambda: &[usize]) -> Result<Pushforward, SystemError> {
    target.validate()?;
    check_monotone(x.index(), target, lambda)?;
    let fibers: Result<Vec<Colimit>, _> = (0..target.len())
        .map(|d| x.colimit(&down_preimage(x.index(), target, lambda, d)))
        .collect();
    let fibers = fibers?;
    let mut links = BTreeMap::new();
    for (d, e) in target.comparable_pairs() {
        links.insert((d, e), connecting_map(x, &fibers[d], &fibers[e])?);
    }
    let dims = fibers.iter().map(Colimit::dim).collect();
    let system = InductiveSystem::new(target.clone(), dims, links)?;
    Ok(Pushforward {
        target: target.clone(),
        lambda: lambda.to_vec(),
        fibers,
        system,
    })
}

/// The induced morphism `λ(l)`, checked against `λ(l)_δ j^X x = j^Y L x` on a basis.
pub fn pushforward_morphism(
    x: &InductiveSystem,
    y: &InductiveSystem,
    l: &SystemMorphism,
    px: &Pushforward,
    py: &Pushforward,
) -> Result<SystemMorphism, SystemError> {
    l.validate(x, y)?;
    let mut maps = Vec::with_capacity(px.fibers.len());
    for (fx, fy) in px.fibers.iter().zip(&py.fibers) {
        let cols: Result<Vec<Vector>, SystemError> = (0..fx.dim())
            .map(|k| {
                let rep = fx.lift(&unit_vec(fx.dim(), k))?;
                fy.project(&l.apply_dense(x, y, &rep)?)
            })
            .collect();
        let m = Matrix::from_columns(fy.dim(), &cols?)?;
        for &c in &fx.member {
            let e = unit_vec(x.total_dim(), c);
            if m.apply(&fx.project(&e)?)? != fy.project(&l.apply_dense(x, y, &e)?)? {
                return Err(SystemError::IdentityFailed("pushforward morphism"));
            }
        }
        maps.push(m);
    }
    let out = SystemMorphism { maps };
    out.validate(&px.system, &py.system)?;
    Ok(out)
}

/// Rational text helpers re-exported for report writers.
pub fn format_vector(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn parse_vector(v: &[String]) -> Result<Vector, LinalgError> {
    v.iter().map(|s| parse_rational(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{validate_quasi_lattice, SetFamily};
    use crate::linalg::q;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| q(x)).collect()
    }

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn scalar_chain(link: i64) -> InductiveSystem {
        InductiveSystem::from_fn(Poset::chain(2), vec![1, 1], |a, b| {
            if a == b {
                Matrix::identity(1)
            } else {
                Matrix::from_i64(&[&[link]])
            }
        })
        .unwrap()
    }

    #[test]
    fn sigma_examples() {
        let x = scalar_chain(2);
        assert!(x.sigma(&v(&[5]), 0, 0).unwrap().is_zero());
        let s = x.sigma(&v(&[3]), 0, 1).unwrap();
        assert_eq!(s.get(0), Some(&v(&[3])));
        assert_eq!(s.get(1), Some(&v(&[-6])));
        let id = scalar_chain(1);
        let s = id.sigma(&v(&[1]), 0, 1).unwrap();
        assert_eq!(s.to_dense(&id).unwrap(), v(&[1, -1]));
        assert_eq!(x.sigma(&v(&[1]), 1, 0), Err(SystemError::NotComparable(1, 0)));
    }

    #[test]
    fn relation_space_examples() {
        let x = scalar_chain(1);
        assert!(x.relation_space(&set(&[0])).unwrap().is_zero());
        assert!(x.relation_space(&set(&[])).unwrap().is_zero());
        let n = x.relation_space(&set(&[0, 1])).unwrap();
        assert_eq!(n.dim(), 1);
        assert!(n.contains(&v(&[1, -1])).unwrap());
    }

    #[test]
    fn member_space_dimension() {
        let x = scalar_chain(1);
        assert_eq!(x.member_space(&set(&[0, 1])).dim(), 2);
        assert!(x.member_space(&set(&[])).is_zero());
    }

    #[test]
    fn colimit_examples() {
        let zero_links = scalar_chain(0);
        assert_eq!(zero_links.colimit(&set(&[0, 1])).unwrap().dim(), 1);
        let id = scalar_chain(1);
        assert_eq!(id.colimit(&set(&[0, 1])).unwrap().dim(), 1);
        assert_eq!(id.colimit(&set(&[1])).unwrap().dim(), 1);
        let cube = InductiveSystem::constant(Poset::powerset(3), 2).unwrap();
        assert_eq!(cube.colimit(&cube.whole()).unwrap().dim(), 2);
    }

    #[test]
    fn zero_links_colimit_is_one_dimensional() {
        // N is spanned by (1, 0): the bottom fiber dies, the top survives.
        let x = scalar_chain(0);
        let c = x.colimit(&set(&[0, 1])).unwrap();
        assert_eq!(c.project(&v(&[1, 0])).unwrap(), v(&[0]));
        assert_ne!(c.project(&v(&[0, 1])).unwrap(), v(&[0]));
    }

    #[test]
    fn connecting_map_examples() {
        let x = scalar_chain(1);
        let bottom = x.colimit(&set(&[0])).unwrap();
        let both = x.colimit(&set(&[0, 1])).unwrap();
        let tau = connecting_map(&x, &bottom, &both).unwrap();
        assert_eq!(tau.rank(), 1);
        assert!(connecting_map(&x, &both, &both).unwrap().is_identity());
        let empty = x.colimit(&set(&[])).unwrap();
        let z = connecting_map(&x, &empty, &both).unwrap();
        assert_eq!((z.rows(), z.cols()), (1, 0));
        assert_eq!(connecting_map(&x, &both, &bottom), Err(SystemError::NotNested));
    }

    #[test]
    fn identity_pushforward_recovers_fibers() {
        let fam = SetFamily::new(2, vec![0, 1, 2, 3]);
        let p = fam.poset();
        let x = InductiveSystem::constant(p.clone(), 1).unwrap();
        let lambda: Vec<usize> = (0..p.len()).collect();
        let pf = pushforward(&x, &p, &lambda).unwrap();
        assert_eq!(pf.system.dims(), x.dims());
        for (a, b) in p.comparable_pairs() {
            assert_eq!(pf.system.link(a, b).unwrap().rank(), 1);
        }
    }

    #[test]
    fn constant_pushforward_is_the_full_colimit() {
        let x = InductiveSystem::constant(Poset::powerset(2), 1).unwrap();
        let pf = pushforward(&x, &Poset::chain(1), &[0, 0, 0, 0]).unwrap();
        assert_eq!(pf.system.dims(), &[1]);
    }

    #[test]
    fn non_monotone_map_is_rejected() {
        let x = InductiveSystem::constant(Poset::chain(2), 1).unwrap();
        assert_eq!(
            pushforward(&x, &Poset::chain(2), &[1, 0]).unwrap_err(),
            SystemError::NotMonotone(0, 1)
        );
    }

    #[test]
    fn identity_and_zero_morphisms_push_forward() {
        let x = InductiveSystem::constant(Poset::powerset(2), 1).unwrap();
        let target = Poset::chain(2);
        let lambda = [0, 0, 1, 1];
        let px = pushforward(&x, &target, &lambda).unwrap();
        let id = pushforward_morphism(&x, &x, &SystemMorphism::identity(&x), &px, &px).unwrap();
        assert!(id.maps.iter().all(Matrix::is_identity));
        let z = pushforward_morphism(&x, &x, &SystemMorphism::zero(&x, &x), &px, &px).unwrap();
        assert!(z.maps.iter().all(Matrix::is_zero));
    }

    #[test]
    fn non_functorial_links_are_rejected() {
        let r = InductiveSystem::from_fn(Poset::chain(3), vec![1, 1, 1], |a, b| {
            if a == b {
                Matrix::identity(1)
            } else {
                Matrix::from_i64(&[&[2]])
            }
        });
        assert_eq!(r.unwrap_err(), SystemError::NotFunctorial(0, 1, 2));
    }

    #[test]
    fn system_json_round_trip() {
        let q = validate_quasi_lattice(&Poset::powerset(2)).unwrap();
        let x = InductiveSystem::constant(q.poset, 2).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let back: InductiveSystem = serde_json::from_str(&s).unwrap();
        assert_eq!(x, back);
        let y = SumVector::component(1, v(&[1, 0])).add(&SumVector::component(3, v(&[0, -2])));
        let back: SumVector = serde_json::from_str(&serde_json::to_string(&y).unwrap()).unwrap();
        assert_eq!(y, back);
    }
}
