//! Brute-force oracles that rebuild every space from the raw link tables.

#![allow(dead_code)]

use carrier_core::lattice::ElementSet;
use carrier_core::linalg::{Matrix, Rational, Subspace, Vector};
use carrier_core::system::{InductiveSystem, SystemMorphism};
use num_traits::{One, Zero};

pub fn offsets(x: &InductiveSystem) -> Vec<usize> {
    let mut out = Vec::new();
    let mut acc = 0;
    for g in 0..x.len() {
        out.push(acc);
        acc += x.dims()[g];
    }
    out
}

pub fn total(x: &InductiveSystem) -> usize {
    x.dims().iter().sum()
}

/// Span of σ(e_k, a, b) over every comparable pair a < b of `set`.
pub fn relation_span(x: &InductiveSystem, set: &ElementSet) -> Subspace {
    let off = offsets(x);
    let n = total(x);
    let mut gens = Vec::new();
    for &a in set {
        for &b in set {
            if a == b || !x.index().leq[a][b] {
                continue;
            }
            let link = x.link(a, b).unwrap();
            for k in 0..x.dims()[a] {
                let mut v = vec![Rational::zero(); n];
                v[off[a] + k] = Rational::one();
                for r in 0..x.dims()[b] {
                    v[off[b] + r] -= link.get(r, k);
                }
                gens.push(v);
            }
        }
    }
    Subspace::span(n, &gens).unwrap()
}

pub fn member_span(x: &InductiveSystem, set: &ElementSet) -> Subspace {
    let off = offsets(x);
    let n = total(x);
    let gens: Vec<Vector> = set
        .iter()
        .flat_map(|&g| {
            let start = off[g];
            (0..x.dims()[g]).map(move |k| start + k)
        })
        .map(|c| {
            let mut v = vec![Rational::zero(); n];
            v[c] = Rational::one();
            v
        })
        .collect();
    Subspace::span(n, &gens).unwrap()
}

pub fn block(x: &InductiveSystem, y: &InductiveSystem, l: &SystemMorphism) -> Matrix {
    let (ox, oy) = (offsets(x), offsets(y));
    let mut m = Matrix::zeros(total(y), total(x));
    for g in 0..x.len() {
        for r in 0..y.dims()[g] {
            for c in 0..x.dims()[g] {
                m.set(oy[g] + r, ox[g] + c, l.maps[g].get(r, c).clone());
            }
        }
    }
    m
}

pub fn image_of(m: &Matrix, s: &Subspace) -> Subspace {
    let gens: Vec<Vector> = s.basis().iter().map(|b| m.apply(b).unwrap()).collect();
    Subspace::span(m.rows(), &gens).unwrap()
}

/// `N^Y_J ∩ (M^Y_I + L(M^X))`
pub fn lhs(x: &InductiveSystem, y: &InductiveSystem, l: &SystemMorphism, i: &ElementSet, j: &ElementSet) -> Subspace {
    let m = block(x, y, l);
    let all: ElementSet = (0..x.len()).collect();
    let image = image_of(&m, &member_span(x, &all));
    relation_span(y, j).intersect(&member_span(y, i).sum(&image).unwrap()).unwrap()
}

/// `N^Y_I + L(N^X_J)`
pub fn rhs(x: &InductiveSystem, y: &InductiveSystem, l: &SystemMorphism, i: &ElementSet, j: &ElementSet) -> Subspace {
    let m = block(x, y, l);
    relation_span(y, i).sum(&image_of(&m, &relation_span(x, j))).unwrap()
}
