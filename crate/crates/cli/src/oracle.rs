//! Brute-force oracles rebuilt from raw `≤` and link tables with nothing
//! but exact linear algebra. They share no code with the checkers or the
//! decomposition engine.

use carrier_core::lattice::ElementSet;
use carrier_core::linalg::{Matrix, Rational, Subspace, Vector};
use carrier_core::localization::Axiom;
use carrier_core::system::{InductiveSystem, SystemMorphism};
use num_traits::{One, Zero};

fn offsets(x: &InductiveSystem) -> Vec<usize> {
    x.dims()
        .iter()
        .scan(0, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect()
}

fn total(x: &InductiveSystem) -> usize {
    x.dims().iter().sum()
}

fn leq(x: &InductiveSystem, a: usize, b: usize) -> bool {
    x.index().leq[a][b]
}

fn link(x: &InductiveSystem, a: usize, b: usize) -> &Matrix {
    x.link(a, b).expect("comparable pair")
}

/// Least upper bound of `a` and `b` by scanning all elements.
fn join(x: &InductiveSystem, a: usize, b: usize) -> Option<usize> {
    let n = x.len();
    let ups: Vec<usize> = (0..n).filter(|&u| leq(x, a, u) && leq(x, b, u)).collect();
    ups.iter().copied().find(|&u| ups.iter().all(|&v| leq(x, u, v)))
}

fn meet(x: &InductiveSystem, a: usize, b: usize) -> Option<usize> {
    let n = x.len();
    let downs: Vec<usize> = (0..n).filter(|&d| leq(x, d, a) && leq(x, d, b)).collect();
    downs.iter().copied().find(|&d| downs.iter().all(|&v| leq(x, v, d)))
}

fn negated(m: &Matrix) -> Matrix {
    m.scale(&-Rational::one())
}

/// Axioms that fail by rank counting alone.
pub fn failing_axioms(x: &InductiveSystem) -> Vec<Axiom> {
    let n = x.len();
    let dims = x.dims();
    let mut out = Vec::new();
    let injective = (0..n).all(|a| (0..n).all(|b| a == b || !leq(x, a, b) || link(x, a, b).rank() == dims[a]));
    if !injective {
        out.push(Axiom::I);
    }
    let onto = (0..n).all(|a| {
        (0..n).all(|b| match join(x, a, b) {
            Some(j) => link(x, a, j).hstack(link(x, b, j)).expect("rows").rank() == dims[j],
            None => true,
        })
    });
    if !onto {
        out.push(Axiom::II);
    }
    // the diagonal image always sits in the equalizer, so equal dimensions suffice
    let glued = (0..n).all(|a| {
        (0..n).all(|b| {
            let Some(m) = meet(x, a, b) else { return true };
            let diag = link(x, m, a).vstack(link(x, m, b)).expect("cols").rank();
            (0..n).filter(|&u| leq(x, a, u) && leq(x, b, u)).all(|u| {
                let eq = dims[a] + dims[b] - link(x, a, u).hstack(&negated(link(x, b, u))).expect("rows").rank();
                eq == diag
            })
        })
    });
    if !glued {
        out.push(Axiom::III);
    }
    out
}

/// Span of `σ(e_k, a, b)` over every comparable pair `a < b` inside `set`.
pub fn relation_span(x: &InductiveSystem, set: &ElementSet) -> Subspace {
    let off = offsets(x);
    let n = total(x);
    let mut gens = Vec::new();
    for &a in set {
        for &b in set {
            if a == b || !leq(x, a, b) {
                continue;
            }
            let l = link(x, a, b);
            for k in 0..x.dims()[a] {
                let mut v = vec![Rational::zero(); n];
                v[off[a] + k] = Rational::one();
                for r in 0..x.dims()[b] {
                    v[off[b] + r] -= l.get(r, k);
                }
                gens.push(v);
            }
        }
    }
    Subspace::span(n, &gens).expect("lengths agree")
}

pub fn member_span(x: &InductiveSystem, set: &ElementSet) -> Subspace {
    let off = offsets(x);
    let coords: Vec<usize> = set.iter().flat_map(|&g| off[g]..off[g] + x.dims()[g]).collect();
    Subspace::coordinate(total(x), coords)
}

fn block(x: &InductiveSystem, y: &InductiveSystem, l: &SystemMorphism) -> Matrix {
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

fn image_of(m: &Matrix, s: &Subspace) -> Subspace {
    let gens: Vec<Vector> = s.basis().iter().map(|b| m.apply(b).expect("shape")).collect();
    Subspace::span(m.rows(), &gens).expect("lengths agree")
}

/// `N^Y_J ∩ (M^Y_I + L(M^X))`, the set the decomposition engine accepts.
pub fn lhs(x: &InductiveSystem, y: &InductiveSystem, l: &SystemMorphism, i: &ElementSet, j: &ElementSet) -> Subspace {
    let all: ElementSet = (0..x.len()).collect();
    let image = image_of(&block(x, y, l), &member_span(x, &all));
    let sum = member_span(y, i).sum(&image).expect("ambient");
    relation_span(y, j).intersect(&sum).expect("ambient")
}

/// `N^Y_I + L(N^X_J)`.
pub fn rhs(x: &InductiveSystem, y: &InductiveSystem, l: &SystemMorphism, i: &ElementSet, j: &ElementSet) -> Subspace {
    relation_span(y, i).sum(&image_of(&block(x, y, l), &relation_span(x, j))).expect("ambient")
}

/// Injectivity of every component, and for `a < b` the containment
/// `{y ∈ Y(a) : ρ_ab y ∈ im l_b} ⊆ im l_a`, both by rank counting.
pub fn regularity(x: &InductiveSystem, y: &InductiveSystem, l: &SystemMorphism) -> (bool, bool) {
    let n = y.len();
    let injective = (0..n).all(|g| l.maps[g].rank() == x.dims()[g]);
    let lifting = (0..n).all(|a| {
        (0..n).all(|b| {
            if a == b || !leq(y, a, b) {
                return true;
            }
            // columns of [ρ_ab | −l_b] span pairs (y, x') with ρ_ab y = l_b x'
            let stacked = link(y, a, b).hstack(&negated(&l.maps[b])).expect("rows");
            let pre: Vec<Vector> = carrier_core::linalg::null_space(&stacked)
                .into_iter()
                .map(|v| v[..y.dims()[a]].to_vec())
                .collect();
            let pre = Subspace::span(y.dims()[a], &pre).expect("lengths agree");
            let im = l.maps[a].rank();
            let both = l.maps[a].hstack(&Matrix::from_columns(y.dims()[a], pre.basis()).expect("shape")).expect("rows");
            both.rank() == im
        })
    });
    (injective, lifting)
}

/// Every down-set of the index poset.
pub fn hereditary_sets(x: &InductiveSystem) -> Vec<ElementSet> {
    let n = x.len();
    // a linear extension: fewer elements below come first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&a| ((0..n).filter(|&b| leq(x, b, a)).count(), a));
    let mut out = Vec::new();
    let mut current = ElementSet::new();
    extend(x, &order, 0, &mut current, &mut out);
    out
}

fn extend(x: &InductiveSystem, order: &[usize], pos: usize, cur: &mut ElementSet, out: &mut Vec<ElementSet>) {
    if pos == order.len() {
        out.push(cur.clone());
        return;
    }
    let a = order[pos];
    extend(x, order, pos + 1, cur, out);
    if (0..x.len()).all(|b| b == a || !leq(x, b, a) || cur.contains(&b)) {
        cur.insert(a);
        extend(x, order, pos + 1, cur, out);
        cur.remove(&a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use carrier_core::lattice::SetFamily;
    use carrier_core::localization::{generate_counterexample, generate_simple_free_model};

    #[test]
    fn counterexamples_fail_their_axiom() {
        for a in [Axiom::II, Axiom::III] {
            assert_eq!(failing_axioms(&generate_counterexample(a)), vec![a]);
        }
        assert_eq!(failing_axioms(&generate_counterexample(Axiom::I)), vec![Axiom::I, Axiom::III]);
        let cube = generate_simple_free_model(&SetFamily::new(3, (0..8).collect())).unwrap();
        assert!(failing_axioms(&cube).is_empty());
    }

    #[test]
    fn down_sets_of_small_orders() {
        // chain of 3: ∅, {0}, {0,1}, {0,1,2}
        let chain = generate_simple_free_model(&SetFamily::new(2, vec![0, 1, 3])).unwrap();
        assert_eq!(hereditary_sets(&chain).len(), 4);
        // the square has 6 down-sets
        let square = generate_simple_free_model(&SetFamily::new(2, vec![0, 1, 2, 3])).unwrap();
        assert_eq!(hereditary_sets(&square).len(), 6);
        // Boolean lattice on 3 atoms: the Dedekind number M(3) = 20
        let cube = generate_simple_free_model(&SetFamily::new(3, (0..8).collect())).unwrap();
        assert_eq!(hereditary_sets(&cube).len(), 20);
    }
}
