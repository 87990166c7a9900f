//! Dense two-phase simplex with Bland's rule.
//!
//! Generic over the scalar so the same code runs in exact rational
//! arithmetic (cone geometry constants) and in `f64` (test oracles).

use carrier_core::linalg::Rational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalars the simplex can pivot over. `f64` compares against a fixed
/// tolerance, rationals compare exactly.
pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_nonzero(&self) -> bool {
        self.is_pos() || self.is_neg()
    }
}

const F64_EPS: f64 = 1e-10;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }
}

impl LpScalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `minimize objective·x` subject to the constraints; variables flagged in
/// `free` are unrestricted, the rest are nonnegative.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub free: Vec<bool>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(vars: usize) -> Self {
        LinearProgram {
            objective: vec![T::zero(); vars],
            free: vec![false; vars],
            constraints: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> &mut Self {
        assert_eq!(coeffs.len(), self.vars(), "constraint length");
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn solve(&self) -> LpOutcome<T> {
        Tableau::build(self).run(self)
    }
}

struct Tableau<T> {
    /// rows × (cols + 1); last column is the right-hand side.
    a: Vec<Vec<T>>,
    cost: Vec<T>,
    basis: Vec<usize>,
    cols: usize,
    artificial_start: usize,
    /// (positive column, negative column) per original variable.
    columns: Vec<(usize, Option<usize>)>,
}

impl<T: LpScalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let mut columns = Vec::new();
        let mut next = 0;
        for &f in &lp.free {
            let neg = if f {
                next += 1;
                Some(next)
            } else {
                None
            };
            columns.push((next - usize::from(f), neg));
            next += 1;
        }
        let structural = next;
        let slacks = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let artificial_start = structural + slacks;
        let rows = lp.constraints.len();
        let cols = artificial_start + rows;
        let mut a = vec![vec![T::zero(); cols + 1]; rows];
        let mut slack = structural;
        for (i, c) in lp.constraints.iter().enumerate() {
            let flip = c.rhs.is_neg();
            let sgn = |v: T| if flip { -v } else { v };
            for (j, v) in c.coeffs.iter().enumerate() {
                let (p, n) = columns[j];
                a[i][p] = sgn(v.clone());
                if let Some(n) = n {
                    a[i][n] = -sgn(v.clone());
                }
            }
            match c.relation {
                Relation::Le => {
                    a[i][slack] = sgn(T::one());
                    slack += 1;
                }
                Relation::Ge => {
                    a[i][slack] = sgn(-T::one());
                    slack += 1;
                }
                Relation::Eq => {}
            }
            a[i][artificial_start + i] = T::one();
            a[i][cols] = sgn(c.rhs.clone());
        }
        let mut cost = vec![T::zero(); cols + 1];
        for row in &a {
            for j in 0..artificial_start {
                cost[j] = cost[j].clone() - row[j].clone();
            }
            cost[cols] = cost[cols].clone() - row[cols].clone();
        }
        Tableau {
            a,
            cost,
            basis: (artificial_start..cols).collect(),
            cols,
            artificial_start,
            columns,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i != r && row[c].is_nonzero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        if self.cost[c].is_nonzero() {
            let f = self.cost[c].clone();
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        loop {
            let Some(c) = (0..limit).find(|&j| self.cost[j].is_neg()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if !row[c].is_pos() {
                    continue;
                }
                let ratio = row[self.cols].clone() / row[c].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        let d = ratio.clone() - br.clone();
                        d.is_neg() || (!d.is_pos() && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn run(mut self, lp: &LinearProgram<T>) -> LpOutcome<T> {
        self.optimize(self.cols);
        if (-self.cost[self.cols].clone()).is_pos() {
            return LpOutcome::Infeasible;
        }
        // Drive artificials out of the basis; rows where that is impossible are redundant.
        let mut r = 0;
        while r < self.a.len() {
            if self.basis[r] >= self.artificial_start {
                if let Some(c) = (0..self.artificial_start).find(|&j| self.a[r][j].is_nonzero()) {
                    self.pivot(r, c);
                } else {
                    self.a.remove(r);
                    self.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
        let mut c_full = vec![T::zero(); self.cols];
        for (j, &(p, n)) in self.columns.iter().enumerate() {
            c_full[p] = lp.objective[j].clone();
            if let Some(n) = n {
                c_full[n] = -lp.objective[j].clone();
            }
        }
        let mut cost = vec![T::zero(); self.cols + 1];
        cost[..self.cols].clone_from_slice(&c_full);
        for (i, row) in self.a.iter().enumerate() {
            let cb = c_full[self.basis[i]].clone();
            if cb.is_nonzero() {
                for (v, x) in cost.iter_mut().zip(row) {
                    *v = v.clone() - cb.clone() * x.clone();
                }
            }
        }
        self.cost = cost;
        if !self.optimize(self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut values = vec![T::zero(); self.cols];
        for (i, &b) in self.basis.iter().enumerate() {
            values[b] = self.a[i][self.cols].clone();
        }
        let x: Vec<T> = self
            .columns
            .iter()
            .map(|&(p, n)| match n {
                Some(n) => values[p].clone() - values[n].clone(),
                None => values[p].clone(),
            })
            .collect();
        let value = x
            .iter()
            .zip(&lp.objective)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        LpOutcome::Optimal { x, value }
    }
}
