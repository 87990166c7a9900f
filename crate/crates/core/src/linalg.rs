//! Exact rational linear algebra.
//!
//! Everything here works over arbitrary-precision rationals and never rounds.
//! Subspaces are kept in reduced row-echelon form, which makes the stored basis
//! canonical: two `Subspace` values are equal iff they span the same space.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

pub type Rational = BigRational;
pub type Vector = Vec<Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qr(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero_vec(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> Vector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(c: &Rational, a: &[Rational]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

pub fn neg_vec(a: &[Rational]) -> Vector {
    a.iter().map(|x| -x).collect()
}

/// `acc += c * v`
pub fn axpy(acc: &mut [Rational], c: &Rational, v: &[Rational]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += c * x;
        }
    }
}

pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let s = s.trim();
    let err = || LinalgError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

/// Serde adapters that write rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }

    fn decode<E: serde::de::Error>(raw: Raw) -> Result<Rational, E> {
        match raw {
            Raw::Int(n) => Ok(q(n)),
            Raw::Text(s) => parse_rational(&s).map_err(E::custom),
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let strs: Vec<String> = v.iter().map(format_rational).collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
            let raw: Vec<Raw> = Vec::deserialize(d)?;
            raw.into_iter().map(decode).collect()
        }
    }

    pub mod vec_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vector], s: S) -> Result<S::Ok, S::Error> {
            let strs: Vec<Vec<String>> = v
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
            let raw: Vec<Vec<Raw>> = Vec::deserialize(d)?;
            raw.into_iter()
                .map(|row| row.into_iter().map(decode).collect())
                .collect()
        }
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n,
            cols,
            data,
        })
    }

    /// Convenience constructor for tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Self::from_rows(rows, cols).expect("rectangular literal")
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinalgError::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(self.rows)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vector, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (a, x) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect())
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        Ok(m)
    }

    /// `[self; other]`
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m.data, m.rows, m.cols, m.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.rows, &self.columns()).expect("columns have matching length")
    }

    pub fn kernel(&self) -> Subspace {
        Subspace::span(self.cols, &null_space(self)).expect("null space vectors have matching length")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: usize,
            cols: usize,
            #[serde(with = "serde_q::vec_vec")]
            entries: &'a [Vector],
        }
        let rows = self.to_rows();
        Repr {
            rows: self.rows,
            cols: self.cols,
            entries: &rows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            #[serde(with = "serde_q::vec_vec")]
            entries: Vec<Vector>,
        }
        let r = Repr::deserialize(d)?;
        if r.entries.len() != r.rows {
            return Err(serde::de::Error::custom(format!(
                "matrix declares {} rows but lists {}",
                r.rows,
                r.entries.len()
            )));
        }
        Matrix::from_rows(r.entries, r.cols).map_err(serde::de::Error::custom)
    }
}

/// Row-reduces the first `pivot_cols` columns of a row-major buffer in place.
/// Returns the pivot columns. Rows below the rank end up zero.
fn rref_in_place(data: &mut [Rational], rows: usize, cols: usize, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = data[r * cols + c].recip();
        for j in c..cols {
            let v = &data[r * cols + j] * &inv;
            data[r * cols + j] = v;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = data[i * cols + c].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                let t = &f * &data[r * cols + j];
                if !t.is_zero() {
                    data[i * cols + j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : a x = 0}`, one vector per free column, in column order.
pub fn null_space(a: &Matrix) -> Vec<Vector> {
    let (r, pivots) = a.rref();
    let n = a.cols();
    let mut is_pivot = vec![None; n];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    (0..n)
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = zero_vec(n);
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free).clone();
            }
            v
        })
        .collect()
}

/// A solution of `a x = b`: the canonical particular solution (free variables
/// set to zero) together with a null-space basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vector,
    pub null_space: Vec<Vector>,
}

pub fn solve(a: &Matrix, b: &[Rational]) -> Result<Option<Solution>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let rows = a.rows();
    let cols = a.cols() + 1;
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        data.extend(a.row(r).iter().cloned());
        data.push(b[r].clone());
    }
    let pivots = rref_in_place(&mut data, rows, cols, a.cols());
    // Inconsistent iff some zero row has a nonzero right-hand side.
    for r in pivots.len()..rows {
        if !data[r * cols + a.cols()].is_zero() {
            return Ok(None);
        }
    }
    let mut x = zero_vec(a.cols());
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = data[row * cols + a.cols()].clone();
    }
    Ok(Some(Solution {
        particular: x,
        null_space: null_space(a),
    }))
}

/// Subspace of `Q^ambient`, stored as a reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in Q^{}) [", self.dim(), self.ambient)?;
        for b in &self.basis {
            let row: Vec<String> = b.iter().map(format_rational).collect();
            write!(f, "({})", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| unit_vec(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    /// Coordinate subspace on the listed coordinates.
    pub fn coordinate(ambient: usize, coords: impl IntoIterator<Item = usize>) -> Self {
        let vs: Vec<Vector> = coords.into_iter().map(|i| unit_vec(ambient, i)).collect();
        Self::span(ambient, &vs).expect("unit vectors fit the ambient space")
    }

    pub fn span(ambient: usize, vectors: &[Vector]) -> Result<Self, LinalgError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(LinalgError::DimensionMismatch {
                    expected: ambient,
                    found: v.len(),
                });
            }
        }
        let mut data: Vec<Rational> = vectors.iter().flatten().cloned().collect();
        let pivots = rref_in_place(&mut data, vectors.len(), ambient, ambient);
        let basis = (0..pivots.len())
            .map(|r| data[r * ambient..(r + 1) * ambient].to_vec())
            .collect();
        Ok(Subspace {
            ambient,
            basis,
            pivots,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn check(&self, v: &[Rational]) -> Result<(), LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `v` minus its component along the basis, eliminating every pivot
    /// coordinate. Two vectors are congruent modulo the subspace iff their
    /// reductions agree, so this is the canonical coset representative.
    pub fn reduce(&self, v: &[Rational]) -> Result<Vector, LinalgError> {
        self.check(v)?;
        let mut out = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = out[p].clone();
            if !c.is_zero() {
                axpy(&mut out, &(-c), b);
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool, LinalgError> {
        Ok(is_zero_vec(&self.reduce(v)?))
    }

    /// Coefficients of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Option<Vector>, LinalgError> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient));
        }
        // a·U = b·W  <=>  [U^T | -W^T] (a; b) = 0
        let u = Matrix::from_columns(self.ambient, &self.basis)?;
        let neg: Vec<Vector> = other.basis.iter().map(|w| neg_vec(w)).collect();
        let w = Matrix::from_columns(self.ambient, &neg)?;
        let stacked = u.hstack(&w)?;
        let d = self.dim();
        let vs: Vec<Vector> = null_space(&stacked)
            .into_iter()
            .map(|c| u.apply(&c[..d]).expect("coefficient length matches"))
            .collect();
        Subspace::span(self.ambient, &vs)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, LinalgError> {
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coordinates that are not pivots of the basis. Their unit vectors give a
    /// complement, and hence a basis of the quotient `Q^ambient / self`.
    pub fn free_coordinates(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }

    /// Image under a linear map.
    pub fn map(&self, a: &Matrix) -> Result<Subspace, LinalgError> {
        let vs: Result<Vec<Vector>, _> = self.basis.iter().map(|b| a.apply(b)).collect();
        Subspace::span(a.rows(), &vs?)
    }
}

pub fn quotient_dim(ambient: usize, s: &Subspace) -> Result<usize, LinalgError> {
    if s.ambient() != ambient {
        return Err(LinalgError::DimensionMismatch {
            expected: ambient,
            found: s.ambient(),
        });
    }
    Ok(ambient - s.dim())
}

/// Absolute value helper used by diagnostics.
pub fn abs_max(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn full_space_contains_everything() {
        let s = Subspace::span(2, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert!(s.contains(&v(&[3, -2])).unwrap());
    }

    #[test]
    fn transversal_lines_meet_in_zero() {
        let a = Subspace::span(2, &[v(&[1, 1])]).unwrap();
        let b = Subspace::span(2, &[v(&[1, -1])]).unwrap();
        assert!(a.intersect(&b).unwrap().is_zero());
    }

    #[test]
    fn quotient_of_plane_in_three_space() {
        let s = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        assert_eq!(quotient_dim(3, &s).unwrap(), 1);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = Subspace::zero(2);
        assert_eq!(
            s.contains(&v(&[1, 2, 3])),
            Err(LinalgError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        let a = Matrix::identity(2);
        assert!(solve(&a, &v(&[1])).is_err());
    }

    #[test]
    fn inconsistent_system_has_no_solution() {
        let a = Matrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &v(&[1, 2])).unwrap().is_none());
        let s = solve(&a, &v(&[2, 2])).unwrap().unwrap();
        assert_eq!(s.particular, v(&[2, 0]));
        assert_eq!(s.null_space, vec![v(&[-1, 1])]);
    }

    #[test]
    fn rational_text_round_trip() {
        for x in [qr(3, 7), qr(-5, 2), q(0), q(-12)] {
            assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = Matrix::from_rows(vec![vec![qr(1, 2), q(3)], vec![q(0), qr(-7, 3)]], 2).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    fn small_vectors(dim: usize, count: usize) -> impl Strategy<Value = Vec<Vector>> {
        prop::collection::vec(
            prop::collection::vec(-3i64..=3, dim).prop_map(|xs| xs.into_iter().map(q).collect()),
            0..=count,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn grassmann_formula(a in small_vectors(4, 4), b in small_vectors(4, 4)) {
            let s1 = Subspace::span(4, &a).unwrap();
            let s2 = Subspace::span(4, &b).unwrap();
            let sum = s1.sum(&s2).unwrap();
            let cap = s1.intersect(&s2).unwrap();
            prop_assert_eq!(s1.dim() + s2.dim(), sum.dim() + cap.dim());
            prop_assert!(cap.is_subspace_of(&s1).unwrap());
            prop_assert!(cap.is_subspace_of(&s2).unwrap());
        }

        #[test]
        fn canonical_basis_is_idempotent(a in small_vectors(5, 5)) {
            let s = Subspace::span(5, &a).unwrap();
            let again = Subspace::span(5, s.basis()).unwrap();
            prop_assert_eq!(s, again);
        }

        #[test]
        fn solutions_satisfy_the_system(
            rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..4),
            x in prop::collection::vec(-3i64..=3, 4),
        ) {
            let a = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&t| q(t)).collect()).collect(), 4).unwrap();
            let xv: Vector = x.into_iter().map(q).collect();
            let b = a.apply(&xv).unwrap();
            let sol = solve(&a, &b).unwrap().expect("b is in the image");
            prop_assert_eq!(a.apply(&sol.particular).unwrap(), b.clone());
            for n in &sol.null_space {
                prop_assert!(is_zero_vec(&a.apply(n).unwrap()));
            }
        }
    }
}
