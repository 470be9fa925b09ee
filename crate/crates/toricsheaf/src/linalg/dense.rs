use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{primitive_integer, Q};
use num_bigint::BigInt;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: Vec<Vec<Q>>, ncols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<Q>>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.nrows, self.ncols)?;
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.iter().map(crate::rational::format_q).collect::<Vec<_>>()))
            .finish()
    }
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix { nrows, ncols, rows: vec![vec![Q::zero(); ncols]; nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = Q::one();
        }
        m
    }

    /// Panics if the rows are ragged or do not have `ncols` entries.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<Q>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        Matrix { nrows: rows.len(), ncols, rows }
    }

    pub fn from_i64(ncols: usize, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(ncols, rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (row, x) in m.rows.iter_mut().zip(c) {
                row[j] = x.clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        self.rows[i][j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let cols = (0..self.ncols).map(|j| self.column(j)).collect();
        Matrix { nrows: self.ncols, ncols: self.nrows, rows: cols }
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|r| {
                let mut s = Q::zero();
                for (a, b) in r.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols, other.nrows);
        let ot = other.transpose();
        let rows = self.rows.iter().map(|r| ot.rows.iter().map(|c| dot(r, c)).collect()).collect();
        Matrix { nrows: self.nrows, ncols: other.ncols, rows }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    pub fn rank(&self) -> usize {
        rref(self.rows.clone(), self.ncols).0.len()
    }

    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = rref(self.rows.clone(), self.ncols);
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Q::zero(); self.ncols];
            v[free] = Q::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[free].clone();
            }
            basis.push(v);
        }
        Subspace::span(self.ncols, basis)
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.nrows, (0..self.ncols).map(|j| self.column(j)).collect())
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.nrows != self.ncols {
            return None;
        }
        let n = self.nrows;
        let aug = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
                row
            })
            .collect();
        let (r, pivots) = rref(aug, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix { nrows: n, ncols: n, rows: r.into_iter().map(|row| row[n..].to_vec()).collect() })
    }
}

pub(crate) fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

/// A subspace of ℚ^n, stored by its reduced row echelon basis so that equal
/// subspaces have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace<{}>", self.ambient)?;
        f.debug_list()
            .entries(self.basis.iter().map(|r| r.iter().map(crate::rational::format_q).collect::<Vec<_>>()))
            .finish()
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, Matrix::identity(ambient).rows)
    }

    pub fn span(ambient: usize, vectors: Vec<Vec<Q>>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length mismatch");
        let (basis, _) = rref(vectors, ambient);
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// The canonical (reduced echelon) basis.
    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    /// The canonical basis scaled row by row to primitive integer vectors.
    pub fn integer_basis(&self) -> Vec<Vec<BigInt>> {
        self.basis.iter().map(|v| primitive_integer(v)).collect()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rref(rows, self.ambient).0.len() == self.basis.len()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, rows)
    }

    /// Basis of the annihilator, as functionals in dual coordinates.
    pub fn annihilator(&self) -> Subspace {
        Matrix::from_rows(self.ambient, self.basis.clone()).kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_subspace_of(other) {
            return self.clone();
        }
        if other.is_subspace_of(self) {
            return other.clone();
        }
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Image under a linear map with `map.ncols() == ambient`.
    pub fn image(&self, map: &Matrix) -> Subspace {
        Subspace::span(map.nrows(), self.basis.iter().map(|v| map.apply(v)).collect())
    }

    /// Coordinates of `v` with respect to linearly independent `basis`
    /// vectors spanning a space containing `v`.
    pub fn coordinates(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
        let n = v.len();
        let k = basis.len();
        // Solve Σ c_i basis_i = v via rref on the augmented transpose.
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut r: Vec<Q> = basis.iter().map(|b| b[i].clone()).collect();
                r.push(v[i].clone());
                r
            })
            .collect();
        let (r, pivots) = rref(rows, k + 1);
        if pivots.last() == Some(&k) || pivots.len() < k {
            return None;
        }
        Some((0..k).map(|i| r[i][k].clone()).collect())
    }
}
