//! Dense matrices over a [`Scalar`] and the row-reduction routines the
//! algebra code relies on: rank, nullspace, span membership and inversion.
//!
//! Pivoting picks the entry of largest magnitude in the column. On the exact
//! backend that only changes which nonzero pivot is used; on floats it is
//! ordinary partial pivoting, with entries at or below `tol` treated as zero.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Matrix unit `E_{ij}`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = S::one();
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dimension("matrix data", rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::dimension("matrix row", c, row.len()));
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let v = a.clone() * b.clone();
                    let slot = &mut out.data[i * rhs.cols + j];
                    *slot = slot.clone() + v;
                }
            }
        }
        out
    }

    /// Product of a chain of matrices, left to right.
    pub fn product(factors: &[&Self]) -> Self {
        let (first, rest) = factors.split_first().expect("empty product");
        rest.iter().fold((*first).clone(), |acc, m| acc.matmul(m))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    /// `self += s * rhs`.
    pub fn add_scaled(&mut self, s: &S, rhs: &Self) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        if s.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a = a.clone() + s.clone() * b.clone();
            }
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).add(&rhs.matmul(self))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Largest magnitude outside the given block; zero when the matrix is
    /// supported on that block.
    pub fn max_abs_outside(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let inside = (r0..r0 + rows).contains(&i) && (c0..c0 + cols).contains(&j);
                if !inside {
                    worst = worst.max(self[(i, j)].magnitude());
                }
            }
        }
        worst
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "elementwise shape mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl Matrix<f64> {
    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form computed in place. Returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut Matrix<S>, tol: f64) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, mag) = (r..rows)
            .map(|i| (i, m[(i, c)].magnitude()))
            .fold((r, 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
        if m[(best, c)].is_negligible(tol) || mag == 0.0 {
            for i in r..rows {
                m[(i, c)] = S::zero();
            }
            continue;
        }
        if best != r {
            for j in 0..cols {
                m.data.swap(best * cols + j, r * cols + j);
            }
        }
        let inv = S::one() / m[(r, c)].clone();
        for j in c..cols {
            let v = m[(r, j)].clone() * inv.clone();
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[(i, c)].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                let v = m[(r, j)].clone();
                if !v.is_zero() {
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * v;
                }
            }
            m[(i, c)] = S::zero();
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &Matrix<S>, tol: f64) -> usize {
    let mut work = m.clone();
    rref(&mut work, tol).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace<S: Scalar>(m: &Matrix<S>, tol: f64) -> Vec<Vec<S>> {
    let mut work = m.clone();
    let pivots = rref(&mut work, tol);
    let cols = m.cols;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -work[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn inverse<S: Scalar>(m: &Matrix<S>, tol: f64) -> Result<Matrix<S>> {
    if !m.is_square() {
        return Err(Error::dimension("inverse of non-square matrix", m.rows, m.cols));
    }
    let n = m.rows;
    let mut aug = Matrix::zeros(n, 2 * n);
    aug.set_block(0, 0, m);
    aug.set_block(0, n, &Matrix::identity(n));
    let pivots = rref(&mut aug, tol);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return Err(Error::Singular(format!("{n}x{n} matrix is not invertible")));
    }
    Ok(aug.block(0, n, n, n))
}

/// Maximal linearly independent subset, chosen greedily in input order.
/// Returns the indices of the kept vectors.
pub fn independent_subset<S: Scalar>(vectors: &[Vec<S>], tol: f64) -> Vec<usize> {
    let mut echelon = Echelon::new(vectors.first().map_or(0, Vec::len), tol);
    vectors
        .iter()
        .enumerate()
        .filter_map(|(i, v)| echelon.insert(v).then_some(i))
        .collect()
}

/// Incrementally maintained row echelon basis, used for greedy independence
/// tests without re-reducing the whole set each time.
struct Echelon<S> {
    len: usize,
    tol: f64,
    rows: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> Echelon<S> {
    fn new(len: usize, tol: f64) -> Self {
        Self {
            len,
            tol,
            rows: Vec::new(),
        }
    }

    fn insert(&mut self, v: &[S]) -> bool {
        assert_eq!(v.len(), self.len);
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            let f = w[*p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        let scale = v.iter().map(Scalar::magnitude).fold(0.0, f64::max).max(1.0);
        let pivot = (0..self.len)
            .filter(|&i| !w[i].is_negligible(self.tol * scale))
            .max_by(|&a, &b| w[a].magnitude().total_cmp(&w[b].magnitude()));
        match pivot {
            None => false,
            Some(p) => {
                let inv = S::one() / w[p].clone();
                for x in w.iter_mut() {
                    *x = x.clone() * inv.clone();
                }
                // keep earlier rows reduced at the new pivot
                for (_, row) in self.rows.iter_mut() {
                    let f = row[p].clone();
                    if f.is_zero() {
                        continue;
                    }
                    for (x, y) in row.iter_mut().zip(&w) {
                        if !y.is_zero() {
                            *x = x.clone() - f.clone() * y.clone();
                        }
                    }
                }
                self.rows.push((p, w));
                true
            }
        }
    }
}

/// Coordinates of vectors in the span of a fixed, linearly independent
/// family. Membership is decided by recomputing the combination and
/// comparing with the input, so a `None` always means "not in the span".
#[derive(Clone, Debug)]
pub struct SpanSolver<S> {
    basis: Vec<Vec<S>>,
    pivot_rows: Vec<usize>,
    pivot_inverse: Matrix<S>,
    tol: f64,
}

impl<S: Scalar> SpanSolver<S> {
    pub fn new(basis: Vec<Vec<S>>, tol: f64) -> Result<Self> {
        let k = basis.len();
        let len = basis.first().map_or(0, Vec::len);
        if k == 0 {
            return Ok(Self {
                basis,
                pivot_rows: Vec::new(),
                pivot_inverse: Matrix::zeros(0, 0),
                tol,
            });
        }
        // rows of the transposed basis matrix are the basis vectors; the pivot
        // columns of its echelon form are rows where the basis is invertible
        let bt = Matrix::from_fn(k, len, |i, j| basis[i][j].clone());
        let mut work = bt.clone();
        let pivots = rref(&mut work, tol);
        if pivots.len() < k {
            return Err(Error::Singular("span basis is linearly dependent".into()));
        }
        let sub = Matrix::from_fn(k, k, |i, j| basis[j][pivots[i]].clone());
        let pivot_inverse = inverse(&sub, tol)?;
        Ok(Self {
            basis,
            pivot_rows: pivots,
            pivot_inverse,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    /// Coordinates and the membership residual (max entry of `v - B x`).
    pub fn solve_with_residual(&self, v: &[S]) -> (Vec<S>, f64) {
        let k = self.basis.len();
        let picked: Vec<S> = self.pivot_rows.iter().map(|&r| v[r].clone()).collect();
        let coords: Vec<S> = (0..k)
            .map(|i| {
                (0..k).fold(S::zero(), |acc, j| {
                    acc + self.pivot_inverse[(i, j)].clone() * picked[j].clone()
                })
            })
            .collect();
        let mut residual = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (r, x) in residual.iter_mut().zip(b) {
                if !x.is_zero() {
                    *r = r.clone() - c.clone() * x.clone();
                }
            }
        }
        let res = residual.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        (coords, res)
    }

    pub fn solve(&self, v: &[S]) -> Option<Vec<S>> {
        let (coords, res) = self.solve_with_residual(v);
        let scale = v.iter().map(Scalar::magnitude).fold(1.0, f64::max);
        if S::EXACT {
            (res == 0.0).then_some(coords)
        } else {
            (res <= self.tol * scale).then_some(coords)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    fn m(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect())
            .unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank(&a, 0.0), 2);
        let ns = nullspace(&a, 0.0);
        assert_eq!(ns.len(), 1);
        let x = Matrix::from_row_major(3, 1, ns[0].clone()).unwrap();
        assert!(a.matmul(&x).is_negligible(0.0));
    }

    #[test]
    fn inverse_roundtrip_and_singular() {
        let a = m(vec![vec![2, 1], vec![1, 1]]);
        let inv = inverse(&a, 0.0).unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(2));
        assert!(matches!(
            inverse(&m(vec![vec![1, 2], vec![2, 4]]), 0.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn span_solver_membership() {
        let basis = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]];
        let s = SpanSolver::new(basis, 0.0).unwrap();
        assert_eq!(s.solve(&[int(2), int(3), int(5)]), Some(vec![int(2), int(3)]));
        assert_eq!(s.solve(&[int(2), int(3), int(4)]), None);
    }

    #[test]
    fn greedy_independence_keeps_first_occurrence() {
        let vs = vec![
            vec![int(0), int(0)],
            vec![int(1), int(2)],
            vec![int(2), int(4)],
            vec![int(0), int(1)],
        ];
        assert_eq!(independent_subset(&vs, 0.0), vec![1, 3]);
    }

    #[test]
    fn float_rank_uses_tolerance() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]]).unwrap();
        assert_eq!(rank(&a, 1e-10), 1);
        assert_eq!(rank(&a, 0.0), 2);
    }
}
