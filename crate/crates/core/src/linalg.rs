//! Small dense matrices over any [`Scalar`], plus the complex helpers the
//! spectral layer needs.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::C64;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
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

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_abs(&self.data)
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    fn pivot_tolerance(&self) -> f64 {
        S::structural_tolerance() * self.max_abs().max(1.0)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::input("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let tol = self.pivot_tolerance();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (piv, piv_abs) =
                (col..n)
                    .map(|r| (r, a.get(r, col).modulus()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if piv_abs <= tol {
                return Err(Error::SingularForm);
            }
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / p);
                inv.set(col, j, inv.get(col, j) / p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == S::zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - f * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }

    /// Basis of the right null space, from the reduced row echelon form.
    pub fn null_space(&self) -> Vec<Vec<S>> {
        let tol = self.pivot_tolerance();
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let (piv, piv_abs) = (row..self.rows).map(|r| (r, a.get(r, col).modulus())).fold(
                (row, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
            if piv_abs <= tol {
                continue;
            }
            a.swap_rows(row, piv);
            let p = a.get(row, col);
            for j in 0..self.cols {
                a.set(row, j, a.get(row, j) / p);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = a.get(r, col);
                if f == S::zero() {
                    continue;
                }
                for j in 0..self.cols {
                    a.set(r, j, a.get(r, j) - f * a.get(row, j));
                }
            }
            pivots.push(col);
            row += 1;
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![S::zero(); self.cols];
                v[fc] = S::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a.get(r, fc);
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

impl<S: Scalar> Mul for &DenseMatrix<S> {
    type Output = DenseMatrix<S>;

    fn mul(self, rhs: &DenseMatrix<S>) -> DenseMatrix<S> {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == S::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx] + a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

impl<S: Scalar> Add for &DenseMatrix<S> {
    type Output = DenseMatrix<S>;

    fn add(self, rhs: &DenseMatrix<S>) -> DenseMatrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &DenseMatrix<S> {
    type Output = DenseMatrix<S>;

    fn sub(self, rhs: &DenseMatrix<S>) -> DenseMatrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// `Σ a_i b_i` without conjugation.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

pub fn scaled<S: Scalar>(alpha: S, x: &[S]) -> Vec<S> {
    x.iter().map(|&v| alpha * v).collect()
}

pub fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn to_nalgebra(m: &DenseMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

pub fn from_nalgebra(m: &DMatrix<C64>) -> DenseMatrix<C64> {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn nalgebra_max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Euclidean norm of a complex coordinate vector.
pub fn euclid(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Right null space of a complex matrix via SVD with a relative singular
/// value cutoff.
pub fn svd_null_space(m: &DMatrix<C64>, cutoff: f64) -> Vec<Vec<C64>> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    // pad to square so that V has a full set of right singular vectors
    let rows = m.nrows().max(n);
    let mut padded = DMatrix::<C64>::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let scale = svd
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .max(1.0);
    (0..n)
        .filter(|&i| svd.singular_values[i] <= cutoff * scale)
        .map(|i| (0..n).map(|j| v_t[(i, j)].conj()).collect())
        .collect()
}

/// An invariant subspace `V` with a complementary decomposition: `basis`
/// (d x k) spans `V` and `coords` (k x d) extracts coordinates along the
/// complement, so that `basis * coords` is the projector onto `V`.
#[derive(Debug, Clone)]
pub struct InvariantSubspace {
    pub basis: DMatrix<C64>,
    pub coords: DMatrix<C64>,
}

impl InvariantSubspace {
    pub fn new(basis: DMatrix<C64>, coords: DMatrix<C64>) -> Result<Self> {
        let k = basis.ncols();
        if coords.nrows() != k || coords.ncols() != basis.nrows() {
            return Err(Error::input("subspace basis/coordinate shapes disagree"));
        }
        let err = nalgebra_max_abs(&(&coords * &basis - DMatrix::<C64>::identity(k, k)));
        if err > 1e-9 {
            return Err(Error::invariant(
                "subspace coordinates are a left inverse",
                err,
                1e-9,
            ));
        }
        Ok(Self { basis, coords })
    }

    /// Subspace orthogonal to its complement with respect to `gram`:
    /// `coords = (Bᵀ G B)⁻¹ Bᵀ G`.
    pub fn orthogonal(basis: DMatrix<C64>, gram: &DMatrix<C64>) -> Result<Self> {
        let bt_g = basis.transpose() * gram;
        let restricted = &bt_g * &basis;
        let inv = restricted.try_inverse().ok_or(Error::SingularForm)?;
        Self::new(basis, inv * bt_g)
    }

    /// Subspaces from a direct-sum decomposition `g = ⊕ V_j`, with
    /// coordinates read off the inverse of the stacked basis.
    pub fn from_decomposition(bases: &[DMatrix<C64>]) -> Result<Vec<Self>> {
        let d = bases.first().map(|b| b.nrows()).unwrap_or(0);
        let total: usize = bases.iter().map(|b| b.ncols()).sum();
        if total != d {
            return Err(Error::input(format!(
                "subspace dimensions sum to {total}, expected {d}"
            )));
        }
        let mut stacked = DMatrix::<C64>::zeros(d, d);
        let mut offset = 0;
        for b in bases {
            stacked.view_mut((0, offset), (d, b.ncols())).copy_from(b);
            offset += b.ncols();
        }
        let inv = stacked.try_inverse().ok_or(Error::SingularForm)?;
        let mut out = Vec::with_capacity(bases.len());
        let mut offset = 0;
        for b in bases {
            let k = b.ncols();
            let coords = inv.rows(offset, k).into_owned();
            out.push(Self::new(b.clone(), coords)?);
            offset += k;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn projector(&self) -> DMatrix<C64> {
        &self.basis * &self.coords
    }

    /// Matrix of `a` restricted to the subspace, in subspace coordinates.
    pub fn compress(&self, a: &DMatrix<C64>) -> DMatrix<C64> {
        &self.coords * a * &self.basis
    }

    /// Extend an operator on the subspace by zero on the complement.
    pub fn expand(&self, f: &DMatrix<C64>) -> DMatrix<C64> {
        &self.basis * f * &self.coords
    }

    /// How far `a` is from leaving the subspace invariant.
    pub fn invariance_defect(&self, a: &DMatrix<C64>) -> f64 {
        let ab = a * &self.basis;
        nalgebra_max_abs(&(&self.basis * (&self.coords * &ab) - ab))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    #[test]
    fn exact_inverse_of_trace_form() {
        let g: DenseMatrix<Q> = DenseMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => Q::from_integer(2),
            (1, 2) | (2, 1) => Q::from_integer(1),
            _ => Q::from_integer(0),
        });
        let inv = g.inverse().unwrap();
        assert_eq!(inv.get(0, 0), Q::new(1, 2));
        assert_eq!(inv.get(1, 2), Q::from_integer(1));
        assert_eq!(&g * &inv, DenseMatrix::identity(3));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m: DenseMatrix<f64> = DenseMatrix::from_fn(2, 2, |_, _| 1.0);
        assert!(matches!(m.inverse(), Err(Error::SingularForm)));
    }

    #[test]
    fn null_space_of_rank_one() {
        let m: DenseMatrix<Q> = DenseMatrix::from_fn(1, 3, |_, j| Q::from_integer(j as i64 + 1));
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_eq!(m.matvec(v)[0], Q::from_integer(0));
        }
    }

    #[test]
    fn svd_null_space_finds_kernel() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(2.0, 0.0),
                C64::new(2.0, 0.0),
                C64::new(4.0, 0.0),
            ],
        );
        let ns = svd_null_space(&m, 1e-10);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((m[(0, 0)] * v[0] + m[(0, 1)] * v[1]).norm() < 1e-12);
    }
}
