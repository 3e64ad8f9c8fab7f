//! Dense tensors in `g⊗g` and `g⊗g⊗g` and the bracket calculus on them.
//!
//! Coordinates are taken in the basis `u_a` of the algebra: a [`Tensor2`]
//! `T` stands for `Σ T[a][b] u_a⊗u_b`. Leg brackets are evaluated directly
//! from structure constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;
use crate::linalg::DenseMatrix;
use crate::scalar::{max_abs, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2<S> {
    dim: usize,
    data: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor2<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut t = Self::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                t.data[a * dim + b] = f(a, b);
            }
        }
        t
    }

    /// `x ⊗ y`.
    pub fn outer(x: &[S], y: &[S]) -> Self {
        assert_eq!(x.len(), y.len());
        Self::from_fn(x.len(), |a, b| x[a] * y[b])
    }

    /// Coefficient matrix `T[a][b]`.
    pub fn from_matrix(m: &DenseMatrix<S>) -> Self {
        assert_eq!(m.rows(), m.cols());
        Self::from_fn(m.rows(), |a, b| m.get(a, b))
    }

    pub fn to_matrix(&self) -> DenseMatrix<S> {
        DenseMatrix::from_fn(self.dim, self.dim, |a, b| self.get(a, b))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> S {
        self.data[a * self.dim + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, v: S) {
        self.data[a * self.dim + b] = v;
    }

    pub fn add_assign_at(&mut self, a: usize, b: usize, v: S) {
        let i = a * self.dim + b;
        self.data[i] = self.data[i] + v;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x - y)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// `T[a][b] ↦ T[b][a]`.
    pub fn flip(&self) -> Self {
        Self::from_fn(self.dim, |a, b| self.get(b, a))
    }

    pub fn skew_part(&self) -> Self {
        let half = S::one() / S::from_i64(2);
        self.sub(&self.flip()).scale(half)
    }

    pub fn symmetric_part(&self) -> Self {
        let half = S::one() / S::from_i64(2);
        self.add(&self.flip()).scale(half)
    }

    /// `‖T + flip T‖`.
    pub fn skew_defect(&self) -> f64 {
        self.add(&self.flip()).max_abs()
    }

    /// `‖T − flip T‖`.
    pub fn symmetry_defect(&self) -> f64 {
        self.sub(&self.flip()).max_abs()
    }

    /// `(ad x)` on one leg.
    pub fn leg_act(&self, g: &LieAlgebra<S>, x: &[S], leg: usize) -> Self {
        let ad = g.ad(x);
        let d = self.dim;
        let mut out = Self::zeros(d);
        match leg {
            0 => {
                for k in 0..d {
                    for a in 0..d {
                        let m = ad.get(k, a);
                        if m == S::zero() {
                            continue;
                        }
                        for b in 0..d {
                            out.add_assign_at(k, b, m * self.get(a, b));
                        }
                    }
                }
            }
            1 => {
                for k in 0..d {
                    for b in 0..d {
                        let m = ad.get(k, b);
                        if m == S::zero() {
                            continue;
                        }
                        for a in 0..d {
                            out.add_assign_at(a, k, m * self.get(a, b));
                        }
                    }
                }
            }
            _ => panic!("leg {leg} out of range for a rank-2 tensor"),
        }
        out
    }

    /// `[x⊗1 + 1⊗x, T]`.
    pub fn diagonal_act(&self, g: &LieAlgebra<S>, x: &[S]) -> Self {
        self.leg_act(g, x, 0).add(&self.leg_act(g, x, 1))
    }

    /// Max over `xs` of `‖[x⊗1 + 1⊗x, T]‖`.
    pub fn invariance_defect(&self, g: &LieAlgebra<S>, xs: &[Vec<S>]) -> f64 {
        xs.iter()
            .map(|x| self.diagonal_act(g, x).max_abs())
            .fold(0.0, f64::max)
    }

    /// `T(η) = Σ T[a][b] η(u_a) u_b`: pairing with the first leg.
    pub fn contract_first(&self, eta: &[S]) -> Vec<S> {
        let d = self.dim;
        let mut out = vec![S::zero(); d];
        for (a, &e) in eta.iter().enumerate().take(d) {
            if e == S::zero() {
                continue;
            }
            for (b, o) in out.iter_mut().enumerate() {
                *o = *o + self.get(a, b) * e;
            }
        }
        out
    }

    /// `ι T ιᵀ` along an inclusion `ι` given as a `d × k` matrix.
    pub fn push_forward(&self, inclusion: &DenseMatrix<S>) -> Self {
        assert_eq!(inclusion.cols(), self.dim);
        let m = &(inclusion * &self.to_matrix()) * &inclusion.transpose();
        Self::from_matrix(&m)
    }

    /// Coefficients `T[a][b]` of a tensor supported on `ι(l)⊗ι(l)`, in `l`
    /// coordinates: `L T Lᵀ` with `L` a left inverse of `ι`.
    pub fn pull_back(&self, left_inverse: &DenseMatrix<S>) -> Self {
        let m = &(left_inverse * &self.to_matrix()) * &left_inverse.transpose();
        Self::from_matrix(&m)
    }
}

impl<S: Scalar> Tensor3<S> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![S::zero(); dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut t = Self::zeros(dim);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    t.data[(a * dim + b) * dim + c] = f(a, b, c);
                }
            }
        }
        t
    }

    /// `x ⊗ T`.
    pub fn outer(x: &[S], t: &Tensor2<S>) -> Self {
        Self::from_fn(t.dim, |a, b, c| x[a] * t.get(b, c))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> S {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    fn add_at(&mut self, a: usize, b: usize, c: usize, v: S) {
        let i = (a * self.dim + b) * self.dim + c;
        self.data[i] = self.data[i] + v;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x - y)
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (x, &y) in self.data.iter_mut().zip(&other.data) {
            *x = *x + y;
        }
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// Tensor with legs permuted: `out[i0][i1][i2] = self[j0][j1][j2]` where
    /// `j_{perm[k]} = i_k`, i.e. leg `k` of the output is leg `perm[k]` of `self`.
    pub fn permute(&self, perm: [usize; 3]) -> Self {
        Self::from_fn(self.dim, |a, b, c| {
            let out = [a, b, c];
            let mut idx = [0usize; 3];
            for k in 0..3 {
                idx[perm[k]] = out[k];
            }
            self.get(idx[0], idx[1], idx[2])
        })
    }

    /// `(ad x)` on one leg.
    pub fn leg_act(&self, g: &LieAlgebra<S>, x: &[S], leg: usize) -> Self {
        assert!(leg < 3, "leg {leg} out of range for a rank-3 tensor");
        let ad = g.ad(x);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let v = self.get(a, b, c);
                    if v == S::zero() {
                        continue;
                    }
                    let src = [a, b, c][leg];
                    for k in 0..d {
                        let m = ad.get(k, src);
                        if m == S::zero() {
                            continue;
                        }
                        match leg {
                            0 => out.add_at(k, b, c, m * v),
                            1 => out.add_at(a, k, c, m * v),
                            _ => out.add_at(a, b, k, m * v),
                        }
                    }
                }
            }
        }
        out
    }

    /// Max over `xs` of `‖Σ_legs (ad x)_leg W‖`.
    pub fn invariance_defect(&self, g: &LieAlgebra<S>, xs: &[Vec<S>]) -> f64 {
        xs.iter()
            .map(|x| {
                let mut t = self.leg_act(g, x, 0);
                t.add_assign(&self.leg_act(g, x, 1));
                t.add_assign(&self.leg_act(g, x, 2));
                t.max_abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `[A₁₂, B₁₃]`.
pub fn bracket_12_13<S: Scalar>(g: &LieAlgebra<S>, a: &Tensor2<S>, b: &Tensor2<S>) -> Tensor3<S> {
    let d = g.dim();
    let mut out = Tensor3::zeros(d);
    // Σ c[p][q][k] A[p][b] B[q][e] u_k ⊗ u_b ⊗ u_e
    for p in 0..d {
        for q in 0..d {
            let cs: Vec<(usize, S)> = (0..d)
                .map(|k| (k, g.c(p, q, k)))
                .filter(|&(_, c)| c != S::zero())
                .collect();
            if cs.is_empty() {
                continue;
            }
            for bi in 0..d {
                let x = a.get(p, bi);
                if x == S::zero() {
                    continue;
                }
                for e in 0..d {
                    let y = b.get(q, e);
                    if y == S::zero() {
                        continue;
                    }
                    let w = x * y;
                    for &(k, c) in &cs {
                        out.add_at(k, bi, e, c * w);
                    }
                }
            }
        }
    }
    out
}

/// `[A₁₂, B₂₃]`.
pub fn bracket_12_23<S: Scalar>(g: &LieAlgebra<S>, a: &Tensor2<S>, b: &Tensor2<S>) -> Tensor3<S> {
    let d = g.dim();
    let mut out = Tensor3::zeros(d);
    // Σ c[p][q][k] A[a][p] B[q][e] u_a ⊗ u_k ⊗ u_e
    for p in 0..d {
        for q in 0..d {
            let cs: Vec<(usize, S)> = (0..d)
                .map(|k| (k, g.c(p, q, k)))
                .filter(|&(_, c)| c != S::zero())
                .collect();
            if cs.is_empty() {
                continue;
            }
            for ai in 0..d {
                let x = a.get(ai, p);
                if x == S::zero() {
                    continue;
                }
                for e in 0..d {
                    let y = b.get(q, e);
                    if y == S::zero() {
                        continue;
                    }
                    let w = x * y;
                    for &(k, c) in &cs {
                        out.add_at(ai, k, e, c * w);
                    }
                }
            }
        }
    }
    out
}

/// `[A₁₃, B₂₃]`.
pub fn bracket_13_23<S: Scalar>(g: &LieAlgebra<S>, a: &Tensor2<S>, b: &Tensor2<S>) -> Tensor3<S> {
    let d = g.dim();
    let mut out = Tensor3::zeros(d);
    // Σ c[p][q][k] A[a][p] B[b][q] u_a ⊗ u_b ⊗ u_k
    for p in 0..d {
        for q in 0..d {
            let cs: Vec<(usize, S)> = (0..d)
                .map(|k| (k, g.c(p, q, k)))
                .filter(|&(_, c)| c != S::zero())
                .collect();
            if cs.is_empty() {
                continue;
            }
            for ai in 0..d {
                let x = a.get(ai, p);
                if x == S::zero() {
                    continue;
                }
                for bi in 0..d {
                    let y = b.get(bi, q);
                    if y == S::zero() {
                        continue;
                    }
                    let w = x * y;
                    for &(k, c) in &cs {
                        out.add_at(ai, bi, k, c * w);
                    }
                }
            }
        }
    }
    out
}

/// `[A₁₂,B₁₃] + [A₁₂,B₂₃] + [A₁₃,B₂₃]`, so that `cyb(A) = cyb_terms(A, A)`.
pub fn cyb_terms<S: Scalar>(g: &LieAlgebra<S>, a: &Tensor2<S>, b: &Tensor2<S>) -> Tensor3<S> {
    let mut out = bracket_12_13(g, a, b);
    out.add_assign(&bracket_12_23(g, a, b));
    out.add_assign(&bracket_13_23(g, a, b));
    out
}

/// `CYB(A) = [A₁₂,A₁₃] + [A₁₂,A₂₃] + [A₁₃,A₂₃]`.
pub fn cyb<S: Scalar>(g: &LieAlgebra<S>, a: &Tensor2<S>) -> Tensor3<S> {
    cyb_terms(g, a, a)
}

/// `Alt(B) = B₁₂₃ − B₂₁₃ + B₂₃₁`.
pub fn alt<S: Scalar>(b: &Tensor3<S>) -> Tensor3<S> {
    let d = b.dim();
    Tensor3::from_fn(d, |p, q, s| {
        b.get(p, q, s) - b.get(q, p, s) + b.get(s, p, q)
    })
}

/// `Alt(x ⊗ T)`.
pub fn alt_outer<S: Scalar>(x: &[S], t: &Tensor2<S>) -> Tensor3<S> {
    alt(&Tensor3::outer(x, t))
}

/// `T(F) = Σ (G⁻¹)[a][b] u_a ⊗ F(u_b)`, where `F` is the matrix of the
/// operator (column `b` holds `F(u_b)`).
pub fn op_to_tensor<S: Scalar>(g: &LieAlgebra<S>, f: &DenseMatrix<S>) -> Result<Tensor2<S>> {
    if f.rows() != g.dim() || f.cols() != g.dim() {
        return Err(Error::input("operator shape does not match the algebra"));
    }
    Ok(Tensor2::from_matrix(&(g.gram_inv() * &f.transpose())))
}

/// Inverse of [`op_to_tensor`]: `F(y) = Σ T[a][b] ⟨u_a, y⟩ u_b`.
pub fn tensor_to_op<S: Scalar>(g: &LieAlgebra<S>, t: &Tensor2<S>) -> DenseMatrix<S> {
    (&t.to_matrix().transpose()) * g.gram()
}

/// Split Casimir `Ω = T(id)`, with coefficients `G⁻¹`.
pub fn casimir<S: Scalar>(g: &LieAlgebra<S>) -> Tensor2<S> {
    Tensor2::from_matrix(g.gram_inv())
}

/// Max-abs and relative residual gauge `abs / (1 + ‖r‖² dim)`.
pub fn relative_residual(abs: f64, r_norm: f64, dim: usize) -> f64 {
    abs / (1.0 + r_norm * r_norm * dim as f64)
}

/// One nonzero entry: index tuple, real part, imaginary part.
pub type Entry = (Vec<usize>, f64, f64);

/// Portable form of a tensor: nonzero entries plus the fingerprint of the
/// algebra the coordinates refer to.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TensorJson {
    pub rank: usize,
    pub dim: usize,
    pub algebra: String,
    pub entries: Vec<Entry>,
}

fn entries<S: Scalar>(data: &[S], dim: usize, rank: usize) -> Vec<Entry> {
    data.iter()
        .enumerate()
        .filter(|(_, v)| v.modulus() != 0.0)
        .map(|(i, v)| {
            let mut idx = vec![0usize; rank];
            let mut rest = i;
            for slot in idx.iter_mut().rev() {
                *slot = rest % dim;
                rest /= dim;
            }
            let c = v.to_c64();
            (idx, c.re, c.im)
        })
        .collect()
}

impl<S: Scalar> Tensor2<S> {
    pub fn to_json(&self, g: &LieAlgebra<S>) -> TensorJson {
        TensorJson {
            rank: 2,
            dim: self.dim,
            algebra: g.fingerprint(),
            entries: entries(&self.data, self.dim, 2),
        }
    }
}

impl<S: Scalar> Tensor3<S> {
    pub fn to_json(&self, g: &LieAlgebra<S>) -> TensorJson {
        TensorJson {
            rank: 3,
            dim: self.dim,
            algebra: g.fingerprint(),
            entries: entries(&self.data, self.dim, 3),
        }
    }
}

impl TensorJson {
    pub fn to_tensor2(&self) -> Result<Tensor2<crate::C64>> {
        if self.rank != 2 {
            return Err(Error::input(format!(
                "expected rank 2, found {}",
                self.rank
            )));
        }
        let mut t = Tensor2::zeros(self.dim);
        for (idx, re, im) in &self.entries {
            if idx.len() != 2 || idx.iter().any(|&i| i >= self.dim) {
                return Err(Error::input("tensor entry index out of range"));
            }
            t.set(idx[0], idx[1], crate::C64::new(*re, *im));
        }
        Ok(t)
    }

    pub fn to_tensor3(&self) -> Result<Tensor3<crate::C64>> {
        if self.rank != 3 {
            return Err(Error::input(format!(
                "expected rank 3, found {}",
                self.rank
            )));
        }
        let mut t = Tensor3::zeros(self.dim);
        for (idx, re, im) in &self.entries {
            if idx.len() != 3 || idx.iter().any(|&i| i >= self.dim) {
                return Err(Error::input("tensor entry index out of range"));
            }
            t.add_at(idx[0], idx[1], idx[2], crate::C64::new(*re, *im));
        }
        Ok(t)
    }
}
