//! Finite-dimensional Lie algebras given by structure constants and an
//! invariant symmetric bilinear form.

mod automorphism;
mod roots;
mod sl;
mod subalgebra;

pub use automorphism::{cyclic_automorphism, Automorphism};
pub(crate) use roots::bilinear_gram_schmidt;
pub use roots::{PositiveRoot, RootDatum, RootPair};
pub use sl::build_sl;
pub use subalgebra::{diagonal_subalgebra, levi_subalgebra, Subalgebra};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;
use crate::C64;

/// Residuals of the structural axioms, each a max-abs over basis tuples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralResiduals {
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub gram_symmetry: f64,
    pub form_invariance: f64,
}

impl StructuralResiduals {
    pub fn max(&self) -> f64 {
        self.antisymmetry
            .max(self.jacobi)
            .max(self.gram_symmetry)
            .max(self.form_invariance)
    }
}

/// A Lie algebra with basis `u_0..u_{d-1}`, `[u_i,u_j] = Σ_k c[i][j][k] u_k`,
/// and Gram matrix `⟨u_i,u_j⟩` of a nondegenerate invariant form.
#[derive(Debug, Clone)]
pub struct LieAlgebra<S> {
    labels: Vec<String>,
    structure: Vec<S>,
    gram: DenseMatrix<S>,
    gram_inv: DenseMatrix<S>,
}

impl<S: Scalar> LieAlgebra<S> {
    /// Build and validate. `structure` is indexed `(i*d + j)*d + k`.
    pub fn new(labels: Vec<String>, structure: Vec<S>, gram: DenseMatrix<S>) -> Result<Self> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::input("Lie algebra must have positive dimension"));
        }
        if structure.len() != d * d * d {
            return Err(Error::input(format!(
                "expected {} structure constants, got {}",
                d * d * d,
                structure.len()
            )));
        }
        if gram.rows() != d || gram.cols() != d {
            return Err(Error::input("Gram matrix shape does not match dimension"));
        }
        let gram_inv = gram.inverse()?;
        let alg = Self {
            labels,
            structure,
            gram,
            gram_inv,
        };
        let res = alg.structural_residuals();
        let scale =
            (1.0 + crate::scalar::max_abs(&alg.structure)).powi(2) * (1.0 + alg.gram.max_abs());
        let tol = S::structural_tolerance() * scale;
        for (name, r) in [
            ("antisymmetry", res.antisymmetry),
            ("jacobi", res.jacobi),
            ("gram symmetry", res.gram_symmetry),
            ("form invariance", res.form_invariance),
        ] {
            if r > tol {
                return Err(Error::invariant(name, r, tol));
            }
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> S {
        let d = self.dim();
        self.structure[(i * d + j) * d + k]
    }

    pub fn structure_constants(&self) -> &[S] {
        &self.structure
    }

    pub fn gram(&self) -> &DenseMatrix<S> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DenseMatrix<S> {
        &self.gram_inv
    }

    pub fn basis_vector(&self, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        v[i] = S::one();
        v
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        let d = self.dim();
        let mut out = vec![S::zero(); d];
        for (i, &xi) in x.iter().enumerate() {
            if xi == S::zero() {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                let w = xi * yj;
                if w == S::zero() {
                    continue;
                }
                let base = (i * d + j) * d;
                for (k, o) in out.iter_mut().enumerate() {
                    *o = *o + w * self.structure[base + k];
                }
            }
        }
        out
    }

    /// Matrix of `ad x`: entry `(k, b)` is the `u_k` coefficient of `[x, u_b]`.
    pub fn ad(&self, x: &[S]) -> DenseMatrix<S> {
        let d = self.dim();
        let mut m = DenseMatrix::zeros(d, d);
        for (a, &xa) in x.iter().enumerate() {
            if xa == S::zero() {
                continue;
            }
            for b in 0..d {
                for k in 0..d {
                    let c = self.c(a, b, k);
                    if c != S::zero() {
                        m.set(k, b, m.get(k, b) + xa * c);
                    }
                }
            }
        }
        m
    }

    pub fn pairing(&self, x: &[S], y: &[S]) -> S {
        crate::linalg::dot(x, &self.gram.matvec(y))
    }

    pub fn structural_residuals(&self) -> StructuralResiduals {
        let d = self.dim();
        let g = &self.gram;
        let mut antisymmetry = 0.0f64;
        let mut gram_symmetry = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                gram_symmetry = gram_symmetry.max((g.get(i, j) - g.get(j, i)).modulus());
                for k in 0..d {
                    antisymmetry = antisymmetry.max((self.c(i, j, k) + self.c(j, i, k)).modulus());
                }
            }
        }
        let mut jacobi = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for m in 0..d {
                        let mut acc = S::zero();
                        for l in 0..d {
                            acc = acc
                                + self.c(i, j, l) * self.c(l, k, m)
                                + self.c(j, k, l) * self.c(l, i, m)
                                + self.c(k, i, l) * self.c(l, j, m);
                        }
                        jacobi = jacobi.max(acc.modulus());
                    }
                }
            }
        }
        // ⟨[x,y],z⟩ + ⟨y,[x,z]⟩ over basis triples
        let mut form_invariance = 0.0f64;
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let mut acc = S::zero();
                    for l in 0..d {
                        acc = acc + self.c(x, y, l) * g.get(l, z) + self.c(x, z, l) * g.get(y, l);
                    }
                    form_invariance = form_invariance.max(acc.modulus());
                }
            }
        }
        StructuralResiduals {
            antisymmetry,
            jacobi,
            gram_symmetry,
            form_invariance,
        }
    }

    /// `‖G‖∞ ‖G⁻¹‖∞`.
    pub fn gram_condition(&self) -> f64 {
        fn row_norm<S: Scalar>(m: &DenseMatrix<S>) -> f64 {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.get(i, j).modulus()).sum::<f64>())
                .fold(0.0, f64::max)
        }
        row_norm(&self.gram) * row_norm(&self.gram_inv)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(S) -> T) -> Result<LieAlgebra<T>> {
        LieAlgebra::new(
            self.labels.clone(),
            self.structure.iter().map(|&x| f(x)).collect(),
            self.gram.map(&f),
        )
    }

    /// Short content hash of the structure constants and form.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.dim() as u64).to_le_bytes());
        for z in self.structure.iter().chain(self.gram.as_slice()) {
            // adding zero folds -0.0 into 0.0
            let c = z.to_c64() + C64::new(0.0, 0.0);
            hasher.update(format!("{:.12e},{:.12e};", c.re, c.im).as_bytes());
        }
        hasher
            .finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Direct sum of Lie algebras with block-diagonal brackets and form.
pub fn direct_sum<S: Scalar>(parts: &[&LieAlgebra<S>]) -> Result<LieAlgebra<S>> {
    let d: usize = parts.iter().map(|p| p.dim()).sum();
    let mut labels = Vec::with_capacity(d);
    let mut structure = vec![S::zero(); d * d * d];
    let mut gram = DenseMatrix::zeros(d, d);
    let mut offset = 0;
    for (block, p) in parts.iter().enumerate() {
        let n = p.dim();
        labels.extend(p.labels().iter().map(|l| format!("{l}@{block}")));
        for i in 0..n {
            for j in 0..n {
                gram.set(offset + i, offset + j, p.gram().get(i, j));
                for k in 0..n {
                    structure[((offset + i) * d + offset + j) * d + offset + k] = p.c(i, j, k);
                }
            }
        }
        offset += n;
    }
    LieAlgebra::new(labels, structure, gram)
}

/// Embed a vector of the `block`-th summand into direct-sum coordinates.
pub fn embed_in_block<S: Scalar>(x: &[S], block: usize, block_dim: usize, total: usize) -> Vec<S> {
    let mut v = vec![S::zero(); total];
    v[block * block_dim..(block + 1) * block_dim].copy_from_slice(x);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    #[test]
    fn rejects_broken_antisymmetry() {
        let labels = vec!["a".into(), "b".into()];
        let mut c = vec![0.0f64; 8];
        c[3] = 1.0; // [a,b] = b without [b,a] = -b
        let gram = DenseMatrix::identity(2);
        let err = LieAlgebra::new(labels, c, gram).unwrap_err();
        assert!(matches!(err, Error::InvariantViolated { ref name, .. } if name == "antisymmetry"));
    }

    #[test]
    fn rejects_degenerate_form() {
        let labels = vec!["x".into()];
        let err = LieAlgebra::new(labels, vec![0.0f64], DenseMatrix::zeros(1, 1)).unwrap_err();
        assert!(matches!(err, Error::SingularForm));
    }

    #[test]
    fn direct_sum_is_blockwise() {
        let (sl2, _) = build_sl::<Q>(2).unwrap();
        let sum = direct_sum(&[&sl2, &sl2]).unwrap();
        assert_eq!(sum.dim(), 6);
        for i in 0..3 {
            for j in 3..6 {
                assert!(sum
                    .bracket(&sum.basis_vector(i), &sum.basis_vector(j))
                    .iter()
                    .all(|&x| x == Q::from_integer(0)));
                assert_eq!(sum.gram().get(i, j), Q::from_integer(0));
            }
        }
        let r = sum.structural_residuals();
        assert_eq!(r.max(), 0.0);
        assert!(r.jacobi <= sl2.structural_residuals().jacobi);
    }

    #[test]
    fn fingerprint_is_stable() {
        let (a, _) = build_sl::<f64>(2).unwrap();
        let (b, _) = build_sl::<f64>(2).unwrap();
        let (c, _) = build_sl::<f64>(3).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint().len(), 16);
    }
}
