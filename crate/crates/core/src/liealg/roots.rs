use crate::error::{Error, Result};
use crate::linalg::{scaled, sub_vec, DenseMatrix};
use crate::scalar::{max_abs, Scalar};
use crate::C64;

use super::{LieAlgebra, Subalgebra};

/// A positive root `α` with its root vectors normalized so that
/// `⟨e_α, e_{-α}⟩ = 1`.
#[derive(Debug, Clone)]
pub struct PositiveRoot<S> {
    pub label: String,
    /// `α(h_k)` on the Cartan basis of the datum.
    pub values: Vec<S>,
    pub e_pos: Vec<S>,
    pub e_neg: Vec<S>,
    /// `t_α ∈ h` with `⟨t_α, λ⟩ = α(λ)` for `λ ∈ h`.
    pub coroot_dual: Vec<S>,
    /// Expansion in simple roots; empty when unknown.
    pub simple_coeffs: Vec<i64>,
}

/// Cartan subalgebra and root decomposition relative to it.
#[derive(Debug, Clone)]
pub struct RootDatum<S> {
    pub cartan: Vec<Vec<S>>,
    pub positive: Vec<PositiveRoot<S>>,
    /// Indices into `positive` of the simple roots.
    pub simple: Vec<usize>,
}

/// Root vector pair as supplied to [`RootDatum::new`].
pub struct RootPair<S> {
    pub label: String,
    pub e_pos: Vec<S>,
    pub e_neg: Vec<S>,
    pub simple_coeffs: Vec<i64>,
}

impl<S: Scalar> RootDatum<S> {
    /// Validates that the Cartan vectors commute and that each pair is a pair
    /// of opposite weight vectors, then normalizes `e_neg`.
    pub fn new(
        alg: &LieAlgebra<S>,
        cartan: Vec<Vec<S>>,
        pairs: Vec<RootPair<S>>,
        simple: Vec<usize>,
    ) -> Result<Self> {
        let d = alg.dim();
        let tol = S::structural_tolerance() * 10.0;
        for h in &cartan {
            if h.len() != d {
                return Err(Error::input("Cartan vector has wrong length"));
            }
            for h2 in &cartan {
                let r = max_abs(&alg.bracket(h, h2));
                if r > tol {
                    return Err(Error::invariant("cartan subalgebra is abelian", r, tol));
                }
            }
        }
        let r = cartan.len();
        let gram_h = DenseMatrix::from_fn(r, r, |i, j| alg.pairing(&cartan[i], &cartan[j]));
        let gram_h_inv = if r > 0 {
            gram_h.inverse()?
        } else {
            gram_h.clone()
        };

        let mut positive = Vec::with_capacity(pairs.len());
        for p in pairs {
            let norm = alg.pairing(&p.e_pos, &p.e_neg);
            if norm.modulus() <= tol {
                return Err(Error::invariant(
                    format!("root {} pairs nontrivially with its opposite", p.label),
                    norm.modulus(),
                    tol,
                ));
            }
            let e_neg = scaled(S::one() / norm, &p.e_neg);
            let mut values = Vec::with_capacity(r);
            for h in &cartan {
                let he = alg.bracket(h, &p.e_pos);
                let a = alg.pairing(&he, &e_neg);
                let res_pos = max_abs(&sub_vec(&he, &scaled(a, &p.e_pos)));
                let hf = alg.bracket(h, &e_neg);
                let res_neg = max_abs(&sub_vec(&hf, &scaled(-a, &e_neg)));
                let res = res_pos.max(res_neg);
                if res > tol {
                    return Err(Error::invariant(
                        format!("root {} weight relation", p.label),
                        res,
                        tol,
                    ));
                }
                values.push(a);
            }
            let c = gram_h_inv.matvec(&values);
            let mut coroot_dual = vec![S::zero(); d];
            for (k, h) in cartan.iter().enumerate() {
                crate::linalg::axpy(c[k], h, &mut coroot_dual);
            }
            positive.push(PositiveRoot {
                label: p.label,
                values,
                e_pos: p.e_pos,
                e_neg,
                coroot_dual,
                simple_coeffs: p.simple_coeffs,
            });
        }
        if simple.iter().any(|&s| s >= positive.len()) {
            return Err(Error::input("simple root index out of range"));
        }
        Ok(Self {
            cartan,
            positive,
            simple,
        })
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    /// `(α, λ)` through the form, for `λ ∈ h`.
    pub fn pairing(&self, alg: &LieAlgebra<S>, root: usize, lambda: &[S]) -> S {
        alg.pairing(&self.positive[root].coroot_dual, lambda)
    }

    pub fn cartan_gram(&self, alg: &LieAlgebra<S>) -> DenseMatrix<S> {
        let r = self.rank();
        DenseMatrix::from_fn(r, r, |i, j| alg.pairing(&self.cartan[i], &self.cartan[j]))
    }

    /// Max defect of `⟨e_α, e_{-α}⟩ = 1`.
    pub fn normalization_residual(&self, alg: &LieAlgebra<S>) -> f64 {
        self.positive
            .iter()
            .map(|p| (alg.pairing(&p.e_pos, &p.e_neg) - S::one()).modulus())
            .fold(0.0, f64::max)
    }

    /// Max over Cartan basis and roots of `‖[h, e_α] − α(h) e_α‖`.
    pub fn weight_residual(&self, alg: &LieAlgebra<S>) -> f64 {
        let mut worst = 0.0f64;
        for p in &self.positive {
            for (k, h) in self.cartan.iter().enumerate() {
                let a = p.values[k];
                worst = worst.max(max_abs(&sub_vec(
                    &alg.bracket(h, &p.e_pos),
                    &scaled(a, &p.e_pos),
                )));
                worst = worst.max(max_abs(&sub_vec(
                    &alg.bracket(h, &p.e_neg),
                    &scaled(-a, &p.e_neg),
                )));
            }
        }
        worst
    }

    /// Is `λ` (numerically) in the Cartan span?
    pub fn cartan_component_defect(&self, alg: &LieAlgebra<S>, lambda: &[S]) -> f64 {
        // λ - Σ_k c_k h_k with c from the form projection
        let r = self.rank();
        if r == 0 {
            return max_abs(lambda);
        }
        let gh = self.cartan_gram(alg);
        let Ok(ghi) = gh.inverse() else {
            return f64::INFINITY;
        };
        let rhs: Vec<S> = self.cartan.iter().map(|h| alg.pairing(h, lambda)).collect();
        let c = ghi.matvec(&rhs);
        let mut proj = vec![S::zero(); lambda.len()];
        for (k, h) in self.cartan.iter().enumerate() {
            crate::linalg::axpy(c[k], h, &mut proj);
        }
        max_abs(&sub_vec(lambda, &proj))
    }

    /// Push every vector forward along the inclusion of a subalgebra.
    pub fn embed(&self, sub: &Subalgebra<S>) -> RootDatum<S> {
        RootDatum {
            cartan: self.cartan.iter().map(|h| sub.embed_vector(h)).collect(),
            positive: self
                .positive
                .iter()
                .map(|p| PositiveRoot {
                    label: p.label.clone(),
                    values: p.values.clone(),
                    e_pos: sub.embed_vector(&p.e_pos),
                    e_neg: sub.embed_vector(&p.e_neg),
                    coroot_dual: sub.embed_vector(&p.coroot_dual),
                    simple_coeffs: p.simple_coeffs.clone(),
                })
                .collect(),
            simple: self.simple.clone(),
        }
    }

    /// Datum of a direct sum, from data of the summands.
    pub fn direct_sum(parts: &[(&RootDatum<S>, usize)]) -> RootDatum<S> {
        let total: usize = parts.iter().map(|(_, d)| d).sum();
        let n_simple_total: usize = parts.iter().map(|(rd, _)| rd.simple.len()).sum();
        let mut cartan = Vec::new();
        let mut positive = Vec::new();
        let mut simple = Vec::new();
        let mut offset = 0;
        let mut simple_offset = 0;
        for (block, (rd, d)) in parts.iter().enumerate() {
            let lift = |v: &Vec<S>| {
                let mut out = vec![S::zero(); total];
                out[offset..offset + d].copy_from_slice(v);
                out
            };
            let cartan_offset = cartan.len();
            cartan.extend(rd.cartan.iter().map(lift));
            let pos_offset = positive.len();
            for p in &rd.positive {
                let mut values = vec![S::zero(); cartan_offset];
                values.extend_from_slice(&p.values);
                let mut coeffs = vec![0i64; simple_offset];
                coeffs.extend_from_slice(&p.simple_coeffs);
                coeffs.resize(n_simple_total, 0);
                positive.push(PositiveRoot {
                    label: format!("{}@{block}", p.label),
                    values,
                    e_pos: lift(&p.e_pos),
                    e_neg: lift(&p.e_neg),
                    coroot_dual: lift(&p.coroot_dual),
                    simple_coeffs: if p.simple_coeffs.is_empty() {
                        Vec::new()
                    } else {
                        coeffs
                    },
                });
            }
            simple.extend(rd.simple.iter().map(|s| s + pos_offset));
            offset += d;
            simple_offset += rd.simple.len();
        }
        let rank = cartan.len();
        for p in &mut positive {
            p.values.resize(rank, S::zero());
        }
        RootDatum {
            cartan,
            positive,
            simple,
        }
    }
}

/// Orthonormalize `vectors` with respect to a complex symmetric bilinear form
/// (no conjugation). Fails on isotropic pivots that cannot be avoided.
pub(crate) fn bilinear_gram_schmidt(
    vectors: &[Vec<C64>],
    form: impl Fn(&[C64], &[C64]) -> C64,
) -> Result<Vec<Vec<C64>>> {
    let mut pending: Vec<Vec<C64>> = vectors.to_vec();
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    while !pending.is_empty() {
        // pick the candidate with the largest |⟨v,v⟩| to avoid isotropic vectors
        let (best, q) = pending
            .iter()
            .enumerate()
            .map(|(i, v)| (i, form(v, v)))
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("non-empty");
        let v = if q.norm() > 1e-10 {
            pending.swap_remove(best)
        } else {
            // every remaining vector is isotropic; mix the first two
            if pending.len() < 2 {
                return Err(Error::NotFactorizable);
            }
            let a = pending.swap_remove(0);
            let b = pending[0].clone();
            let mixed = crate::linalg::add_vec(&a, &b);
            if form(&mixed, &mixed).norm() <= 1e-10 {
                let mixed = sub_vec(&a, &scaled(C64::new(0.0, 1.0), &b));
                if form(&mixed, &mixed).norm() <= 1e-10 {
                    return Err(Error::NotFactorizable);
                }
                mixed
            } else {
                mixed
            }
        };
        let norm = form(&v, &v).sqrt();
        let e = scaled(C64::new(1.0, 0.0) / norm, &v);
        for p in pending.iter_mut() {
            let c = form(&e, p);
            *p = sub_vec(p, &scaled(c, &e));
        }
        out.push(e);
    }
    Ok(out)
}

impl RootDatum<C64> {
    /// Orthonormal basis `{x_i}` of the Cartan subalgebra.
    pub fn orthonormal_cartan(&self, alg: &LieAlgebra<C64>) -> Result<Vec<Vec<C64>>> {
        bilinear_gram_schmidt(&self.cartan, |a, b| alg.pairing(a, b))
    }
}
