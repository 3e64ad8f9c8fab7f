use crate::error::{Error, Result};
use crate::linalg::{sub_vec, DenseMatrix};
use crate::scalar::{max_abs, Scalar};

use super::roots::RootPair;
use super::{LieAlgebra, RootDatum};

/// A subalgebra `l ⊆ g` on which the form stays nondegenerate, together with
/// its orthogonal complement `l^⊥`.
#[derive(Debug, Clone)]
pub struct Subalgebra<S> {
    algebra: LieAlgebra<S>,
    inclusion: DenseMatrix<S>,
    left_inverse: DenseMatrix<S>,
    complement: DenseMatrix<S>,
    closure_residual: f64,
}

impl<S: Scalar> Subalgebra<S> {
    /// `columns` are the basis of `l` in parent coordinates. When
    /// `complement` is `None` it is computed as the form-orthogonal null space.
    pub fn new(
        parent: &LieAlgebra<S>,
        columns: Vec<Vec<S>>,
        labels: Vec<String>,
        complement: Option<Vec<Vec<S>>>,
    ) -> Result<Self> {
        let d = parent.dim();
        let k = columns.len();
        if k == 0 || columns.iter().any(|c| c.len() != d) || labels.len() != k {
            return Err(Error::input("subalgebra basis has wrong shape"));
        }
        let inclusion = DenseMatrix::from_columns(d, &columns);
        let it_g = &inclusion.transpose() * parent.gram();
        let gram_l = &it_g * &inclusion;
        let left_inverse = &gram_l.inverse()? * &it_g;

        let tol = S::structural_tolerance() * 100.0;
        let mut structure = vec![S::zero(); k * k * k];
        let mut closure_residual = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                let br = parent.bracket(&columns[a], &columns[b]);
                let coords = left_inverse.matvec(&br);
                let back = inclusion.matvec(&coords);
                closure_residual = closure_residual.max(max_abs(&sub_vec(&back, &br)));
                structure[(a * k + b) * k..(a * k + b + 1) * k].copy_from_slice(&coords);
            }
        }
        if closure_residual > tol {
            return Err(Error::invariant(
                "subalgebra closed under bracket",
                closure_residual,
                tol,
            ));
        }
        let algebra = LieAlgebra::new(labels, structure, gram_l)?;

        let complement_cols = match complement {
            Some(c) => c,
            None => it_g.null_space(),
        };
        if complement_cols.len() + k != d {
            return Err(Error::input(format!(
                "complement has dimension {}, expected {}",
                complement_cols.len(),
                d - k
            )));
        }
        let complement = DenseMatrix::from_columns(d, &complement_cols);
        if d > k {
            let ortho = (&it_g * &complement).max_abs();
            if ortho > tol {
                return Err(Error::invariant(
                    "complement orthogonal to subalgebra",
                    ortho,
                    tol,
                ));
            }
            let comp_gram = &(&complement.transpose() * parent.gram()) * &complement;
            comp_gram.inverse()?;
        }
        Ok(Self {
            algebra,
            inclusion,
            left_inverse,
            complement,
            closure_residual,
        })
    }

    /// The subalgebra as a Lie algebra in its own coordinates.
    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.inclusion.cols()
    }

    pub fn parent_dim(&self) -> usize {
        self.inclusion.rows()
    }

    pub fn inclusion(&self) -> &DenseMatrix<S> {
        &self.inclusion
    }

    pub fn complement(&self) -> &DenseMatrix<S> {
        &self.complement
    }

    pub fn complement_dim(&self) -> usize {
        self.complement.cols()
    }

    pub fn basis_in_parent(&self) -> Vec<Vec<S>> {
        self.inclusion.columns()
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }

    pub fn embed_vector(&self, x: &[S]) -> Vec<S> {
        self.inclusion.matvec(x)
    }

    /// Coordinates in `l` of the form-orthogonal projection of `y`.
    pub fn restrict_vector(&self, y: &[S]) -> Vec<S> {
        self.left_inverse.matvec(y)
    }

    /// `‖[l, l^⊥]‖` measured along `l`; zero when `l^⊥` is an `l`-module.
    pub fn complement_module_residual(&self, parent: &LieAlgebra<S>) -> f64 {
        let mut worst = 0.0f64;
        for x in self.inclusion.columns() {
            for y in self.complement.columns() {
                let br = parent.bracket(&x, &y);
                worst = worst.max(max_abs(&self.left_inverse.matvec(&br)));
            }
        }
        worst
    }

    /// `⟨l, l^⊥⟩`.
    pub fn orthogonality_residual(&self, parent: &LieAlgebra<S>) -> f64 {
        if self.complement_dim() == 0 {
            return 0.0;
        }
        (&(&self.inclusion.transpose() * parent.gram()) * &self.complement).max_abs()
    }
}

/// Levi subalgebra of `sl_n` (or any datum with simple-root expansions)
/// spanned by `h` and the root spaces of roots in the span of `simple_subset`.
/// Returns the subalgebra and its root datum in subalgebra coordinates.
pub fn levi_subalgebra<S: Scalar>(
    parent: &LieAlgebra<S>,
    rd: &RootDatum<S>,
    simple_subset: &[usize],
) -> Result<(Subalgebra<S>, RootDatum<S>)> {
    let n_simple = rd.simple.len();
    if let Some(&bad) = simple_subset.iter().find(|&&s| s >= n_simple) {
        return Err(Error::input(format!(
            "simple root index {bad} out of range (have {n_simple})"
        )));
    }
    if rd
        .positive
        .iter()
        .any(|p| p.simple_coeffs.len() != n_simple)
    {
        return Err(Error::input("root datum lacks simple-root expansions"));
    }
    let included: Vec<bool> = rd
        .positive
        .iter()
        .map(|p| {
            p.simple_coeffs
                .iter()
                .enumerate()
                .all(|(i, &c)| c == 0 || simple_subset.contains(&i))
        })
        .collect();

    let mut columns: Vec<Vec<S>> = rd.cartan.clone();
    let mut labels: Vec<String> = (0..rd.rank())
        .map(|i| cartan_label(parent, &rd.cartan[i], i))
        .collect();
    let mut neg_cols = Vec::new();
    let mut neg_labels = Vec::new();
    let mut complement = Vec::new();
    let mut kept = Vec::new();
    for (idx, p) in rd.positive.iter().enumerate() {
        if included[idx] {
            columns.push(p.e_pos.clone());
            labels.push(format!("e_{}", p.label));
            neg_cols.push(p.e_neg.clone());
            neg_labels.push(format!("f_{}", p.label));
            kept.push(idx);
        } else {
            complement.push(p.e_pos.clone());
            complement.push(p.e_neg.clone());
        }
    }
    columns.extend(neg_cols);
    labels.extend(neg_labels);
    let sub = Subalgebra::new(parent, columns, labels, Some(complement))?;

    let l = sub.algebra();
    let cartan = rd.cartan.iter().map(|h| sub.restrict_vector(h)).collect();
    let pairs = kept
        .iter()
        .map(|&idx| {
            let p = &rd.positive[idx];
            RootPair {
                label: p.label.clone(),
                e_pos: sub.restrict_vector(&p.e_pos),
                e_neg: sub.restrict_vector(&p.e_neg),
                simple_coeffs: simple_subset.iter().map(|&s| p.simple_coeffs[s]).collect(),
            }
        })
        .collect();
    let simple = simple_subset
        .iter()
        .map(|&s| {
            kept.iter()
                .position(|&k| k == rd.simple[s])
                .expect("simple root is kept")
        })
        .collect();
    let l_rd = RootDatum::new(l, cartan, pairs, simple)?;
    Ok((sub, l_rd))
}

fn cartan_label<S: Scalar>(parent: &LieAlgebra<S>, h: &[S], fallback: usize) -> String {
    let nz: Vec<usize> = (0..h.len()).filter(|&i| h[i] != S::zero()).collect();
    if nz.len() == 1 && h[nz[0]] == S::one() {
        parent.labels()[nz[0]].clone()
    } else {
        format!("h{}", fallback + 1)
    }
}

/// Diagonal copy `{(x, …, x)}` of `block` inside the `copies`-fold direct
/// sum, with the root datum carried along.
pub fn diagonal_subalgebra<S: Scalar>(
    sum: &LieAlgebra<S>,
    block: &LieAlgebra<S>,
    block_rd: Option<&RootDatum<S>>,
    copies: usize,
) -> Result<(Subalgebra<S>, Option<RootDatum<S>>)> {
    let k = block.dim();
    if copies == 0 || sum.dim() != k * copies {
        return Err(Error::input(
            "direct sum dimension is not a multiple of the block",
        ));
    }
    let diag = |x: &[S]| -> Vec<S> {
        let mut v = Vec::with_capacity(k * copies);
        for _ in 0..copies {
            v.extend_from_slice(x);
        }
        v
    };
    let columns = (0..k).map(|i| diag(&block.basis_vector(i))).collect();
    let labels = block.labels().iter().map(|l| format!("{l}@diag")).collect();
    let sub = Subalgebra::new(sum, columns, labels, None)?;
    let rd = match block_rd {
        None => None,
        Some(rd) => {
            // In subalgebra coordinates the diagonal copy has the block's
            // coordinates; only the form is rescaled by `copies`.
            let pairs = rd
                .positive
                .iter()
                .map(|p| RootPair {
                    label: p.label.clone(),
                    e_pos: p.e_pos.clone(),
                    e_neg: p.e_neg.clone(),
                    simple_coeffs: p.simple_coeffs.clone(),
                })
                .collect();
            Some(RootDatum::new(
                sub.algebra(),
                rd.cartan.clone(),
                pairs,
                rd.simple.clone(),
            )?)
        }
    };
    Ok((sub, rd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_sl, direct_sum};
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    #[test]
    fn gl2_levi_in_sl3() {
        let (g, rd) = build_sl::<Q>(3).unwrap();
        let (l, lrd) = levi_subalgebra(&g, &rd, &[0]).unwrap();
        assert_eq!(l.dim(), 4);
        assert_eq!(l.complement_dim(), 4);
        assert_eq!(lrd.positive.len(), 1);
        assert_eq!(lrd.rank(), 2);
        assert_eq!(l.complement_module_residual(&g), 0.0);
        assert_eq!(l.orthogonality_residual(&g), 0.0);
        assert_eq!(l.algebra().structural_residuals().max(), 0.0);
        assert_eq!(lrd.normalization_residual(l.algebra()), 0.0);
    }

    #[test]
    fn empty_and_full_levi() {
        let (g, rd) = build_sl::<Q>(3).unwrap();
        let (h, hrd) = levi_subalgebra(&g, &rd, &[]).unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.complement_dim(), 6);
        assert!(hrd.positive.is_empty());
        let (full, frd) = levi_subalgebra(&g, &rd, &[0, 1]).unwrap();
        assert_eq!(full.dim(), 8);
        assert_eq!(full.complement_dim(), 0);
        assert_eq!(frd.positive.len(), 3);
    }

    #[test]
    fn levi_rejects_out_of_range() {
        let (g, rd) = build_sl::<Q>(3).unwrap();
        assert!(levi_subalgebra(&g, &rd, &[2]).is_err());
    }

    #[test]
    fn diagonal_copy_has_doubled_form() {
        let (sl2, rd) = build_sl::<Q>(2).unwrap();
        let sum = direct_sum(&[&sl2, &sl2]).unwrap();
        let (d, drd) = diagonal_subalgebra(&sum, &sl2, Some(&rd), 2).unwrap();
        assert_eq!(d.algebra().gram().get(0, 0), Q::from_integer(4));
        let drd = drd.unwrap();
        assert_eq!(drd.normalization_residual(d.algebra()), 0.0);
        assert_eq!(drd.positive[0].e_neg[2], Q::new(1, 2));
        assert_eq!(d.complement_dim(), 3);
    }

    #[test]
    fn non_closed_span_is_rejected() {
        let (g, _) = build_sl::<Q>(2).unwrap();
        // span{e, f} is not closed
        let err = Subalgebra::new(
            &g,
            vec![g.basis_vector(1), g.basis_vector(2)],
            vec!["e".into(), "f".into()],
            None,
        );
        assert!(err.is_err());
    }
}
