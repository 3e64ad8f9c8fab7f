use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    nalgebra_max_abs, svd_null_space, to_nalgebra, DenseMatrix, InvariantSubspace,
};
use crate::C64;

use super::LieAlgebra;

/// Singular value cutoff for eigenspaces of `B`.
const EIGENSPACE_CUTOFF: f64 = 1e-10;

/// A finite-order automorphism `B` of `g` and its grading
/// `g = ⊕_j g_j`, `g_j = ker(B − e^{2πij/n})`.
#[derive(Debug, Clone)]
pub struct Automorphism {
    matrix: DMatrix<C64>,
    order: usize,
    grades: Vec<InvariantSubspace>,
}

impl Automorphism {
    pub fn new(g: &LieAlgebra<C64>, matrix: &DenseMatrix<C64>, order: usize) -> Result<Self> {
        let d = g.dim();
        if order == 0 || matrix.rows() != d || matrix.cols() != d {
            return Err(Error::input(
                "automorphism must be a dim x dim matrix of positive order",
            ));
        }
        let tol = 1e-12;
        let b = to_nalgebra(matrix);
        let bracket = bracket_residual(g, matrix);
        if bracket > tol {
            return Err(Error::invariant(
                "automorphism preserves brackets",
                bracket,
                tol,
            ));
        }
        let gram = to_nalgebra(g.gram());
        let form = nalgebra_max_abs(&(b.transpose() * &gram * &b - &gram));
        if form > tol {
            return Err(Error::invariant(
                "automorphism preserves the form",
                form,
                tol,
            ));
        }
        let mut power = DMatrix::<C64>::identity(d, d);
        for _ in 0..order {
            power = &power * &b;
        }
        let pow_res = nalgebra_max_abs(&(power - DMatrix::<C64>::identity(d, d)));
        if pow_res > tol {
            return Err(Error::invariant("B^n = id", pow_res, tol));
        }

        let mut bases = Vec::with_capacity(order);
        for j in 0..order {
            let shifted = &b - DMatrix::<C64>::identity(d, d) * root_of_unity(j, order);
            let ns = svd_null_space(&shifted, EIGENSPACE_CUTOFF);
            let mut basis = DMatrix::<C64>::zeros(d, ns.len());
            for (c, v) in ns.iter().enumerate() {
                for (r, &x) in v.iter().enumerate() {
                    basis[(r, c)] = x;
                }
            }
            bases.push(basis);
        }
        let total: usize = bases.iter().map(|m| m.ncols()).sum();
        if total != d {
            return Err(Error::invariant(
                "eigenspace dimensions sum to dim g",
                (total as f64 - d as f64).abs(),
                0.0,
            ));
        }
        let grades = InvariantSubspace::from_decomposition(&bases)?;
        Ok(Self {
            matrix: b,
            order,
            grades,
        })
    }

    pub fn identity(g: &LieAlgebra<C64>) -> Result<Self> {
        Self::new(g, &DenseMatrix::identity(g.dim()), 1)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `g_j` with its projection along the other grades.
    pub fn grade(&self, j: usize) -> &InvariantSubspace {
        &self.grades[j % self.order]
    }

    pub fn grades(&self) -> &[InvariantSubspace] {
        &self.grades
    }

    pub fn grade_dims(&self) -> Vec<usize> {
        self.grades.iter().map(|s| s.dim()).collect()
    }

    /// `‖B^n − id‖`.
    pub fn power_residual(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut power = DMatrix::<C64>::identity(d, d);
        for _ in 0..self.order {
            power = &power * &self.matrix;
        }
        nalgebra_max_abs(&(power - DMatrix::<C64>::identity(d, d)))
    }

    /// Max over `j` and basis vectors of `‖B v − ω^j v‖` for `v ∈ g_j`.
    pub fn eigen_residual(&self) -> f64 {
        self.grades
            .iter()
            .enumerate()
            .map(|(j, s)| {
                nalgebra_max_abs(
                    &(&self.matrix * &s.basis - &s.basis * root_of_unity(j, self.order)),
                )
            })
            .fold(0.0, f64::max)
    }

    /// `‖(1 − P_{i+j}) [g_i, g_j]‖`; zero for a genuine grading.
    pub fn grading_residual(&self, g: &LieAlgebra<C64>) -> f64 {
        let mut worst = 0.0f64;
        for (i, gi) in self.grades.iter().enumerate() {
            for (j, gj) in self.grades.iter().enumerate() {
                let target = self.grade(i + j).projector();
                for a in 0..gi.dim() {
                    let x: Vec<C64> = gi.basis.column(a).iter().cloned().collect();
                    for b in 0..gj.dim() {
                        let y: Vec<C64> = gj.basis.column(b).iter().cloned().collect();
                        let br = nalgebra::DVector::from_vec(g.bracket(&x, &y));
                        let off = &br - &target * &br;
                        worst = worst.max(off.iter().map(|z| z.norm()).fold(0.0, f64::max));
                    }
                }
            }
        }
        worst
    }
}

pub(crate) fn root_of_unity(j: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)
}

fn bracket_residual(g: &LieAlgebra<C64>, b: &DenseMatrix<C64>) -> f64 {
    let d = g.dim();
    let cols = b.columns();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let lhs = b.matvec(&g.bracket(&g.basis_vector(i), &g.basis_vector(j)));
            let rhs = g.bracket(&cols[i], &cols[j]);
            for (x, y) in lhs.iter().zip(&rhs) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    worst
}

/// Cyclic permutation of the `copies` identical summands of `g`: the `a`-th
/// copy is sent to the `(a+1)`-th.
pub fn cyclic_automorphism(g: &LieAlgebra<C64>, copies: usize) -> Result<Automorphism> {
    let d = g.dim();
    if copies == 0 || !d.is_multiple_of(copies) {
        return Err(Error::input(
            "dimension is not divisible by the number of copies",
        ));
    }
    let k = d / copies;
    // blocks must be identical and mutually commuting
    for a in 0..copies {
        for i in 0..k {
            for j in 0..k {
                if (g.gram().get(a * k + i, a * k + j) - g.gram().get(i, j)).norm() > 1e-14 {
                    return Err(Error::input("summands carry different forms"));
                }
                for m in 0..d {
                    let here = g.c(a * k + i, a * k + j, m);
                    let expect = if m / k == a {
                        g.c(i, j, m % k)
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    if (here - expect).norm() > 1e-14 {
                        return Err(Error::input("summands are not identical copies"));
                    }
                }
                for b in 0..copies {
                    if b != a {
                        let br = g.bracket(&g.basis_vector(a * k + i), &g.basis_vector(b * k + j));
                        if br.iter().any(|z| z.norm() > 1e-14) {
                            return Err(Error::input("summands do not commute"));
                        }
                        if g.gram().get(a * k + i, b * k + j).norm() > 1e-14 {
                            return Err(Error::input("summands are not orthogonal"));
                        }
                    }
                }
            }
        }
    }
    let m = DenseMatrix::from_fn(d, d, |row, col| {
        let (ba, ia) = (col / k, col % k);
        let (br, ir) = (row / k, row % k);
        if ir == ia && br == (ba + 1) % copies {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Automorphism::new(g, &m, copies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_sl, direct_sum};

    #[test]
    fn swap_on_sl2_sum() {
        let (sl2, _) = build_sl::<C64>(2).unwrap();
        let g = direct_sum(&[&sl2, &sl2]).unwrap();
        let b = cyclic_automorphism(&g, 2).unwrap();
        assert_eq!(b.grade_dims(), vec![3, 3]);
        assert!(b.power_residual() < 1e-15);
        assert!(b.grading_residual(&g) < 1e-12);
        // g_0 vectors have the form (x, x)
        let g0 = &b.grade(0).basis;
        for c in 0..3 {
            for r in 0..3 {
                assert!((g0[(r, c)] - g0[(r + 3, c)]).norm() < 1e-12);
            }
        }
        let g1 = &b.grade(1).basis;
        for c in 0..3 {
            for r in 0..3 {
                assert!((g1[(r, c)] + g1[(r + 3, c)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_has_single_grade() {
        let (sl2, _) = build_sl::<C64>(2).unwrap();
        let b = Automorphism::identity(&sl2).unwrap();
        assert_eq!(b.grade_dims(), vec![3]);
        assert_eq!(b.order(), 1);
    }

    #[test]
    fn three_cycle_grades() {
        let (sl2, _) = build_sl::<C64>(2).unwrap();
        let g = direct_sum(&[&sl2, &sl2, &sl2]).unwrap();
        let b = cyclic_automorphism(&g, 3).unwrap();
        assert_eq!(b.grade_dims(), vec![3, 3, 3]);
        assert!(b.eigen_residual() < 1e-12);
        assert!(b.grading_residual(&g) < 1e-12);
    }

    #[test]
    fn non_automorphism_is_rejected() {
        let (sl2, _) = build_sl::<C64>(2).unwrap();
        let m = DenseMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new(2.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!(Automorphism::new(&sl2, &m, 1).is_err());
    }

    #[test]
    fn unequal_blocks_are_rejected() {
        let (sl2, _) = build_sl::<C64>(2).unwrap();
        let (sl3, _) = build_sl::<C64>(3).unwrap();
        let g = direct_sum(&[&sl2, &sl3]).unwrap();
        assert!(cyclic_automorphism(&g, 2).is_err());
    }
}
