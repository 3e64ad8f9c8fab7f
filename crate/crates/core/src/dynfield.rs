//! Vector fields on the base manifolds and directional derivatives of
//! tensor-valued functions.
//!
//! Points of the abelian base are elements of a Cartan subalgebra; points of
//! the Poisson-Lie base are coordinates `λ ∈ l` of the exponential chart.
//! In that chart the left- and right-invariant fields generated by `ξ ∈ l`
//! become the constant-coefficient directions
//! `ξ^l ↦ ad λ / (1 − e^{−ad λ}) ξ` and `ξ^r ↦ ad λ / (e^{ad λ} − 1) ξ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;
use crate::linalg::{euclid, to_nalgebra, InvariantSubspace};
use crate::matfun::{apply_on_subspace, spectral_decompose, ScalarFun, SpectralData, MAX_DEFECT};
use crate::rmat::PlBase;
use crate::tensor::Tensor2;
use crate::C64;

/// A function `λ ↦ r(λ)` with values in `g⊗g`.
pub trait TensorField: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>>;

    /// Closed-form derivative along `v`, when one is known.
    fn analytic_derivative(&self, _lambda: &[C64], _v: &[C64]) -> Option<Result<Tensor2<C64>>> {
        None
    }
}

/// Wraps a closure as a [`TensorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[C64]) -> Result<Tensor2<C64>> + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> TensorField for FnField<F>
where
    F: Fn(&[C64]) -> Result<Tensor2<C64>> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>> {
        (self.f)(lambda)
    }
}

/// `λ ↦ r(λ) + shift`.
pub struct Offset<'a, F: TensorField> {
    pub inner: &'a F,
    pub shift: Tensor2<C64>,
}

impl<F: TensorField> TensorField for Offset<'_, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>> {
        Ok(self.inner.eval(lambda)?.add(&self.shift))
    }

    fn analytic_derivative(&self, lambda: &[C64], v: &[C64]) -> Option<Result<Tensor2<C64>>> {
        self.inner.analytic_derivative(lambda, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Cartan subalgebra with plain partial derivatives.
    Abelian,
    /// Exponential chart around the identity of the group of `l`.
    Sts,
}

/// A validated base point with the spectral data of `ad λ` on the base.
#[derive(Debug, Clone)]
pub struct BasePoint {
    pub coords: Vec<C64>,
    pub chart: Chart,
    pub spectrum: SpectralData,
}

impl BasePoint {
    /// `ad λ` restricted to `space` must be semisimple.
    pub fn new(
        g: &LieAlgebra<C64>,
        coords: Vec<C64>,
        chart: Chart,
        space: &InvariantSubspace,
    ) -> Result<Self> {
        let a = to_nalgebra(&g.ad(&coords));
        let spectrum = spectral_decompose(&space.compress(&a))?;
        if spectrum.defect > MAX_DEFECT {
            return Err(Error::NonSemisimple {
                defect: spectrum.defect,
            });
        }
        Ok(Self {
            coords,
            chart,
            spectrum,
        })
    }
}

fn profile_apply(
    g: &LieAlgebra<C64>,
    lambda: &[C64],
    xi: &[C64],
    space: &InvariantSubspace,
    f: &ScalarFun,
) -> Result<Vec<C64>> {
    let a = to_nalgebra(&g.ad(lambda));
    let m = apply_on_subspace(f, &a, space)?;
    Ok((m * DVector::from_column_slice(xi))
        .iter()
        .copied()
        .collect())
}

/// `∇′_ξ` direction: `(½ ad λ) coth(½ ad λ) ξ`, computed on the invariant
/// subspace `space ∋ ξ`.
pub fn nabla_prime(
    g: &LieAlgebra<C64>,
    lambda: &[C64],
    xi: &[C64],
    space: &InvariantSubspace,
) -> Result<Vec<C64>> {
    profile_apply(g, lambda, xi, space, &ScalarFun::half_coth())
}

/// `ξ ▷` direction: `[λ, ξ]`.
pub fn adjoint_action(g: &LieAlgebra<C64>, lambda: &[C64], xi: &[C64]) -> Vec<C64> {
    g.bracket(lambda, xi)
}

/// Chart directions of the left- and right-invariant fields generated by `ξ`.
pub fn left_right(
    g: &LieAlgebra<C64>,
    lambda: &[C64],
    xi: &[C64],
    space: &InvariantSubspace,
) -> Result<(Vec<C64>, Vec<C64>)> {
    let left = profile_apply(
        g,
        lambda,
        xi,
        space,
        &ScalarFun::new(crate::matfun::FunKind::LeftTrivialization),
    )?;
    let right = profile_apply(
        g,
        lambda,
        xi,
        space,
        &ScalarFun::new(crate::matfun::FunKind::RightTrivialization),
    )?;
    Ok((left, right))
}

/// Chart direction of the field `∇_η` for a covector `η ∈ l*`, given by its
/// values on the basis of `l`:
/// `r_l(η)^r − r_l(η)^l + ½(Ω_l(η)^l + Ω_l(η)^r)`, with `sign` multiplying the
/// `r_l` term. Returned in `g` coordinates.
pub fn eta_field(base: &PlBase, lambda: &[C64], eta: &[C64], sign: f64) -> Result<Vec<C64>> {
    let r_eta = base.embed(&base.qt.r_skew().contract_first(eta));
    let om_eta = base.embed(&base.qt.omega().contract_first(eta));
    let (rl, rr) = left_right(&base.g, lambda, &r_eta, &base.l_space)?;
    let (ol, or) = left_right(&base.g, lambda, &om_eta, &base.l_space)?;
    Ok((0..base.g.dim())
        .map(|k| (rr[k] - rl[k]) * sign + (ol[k] + or[k]) * 0.5)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    FiniteDifference,
    Analytic,
}

#[derive(Debug, Clone)]
pub struct Derivative {
    pub value: Tensor2<C64>,
    pub error_estimate: f64,
}

/// Base step of the central differences, before scaling by `1 + ‖λ‖`.
pub const FD_STEP: f64 = 1e-4;

fn central(field: &dyn TensorField, lambda: &[C64], u: &[C64], h: f64) -> Result<Tensor2<C64>> {
    let shift = |t: f64| -> Vec<C64> { lambda.iter().zip(u).map(|(l, x)| l + x * t).collect() };
    let plus = field.eval(&shift(h))?;
    let minus = field.eval(&shift(-h))?;
    Ok(plus.sub(&minus).scale(C64::new(0.5 / h, 0.0)))
}

fn richardson(
    field: &dyn TensorField,
    lambda: &[C64],
    u: &[C64],
    h: f64,
) -> Result<(Tensor2<C64>, f64)> {
    let coarse = central(field, lambda, u, h)?;
    let fine = central(field, lambda, u, h / 2.0)?;
    let value = fine
        .scale(C64::new(4.0 / 3.0, 0.0))
        .sub(&coarse.scale(C64::new(1.0 / 3.0, 0.0)));
    let truncation = value.sub(&fine).max_abs();
    Ok((value, truncation))
}

/// Derivative of `field` at `λ` along `v`.
///
/// The finite-difference path uses Richardson-extrapolated central
/// differences with steps `h` and `h/2` along `v/‖v‖`. Its error estimate is
/// the gap to the finer central difference plus a rounding floor. When a
/// stencil point hits a pole guard the step shrinks tenfold once.
pub fn directional_derivative(
    field: &dyn TensorField,
    lambda: &[C64],
    v: &[C64],
    mode: DerivativeMode,
) -> Result<Derivative> {
    let d = field.dim();
    let norm = euclid(v);
    if norm == 0.0 {
        return Ok(Derivative {
            value: Tensor2::zeros(d),
            error_estimate: 0.0,
        });
    }
    if mode == DerivativeMode::Analytic {
        return match field.analytic_derivative(lambda, v) {
            Some(value) => Ok(Derivative {
                value: value?,
                error_estimate: 0.0,
            }),
            None => Err(Error::input("no closed-form derivative for this field")),
        };
    }
    let u: Vec<C64> = v.iter().map(|x| x / norm).collect();
    let h = FD_STEP * (1.0 + euclid(lambda));
    let (value, truncation, h) = match richardson(field, lambda, &u, h) {
        Ok((value, t)) => (value, t, h),
        Err(Error::PoleProximity { .. }) => {
            let (value, t) = richardson(field, lambda, &u, h / 10.0)?;
            (value, t, h / 10.0)
        }
        Err(e) => return Err(e),
    };
    let centre = field.eval(lambda)?.max_abs();
    let rounding = 4.0 * f64::EPSILON * (1.0 + centre) / h;
    Ok(Derivative {
        value: value.scale(C64::new(norm, 0.0)),
        error_estimate: (truncation + rounding) * norm,
    })
}

/// The operator `ad λ` as a dense complex matrix.
pub fn ad_matrix(g: &LieAlgebra<C64>, lambda: &[C64]) -> DMatrix<C64> {
    to_nalgebra(&g.ad(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::build_sl;
    use crate::linalg::euclid;
    use crate::matfun::coth;
    use crate::rmat::{full_base, CartanRho};
    use crate::tensor::op_to_tensor;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn whole(d: usize) -> InvariantSubspace {
        InvariantSubspace::new(DMatrix::identity(d, d), DMatrix::identity(d, d)).unwrap()
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn nabla_prime_reference_values() {
        let (g, _) = build_sl::<C64>(2).unwrap();
        let w = whole(3);
        let e = g.basis_vector(1);
        assert!(close(
            &nabla_prime(&g, &[c(0.0); 3], &e, &w).unwrap(),
            &e,
            1e-15
        ));
        let lambda = vec![c(0.5), c(0.0), c(0.0)];
        let v = nabla_prime(&g, &lambda, &e, &w).unwrap();
        let k = 0.5 * coth(c(0.5));
        assert!((v[1] - k).norm() < 1e-13 && v[0].norm() < 1e-13 && v[2].norm() < 1e-13);
        let h = g.basis_vector(0);
        assert!(close(&nabla_prime(&g, &lambda, &h, &w).unwrap(), &h, 1e-13));
    }

    #[test]
    fn adjoint_action_reference_values() {
        let (g, _) = build_sl::<C64>(2).unwrap();
        let lambda = vec![c(0.5), c(0.0), c(0.0)];
        assert!(euclid(&adjoint_action(&g, &lambda, &lambda)) < 1e-15);
        let e = g.basis_vector(1);
        assert!(close(&adjoint_action(&g, &lambda, &e), &e, 1e-15));
    }

    #[test]
    fn left_right_consistency() {
        let (g, _) = build_sl::<C64>(2).unwrap();
        let w = whole(3);
        let lambda = vec![
            C64::new(0.2, 0.1),
            C64::new(-0.15, 0.05),
            C64::new(0.1, -0.2),
        ];
        let xi = vec![c(0.3), C64::new(0.7, 0.2), c(-1.1)];
        let (l, r) = left_right(&g, &lambda, &xi, &w).unwrap();
        let diff: Vec<C64> = l.iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(close(&diff, &adjoint_action(&g, &lambda, &xi), 1e-12));
        let mean: Vec<C64> = l.iter().zip(&r).map(|(a, b)| (a + b) * 0.5).collect();
        assert!(close(
            &mean,
            &nabla_prime(&g, &lambda, &xi, &w).unwrap(),
            1e-12
        ));
        let (l0, r0) = left_right(&g, &[c(0.0); 3], &xi, &w).unwrap();
        assert!(close(&l0, &xi, 1e-15) && close(&r0, &xi, 1e-15));
    }

    #[test]
    fn eta_field_at_origin_is_omega_of_eta() {
        let (g, rd) = build_sl::<C64>(2).unwrap();
        let base = full_base(&g, &rd).unwrap();
        for (xi, eta) in base.ortho.iter().zip(&base.duals) {
            let v = eta_field(&base, &[c(0.0); 3], eta, 1.0).unwrap();
            assert!(close(&v, xi, 1e-13));
        }
        let zero = eta_field(&base, &[c(0.2), c(0.1), c(0.0)], &[c(0.0); 3], 1.0).unwrap();
        assert!(euclid(&zero) == 0.0);
    }

    #[test]
    fn derivative_of_constant_and_linear_fields() {
        let (g, _) = build_sl::<C64>(2).unwrap();
        let konst = Tensor2::outer(&g.basis_vector(1), &g.basis_vector(2));
        let k2 = konst.clone();
        let fk = FnField::new(3, move |_| Ok(k2.clone()));
        let lambda = vec![c(0.1), c(0.2), c(0.3)];
        let v = vec![c(1.0), c(-2.0), C64::new(0.0, 1.0)];
        let d = directional_derivative(&fk, &lambda, &v, DerivativeMode::FiniteDifference).unwrap();
        assert!(d.value.max_abs() < 1e-12);
        let fl = FnField::new(3, move |l: &[C64]| Ok(konst.scale(l[0] * 3.0)));
        let d = directional_derivative(&fl, &lambda, &v, DerivativeMode::FiniteDifference).unwrap();
        assert!((d.value.get(1, 2) - 3.0).norm() < 1e-10);
    }

    #[test]
    fn analytic_and_fd_agree_for_cartan_rho() {
        let (g, rd) = build_sl::<C64>(2).unwrap();
        let rho = CartanRho::new(&g, &rd, c(1.0));
        let lambda = vec![c(0.5), c(0.0), c(0.0)];
        let v = vec![c(0.5_f64.sqrt()), c(0.0), c(0.0)];
        let a = directional_derivative(&rho, &lambda, &v, DerivativeMode::Analytic).unwrap();
        let f =
            directional_derivative(&rho, &lambda, &v, DerivativeMode::FiniteDifference).unwrap();
        let actual = a.value.sub(&f.value).max_abs();
        assert!(actual < 1e-7);
        assert!(f.error_estimate >= actual / 10.0);
    }

    #[test]
    fn invariant_field_relation_on_root_directions() {
        // For invariant r′ and λ ∈ h: ∇′_{e_{−α}} r′ = ½coth(½α(λ)) [e_{−α}⊗1 + 1⊗e_{−α}, r′].
        let (g, rd) = build_sl::<C64>(2).unwrap();
        let w = whole(3);
        let f = ScalarFun::trig_f0(c(0.5));
        let g2 = g.clone();
        let field = FnField::new(3, move |l: &[C64]| {
            let a = to_nalgebra(&g2.ad(l));
            op_to_tensor(
                &g2,
                &crate::linalg::from_nalgebra(&apply_on_subspace(&f, &a, &whole(3))?),
            )
        });
        let lambda = vec![C64::new(0.35, 0.1), c(0.0), c(0.0)];
        let fneg = rd.positive[0].e_neg.clone();
        let alpha = g.pairing(&rd.positive[0].coroot_dual, &lambda);
        let dir = nabla_prime(&g, &lambda, &fneg, &w).unwrap();
        let d = directional_derivative(&field, &lambda, &dir, DerivativeMode::FiniteDifference)
            .unwrap();
        let rhs = field
            .eval(&lambda)
            .unwrap()
            .diagonal_act(&g, &fneg)
            .scale(0.5 * coth(alpha / 2.0));
        assert!(d.value.sub(&rhs).max_abs() < 1e-7);
        // ∇′ along Cartan directions is the plain partial derivative
        let h = g.basis_vector(0);
        assert!(close(&nabla_prime(&g, &lambda, &h, &w).unwrap(), &h, 1e-12));
    }

    #[test]
    fn base_point_rejects_nilpotent() {
        let (g, _) = build_sl::<C64>(2).unwrap();
        let err =
            BasePoint::new(&g, vec![c(0.0), c(1.0), c(0.0)], Chart::Sts, &whole(3)).unwrap_err();
        assert!(matches!(err, Error::NonSemisimple { .. }));
        BasePoint::new(&g, vec![c(0.3), c(0.1), c(0.2)], Chart::Sts, &whole(3)).unwrap();
    }
}
