//! Residual evaluators for the dynamical Yang-Baxter identities, the
//! equivariance conditions and the cross-checks between them.
//!
//! Every evaluator returns a [`ResidualReport`] whose relative residual is
//! `abs / (1 + ‖r‖²·dim)`, with `‖·‖` the largest entry modulus. Derivatives
//! go through [`directional_derivative`]; reports on the finite-difference
//! path carry the accumulated error estimate in their metadata.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynfield::{
    adjoint_action, directional_derivative, eta_field, left_right, nabla_prime, DerivativeMode,
    Offset, TensorField,
};
use crate::error::{Error, Result};
use crate::liealg::{LieAlgebra, RootDatum, Subalgebra};
use crate::linalg::DenseMatrix;
use crate::rmat::{rho_cartan, CartanRho, LeviRMatrix, PlBase, QuasiTriangular, ZElement};
use crate::scalar::max_abs;
use crate::tensor::{alt_outer, casimir, cyb, relative_residual, Tensor2, Tensor3};
use crate::C64;

pub const TOL_ANALYTIC: f64 = 1e-9;
pub const TOL_FD: f64 = 1e-6;
pub const TOL_ALGEBRAIC: f64 = 1e-11;
/// Dilation covariance is a scalar identity and is held to rounding.
pub const TOL_DILATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceTier {
    Analytic,
    Fd,
    Algebraic,
}

impl ToleranceTier {
    pub fn value(self) -> f64 {
        match self {
            Self::Analytic => TOL_ANALYTIC,
            Self::Fd => TOL_FD,
            Self::Algebraic => TOL_ALGEBRAIC,
        }
    }
}

impl FromStr for ToleranceTier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "fd" => Ok(Self::Fd),
            "algebraic" => Ok(Self::Algebraic),
            other => Err(Error::input(format!("unknown tolerance tier `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub scenario: String,
    pub check: String,
    /// `λ` as `[re, im]` pairs.
    pub lambda: Vec<[f64; 2]>,
    pub residual_abs: f64,
    pub residual_rel: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub metadata: BTreeMap<String, Value>,
}

impl ResidualReport {
    pub fn new(
        check: &str,
        lambda: &[C64],
        residual_abs: f64,
        r_norm: f64,
        dim: usize,
        tolerance: f64,
    ) -> Self {
        let residual_rel = relative_residual(residual_abs, r_norm, dim);
        Self {
            scenario: String::new(),
            check: check.to_string(),
            lambda: lambda.iter().map(|z| [z.re, z.im]).collect(),
            residual_abs,
            residual_rel,
            tolerance,
            verdict: verdict(residual_rel, tolerance),
            metadata: BTreeMap::new(),
        }
    }

    /// A report compared on the absolute residual only.
    pub fn absolute(check: &str, lambda: &[C64], residual_abs: f64, tolerance: f64) -> Self {
        let mut r = Self::new(check, lambda, residual_abs, 0.0, 0, tolerance);
        r.residual_rel = residual_abs;
        r.verdict = verdict(residual_abs, tolerance);
        r
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn in_scenario(mut self, name: &str) -> Self {
        self.scenario = name.to_string();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn fd_error(&self) -> f64 {
        self.metadata
            .get("fd_error_estimate")
            .and_then(Value::as_f64)
            .unwrap_or(0.0)
    }
}

fn verdict(rel: f64, tol: f64) -> Verdict {
    // NaN residuals fail
    if rel <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn mode_tolerance(mode: DerivativeMode) -> f64 {
    match mode {
        DerivativeMode::Analytic => TOL_ANALYTIC,
        DerivativeMode::FiniteDifference => TOL_FD,
    }
}

fn mode_name(mode: DerivativeMode) -> &'static str {
    match mode {
        DerivativeMode::Analytic => "analytic",
        DerivativeMode::FiniteDifference => "finite_difference",
    }
}

/// Algebraic residuals of an algebra and an optional quasitriangular pair on it.
pub fn structural_checks(
    name: &str,
    g: &LieAlgebra<C64>,
    qt: Option<&QuasiTriangular<C64>>,
) -> Result<Vec<ResidualReport>> {
    let s = g.structural_residuals();
    let basis: Vec<Vec<C64>> = (0..g.dim()).map(|i| g.basis_vector(i)).collect();
    let omega = casimir(g);
    let z = crate::rmat::z_element(g, C64::new(1.0, 0.0))?;
    let mut out = vec![
        ("antisymmetry", s.antisymmetry),
        ("jacobi", s.jacobi),
        ("gram_symmetry", s.gram_symmetry),
        ("form_invariance", s.form_invariance),
        ("casimir_invariance", omega.invariance_defect(g, &basis)),
        ("z_invariance", z.tensor.invariance_defect(g, &basis)),
    ];
    if let Some(qt) = qt {
        out.push(("quasitriangularity", qt.quasitriangularity_residual(g)));
        out.push((
            "cyb_r_l_equals_z_l",
            cyb(g, qt.r_skew()).sub(&qt.z_l(g)).max_abs(),
        ));
    }
    Ok(out
        .into_iter()
        .map(|(check, value)| {
            ResidualReport::absolute(check, &[], value, TOL_ALGEBRAIC).in_scenario(name)
        })
        .collect())
}

/// A base with plain partial derivatives: a subspace of `g` with the basis
/// `h_k` and the inverse Gram matrix of the restricted form.
#[derive(Debug, Clone)]
pub struct AbelianBase {
    pub g: LieAlgebra<C64>,
    pub basis: Vec<Vec<C64>>,
    pub gram_inv: DenseMatrix<C64>,
}

impl AbelianBase {
    pub fn new(g: &LieAlgebra<C64>, basis: Vec<Vec<C64>>) -> Result<Self> {
        let k = basis.len();
        let gram = DenseMatrix::from_fn(k, k, |i, j| g.pairing(&basis[i], &basis[j]));
        Ok(Self {
            g: g.clone(),
            basis,
            gram_inv: gram.inverse().map_err(|_| Error::SingularForm)?,
        })
    }

    pub fn cartan(g: &LieAlgebra<C64>, rd: &RootDatum<C64>) -> Result<Self> {
        Self::new(g, rd.cartan.clone())
    }

    pub fn from_subalgebra(g: &LieAlgebra<C64>, sub: &Subalgebra<C64>) -> Result<Self> {
        Self::new(g, sub.basis_in_parent())
    }

    /// `Σ_{kl} (G⁻¹)_{kl} Alt(h_k ⊗ ∂_{h_l} r)` and the summed error estimate.
    fn derivative_term(
        &self,
        field: &dyn TensorField,
        lambda: &[C64],
        mode: DerivativeMode,
    ) -> Result<(Tensor3<C64>, f64)> {
        let d = self.g.dim();
        let mut acc = Tensor3::zeros(d);
        let mut err = 0.0;
        for (l, hl) in self.basis.iter().enumerate() {
            let dr = directional_derivative(field, lambda, hl, mode)?;
            for (k, hk) in self.basis.iter().enumerate() {
                let w = self.gram_inv.get(k, l);
                if w.norm() == 0.0 {
                    continue;
                }
                acc.add_assign(&alt_outer(hk, &dr.value).scale(w));
                err += 3.0 * w.norm() * max_abs(hk) * dr.error_estimate;
            }
        }
        Ok((acc, err))
    }
}

/// `Σ (G⁻¹)_{kl} Alt(h_k ⊗ ∂_{h_l} r) + CYB(r) = Z`.
pub fn cdybe_abelian(
    field: &dyn TensorField,
    base: &AbelianBase,
    lambda: &[C64],
    z: &ZElement<C64>,
    mode: DerivativeMode,
) -> Result<ResidualReport> {
    let r = field.eval(lambda)?;
    let (deriv, err) = base.derivative_term(field, lambda, mode)?;
    let lhs = deriv.add(&cyb(&base.g, &r));
    let abs = lhs.sub(&z.tensor).max_abs();
    Ok(ResidualReport::new(
        "cdybe_abelian",
        lambda,
        abs,
        r.max_abs(),
        base.g.dim(),
        mode_tolerance(mode),
    )
    .with_meta("derivative", mode_name(mode))
    .with_meta("fd_error_estimate", err))
}

fn equivariance(
    check: &str,
    field: &dyn TensorField,
    g: &LieAlgebra<C64>,
    basis: &[Vec<C64>],
    lambda: &[C64],
    r_l: Option<&Tensor2<C64>>,
) -> Result<ResidualReport> {
    let r = field.eval(lambda)?;
    let mut worst = 0.0_f64;
    let mut err = 0.0_f64;
    for xi in basis {
        let dir = g.bracket(lambda, xi);
        let d = directional_derivative(field, lambda, &dir, DerivativeMode::FiniteDifference)?;
        let mut t = d.value.add(&r.diagonal_act(g, xi));
        if let Some(rl) = r_l {
            t = t.add(&rl.diagonal_act(g, xi));
        }
        worst = worst.max(t.max_abs());
        err = err.max(d.error_estimate);
    }
    Ok(
        ResidualReport::new(check, lambda, worst, r.max_abs(), g.dim(), TOL_FD)
            .with_meta("fd_error_estimate", err),
    )
}

/// `ξ▷r(λ) + [ξ⊗1 + 1⊗ξ, r(λ)] + δ(ξ) = 0` over a basis of `l`.
pub fn quasi_invariance(
    field: &dyn TensorField,
    base: &PlBase,
    lambda: &[C64],
) -> Result<ResidualReport> {
    equivariance(
        "quasi_invariance",
        field,
        &base.g,
        &base.basis,
        lambda,
        Some(&base.r_l),
    )
}

/// `ξ▷r′(λ) + [ξ⊗1 + 1⊗ξ, r′(λ)] = 0` for `ξ` in `basis`.
pub fn invariance(
    field: &dyn TensorField,
    g: &LieAlgebra<C64>,
    basis: &[Vec<C64>],
    lambda: &[C64],
) -> Result<ResidualReport> {
    equivariance("invariance", field, g, basis, lambda, None)
}

/// Left-hand side of the reduced equation without the constant terms.
fn reduced_lhs(
    field: &dyn TensorField,
    base: &PlBase,
    lambda: &[C64],
) -> Result<(Tensor3<C64>, Tensor2<C64>, f64)> {
    let r = field.eval(lambda)?;
    let mut acc = cyb(&base.g, &r);
    let mut err = 0.0;
    for xi in &base.ortho {
        let dir = nabla_prime(&base.g, lambda, xi, &base.l_space)?;
        let d = directional_derivative(field, lambda, &dir, DerivativeMode::FiniteDifference)?;
        acc.add_assign(&alt_outer(xi, &d.value));
        err += 3.0 * max_abs(xi) * d.error_estimate;
    }
    Ok((acc, r, err))
}

/// `Σ_i Alt(ξ_i ⊗ ∇′_{ξ_i} r′) + CYB(r′) = Z − σ Z_l` for the invariant `r′`.
pub fn cdybe_reduced(
    field: &dyn TensorField,
    base: &PlBase,
    lambda: &[C64],
    z: &ZElement<C64>,
    sigma: f64,
) -> Result<ResidualReport> {
    let (lhs, r, err) = reduced_lhs(field, base, lambda)?;
    let target = z.tensor.sub(&base.z_l.scale(C64::new(sigma, 0.0)));
    let abs = lhs.sub(&target).max_abs();
    Ok(ResidualReport::new(
        "cdybe_reduced",
        lambda,
        abs,
        r.max_abs(),
        base.g.dim(),
        TOL_FD,
    )
    .with_meta("z_l_sign", sigma)
    .with_meta("fd_error_estimate", err))
}

/// `Σ_i Alt(ξ_i ⊗ ∇_{η^i} r) + CYB(r) = Z` with the `η`-fields of the base.
pub fn cdybe_pl(
    field: &dyn TensorField,
    base: &PlBase,
    lambda: &[C64],
    z: &ZElement<C64>,
    eta_sign: f64,
) -> Result<ResidualReport> {
    let r = field.eval(lambda)?;
    let mut acc = cyb(&base.g, &r);
    let mut err = 0.0;
    for (xi, eta) in base.ortho.iter().zip(&base.duals) {
        let dir = eta_field(base, lambda, eta, eta_sign)?;
        let d = directional_derivative(field, lambda, &dir, DerivativeMode::FiniteDifference)?;
        acc.add_assign(&alt_outer(xi, &d.value));
        err += 3.0 * max_abs(xi) * d.error_estimate;
    }
    let abs = acc.sub(&z.tensor).max_abs();
    Ok(
        ResidualReport::new("cdybe_pl", lambda, abs, r.max_abs(), base.g.dim(), TOL_FD)
            .with_meta("eta_sign", eta_sign)
            .with_meta("fd_error_estimate", err),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct Equivalence {
    pub pl: ResidualReport,
    pub reduced: ResidualReport,
    pub agree: bool,
}

/// The full equation for `r` against the reduced one for `r + r_l`.
pub fn proposition_equivalence(
    field: &dyn TensorField,
    base: &PlBase,
    lambda: &[C64],
    z: &ZElement<C64>,
) -> Result<Equivalence> {
    let pl = cdybe_pl(field, base, lambda, z, 1.0)?;
    let shifted = Offset {
        inner: &DynRef(field),
        shift: base.r_l.clone(),
    };
    let reduced = cdybe_reduced(&shifted, base, lambda, z, 1.0)?;
    Ok(Equivalence {
        agree: pl.verdict == reduced.verdict,
        pl,
        reduced,
    })
}

struct DynRef<'a>(&'a dyn TensorField);

impl TensorField for DynRef<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>> {
        self.0.eval(lambda)
    }

    fn analytic_derivative(&self, lambda: &[C64], v: &[C64]) -> Option<Result<Tensor2<C64>>> {
        self.0.analytic_derivative(lambda, v)
    }
}

/// `r̃(λ) = r(λ) + ρ(l, ε′, λ) + r_l` over the Cartan subalgebra, where the
/// correct lift uses `ε′ = 1`.
pub struct LiftedOverCartan<'a> {
    levi: &'a LeviRMatrix,
    rho_l: CartanRho,
}

impl<'a> LiftedOverCartan<'a> {
    pub fn new(levi: &'a LeviRMatrix, epsilon_prime: C64) -> Self {
        Self {
            rho_l: CartanRho::new(&levi.base.g, &levi.roots_l, epsilon_prime),
            levi,
        }
    }
}

impl TensorField for LiftedOverCartan<'_> {
    fn dim(&self) -> usize {
        self.levi.base.g.dim()
    }

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>> {
        Ok(self
            .levi
            .r
            .eval(lambda)?
            .add(&self.rho_l.eval(lambda)?)
            .add(&self.levi.base.r_l))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub restriction: ResidualReport,
    pub abelian: ResidualReport,
    pub pl_nearby: ResidualReport,
    pub agree: bool,
}

/// Restriction identity `r|_h + r_l + ρ(l,1,λ) = ρ(g,ε,λ)` at `λ ∈ h`, the
/// abelian equation for the lift built with `ε′`, and the full equation for
/// `r` at the nearby generic point `nearby ∈ l`.
pub fn reduction_crosscheck(
    levi: &LeviRMatrix,
    lambda: &[C64],
    nearby: &[C64],
    epsilon_prime: C64,
) -> Result<CrossCheck> {
    let g = &levi.base.g;
    let r = levi.r.eval(lambda)?;
    let rho_l = CartanRho::new(g, &levi.roots_l, C64::new(1.0, 0.0)).eval(lambda)?;
    let rho_g = rho_cartan(g, &levi.roots_g, levi.epsilon, lambda)?;
    let ident = r.add(&levi.base.r_l).add(&rho_l).sub(&rho_g).max_abs();
    let restriction = ResidualReport::absolute("restriction_identity", lambda, ident, TOL_ANALYTIC);

    let lifted = LiftedOverCartan::new(levi, epsilon_prime);
    let base = AbelianBase::cartan(g, &levi.roots_g)?;
    let z = crate::rmat::z_element(g, levi.epsilon)?;
    let mut abelian = cdybe_abelian(&lifted, &base, lambda, &z, DerivativeMode::FiniteDifference)?
        .with_meta("epsilon_prime", json!([epsilon_prime.re, epsilon_prime.im]));
    // Richardson differences on this entire function sit far below the
    // analytic tier, so the lift is held to it.
    abelian.tolerance = TOL_ANALYTIC;
    abelian.verdict = verdict(abelian.residual_rel, TOL_ANALYTIC);
    abelian.check = "cdybe_abelian_lift".to_string();

    let pl_nearby = cdybe_pl(&levi.r, &levi.base, nearby, &z, 1.0)?;
    Ok(CrossCheck {
        agree: abelian.verdict == pl_nearby.verdict,
        restriction,
        abelian,
        pl_nearby,
    })
}

/// `ρ(g, ε, λ) = ε ρ(g, 1, ελ)`.
pub fn dilation_check(
    g: &LieAlgebra<C64>,
    rd: &RootDatum<C64>,
    epsilon: C64,
    lambda: &[C64],
) -> Result<ResidualReport> {
    let lhs = rho_cartan(g, rd, epsilon, lambda)?;
    let scaled: Vec<C64> = lambda.iter().map(|x| x * epsilon).collect();
    let rhs = rho_cartan(g, rd, C64::new(1.0, 0.0), &scaled)?.scale(epsilon);
    let abs = lhs.sub(&rhs).max_abs();
    Ok(ResidualReport::absolute(
        "dilation",
        lambda,
        abs,
        TOL_DILATION,
    ))
}

/// `W = Σ_i Alt(ξ_i ⊗ ∇′_{ξ_i} r′) + CYB(r′) − Z + Z_l`, which must vanish.
/// The variant with `+¼[Ω₁₂_l, Ω₁₃_l]` in place of `Z_l` is kept in the
/// metadata as `w_alternative`; since `[Ω₁₂_l, Ω₁₃_l] = −[Ω₁₂_l, Ω₂₃_l]` it
/// is the opposite constant and does not vanish.
pub fn w_residual(
    field: &dyn TensorField,
    base: &PlBase,
    lambda: &[C64],
    z: &ZElement<C64>,
) -> Result<ResidualReport> {
    let (lhs, r, err) = reduced_lhs(field, base, lambda)?;
    let w = lhs.sub(&z.tensor).add(&base.z_l);
    let quarter = C64::new(0.25, 0.0);
    let alt13 = crate::tensor::bracket_12_13(&base.g, &base.omega_l, &base.omega_l).scale(quarter);
    let w_alt = lhs.sub(&z.tensor).add(&alt13).max_abs();
    Ok(ResidualReport::new(
        "w_residual",
        lambda,
        w.max_abs(),
        r.max_abs(),
        base.g.dim(),
        TOL_FD,
    )
    .with_meta("w_alternative", w_alt)
    .with_meta("fd_error_estimate", err))
}

/// `ξ^l − ξ^r = [λ, ξ]` and `½(ξ^l + ξ^r) = ∇′_ξ` on the basis of `l`, as
/// separate spectral evaluations.
pub fn chart_identities(base: &PlBase, lambda: &[C64]) -> Result<ResidualReport> {
    let mut diff: f64 = 0.0;
    let mut mean: f64 = 0.0;
    for xi in &base.basis {
        let (l, r) = left_right(&base.g, lambda, xi, &base.l_space)?;
        let ad = adjoint_action(&base.g, lambda, xi);
        let np = nabla_prime(&base.g, lambda, xi, &base.l_space)?;
        for k in 0..xi.len() {
            diff = diff.max((l[k] - r[k] - ad[k]).norm());
            mean = mean.max(((l[k] + r[k]) * 0.5 - np[k]).norm());
        }
    }
    Ok(
        ResidualReport::absolute("chart_identities", lambda, diff.max(mean), TOL_ALGEBRAIC)
            .with_meta("difference", diff)
            .with_meta("mean", mean),
    )
}

/// A random-looking constant skew tensor of unit size, fixed by `seed`.
pub fn skew_perturbation(dim: usize, scale: f64, seed: u64) -> Tensor2<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m: Vec<f64> = (0..dim * dim)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Tensor2::from_fn(dim, |a, b| {
        C64::new(scale * (m[a * dim + b] - m[b * dim + a]) / 2.0, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{
        build_sl, cyclic_automorphism, diagonal_subalgebra, direct_sum, levi_subalgebra,
    };
    use crate::rmat::{full_base, rmat_es, rmat_fm, rmat_levi, z_element, Perturbed};
    use crate::Automorphism;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn cartan_rho_abelian_analytic() {
        for (n, eps) in [(2, c(1.0)), (3, c(2.0)), (3, C64::new(1.0, 0.3))] {
            let (g, rd) = build_sl::<C64>(n).unwrap();
            let rho = CartanRho::new(&g, &rd, eps);
            let base = AbelianBase::cartan(&g, &rd).unwrap();
            let z = z_element(&g, eps).unwrap();
            let mut lambda = vec![c(0.0); g.dim()];
            lambda[0] = C64::new(0.31, 0.07);
            if n == 3 {
                lambda[1] = C64::new(-0.12, 0.2);
            }
            let rep = cdybe_abelian(&rho, &base, &lambda, &z, DerivativeMode::Analytic).unwrap();
            assert!(rep.passed(), "{rep:?}");
            let fd =
                cdybe_abelian(&rho, &base, &lambda, &z, DerivativeMode::FiniteDifference).unwrap();
            assert!(fd.residual_rel < 1e-8, "{fd:?}");
        }
    }

    #[test]
    fn es_identity_abelian_over_whole_algebra() {
        let (g, _) = build_sl::<C64>(2).unwrap();
        let es = rmat_es(&g, &Automorphism::identity(&g).unwrap()).unwrap();
        let basis = (0..3).map(|i| g.basis_vector(i)).collect();
        let base = AbelianBase::new(&g, basis).unwrap();
        let z = z_element(&g, c(1.0)).unwrap();
        let lambda = vec![
            C64::new(0.2, 0.1),
            C64::new(0.1, -0.05),
            C64::new(-0.15, 0.1),
        ];
        let rep = cdybe_abelian(&es, &base, &lambda, &z, DerivativeMode::FiniteDifference).unwrap();
        assert!(rep.residual_rel < 1e-8, "{rep:?}");
    }

    #[test]
    fn fm_sl2_reduced_and_full() {
        let (g, rd) = build_sl::<C64>(2).unwrap();
        let eps = c(0.5);
        let b = Automorphism::identity(&g).unwrap();
        let fm = rmat_fm(&g, &b, full_base(&g, &rd).unwrap(), eps).unwrap();
        let z = z_element(&g, eps).unwrap();
        let lambda = vec![
            C64::new(0.2, 0.1),
            C64::new(0.1, -0.05),
            C64::new(-0.15, 0.1),
        ];
        let red = cdybe_reduced(&fm.r_prime, &fm.base, &lambda, &z, 1.0).unwrap();
        assert!(red.residual_rel < 1e-9, "{red:?}");
        let flipped = cdybe_reduced(&fm.r_prime, &fm.base, &lambda, &z, -1.0).unwrap();
        assert!(!flipped.passed());
        let pl = cdybe_pl(&fm.r, &fm.base, &lambda, &z, 1.0).unwrap();
        assert!(pl.residual_rel < 1e-9, "{pl:?}");
        let bad = cdybe_pl(&fm.r, &fm.base, &lambda, &z, -1.0).unwrap();
        assert!(!bad.passed());
        let w = w_residual(&fm.r_prime, &fm.base, &lambda, &z).unwrap();
        assert!(w.passed());
        assert!(w.metadata["w_alternative"].as_f64().unwrap() > 1e-3);
    }

    #[test]
    fn levi_sl3_full_equation_and_equivariance() {
        let (g, rd) = build_sl::<C64>(3).unwrap();
        let eps = c(0.5);
        let lv = rmat_levi(&g, &rd, &[0], eps).unwrap();
        let z = z_element(&g, eps).unwrap();
        let lambda = lv.base.embed(&[
            C64::new(0.2, 0.05),
            C64::new(0.1, 0.1),
            C64::new(-0.07, 0.02),
            C64::new(0.12, -0.1),
        ]);
        let eq = proposition_equivalence(&lv.r, &lv.base, &lambda, &z).unwrap();
        assert!(eq.agree && eq.pl.passed() && eq.reduced.passed(), "{eq:?}");
        let qi = quasi_invariance(&lv.r, &lv.base, &lambda).unwrap();
        let inv = invariance(&lv.r_prime, &g, &lv.base.basis, &lambda).unwrap();
        assert!(qi.passed() && inv.passed());
        assert!((qi.residual_abs - inv.residual_abs).abs() <= qi.fd_error().max(inv.fd_error()));
        let delta = skew_perturbation(g.dim(), 0.1, 7);
        let bad = Perturbed {
            inner: lv.r.clone(),
            delta,
        };
        let eq = proposition_equivalence(&bad, &lv.base, &lambda, &z).unwrap();
        assert!(eq.agree && !eq.pl.passed() && !eq.reduced.passed());
    }

    #[test]
    fn levi_crosscheck_and_wrong_epsilon() {
        let (g, rd) = build_sl::<C64>(3).unwrap();
        let lv = rmat_levi(&g, &rd, &[0], c(2.0)).unwrap();
        let mut lambda = vec![c(0.0); 8];
        lambda[0] = C64::new(0.3, 0.1);
        lambda[1] = C64::new(-0.1, 0.15);
        let nearby = lv.base.embed(&[lambda[0], lambda[1], c(0.03), c(-0.02)]);
        let ok = reduction_crosscheck(&lv, &lambda, &nearby, c(1.0)).unwrap();
        assert!(
            ok.restriction.passed() && ok.abelian.passed() && ok.pl_nearby.passed(),
            "{ok:?}"
        );
        let bad = reduction_crosscheck(&lv, &lambda, &nearby, c(1.5)).unwrap();
        assert!(!bad.abelian.passed());
    }

    #[test]
    fn fm_swap_reduced() {
        let (sl2, rd) = build_sl::<C64>(2).unwrap();
        let g = direct_sum(&[&sl2, &sl2]).unwrap();
        let b = cyclic_automorphism(&g, 2).unwrap();
        let (sub, rd_l) = diagonal_subalgebra(&g, &sl2, Some(&rd), 2).unwrap();
        let base = PlBase::standard(&g, sub, rd_l.as_ref().unwrap()).unwrap();
        let fm = rmat_fm(&g, &b, base, c(2.0)).unwrap();
        let z = z_element(&g, c(2.0)).unwrap();
        let lambda = fm
            .base
            .embed(&[C64::new(0.2, 0.1), c(0.1), C64::new(0.05, -0.1)]);
        let red = cdybe_reduced(&fm.r_prime, &fm.base, &lambda, &z, 1.0).unwrap();
        assert!(red.residual_rel < 1e-8, "{red:?}");
        let es = rmat_es(&g, &b).unwrap();
        let ab = AbelianBase::from_subalgebra(&g, &fm.base.sub).unwrap();
        let z1 = z_element(&g, c(1.0)).unwrap();
        let rep = cdybe_abelian(&es, &ab, &lambda, &z1, DerivativeMode::FiniteDifference).unwrap();
        assert!(rep.residual_rel < 1e-8, "{rep:?}");
    }

    #[test]
    fn abelian_base_as_trivial_pl_base() {
        let (g, rd) = build_sl::<C64>(3).unwrap();
        let (sub, rd_h) = levi_subalgebra(&g, &rd, &[]).unwrap();
        let base = PlBase::standard(&g, sub, &rd_h).unwrap();
        assert!(base.r_l.max_abs() < 1e-15);
        let rho = CartanRho::new(&g, &rd, c(1.0));
        let z = z_element(&g, c(1.0)).unwrap();
        let lambda = base.embed(&[C64::new(0.3, 0.1), C64::new(-0.1, 0.2)]);
        let pl = cdybe_pl(&rho, &base, &lambda, &z, 1.0).unwrap();
        let ab = cdybe_abelian(
            &rho,
            &AbelianBase::cartan(&g, &rd).unwrap(),
            &lambda,
            &z,
            DerivativeMode::FiniteDifference,
        )
        .unwrap();
        assert!((pl.residual_abs - ab.residual_abs).abs() < 1e-10);
    }

    #[test]
    fn dilation_is_exact() {
        let (g, rd) = build_sl::<C64>(3).unwrap();
        let lambda = vec![
            C64::new(0.3, 0.1),
            C64::new(-0.1, 0.2),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
        ];
        for eps in [c(1.0), c(2.0), C64::new(1.0, 0.3)] {
            assert!(dilation_check(&g, &rd, eps, &lambda).unwrap().passed());
        }
    }

    #[test]
    fn structural_checks_pass() {
        let (g, rd) = build_sl::<C64>(3).unwrap();
        let qt = QuasiTriangular::standard(&g, &rd).unwrap();
        for r in structural_checks("sl3", &g, Some(&qt)).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
    }
}
