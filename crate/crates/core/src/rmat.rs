//! Quasitriangular structures, `Z`-elements and the dynamical r-matrix
//! constructors.
//!
//! The constructors on a Poisson-Lie base all have the shape
//! `r(λ) = T(Σ_j f_j(ad λ)|_{V_j}) − shift`, where `V_j` are `ad λ`-invariant
//! subspaces, `f_j` scalar profiles and `T` the operator-to-tensor map. This
//! is [`SpectralField`]; the Levi, ES and FM families differ only in the
//! subspaces and profiles they feed in.

use nalgebra::DMatrix;

use crate::dynfield::TensorField;
use crate::error::{Error, Result};
use crate::liealg::bilinear_gram_schmidt;
use crate::liealg::{levi_subalgebra, Automorphism, LieAlgebra, RootDatum, Subalgebra};
use crate::linalg::{from_nalgebra, to_nalgebra, DenseMatrix, InvariantSubspace};
use crate::matfun::{apply_on_subspace, check_spectrum, csch2, ScalarFun};
use crate::scalar::Scalar;
use crate::tensor::{bracket_12_23, casimir, cyb, op_to_tensor, Tensor2, Tensor3};
use crate::C64;

fn structural_tol<S: Scalar>(scale: f64) -> f64 {
    S::structural_tolerance() * 10.0 * (1.0 + scale).powi(2)
}

/// A quasitriangular structure `(r_l, Ω_l)` on `l`: `r_l` skew, `Ω_l`
/// symmetric, invariant and nondegenerate, `CYB(r_l + ½Ω_l) = 0`.
/// Coordinates are those of `l`.
#[derive(Debug, Clone)]
pub struct QuasiTriangular<S> {
    r: Tensor2<S>,
    omega: Tensor2<S>,
}

impl<S: Scalar> QuasiTriangular<S> {
    pub fn new(l: &LieAlgebra<S>, r: Tensor2<S>, omega: Tensor2<S>) -> Result<Self> {
        if r.dim() != l.dim() || omega.dim() != l.dim() {
            return Err(Error::input(
                "quasitriangular pair does not match the algebra dimension",
            ));
        }
        let scale = r.max_abs().max(omega.max_abs());
        let tol = structural_tol::<S>(scale);
        let skew = r.skew_defect();
        if skew > tol {
            return Err(Error::invariant("r_l is skew", skew, tol));
        }
        let sym = omega.symmetry_defect();
        if sym > tol {
            return Err(Error::invariant("Ω_l is symmetric", sym, tol));
        }
        let basis: Vec<Vec<S>> = (0..l.dim()).map(|i| l.basis_vector(i)).collect();
        let inv = omega.invariance_defect(l, &basis);
        if inv > tol {
            return Err(Error::invariant("Ω_l is invariant", inv, tol));
        }
        if omega.to_matrix().inverse().is_err() {
            return Err(Error::NotFactorizable);
        }
        let qt = Self { r, omega };
        let res = qt.quasitriangularity_residual(l);
        if res > tol {
            return Err(Error::invariant("CYB(r_l + ½Ω_l) = 0", res, tol));
        }
        Ok(qt)
    }

    /// Standard structure from a root datum: `r₊ = ½Ω_h + Σ_{α>0} e_α⊗e_{−α}`
    /// and `r_l = r₊ − ½Ω_l`, with `Ω_l` the Casimir of the form.
    pub fn standard(l: &LieAlgebra<S>, rd: &RootDatum<S>) -> Result<Self> {
        let d = l.dim();
        let half = S::one() / S::from_i64(2);
        let mut r_plus = Tensor2::zeros(d);
        if rd.rank() > 0 {
            let gh_inv = rd.cartan_gram(l).inverse()?;
            for (i, hi) in rd.cartan.iter().enumerate() {
                for (j, hj) in rd.cartan.iter().enumerate() {
                    r_plus = r_plus.add(&Tensor2::outer(hi, hj).scale(half * gh_inv.get(i, j)));
                }
            }
        }
        for p in &rd.positive {
            r_plus = r_plus.add(&Tensor2::outer(&p.e_pos, &p.e_neg));
        }
        let tol = structural_tol::<S>(r_plus.max_abs());
        let c = cyb(l, &r_plus).max_abs();
        if c > tol {
            return Err(Error::invariant(
                "CYB(r₊) = 0 for the standard structure",
                c,
                tol,
            ));
        }
        let omega = casimir(l);
        let r = r_plus.sub(&omega.scale(half));
        Self::new(l, r, omega)
    }

    pub fn r_skew(&self) -> &Tensor2<S> {
        &self.r
    }

    pub fn omega(&self) -> &Tensor2<S> {
        &self.omega
    }

    /// `r_l + ½Ω_l`.
    pub fn r_plus(&self) -> Tensor2<S> {
        self.r.add(&self.omega.scale(S::one() / S::from_i64(2)))
    }

    pub fn quasitriangularity_residual(&self, l: &LieAlgebra<S>) -> f64 {
        cyb(l, &self.r_plus()).max_abs()
    }

    /// `δ(ξ) = [ξ⊗1 + 1⊗ξ, r_l]`.
    pub fn cobracket(&self, l: &LieAlgebra<S>, xi: &[S]) -> Tensor2<S> {
        self.r.diagonal_act(l, xi)
    }

    /// `Z_l = ¼[Ω₁₂, Ω₂₃]`, which equals `CYB(r_l)`.
    pub fn z_l(&self, l: &LieAlgebra<S>) -> Tensor3<S> {
        let quarter = S::one() / S::from_i64(4);
        bracket_12_23(l, &self.omega, &self.omega).scale(quarter)
    }

    /// Matrix of the form `Ω_l⁻¹` on `l`.
    pub fn omega_inverse_form(&self) -> Result<DenseMatrix<S>> {
        self.omega
            .to_matrix()
            .inverse()
            .map_err(|_| Error::NotFactorizable)
    }
}

/// A list of coordinate vectors.
pub type Vectors = Vec<Vec<C64>>;

impl QuasiTriangular<C64> {
    /// Basis `{ξ_i}` orthonormal for `Ω_l⁻¹`, with dual covectors
    /// `η^i = Ω_l⁻¹ ξ_i` (so `η^i(ξ_j) = δ_ij`), both in `l` coordinates.
    pub fn orthonormal_basis(&self) -> Result<(Vectors, Vectors)> {
        let form = self.omega_inverse_form()?;
        let k = form.rows();
        let start: Vec<Vec<C64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        let xi = bilinear_gram_schmidt(&start, |a, b| crate::linalg::dot(a, &form.matvec(b)))?;
        let eta = xi.iter().map(|x| form.matvec(x)).collect();
        Ok((xi, eta))
    }
}

/// `Z = (ε²/4)[Ω₁₂, Ω₂₃]`.
#[derive(Debug, Clone)]
pub struct ZElement<S> {
    pub tensor: Tensor3<S>,
    pub epsilon: S,
}

impl<S: Scalar> ZElement<S> {
    /// Build from a symmetric invariant `omega` and check invariance under
    /// `invariance_basis`.
    pub fn new(
        g: &LieAlgebra<S>,
        omega: &Tensor2<S>,
        epsilon: S,
        invariance_basis: &[Vec<S>],
    ) -> Result<Self> {
        let tensor = bracket_12_23(g, omega, omega).scale(epsilon * epsilon / S::from_i64(4));
        let tol =
            structural_tol::<S>(tensor.max_abs()).max(if S::is_exact() { 0.0 } else { 1e-11 });
        let defect = tensor.invariance_defect(g, invariance_basis);
        if defect > tol {
            return Err(Error::invariant("Z is invariant", defect, tol));
        }
        Ok(Self { tensor, epsilon })
    }
}

/// `Z^ε_g` from the Casimir of `g`.
pub fn z_element<S: Scalar>(g: &LieAlgebra<S>, epsilon: S) -> Result<ZElement<S>> {
    let basis: Vec<Vec<S>> = (0..g.dim()).map(|i| g.basis_vector(i)).collect();
    ZElement::new(g, &casimir(g), epsilon, &basis)
}

/// Trigonometric r-matrix over the Cartan subalgebra:
/// `ρ(λ) = Σ_{α∈Δ} (ε/2) coth((ε/2)α(λ)) e_α⊗e_{−α}`.
/// The roots and root vectors are given in the coordinates of `g`.
#[derive(Debug, Clone)]
pub struct CartanRho {
    g: LieAlgebra<C64>,
    roots: RootDatum<C64>,
    epsilon: C64,
    profile: ScalarFun,
}

impl CartanRho {
    pub fn new(g: &LieAlgebra<C64>, roots: &RootDatum<C64>, epsilon: C64) -> Self {
        Self {
            g: g.clone(),
            roots: roots.clone(),
            epsilon,
            profile: ScalarFun::coth_scaled(epsilon),
        }
    }

    pub fn epsilon(&self) -> C64 {
        self.epsilon
    }

    pub fn algebra(&self) -> &LieAlgebra<C64> {
        &self.g
    }

    pub fn roots(&self) -> &RootDatum<C64> {
        &self.roots
    }

    /// `α(λ)` for the positive roots.
    pub fn root_values(&self, lambda: &[C64]) -> Vec<C64> {
        self.roots
            .positive
            .iter()
            .map(|p| self.g.pairing(&p.coroot_dual, lambda))
            .collect()
    }

    /// Fails when some `α(λ)` is within the pole guard.
    pub fn check_admissible(&self, lambda: &[C64]) -> Result<()> {
        for a in self.root_values(lambda) {
            self.profile.eval(a)?;
        }
        Ok(())
    }
}

impl TensorField for CartanRho {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>> {
        let mut t = Tensor2::zeros(self.g.dim());
        for (p, a) in self.roots.positive.iter().zip(self.root_values(lambda)) {
            let phi = self.profile.eval(a)?;
            t = t
                .add(&Tensor2::outer(&p.e_pos, &p.e_neg).scale(phi))
                .sub(&Tensor2::outer(&p.e_neg, &p.e_pos).scale(phi));
        }
        Ok(t)
    }

    /// `d/dt (ε/2)coth((ε/2)α(λ+tv)) = −(ε²/4) csch²((ε/2)α(λ)) α(v)` per root.
    fn analytic_derivative(&self, lambda: &[C64], v: &[C64]) -> Option<Result<Tensor2<C64>>> {
        let eps = self.epsilon;
        let mut t = Tensor2::zeros(self.g.dim());
        for (p, a) in self.roots.positive.iter().zip(self.root_values(lambda)) {
            if let Err(e) = self.profile.eval(a) {
                return Some(Err(e));
            }
            let dv = self.g.pairing(&p.coroot_dual, v);
            let slope = -(eps * eps / 4.0) * csch2(eps * a / 2.0) * dv;
            t = t
                .add(&Tensor2::outer(&p.e_pos, &p.e_neg).scale(slope))
                .sub(&Tensor2::outer(&p.e_neg, &p.e_pos).scale(slope));
        }
        Some(Ok(t))
    }
}

/// `ρ(g, ε, λ)` in one call.
pub fn rho_cartan(
    g: &LieAlgebra<C64>,
    rd: &RootDatum<C64>,
    epsilon: C64,
    lambda: &[C64],
) -> Result<Tensor2<C64>> {
    CartanRho::new(g, rd, epsilon).eval(lambda)
}

/// `λ ↦ T(Σ_j f_j(ad λ|_{V_j})) − shift`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    g: LieAlgebra<C64>,
    pieces: Vec<(InvariantSubspace, ScalarFun)>,
    shift: Option<Tensor2<C64>>,
}

impl SpectralField {
    pub fn new(g: &LieAlgebra<C64>, pieces: Vec<(InvariantSubspace, ScalarFun)>) -> Result<Self> {
        let total: usize = pieces.iter().map(|(v, _)| v.dim()).sum();
        if total != g.dim() {
            return Err(Error::input(format!(
                "profile subspaces have total dimension {total}, expected {}",
                g.dim()
            )));
        }
        Ok(Self {
            g: g.clone(),
            pieces,
            shift: None,
        })
    }

    /// The same field minus a constant tensor.
    pub fn shifted(&self, shift: &Tensor2<C64>) -> Self {
        let shift = match &self.shift {
            Some(s) => s.add(shift),
            None => shift.clone(),
        };
        Self {
            shift: Some(shift),
            ..self.clone()
        }
    }

    pub fn pieces(&self) -> &[(InvariantSubspace, ScalarFun)] {
        &self.pieces
    }

    pub fn algebra(&self) -> &LieAlgebra<C64> {
        &self.g
    }

    /// `Σ_j f_j(ad λ|_{V_j})` as an operator on `g`.
    pub fn operator(&self, lambda: &[C64]) -> Result<DMatrix<C64>> {
        let a = to_nalgebra(&self.g.ad(lambda));
        let d = self.g.dim();
        let mut f = DMatrix::<C64>::zeros(d, d);
        for (space, fun) in &self.pieces {
            f += apply_on_subspace(fun, &a, space)?;
        }
        Ok(f)
    }

    /// Semisimplicity and pole checks at `λ`; returns the smallest nonzero
    /// eigenvalue modulus of `ad λ` on the pieces.
    pub fn check_admissible(&self, lambda: &[C64]) -> Result<f64> {
        let a = to_nalgebra(&self.g.ad(lambda));
        let mut smallest = f64::INFINITY;
        for (space, fun) in &self.pieces {
            if space.dim() == 0 {
                continue;
            }
            let tol = 1e-9 * (1.0 + crate::linalg::nalgebra_max_abs(&a));
            if space.invariance_defect(&a) > tol {
                return Err(Error::invariant(
                    "profile subspace is ad λ-invariant",
                    space.invariance_defect(&a),
                    tol,
                ));
            }
            let spec = check_spectrum(fun, &a, space)?;
            for s in spec.eigenvalues {
                if s.norm() > 1e-9 {
                    smallest = smallest.min(s.norm());
                }
            }
        }
        Ok(smallest)
    }
}

impl TensorField for SpectralField {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>> {
        let f = from_nalgebra(&self.operator(lambda)?);
        let t = op_to_tensor(&self.g, &f)?;
        Ok(match &self.shift {
            Some(s) => t.sub(s),
            None => t,
        })
    }
}

/// A Poisson-Lie base: `l ⊆ g` with a quasitriangular structure, and the
/// data pushed forward to the coordinates of `g`.
#[derive(Debug, Clone)]
pub struct PlBase {
    pub g: LieAlgebra<C64>,
    pub sub: Subalgebra<C64>,
    pub qt: QuasiTriangular<C64>,
    /// `r_l` in `g` coordinates.
    pub r_l: Tensor2<C64>,
    /// `Ω_l` in `g` coordinates.
    pub omega_l: Tensor2<C64>,
    /// `Z_l` in `g` coordinates.
    pub z_l: Tensor3<C64>,
    /// `l` with its form-orthogonal complement.
    pub l_space: InvariantSubspace,
    /// Basis of `l` in `g` coordinates.
    pub basis: Vec<Vec<C64>>,
    /// `Ω_l⁻¹`-orthonormal basis `{ξ_i}` of `l` in `g` coordinates.
    pub ortho: Vec<Vec<C64>>,
    /// Dual covectors `η^i` in `l` coordinates.
    pub duals: Vec<Vec<C64>>,
}

impl PlBase {
    pub fn new(
        g: &LieAlgebra<C64>,
        sub: Subalgebra<C64>,
        qt: QuasiTriangular<C64>,
    ) -> Result<Self> {
        let incl = sub.inclusion().clone();
        let r_l = qt.r_skew().push_forward(&incl);
        let omega_l = qt.omega().push_forward(&incl);
        let quarter = C64::new(0.25, 0.0);
        let z_l = bracket_12_23(g, &omega_l, &omega_l).scale(quarter);
        let l_space = InvariantSubspace::orthogonal(to_nalgebra(&incl), &to_nalgebra(g.gram()))?;
        let (xi, duals) = qt.orthonormal_basis()?;
        let ortho = xi.iter().map(|x| sub.embed_vector(x)).collect();
        Ok(Self {
            g: g.clone(),
            basis: sub.basis_in_parent(),
            sub,
            qt,
            r_l,
            omega_l,
            z_l,
            l_space,
            ortho,
            duals,
        })
    }

    /// Standard structure on a subalgebra with a root datum in its own coordinates.
    pub fn standard(
        g: &LieAlgebra<C64>,
        sub: Subalgebra<C64>,
        rd_l: &RootDatum<C64>,
    ) -> Result<Self> {
        let qt = QuasiTriangular::standard(sub.algebra(), rd_l)?;
        Self::new(g, sub, qt)
    }

    pub fn dim(&self) -> usize {
        self.sub.dim()
    }

    /// `δ(ξ)` for `ξ ∈ l` given in `g` coordinates.
    pub fn cobracket(&self, xi: &[C64]) -> Tensor2<C64> {
        self.r_l.diagonal_act(&self.g, xi)
    }

    /// Embed `l` coordinates into `g`.
    pub fn embed(&self, x: &[C64]) -> Vec<C64> {
        self.sub.embed_vector(x)
    }
}

/// The Levi family: `r′ = T(trig_f0(ε) on l ⊕ −(ε/2)coth(ε/2 ·) on l^⊥)` and
/// `r = r′ − r_l`.
#[derive(Debug, Clone)]
pub struct LeviRMatrix {
    pub base: PlBase,
    pub roots_l: RootDatum<C64>,
    pub roots_g: RootDatum<C64>,
    pub epsilon: C64,
    pub r_prime: SpectralField,
    pub r: SpectralField,
}

/// Levi subalgebra generated by `simple_subset` with its standard structure.
pub fn rmat_levi(
    g: &LieAlgebra<C64>,
    rd: &RootDatum<C64>,
    simple_subset: &[usize],
    epsilon: C64,
) -> Result<LeviRMatrix> {
    let (sub, rd_l) = levi_subalgebra(g, rd, simple_subset)?;
    let base = PlBase::standard(g, sub, &rd_l)?;
    let perp = to_nalgebra(base.sub.complement());
    let incl = to_nalgebra(base.sub.inclusion());
    let spaces = InvariantSubspace::from_decomposition(&[incl, perp])?;
    let mut it = spaces.into_iter();
    let l_space = it.next().expect("two pieces");
    let perp_space = it.next().expect("two pieces");
    let pieces = vec![
        (l_space, ScalarFun::trig_f0(epsilon)),
        (perp_space, ScalarFun::shifted_coth(epsilon, 0, 1)),
    ];
    let r_prime = SpectralField::new(g, pieces)?;
    let r = r_prime.shifted(&base.r_l);
    Ok(LeviRMatrix {
        roots_l: rd_l.embed(&base.sub),
        roots_g: rd.clone(),
        base,
        epsilon,
        r_prime,
        r,
    })
}

fn graded_pieces(
    b: &Automorphism,
    zero: ScalarFun,
    shifted: impl Fn(usize) -> ScalarFun,
) -> Vec<(InvariantSubspace, ScalarFun)> {
    b.grades()
        .iter()
        .enumerate()
        .map(|(j, space)| (space.clone(), if j == 0 { zero } else { shifted(j) }))
        .collect()
}

/// Rational-trigonometric r-matrix over the abelian-type base `g₀`:
/// `f₀ = 1/s − ½coth(s/2)` on `g₀`, `f_j = −½coth(s/2 + iπj/n)` on `g_j`.
pub fn rmat_es(g: &LieAlgebra<C64>, b: &Automorphism) -> Result<SpectralField> {
    let n = b.order();
    let pieces = graded_pieces(b, ScalarFun::rational_trig_f0(), |j| {
        ScalarFun::shifted_coth(C64::new(1.0, 0.0), j, n)
    });
    SpectralField::new(g, pieces)
}

/// The FM family over `l = g₀`: `r′` with `trig_f0(ε)` on `g₀` and
/// `−(ε/2)coth(εs/2 + iπj/n)` on `g_j`; `r = r′ − r_l`.
#[derive(Debug, Clone)]
pub struct FmRMatrix {
    pub base: PlBase,
    pub epsilon: C64,
    pub r_prime: SpectralField,
    pub r: SpectralField,
}

pub fn rmat_fm(
    g: &LieAlgebra<C64>,
    b: &Automorphism,
    base: PlBase,
    epsilon: C64,
) -> Result<FmRMatrix> {
    // l must be the fixed-point subalgebra g₀
    if base.dim() != b.grade(0).dim() {
        return Err(Error::input(format!(
            "base has dimension {}, but g₀ has dimension {}",
            base.dim(),
            b.grade(0).dim()
        )));
    }
    let incl = to_nalgebra(base.sub.inclusion());
    let fixed = crate::linalg::nalgebra_max_abs(&(b.matrix() * &incl - &incl));
    if fixed > 1e-12 {
        return Err(Error::invariant(
            "base is fixed by the automorphism",
            fixed,
            1e-12,
        ));
    }
    let n = b.order();
    let pieces = graded_pieces(b, ScalarFun::trig_f0(epsilon), |j| {
        ScalarFun::shifted_coth(epsilon, j, n)
    });
    let r_prime = SpectralField::new(g, pieces)?;
    let r = r_prime.shifted(&base.r_l);
    Ok(FmRMatrix {
        base,
        epsilon,
        r_prime,
        r,
    })
}

/// `l = g` with the standard structure, the base for `B = id`.
pub fn full_base(g: &LieAlgebra<C64>, rd: &RootDatum<C64>) -> Result<PlBase> {
    let columns = (0..g.dim()).map(|i| g.basis_vector(i)).collect();
    let sub = Subalgebra::new(g, columns, g.labels().to_vec(), None)?;
    PlBase::standard(g, sub, rd)
}

/// Cast an exact structure to complex coordinates.
pub fn to_c64<S: Scalar>(g: &LieAlgebra<S>) -> Result<LieAlgebra<C64>> {
    g.map_scalar(|x| x.to_c64())
}

/// Multiply a constant skew perturbation into a field; used by negative controls.
#[derive(Debug, Clone)]
pub struct Perturbed<F> {
    pub inner: F,
    pub delta: Tensor2<C64>,
}

impl<F: TensorField> TensorField for Perturbed<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, lambda: &[C64]) -> Result<Tensor2<C64>> {
        Ok(self.inner.eval(lambda)?.add(&self.delta))
    }

    fn analytic_derivative(&self, lambda: &[C64], v: &[C64]) -> Option<Result<Tensor2<C64>>> {
        self.inner.analytic_derivative(lambda, v)
    }
}

/// Dense matrix from a list of column vectors, as a shorthand for callers.
pub fn columns_matrix(d: usize, cols: &[Vec<C64>]) -> DMatrix<C64> {
    to_nalgebra(&DenseMatrix::from_columns(d, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_sl, cyclic_automorphism, diagonal_subalgebra, direct_sum};
    use crate::matfun::coth;
    use crate::Q;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn standard_sl2_structure() {
        let (g, rd) = build_sl::<Q>(2).unwrap();
        let qt = QuasiTriangular::standard(&g, &rd).unwrap();
        // r₊ = ¼ h⊗h + e⊗f, r_l = ½(e⊗f − f⊗e)
        let rp = qt.r_plus();
        assert_eq!(rp.get(0, 0), Q::new(1, 4));
        assert_eq!(rp.get(1, 2), Q::from_integer(1));
        assert_eq!(rp.get(2, 1), Q::from_integer(0));
        assert_eq!(qt.r_skew().get(1, 2), Q::new(1, 2));
        assert_eq!(qt.r_skew().get(2, 1), Q::new(-1, 2));
        assert_eq!(qt.quasitriangularity_residual(&g), 0.0);
        // CYB(r_l) = ¼[Ω₁₂,Ω₂₃]
        assert_eq!(cyb(&g, qt.r_skew()).sub(&qt.z_l(&g)).max_abs(), 0.0);
    }

    #[test]
    fn standard_gl2_levi_structure() {
        let (g, rd) = build_sl::<Q>(3).unwrap();
        let (sub, rd_l) = levi_subalgebra(&g, &rd, &[0]).unwrap();
        let qt = QuasiTriangular::standard(sub.algebra(), &rd_l).unwrap();
        assert_eq!(qt.quasitriangularity_residual(sub.algebra()), 0.0);
        assert_eq!(
            cyb(sub.algebra(), qt.r_skew())
                .sub(&qt.z_l(sub.algebra()))
                .max_abs(),
            0.0
        );
    }

    #[test]
    fn abelian_structure_is_trivial() {
        let (g, rd) = build_sl::<Q>(3).unwrap();
        let (sub, rd_l) = levi_subalgebra(&g, &rd, &[]).unwrap();
        let qt = QuasiTriangular::standard(sub.algebra(), &rd_l).unwrap();
        assert_eq!(qt.r_skew().max_abs(), 0.0);
        assert_eq!(
            cyb(sub.algebra(), &qt.omega().scale(Q::new(1, 2))).max_abs(),
            0.0
        );
    }

    #[test]
    fn singular_omega_is_not_factorizable() {
        let (g, _) = build_sl::<f64>(2).unwrap();
        let err = QuasiTriangular::new(&g, Tensor2::zeros(3), Tensor2::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::NotFactorizable));
    }

    #[test]
    fn orthonormal_basis_for_sl2() {
        let (g, rd) = build_sl::<C64>(2).unwrap();
        let qt = QuasiTriangular::standard(&g, &rd).unwrap();
        let (xi, eta) = qt.orthonormal_basis().unwrap();
        let form = qt.omega_inverse_form().unwrap();
        for (i, a) in xi.iter().enumerate() {
            for (j, b) in xi.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((crate::linalg::dot(a, &form.matvec(b)) - expect).norm() < 1e-12);
                assert!((crate::linalg::dot(&eta[i], b) - expect).norm() < 1e-12);
            }
        }
        // Σ ξ_i⊗ξ_i = Ω
        let mut sum = Tensor2::zeros(3);
        for x in &xi {
            sum = sum.add(&Tensor2::outer(x, x));
        }
        assert!(sum.sub(qt.omega()).max_abs() < 1e-12);
        // the first vector is h/√2
        assert!((xi[0][0].norm() - 0.5_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_orthonormal_basis() {
        let labels = vec!["x".to_string()];
        let g = LieAlgebra::new(labels, vec![c(0.0)], DenseMatrix::identity(1)).unwrap();
        let om = Tensor2::from_fn(1, |_, _| c(4.0));
        let qt = QuasiTriangular::new(&g, Tensor2::zeros(1), om).unwrap();
        let (xi, _) = qt.orthonormal_basis().unwrap();
        // x/√c with c = 1/4 for Ω⁻¹, i.e. 2x
        assert!((xi[0][0].norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn z_element_values() {
        let (g, _) = build_sl::<Q>(2).unwrap();
        let z0 = z_element(&g, Q::from_integer(0)).unwrap();
        assert_eq!(z0.tensor.max_abs(), 0.0);
        let z = z_element(&g, Q::from_integer(1)).unwrap();
        // skew under every transposition of legs, fixed by a single value
        let t = &z.tensor;
        let v = t.get(0, 1, 2);
        assert_ne!(v, Q::from_integer(0));
        assert_eq!(t.get(1, 0, 2), -v);
        assert_eq!(t.get(0, 2, 1), -v);
        assert_eq!(t.get(2, 1, 0), -v);
        assert_eq!(t.get(0, 0, 0), Q::from_integer(0));
        // componentwise brute force in the basis (h, e, f)
        assert_eq!(v, Q::new(1, 4));
    }

    #[test]
    fn rho_sl2_reference_value() {
        let (g, rd) = build_sl::<C64>(2).unwrap();
        let lambda = vec![c(0.5), c(0.0), c(0.0)];
        let rho = rho_cartan(&g, &rd, c(1.0), &lambda).unwrap();
        let k = 0.5 * coth(c(0.5));
        assert!((rho.get(1, 2) - k).norm() < 1e-14);
        assert!((rho.get(1, 2) - c(1.0819767068693265)).norm() < 1e-12);
        assert!(rho.skew_defect() < 1e-15);
        // dilation
        let eps = c(2.0);
        let lhs = rho_cartan(&g, &rd, eps, &lambda).unwrap();
        let scaled: Vec<C64> = lambda.iter().map(|x| x * eps).collect();
        let rhs = rho_cartan(&g, &rd, c(1.0), &scaled).unwrap().scale(eps);
        assert!(lhs.sub(&rhs).max_abs() < 1e-14);
    }

    #[test]
    fn levi_at_epsilon_one_is_minus_r_l_on_l() {
        let (g, rd) = build_sl::<C64>(3).unwrap();
        let lv = rmat_levi(&g, &rd, &[0], c(1.0)).unwrap();
        let lambda = lv
            .base
            .embed(&[c(0.2), C64::new(0.1, 0.05), c(0.07), c(-0.03)]);
        let r = lv.r.eval(&lambda).unwrap();
        let rp = lv.r_prime.eval(&lambda).unwrap();
        // on l⊗l, r′ vanishes and r = −r_l
        let l_coords = r.pull_back(&from_nalgebra(&lv.base.l_space.coords));
        let rl = lv.base.qt.r_skew();
        assert!(l_coords.add(rl).max_abs() < 1e-12);
        assert!(rp.skew_defect() < 1e-11);
    }

    #[test]
    fn restriction_identity_on_cartan() {
        let (g, rd) = build_sl::<C64>(3).unwrap();
        let eps = c(0.5);
        let lv = rmat_levi(&g, &rd, &[0], eps).unwrap();
        let lambda = vec![
            C64::new(0.31, 0.1),
            C64::new(-0.12, 0.2),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
            c(0.0),
        ];
        let r = lv.r.eval(&lambda).unwrap();
        let rho_l = CartanRho::new(&g, &lv.roots_l, c(1.0))
            .eval(&lambda)
            .unwrap();
        let rho_g = rho_cartan(&g, &rd, eps, &lambda).unwrap();
        let lhs = r.add(&lv.base.r_l).add(&rho_l);
        assert!(lhs.sub(&rho_g).max_abs() < 1e-12);
    }

    #[test]
    fn full_levi_equals_fm_identity() {
        let (g, rd) = build_sl::<C64>(2).unwrap();
        let eps = C64::new(1.0, 0.3);
        let lv = rmat_levi(&g, &rd, &[0], eps).unwrap();
        let b = Automorphism::identity(&g).unwrap();
        let fm = rmat_fm(&g, &b, full_base(&g, &rd).unwrap(), eps).unwrap();
        let lambda = vec![C64::new(0.2, 0.1), c(0.15), C64::new(-0.1, 0.05)];
        let a = lv.r.eval(&lambda).unwrap();
        let bb = fm.r.eval(&lambda).unwrap();
        assert!(a.sub(&bb).max_abs() < 1e-10);
    }

    #[test]
    fn es_identity_vanishes_at_origin() {
        let (g, _) = build_sl::<C64>(2).unwrap();
        let b = Automorphism::identity(&g).unwrap();
        let es = rmat_es(&g, &b).unwrap();
        assert_eq!(es.eval(&[c(0.0); 3]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn es_swap_on_g1_is_minus_half_tanh() {
        let (sl2, rd) = build_sl::<C64>(2).unwrap();
        let g = direct_sum(&[&sl2, &sl2]).unwrap();
        let b = cyclic_automorphism(&g, 2).unwrap();
        let es = rmat_es(&g, &b).unwrap();
        let (sub, _) = diagonal_subalgebra(&g, &sl2, Some(&rd), 2).unwrap();
        // λ = (0.3h, 0.3h): ad λ has eigenvalue 0.6 on (e,−e)
        let lambda = sub.embed_vector(&[c(0.3), c(0.0), c(0.0)]);
        let op = es.operator(&lambda).unwrap();
        let mut x = vec![c(0.0); 6];
        x[1] = c(1.0);
        x[4] = c(-1.0);
        let y = op * nalgebra::DVector::from_vec(x.clone());
        let k = -0.5 * (0.3_f64).tanh();
        for i in 0..6 {
            assert!((y[i] - x[i] * k).norm() < 1e-13);
        }
    }

    #[test]
    fn fm_swap_r_prime_is_invariant_and_skew() {
        let (sl2, rd) = build_sl::<C64>(2).unwrap();
        let g = direct_sum(&[&sl2, &sl2]).unwrap();
        let b = cyclic_automorphism(&g, 2).unwrap();
        let (sub, rd_l) = diagonal_subalgebra(&g, &sl2, Some(&rd), 2).unwrap();
        let base = PlBase::standard(&g, sub, rd_l.as_ref().unwrap()).unwrap();
        let fm = rmat_fm(&g, &b, base, c(2.0)).unwrap();
        let lambda = fm
            .base
            .embed(&[C64::new(0.2, 0.1), c(0.1), C64::new(0.05, -0.1)]);
        let rp = fm.r_prime.eval(&lambda).unwrap();
        assert!(rp.skew_defect() < 1e-11);
        // invariance under λ itself: ad_λ of r′(λ) vanishes
        assert!(rp.diagonal_act(&g, &lambda).max_abs() < 1e-11);
    }
}
