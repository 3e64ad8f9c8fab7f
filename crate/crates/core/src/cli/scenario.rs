//! Scenario registry and batch verification.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{CustomConfig, RKind};
use super::sampling::{ball_coefficients, combine, sample_points, SamplePlan, SampleStats};
use crate::dynfield::{BasePoint, Chart, DerivativeMode};
use crate::error::{Error, Result};
use crate::liealg::{
    build_sl, cyclic_automorphism, diagonal_subalgebra, direct_sum, levi_subalgebra, Automorphism,
    LieAlgebra, RootDatum,
};
use crate::rmat::{
    full_base, rmat_es, rmat_fm, rmat_levi, z_element, CartanRho, FmRMatrix, LeviRMatrix,
    Perturbed, PlBase, QuasiTriangular, SpectralField, ZElement,
};
use crate::verify::{
    cdybe_abelian, cdybe_pl, cdybe_reduced, chart_identities, dilation_check, invariance,
    proposition_equivalence, quasi_invariance, reduction_crosscheck, skew_perturbation,
    structural_checks, w_residual, AbelianBase, ResidualReport, ToleranceTier,
};
use crate::C64;

/// Sign of `Z_l` on the right-hand side of the reduced equation.
pub const Z_L_SIGN: f64 = 1.0;
/// Sign of the `r_l` term in the `η`-fields.
pub const ETA_SIGN: f64 = 1.0;
/// `ε′` used by the wrong-epsilon control; the correct lift uses 1.
pub const WRONG_EPSILON_PRIME: f64 = 2.0;
/// Size of the constant skew perturbation in the perturbed control.
pub const PERTURBATION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Sl2,
    Sl3,
    Sl2Sl2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmAlgebra {
    Sl2,
    Sl2x2Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    PerturbedLevi,
    WrongEpsilon,
    FlippedZl,
    FlippedEta,
}

#[derive(Debug, Clone)]
pub enum ScenarioKind {
    Structural,
    Cartan(Builtin),
    Fm(FmAlgebra),
    Levi,
    Reduction,
    Es(FmAlgebra),
    Negative(Control),
    Custom(Box<CustomConfig>),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub epsilons: Vec<C64>,
}

fn eps(values: &[(f64, f64)]) -> Vec<C64> {
    values.iter().map(|&(re, im)| C64::new(re, im)).collect()
}

pub const SCENARIOS: &[(&str, &str)] = &[
    (
        "structural",
        "Jacobi, form invariance, Casimir and Z invariance, quasitriangularity",
    ),
    (
        "cartan-sl2",
        "trigonometric r-matrix over the Cartan subalgebra of sl2",
    ),
    (
        "cartan-sl3",
        "trigonometric r-matrix over the Cartan subalgebra of sl3",
    ),
    (
        "cartan-sl2+sl2",
        "trigonometric r-matrix over the Cartan subalgebra of sl2+sl2",
    ),
    ("fm-sl2", "graded trigonometric r-matrix on sl2 with B = id"),
    (
        "fm-sl2x2-swap",
        "graded trigonometric r-matrix on sl2+sl2 with the swap",
    ),
    (
        "levi-sl3-gl2",
        "Levi r-matrix over the gl2 Levi subalgebra of sl3",
    ),
    (
        "reduction-sl3-gl2",
        "restriction to the Cartan subalgebra and the abelian lift",
    ),
    (
        "es-sl2",
        "rational-trigonometric r-matrix on sl2 with B = id",
    ),
    (
        "es-sl2x2-swap",
        "rational-trigonometric r-matrix on sl2+sl2 with the swap",
    ),
    (
        "perturbed-levi",
        "negative control: Levi r-matrix plus a constant skew tensor",
    ),
    (
        "wrong-epsilon",
        "negative control: abelian lift built with the wrong ε′",
    ),
    (
        "flipped-zl",
        "negative control: reduced equation with the opposite sign of Z_l",
    ),
    (
        "flipped-eta",
        "negative control: η-fields with the opposite sign of the r_l term",
    ),
    ("custom", "algebra and r-matrix from --config"),
];

impl Scenario {
    pub fn builtin(name: &str) -> Result<Self> {
        let all = [(0.5, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 0.3)];
        let two = [(0.5, 0.0), (2.0, 0.0)];
        let (kind, epsilons) = match name {
            "structural" => (ScenarioKind::Structural, eps(&[(1.0, 0.0)])),
            "cartan-sl2" => (ScenarioKind::Cartan(Builtin::Sl2), eps(&all)),
            "cartan-sl3" => (ScenarioKind::Cartan(Builtin::Sl3), eps(&all)),
            "cartan-sl2+sl2" => (ScenarioKind::Cartan(Builtin::Sl2Sl2), eps(&all)),
            "fm-sl2" => (ScenarioKind::Fm(FmAlgebra::Sl2), eps(&two)),
            "fm-sl2x2-swap" => (ScenarioKind::Fm(FmAlgebra::Sl2x2Swap), eps(&two)),
            "levi-sl3-gl2" => (ScenarioKind::Levi, eps(&two)),
            "reduction-sl3-gl2" => (ScenarioKind::Reduction, eps(&two)),
            "es-sl2" => (ScenarioKind::Es(FmAlgebra::Sl2), eps(&[(1.0, 0.0)])),
            "es-sl2x2-swap" => (ScenarioKind::Es(FmAlgebra::Sl2x2Swap), eps(&[(1.0, 0.0)])),
            "perturbed-levi" => (
                ScenarioKind::Negative(Control::PerturbedLevi),
                eps(&[(0.5, 0.0)]),
            ),
            "wrong-epsilon" => (
                ScenarioKind::Negative(Control::WrongEpsilon),
                eps(&[(0.5, 0.0)]),
            ),
            "flipped-zl" => (
                ScenarioKind::Negative(Control::FlippedZl),
                eps(&[(0.5, 0.0)]),
            ),
            "flipped-eta" => (
                ScenarioKind::Negative(Control::FlippedEta),
                eps(&[(0.5, 0.0)]),
            ),
            "custom" => return Err(Error::input("the custom scenario needs --config")),
            other => {
                return Err(Error::input(format!(
                    "unknown scenario `{other}`; see list-scenarios"
                )))
            }
        };
        Ok(Self {
            name: name.to_string(),
            kind,
            epsilons,
        })
    }

    pub fn custom(config: CustomConfig) -> Self {
        Self {
            name: "custom".to_string(),
            kind: ScenarioKind::Custom(Box::new(config)),
            epsilons: eps(&[(0.5, 0.0), (2.0, 0.0)]),
        }
    }
}

/// Identities exercised by a scenario, for `describe`.
pub fn describe(name: &str) -> Result<&'static str> {
    Ok(match name {
        "structural" => {
            "\
Structure checks on sl2, sl3, sl2+sl2 and the gl2 Levi subalgebra of sl3:
  antisymmetry and Jacobi identity of the structure constants
  symmetry and ad-invariance of the form
  invariance of the split Casimir Ω and of Z = ¼[Ω₁₂, Ω₂₃]
  CYB(r_l + ½Ω_l) = 0 and CYB(r_l) = ¼[Ω₁₂_l, Ω₂₃_l] for the standard structure"
        }
        "cartan-sl2" | "cartan-sl3" | "cartan-sl2+sl2" => {
            "\
ρ(λ) = Σ_{α∈Δ} (ε/2) coth((ε/2) α(λ)) e_α⊗e_{−α} on the Cartan subalgebra h:
  Σ_{kl} (G_h⁻¹)_{kl} Alt(h_k ⊗ ∂_{h_l} ρ) + CYB(ρ) = (ε²/4)[Ω₁₂, Ω₂₃]  (closed-form derivative)
  ρ(ε, λ) = ε ρ(1, ελ)"
        }
        "fm-sl2" | "fm-sl2x2-swap" => {
            "\
r′(λ) = T(f₀(ad λ) on g₀, −(ε/2)coth(ε ad λ/2 + iπj/n) on g_j), f₀ = ½coth(s/2) − (ε/2)coth(εs/2),
r = r′ − r_l over the exponential chart of l = g₀:
  Σ_i Alt(ξ_i ⊗ ∇′_{ξ_i} r′) + CYB(r′) = Z − Z_l, ∇′_ξ = ½(ξ^l + ξ^r)
  Σ_i Alt(ξ_i ⊗ ∇_{η^i} r) + CYB(r) = Z with the η-fields of the STS structure
  agreement of the two verdicts
  ξ▷r + [ξ⊗1 + 1⊗ξ, r] + δ(ξ) = 0 and ξ▷r′ + [ξ⊗1 + 1⊗ξ, r′] = 0, and their agreement
  W = Σ_i Alt(ξ_i ⊗ ∇′_{ξ_i} r′) + CYB(r′) − Z + Z_l = 0"
        }
        "levi-sl3-gl2" => {
            "\
r′(λ) = T(½coth(ad λ/2) − (ε/2)coth(ε ad λ/2) on l, −(ε/2)coth(ε ad λ/2) on l⊥), r = r′ − r_l:
  Σ_i Alt(ξ_i ⊗ ∇_{η^i} r) + CYB(r) = Z
  Σ_i Alt(ξ_i ⊗ ∇′_{ξ_i} r′) + CYB(r′) = Z − Z_l, and agreement of the verdicts
  quasi-invariance of r, invariance of r′, and their agreement"
        }
        "reduction-sl3-gl2" => {
            "\
At λ in the Cartan subalgebra h of l:
  r(λ) + r_l + ρ(l, 1, λ) = ρ(g, ε, λ) entrywise
  r̃ = r|_h + ρ(l, 1, ·) + r_l satisfies the abelian equation with Z = (ε²/4)[Ω₁₂, Ω₂₃]
  the full equation for r holds at a nearby generic point of l, with the same verdict"
        }
        "es-sl2" | "es-sl2x2-swap" => {
            "\
r(λ) = T(1/s − ½coth(s/2) on g₀, −½coth(s/2 + iπj/n) on g_j) at s = ad λ, λ ∈ g₀:
  Σ_{kl} (G₀⁻¹)_{kl} Alt(u_k ⊗ ∂_{u_l} r) + CYB(r) = ¼[Ω₁₂, Ω₂₃]"
        }
        "perturbed-levi" => {
            "\
Levi r-matrix plus a constant skew tensor: the full and reduced equations must both fail."
        }
        "wrong-epsilon" => {
            "\
Abelian lift r|_h + ρ(l, ε′, ·) + r_l with ε′ ≠ 1: the abelian equation must fail."
        }
        "flipped-zl" => {
            "\
Reduced equation for the graded r-matrix on sl2 with right-hand side Z + Z_l: must fail."
        }
        "flipped-eta" => {
            "\
Full equation on sl2 with η-fields −r_l(η)^r + r_l(η)^l + ½(Ω_l(η)^l + Ω_l(η)^r): must fail."
        }
        "custom" => {
            "\
Structure checks on the configured algebra, then the identities of the configured r-matrix kind
(cartan, es or fm with B = id, levi)."
        }
        other => return Err(Error::input(format!("unknown scenario `{other}`"))),
    })
}

/// Data needed to evaluate the checks of a scenario at one `ε`.
enum Prepared {
    Cartan {
        g: LieAlgebra<C64>,
        rd: RootDatum<C64>,
        rho: CartanRho,
        base: AbelianBase,
        z: ZElement<C64>,
    },
    Pl {
        fm: Box<FmRMatrix>,
        z: ZElement<C64>,
        control: Option<Control>,
    },
    Levi {
        lv: Box<LeviRMatrix>,
        z: ZElement<C64>,
        perturbation: Option<crate::tensor::Tensor2<C64>>,
    },
    Reduction {
        lv: Box<LeviRMatrix>,
        epsilon_prime: C64,
    },
    Es {
        es: SpectralField,
        base: AbelianBase,
        z: ZElement<C64>,
        sub_space: crate::linalg::InvariantSubspace,
    },
}

struct Sample {
    lambda: Vec<C64>,
    nearby: Option<Vec<C64>>,
}

type Sl2x2 = (
    LieAlgebra<C64>,
    LieAlgebra<C64>,
    RootDatum<C64>,
    Automorphism,
);

fn sl2x2() -> Result<Sl2x2> {
    let (sl2, rd) = build_sl::<C64>(2)?;
    let g = direct_sum(&[&sl2, &sl2])?;
    let b = cyclic_automorphism(&g, 2)?;
    Ok((g, sl2, rd, b))
}

fn prepare_fm(which: FmAlgebra, epsilon: C64, control: Option<Control>) -> Result<Prepared> {
    let fm = match which {
        FmAlgebra::Sl2 => {
            let (g, rd) = build_sl::<C64>(2)?;
            rmat_fm(
                &g,
                &Automorphism::identity(&g)?,
                full_base(&g, &rd)?,
                epsilon,
            )?
        }
        FmAlgebra::Sl2x2Swap => {
            let (g, sl2, rd, b) = sl2x2()?;
            let (sub, rd_l) = diagonal_subalgebra(&g, &sl2, Some(&rd), 2)?;
            let base = PlBase::standard(&g, sub, rd_l.as_ref().expect("root datum carried"))?;
            rmat_fm(&g, &b, base, epsilon)?
        }
    };
    let z = z_element(&fm.base.g, epsilon)?;
    Ok(Prepared::Pl {
        fm: Box::new(fm),
        z,
        control,
    })
}

fn prepare_levi(epsilon: C64, perturb: bool) -> Result<Prepared> {
    let (g, rd) = build_sl::<C64>(3)?;
    let lv = rmat_levi(&g, &rd, &[0], epsilon)?;
    let z = z_element(&g, epsilon)?;
    Ok(Prepared::Levi {
        perturbation: perturb.then(|| skew_perturbation(g.dim(), PERTURBATION, 7)),
        lv: Box::new(lv),
        z,
    })
}

fn prepare_cartan(g: LieAlgebra<C64>, rd: RootDatum<C64>, epsilon: C64) -> Result<Prepared> {
    let rho = CartanRho::new(&g, &rd, epsilon);
    let base = AbelianBase::cartan(&g, &rd)?;
    let z = z_element(&g, epsilon)?;
    Ok(Prepared::Cartan {
        g,
        rd,
        rho,
        base,
        z,
    })
}

fn prepare_es(
    g: &LieAlgebra<C64>,
    b: &Automorphism,
    base_basis: Vec<Vec<C64>>,
) -> Result<Prepared> {
    let es = rmat_es(g, b)?;
    let base = AbelianBase::new(g, base_basis)?;
    let z = z_element(g, C64::new(1.0, 0.0))?;
    Ok(Prepared::Es {
        es,
        base,
        z,
        sub_space: b.grade(0).clone(),
    })
}

fn prepare(kind: &ScenarioKind, epsilon: C64) -> Result<Option<Prepared>> {
    Ok(Some(match kind {
        ScenarioKind::Structural => return Ok(None),
        ScenarioKind::Cartan(which) => {
            let (g, rd) = match which {
                Builtin::Sl2 => build_sl::<C64>(2)?,
                Builtin::Sl3 => build_sl::<C64>(3)?,
                Builtin::Sl2Sl2 => {
                    let (sl2, rd) = build_sl::<C64>(2)?;
                    let g = direct_sum(&[&sl2, &sl2])?;
                    (g, RootDatum::direct_sum(&[(&rd, 3), (&rd, 3)]))
                }
            };
            prepare_cartan(g, rd, epsilon)?
        }
        ScenarioKind::Fm(which) => prepare_fm(*which, epsilon, None)?,
        ScenarioKind::Levi => prepare_levi(epsilon, false)?,
        ScenarioKind::Reduction => {
            let (g, rd) = build_sl::<C64>(3)?;
            Prepared::Reduction {
                lv: Box::new(rmat_levi(&g, &rd, &[0], epsilon)?),
                epsilon_prime: C64::new(1.0, 0.0),
            }
        }
        ScenarioKind::Es(FmAlgebra::Sl2) => {
            let (g, _) = build_sl::<C64>(2)?;
            let basis = (0..g.dim()).map(|i| g.basis_vector(i)).collect();
            prepare_es(&g, &Automorphism::identity(&g)?, basis)?
        }
        ScenarioKind::Es(FmAlgebra::Sl2x2Swap) => {
            let (g, sl2, _, b) = sl2x2()?;
            let (sub, _) = diagonal_subalgebra(&g, &sl2, None, 2)?;
            prepare_es(&g, &b, sub.basis_in_parent())?
        }
        ScenarioKind::Negative(c) => match c {
            Control::PerturbedLevi => prepare_levi(epsilon, true)?,
            Control::WrongEpsilon => {
                let (g, rd) = build_sl::<C64>(3)?;
                Prepared::Reduction {
                    lv: Box::new(rmat_levi(&g, &rd, &[0], epsilon)?),
                    epsilon_prime: C64::new(WRONG_EPSILON_PRIME, 0.0),
                }
            }
            Control::FlippedZl | Control::FlippedEta => {
                prepare_fm(FmAlgebra::Sl2, epsilon, Some(*c))?
            }
        },
        ScenarioKind::Custom(cfg) => prepare_custom(cfg, epsilon)?,
    }))
}

fn prepare_custom(cfg: &CustomConfig, epsilon: C64) -> Result<Prepared> {
    let g = &cfg.algebra;
    match cfg.kind {
        RKind::Cartan => prepare_cartan(
            g.clone(),
            cfg.roots.clone().expect("checked by the parser"),
            epsilon,
        ),
        RKind::Es => {
            let basis = (0..g.dim()).map(|i| g.basis_vector(i)).collect();
            prepare_es(g, &Automorphism::identity(g)?, basis)
        }
        RKind::Fm => {
            let base = match (&cfg.pair, &cfg.roots) {
                (Some((r, o)), _) => {
                    let qt = QuasiTriangular::new(g, r.clone(), o.clone())?;
                    let columns = (0..g.dim()).map(|i| g.basis_vector(i)).collect();
                    let sub =
                        crate::liealg::Subalgebra::new(g, columns, g.labels().to_vec(), None)?;
                    PlBase::new(g, sub, qt)?
                }
                (None, Some(rd)) => full_base(g, rd)?,
                (None, None) => unreachable!("checked by the parser"),
            };
            let fm = rmat_fm(g, &Automorphism::identity(g)?, base, epsilon)?;
            let z = z_element(g, epsilon)?;
            Ok(Prepared::Pl {
                fm: Box::new(fm),
                z,
                control: None,
            })
        }
        RKind::Levi => {
            let rd = cfg.roots.as_ref().expect("checked by the parser");
            let lv = rmat_levi(g, rd, &cfg.levi, epsilon)?;
            let z = z_element(g, epsilon)?;
            Ok(Prepared::Levi {
                lv: Box::new(lv),
                z,
                perturbation: None,
            })
        }
    }
}

fn spectral_gap_ok(smallest: f64, plan: &SamplePlan) -> Result<()> {
    if smallest < plan.min_eigenvalue {
        return Err(Error::input("ad λ has a small nonzero eigenvalue"));
    }
    Ok(())
}

fn pl_admissible(
    field: &SpectralField,
    base: &PlBase,
    lambda: &[C64],
    plan: &SamplePlan,
) -> Result<()> {
    BasePoint::new(&base.g, lambda.to_vec(), Chart::Sts, &base.l_space)?;
    spectral_gap_ok(field.check_admissible(lambda)?, plan)
}

fn cartan_admissible(rho: &CartanRho, lambda: &[C64], plan: &SamplePlan) -> Result<()> {
    if rho
        .root_values(lambda)
        .iter()
        .any(|a| a.norm() < plan.min_eigenvalue)
    {
        return Err(Error::input("root value below the sampling threshold"));
    }
    rho.check_admissible(lambda)
}

impl Prepared {
    fn sample(
        &self,
        plan: &SamplePlan,
        rng: &mut rand_chacha::ChaCha8Rng,
        count: usize,
    ) -> Result<(Vec<Sample>, SampleStats)> {
        let plain = |pts: Vec<Vec<C64>>| {
            pts.into_iter()
                .map(|lambda| Sample {
                    lambda,
                    nearby: None,
                })
                .collect()
        };
        match self {
            Prepared::Cartan { g, rd, rho, .. } => {
                // the dilation check also evaluates ρ(1, ελ)
                let unit = CartanRho::new(g, rd, C64::new(1.0, 0.0));
                let admissible = |l: &[C64]| -> Result<()> {
                    cartan_admissible(rho, l, plan)?;
                    let scaled: Vec<C64> = l.iter().map(|x| x * rho.epsilon()).collect();
                    unit.check_admissible(&scaled)
                };
                let (pts, st) = sample_points(plan, rng, &rd.cartan, count, admissible)?;
                Ok((plain(pts), st))
            }
            Prepared::Pl { fm, .. } => {
                let (pts, st) = sample_points(plan, rng, &fm.base.basis, count, |l| {
                    pl_admissible(&fm.r_prime, &fm.base, l, plan)
                })?;
                Ok((plain(pts), st))
            }
            Prepared::Levi { lv, .. } => {
                let (pts, st) = sample_points(plan, rng, &lv.base.basis, count, |l| {
                    pl_admissible(&lv.r_prime, &lv.base, l, plan)
                })?;
                Ok((plain(pts), st))
            }
            Prepared::Reduction { lv, epsilon_prime } => {
                let rho_g = CartanRho::new(&lv.base.g, &lv.roots_g, lv.epsilon);
                let rho_l = CartanRho::new(&lv.base.g, &lv.roots_l, *epsilon_prime);
                let admissible = |l: &[C64]| -> Result<()> {
                    cartan_admissible(&rho_g, l, plan)?;
                    rho_l.check_admissible(l)?;
                    pl_admissible(&lv.r_prime, &lv.base, l, plan)
                };
                let (pts, mut st) =
                    sample_points(plan, rng, &lv.roots_g.cartan, count, admissible)?;
                // a generic point of l near each Cartan sample
                let mut out = Vec::with_capacity(pts.len());
                for lambda in pts {
                    let mut streak = 0;
                    let nearby = loop {
                        let offset = combine(
                            &lv.base.basis,
                            &ball_coefficients(rng, lv.base.dim(), 0.1 * plan.radius),
                        );
                        let cand: Vec<C64> =
                            lambda.iter().zip(&offset).map(|(a, b)| a + b).collect();
                        if pl_admissible(&lv.r_prime, &lv.base, &cand, plan).is_ok() {
                            break cand;
                        }
                        st.rejected += 1;
                        streak += 1;
                        if streak >= super::sampling::MAX_CONSECUTIVE_REJECTIONS {
                            return Err(Error::SamplingTooConstrained { rejections: streak });
                        }
                    };
                    out.push(Sample {
                        lambda,
                        nearby: Some(nearby),
                    });
                }
                Ok((out, st))
            }
            Prepared::Es {
                es,
                base,
                sub_space,
                ..
            } => {
                let admissible = |l: &[C64]| -> Result<()> {
                    BasePoint::new(&base.g, l.to_vec(), Chart::Abelian, sub_space)?;
                    spectral_gap_ok(es.check_admissible(l)?, plan)
                };
                let (pts, st) = sample_points(plan, rng, &base.basis, count, admissible)?;
                Ok((plain(pts), st))
            }
        }
    }

    fn evaluate(&self, s: &Sample) -> Result<Vec<ResidualReport>> {
        let lambda = &s.lambda;
        Ok(match self {
            Prepared::Cartan {
                g,
                rd,
                rho,
                base,
                z,
            } => vec![
                cdybe_abelian(rho, base, lambda, z, DerivativeMode::Analytic)?,
                dilation_check(g, rd, rho.epsilon(), lambda)?,
            ],
            Prepared::Pl { fm, z, control } => match control {
                None => {
                    let mut out = pl_family(&fm.r, &fm.r_prime, &fm.base, lambda, z)?;
                    out.push(w_residual(&fm.r_prime, &fm.base, lambda, z)?);
                    out
                }
                Some(Control::FlippedZl) => {
                    vec![cdybe_reduced(&fm.r_prime, &fm.base, lambda, z, -Z_L_SIGN)?]
                }
                Some(Control::FlippedEta) => vec![cdybe_pl(&fm.r, &fm.base, lambda, z, -ETA_SIGN)?],
                Some(_) => unreachable!("other controls are not graded"),
            },
            Prepared::Levi {
                lv,
                z,
                perturbation,
            } => match perturbation {
                None => pl_family(&lv.r, &lv.r_prime, &lv.base, lambda, z)?,
                Some(delta) => {
                    let bad = Perturbed {
                        inner: lv.r.clone(),
                        delta: delta.clone(),
                    };
                    let eq = proposition_equivalence(&bad, &lv.base, lambda, z)?;
                    vec![
                        eq.pl,
                        eq.reduced,
                        agreement("proposition_equivalence", lambda, eq.agree),
                    ]
                }
            },
            Prepared::Reduction { lv, epsilon_prime } => {
                let nearby = s
                    .nearby
                    .as_deref()
                    .expect("reduction samples carry a nearby point");
                let cc = reduction_crosscheck(lv, lambda, nearby, *epsilon_prime)?;
                if *epsilon_prime == C64::new(1.0, 0.0) {
                    let agree = agreement("crosscheck_agreement", lambda, cc.agree);
                    vec![cc.restriction, cc.abelian, cc.pl_nearby, agree]
                } else {
                    vec![cc.abelian]
                }
            }
            Prepared::Es { es, base, z, .. } => vec![cdybe_abelian(
                es,
                base,
                lambda,
                z,
                DerivativeMode::FiniteDifference,
            )?],
        })
    }
}

fn agreement(check: &str, lambda: &[C64], agree: bool) -> ResidualReport {
    ResidualReport::absolute(check, lambda, if agree { 0.0 } else { 1.0 }, 0.5)
}

/// Full and reduced equations, their agreement, and the equivariance pair.
fn pl_family(
    r: &SpectralField,
    r_prime: &SpectralField,
    base: &PlBase,
    lambda: &[C64],
    z: &ZElement<C64>,
) -> Result<Vec<ResidualReport>> {
    let eq = proposition_equivalence(r, base, lambda, z)?;
    let qi = quasi_invariance(r, base, lambda)?;
    let inv = invariance(r_prime, &base.g, &base.basis, lambda)?;
    let gap = (qi.residual_abs - inv.residual_abs).abs();
    let budget = qi.fd_error().max(inv.fd_error());
    let pair = ResidualReport::absolute("equivariance_agreement", lambda, gap, budget)
        .with_meta("fd_error_estimate", budget);
    Ok(vec![
        eq.pl,
        eq.reduced,
        agreement("proposition_equivalence", lambda, eq.agree),
        qi,
        inv,
        chart_identities(base, lambda)?,
        pair,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub samples: usize,
    pub samples_passed: usize,
    pub checks: usize,
    pub checks_passed: usize,
    pub max_residual_rel: f64,
    pub wall_time_seconds: f64,
    pub vacuous: bool,
    pub rejections: usize,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub epsilons: Vec<[f64; 2]>,
    pub seed: u64,
    pub radius: f64,
    pub conventions: BTreeMap<String, Value>,
    pub reports: Vec<ResidualReport>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.all_passed {
            0
        } else {
            1
        }
    }

    /// Reports of one check, in sample order.
    pub fn check(&self, name: &str) -> Vec<&ResidualReport> {
        self.reports.iter().filter(|r| r.check == name).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub samples: usize,
    pub plan: SamplePlan,
    pub tier: Option<ToleranceTier>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            samples: 20,
            plan: SamplePlan::default(),
            tier: None,
        }
    }
}

fn structural_suite() -> Result<Vec<ResidualReport>> {
    let mut out = Vec::new();
    for (name, n) in [("sl2", 2), ("sl3", 3)] {
        let (g, rd) = build_sl::<C64>(n)?;
        let qt = QuasiTriangular::standard(&g, &rd)?;
        out.extend(structural_checks(name, &g, Some(&qt))?);
    }
    let (sl2, rd) = build_sl::<C64>(2)?;
    let sum = direct_sum(&[&sl2, &sl2])?;
    let rd_sum = RootDatum::direct_sum(&[(&rd, 3), (&rd, 3)]);
    let qt = QuasiTriangular::standard(&sum, &rd_sum)?;
    out.extend(structural_checks("sl2+sl2", &sum, Some(&qt))?);
    let (sl3, rd3) = build_sl::<C64>(3)?;
    let (levi, rd_l) = levi_subalgebra(&sl3, &rd3, &[0])?;
    let qt = QuasiTriangular::standard(levi.algebra(), &rd_l)?;
    out.extend(structural_checks("gl2-in-sl3", levi.algebra(), Some(&qt))?);
    Ok(out)
}

fn retier(r: &mut ResidualReport, tier: ToleranceTier) {
    if r.metadata.contains_key("derivative")
        || r.check.starts_with("cdybe")
        || r.check.contains("invariance")
    {
        if r.check == "equivariance_agreement" {
            return;
        }
        r.tolerance = tier.value();
        r.verdict = if r.residual_rel <= r.tolerance {
            crate::verify::Verdict::Pass
        } else {
            crate::verify::Verdict::Fail
        };
    }
}

/// Run every check of `scenario` on `samples` points per `ε`.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut sample_verdicts = Vec::new();
    let mut rejections = 0;
    match &scenario.kind {
        ScenarioKind::Structural => reports.extend(structural_suite()?),
        ScenarioKind::Custom(cfg) => {
            let qt = match (&cfg.pair, &cfg.roots) {
                (Some((r, o)), _) => {
                    Some(QuasiTriangular::new(&cfg.algebra, r.clone(), o.clone())?)
                }
                (None, Some(rd)) => Some(QuasiTriangular::standard(&cfg.algebra, rd)?),
                _ => None,
            };
            reports.extend(structural_checks("custom", &cfg.algebra, qt.as_ref())?);
        }
        _ => {}
    }
    let mut rng = opts.plan.rng();
    for (ei, &epsilon) in scenario.epsilons.iter().enumerate() {
        let Some(prepared) = prepare(&scenario.kind, epsilon)? else {
            continue;
        };
        if opts.samples == 0 {
            continue;
        }
        let (samples, stats) = prepared.sample(&opts.plan, &mut rng, opts.samples)?;
        rejections += stats.rejected;
        let per_sample: Vec<Vec<ResidualReport>> = samples
            .par_iter()
            .map(|s| {
                prepared.evaluate(s).unwrap_or_else(|e| {
                    vec![
                        ResidualReport::absolute("evaluation", &s.lambda, f64::MAX, 0.0)
                            .with_meta("error", e.to_string()),
                    ]
                })
            })
            .collect();
        for (si, mut group) in per_sample.into_iter().enumerate() {
            for r in &mut group {
                if let Some(t) = opts.tier {
                    retier(r, t);
                }
                r.metadata.insert("sample".into(), json!(si));
                r.metadata
                    .insert("epsilon".into(), json!([epsilon.re, epsilon.im]));
                r.metadata.insert("epsilon_index".into(), json!(ei));
            }
            sample_verdicts.push(group.iter().all(ResidualReport::passed));
            reports.extend(group);
        }
    }
    for r in &mut reports {
        r.scenario.clone_from(&scenario.name);
    }
    let checks_passed = reports.iter().filter(|r| r.passed()).count();
    let summary = Summary {
        samples: sample_verdicts.len(),
        samples_passed: sample_verdicts.iter().filter(|&&v| v).count(),
        checks: reports.len(),
        checks_passed,
        max_residual_rel: reports.iter().map(|r| r.residual_rel).fold(0.0, f64::max),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        vacuous: reports.is_empty(),
        rejections,
        all_passed: checks_passed == reports.len(),
    };
    let mut conventions = BTreeMap::new();
    conventions.insert("z_l_sign".to_string(), json!(Z_L_SIGN));
    conventions.insert("eta_sign".to_string(), json!(ETA_SIGN));
    conventions.insert(
        "derivative_step".to_string(),
        json!(crate::dynfield::FD_STEP),
    );
    Ok(VerificationReport {
        scenario: scenario.name.clone(),
        epsilons: scenario.epsilons.iter().map(|e| [e.re, e.im]).collect(),
        seed: opts.plan.seed,
        radius: opts.plan.radius,
        conventions,
        reports,
        summary,
    })
}
