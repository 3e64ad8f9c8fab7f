//! Holomorphic functions of a diagonalizable operator, applied through its
//! spectral projectors.
//!
//! Every scalar profile used by the r-matrix constructors is a combination of
//! `coth(a·s + b)` terms. Their poles are known in closed form, which gives
//! exact pole-distance checks; removable singularities at `s = 0` are handled
//! with two-term Taylor series.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{nalgebra_max_abs, InvariantSubspace};
use crate::C64;

/// Eigenvalues closer than this (relative to the spectral scale) share a cluster.
pub const CLUSTER_GAP: f64 = 1e-8;
/// Largest diagonalization defect accepted as semisimple.
pub const MAX_DEFECT: f64 = 1e-6;
/// Default minimum distance from a pole.
pub const DEFAULT_POLE_GUARD: f64 = 0.1;
/// Below this modulus the removable-singularity series is used.
pub const SERIES_RADIUS: f64 = 1e-3;

/// Numerically stable `coth z`.
pub fn coth(z: C64) -> C64 {
    if z.re.abs() < 1.0 {
        // cosh/sinh avoids the cancellation in 1 - e^{-2z} near the origin
        z.cosh() / z.sinh()
    } else if z.re >= 0.0 {
        let e = (-2.0 * z).exp();
        (1.0 + e) / (1.0 - e)
    } else {
        -coth(-z)
    }
}

/// `1 / sinh² z`.
pub fn csch2(z: C64) -> C64 {
    let s = z.sinh();
    1.0 / (s * s)
}

/// Eigen-decomposition `A = Σ s_i P_i` of a diagonalizable operator.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// One representative per cluster.
    pub eigenvalues: Vec<C64>,
    pub multiplicities: Vec<usize>,
    pub projectors: Vec<DMatrix<C64>>,
    /// Non-diagonalizability measure; near machine precision for semisimple input.
    pub defect: f64,
    vectors: DMatrix<C64>,
    inverse: DMatrix<C64>,
}

fn schur_eigenvalues(a: &DMatrix<C64>) -> Vec<C64> {
    let n = a.nrows();
    let (_, t) = a.clone().schur().unpack();
    let mut out = Vec::with_capacity(n);
    let mut m = 0;
    while m < n {
        let tiny = 1e-14 * (1.0 + t[(m, m)].norm());
        if m + 1 < n && t[(m + 1, m)].norm() > tiny {
            // unreduced 2x2 block
            let (p, q, r, s) = (t[(m, m)], t[(m, m + 1)], t[(m + 1, m)], t[(m + 1, m + 1)]);
            let half_tr = (p + s) / 2.0;
            let disc = ((p - s) * (p - s) / 4.0 + q * r).sqrt();
            out.push(half_tr + disc);
            out.push(half_tr - disc);
            m += 2;
        } else {
            out.push(t[(m, m)]);
            m += 1;
        }
    }
    out
}

/// Decompose `a` into spectral projectors, clustering eigenvalues at relative
/// gap [`CLUSTER_GAP`]. Fails with [`Error::NonSemisimple`] when the defect
/// exceeds [`MAX_DEFECT`].
pub fn spectral_decompose(a: &DMatrix<C64>) -> Result<SpectralData> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::input("spectral decomposition needs a square matrix"));
    }
    if n == 0 {
        return Ok(SpectralData {
            eigenvalues: Vec::new(),
            multiplicities: Vec::new(),
            projectors: Vec::new(),
            defect: 0.0,
            vectors: DMatrix::zeros(0, 0),
            inverse: DMatrix::zeros(0, 0),
        });
    }
    let scale = nalgebra_max_abs(a).max(1.0);
    let raw = schur_eigenvalues(a);

    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for s in raw {
        let hit = clusters.iter_mut().find(|c| {
            let mean = c.iter().sum::<C64>() / c.len() as f64;
            (mean - s).norm() <= CLUSTER_GAP * scale
        });
        match hit {
            Some(c) => c.push(s),
            None => clusters.push(vec![s]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    let mut defect = 0.0f64;
    let mut col = 0;
    for c in &clusters {
        let s = c.iter().sum::<C64>() / c.len() as f64;
        let m = c.len();
        let shifted = a - DMatrix::<C64>::identity(n, n) * s;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        // the m-th smallest singular value must vanish for a full eigenspace
        defect = defect.max(svd.singular_values[order[m - 1]] / scale);
        for &i in order.iter().take(m) {
            for r in 0..n {
                vectors[(r, col)] = v_t[(i, r)].conj();
            }
            col += 1;
        }
        eigenvalues.push(s);
        multiplicities.push(m);
    }

    let sv = vectors.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let inverse = match vectors.clone().try_inverse() {
        Some(inv) if smin > 0.0 => inv,
        _ => {
            return Err(Error::NonSemisimple {
                defect: f64::INFINITY,
            })
        }
    };
    defect = defect.max(f64::EPSILON * smax / smin);

    let mut projectors = Vec::with_capacity(clusters.len());
    let mut offset = 0;
    let mut recon = DMatrix::<C64>::zeros(n, n);
    for (i, &m) in multiplicities.iter().enumerate() {
        let p = vectors.columns(offset, m) * inverse.rows(offset, m);
        recon += &p * eigenvalues[i];
        projectors.push(p);
        offset += m;
    }
    defect = defect.max(nalgebra_max_abs(&(recon - a)) / scale);
    if defect > MAX_DEFECT {
        return Err(Error::NonSemisimple { defect });
    }
    Ok(SpectralData {
        eigenvalues,
        multiplicities,
        projectors,
        defect,
        vectors,
        inverse,
    })
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// `Σ f(s_i) P_i`.
    pub fn apply(&self, f: impl Fn(C64) -> Result<C64>) -> Result<DMatrix<C64>> {
        let n = self.dim();
        let mut diag = Vec::with_capacity(n);
        for (&s, &m) in self.eigenvalues.iter().zip(&self.multiplicities) {
            let v = f(s)?;
            diag.extend(std::iter::repeat_n(v, m));
        }
        let scaled = DMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * diag[j]);
        Ok(scaled * &self.inverse)
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        self.apply(Ok).expect("identity is total")
    }

    /// `‖Σ P_i − id‖`.
    pub fn projector_sum_residual(&self) -> f64 {
        let n = self.dim();
        let mut sum = DMatrix::<C64>::zeros(n, n);
        for p in &self.projectors {
            sum += p;
        }
        nalgebra_max_abs(&(sum - DMatrix::<C64>::identity(n, n)))
    }

    /// `max ‖P_i P_j − δ_ij P_i‖`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, p) in self.projectors.iter().enumerate() {
            for (j, q) in self.projectors.iter().enumerate() {
                let pq = p * q;
                let r = if i == j {
                    nalgebra_max_abs(&(pq - p))
                } else {
                    nalgebra_max_abs(&pq)
                };
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Which scalar profile a [`ScalarFun`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunKind {
    /// `(ε/2) coth(ε s / 2)`.
    CothScaled { epsilon: C64 },
    /// `1/s − ½ coth(s/2)`, removable at 0 with value 0.
    RationalTrigF0,
    /// `½ coth(s/2) − (ε/2) coth(ε s / 2)`, removable at 0 with value 0.
    TrigF0 { epsilon: C64 },
    /// `−(ε/2) coth(ε s / 2 + iπ j / n)`.
    ShiftedCoth { epsilon: C64, j: usize, n: usize },
    /// `(s/2) coth(s/2)`, removable at 0 with value 1.
    HalfCoth,
    /// `s / (1 − e^{−s})`.
    LeftTrivialization,
    /// `s / (e^{s} − 1)`.
    RightTrivialization,
    /// `s`.
    Identity,
}

/// One `coth(a s + b)` factor of a profile.
#[derive(Debug, Clone, Copy)]
struct CothTerm {
    a: C64,
    b: C64,
    removable_at_zero: bool,
}

/// A scalar profile with a pole guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarFun {
    pub kind: FunKind,
    pub pole_guard: f64,
}

impl fmt::Display for ScalarFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FunKind::CothScaled { epsilon } => write!(f, "coth_scaled(eps={epsilon})"),
            FunKind::RationalTrigF0 => write!(f, "rational_trig_f0"),
            FunKind::TrigF0 { epsilon } => write!(f, "trig_f0(eps={epsilon})"),
            FunKind::ShiftedCoth { epsilon, j, n } => {
                write!(f, "shifted_coth(eps={epsilon}, j={j}, n={n})")
            }
            FunKind::HalfCoth => write!(f, "half_coth"),
            FunKind::LeftTrivialization => write!(f, "left_trivialization"),
            FunKind::RightTrivialization => write!(f, "right_trivialization"),
            FunKind::Identity => write!(f, "identity"),
        }
    }
}

impl ScalarFun {
    pub fn new(kind: FunKind) -> Self {
        Self {
            kind,
            pole_guard: DEFAULT_POLE_GUARD,
        }
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.pole_guard = guard;
        self
    }

    pub fn coth_scaled(epsilon: C64) -> Self {
        Self::new(FunKind::CothScaled { epsilon })
    }

    pub fn rational_trig_f0() -> Self {
        Self::new(FunKind::RationalTrigF0)
    }

    pub fn trig_f0(epsilon: C64) -> Self {
        Self::new(FunKind::TrigF0 { epsilon })
    }

    pub fn shifted_coth(epsilon: C64, j: usize, n: usize) -> Self {
        Self::new(FunKind::ShiftedCoth { epsilon, j, n })
    }

    pub fn half_coth() -> Self {
        Self::new(FunKind::HalfCoth)
    }

    /// Parse a profile name as used in configs. `reciprocal_minus_coth` is
    /// another name for `rational_trig_f0`.
    pub fn from_name(name: &str, epsilon: C64, j: usize, n: usize) -> Result<Self> {
        Ok(Self::new(match name {
            "coth_scaled" => FunKind::CothScaled { epsilon },
            "rational_trig_f0" | "reciprocal_minus_coth" => FunKind::RationalTrigF0,
            "trig_f0" => FunKind::TrigF0 { epsilon },
            "shifted_coth" => FunKind::ShiftedCoth { epsilon, j, n },
            "half_coth" => FunKind::HalfCoth,
            "left_trivialization" => FunKind::LeftTrivialization,
            "right_trivialization" => FunKind::RightTrivialization,
            "identity" => FunKind::Identity,
            other => return Err(Error::input(format!("unknown scalar profile `{other}`"))),
        }))
    }

    fn terms(&self) -> Vec<CothTerm> {
        let half = C64::new(0.5, 0.0);
        let zero = C64::new(0.0, 0.0);
        let plain = |a: C64, removable| CothTerm {
            a,
            b: zero,
            removable_at_zero: removable,
        };
        match self.kind {
            FunKind::CothScaled { epsilon } => vec![plain(epsilon * 0.5, false)],
            FunKind::RationalTrigF0 => vec![plain(half, true)],
            FunKind::TrigF0 { epsilon } => vec![plain(half, true), plain(epsilon * 0.5, true)],
            FunKind::ShiftedCoth { epsilon, j, n } => vec![CothTerm {
                a: epsilon * 0.5,
                b: C64::new(0.0, PI * j as f64 / n as f64),
                removable_at_zero: false,
            }],
            FunKind::HalfCoth | FunKind::LeftTrivialization | FunKind::RightTrivialization => {
                vec![plain(half, true)]
            }
            FunKind::Identity => Vec::new(),
        }
    }

    fn epsilon(&self) -> Option<C64> {
        match self.kind {
            FunKind::CothScaled { epsilon }
            | FunKind::TrigF0 { epsilon }
            | FunKind::ShiftedCoth { epsilon, .. } => Some(epsilon),
            _ => None,
        }
    }

    /// Is the profile an odd function of `s`?
    pub fn is_odd(&self) -> bool {
        match self.kind {
            FunKind::CothScaled { .. }
            | FunKind::RationalTrigF0
            | FunKind::TrigF0 { .. }
            | FunKind::Identity => true,
            FunKind::ShiftedCoth { j, n, .. } => (2 * j) % n == 0,
            _ => false,
        }
    }

    /// Nearest pole to `s` that is not a removable point, with its distance.
    pub fn nearest_pole(&self, s: C64) -> Option<(C64, f64)> {
        let mut best: Option<(C64, f64)> = None;
        for t in self.terms() {
            if t.a.norm() == 0.0 {
                continue;
            }
            let w = t.a * s + t.b;
            let k = (w.im / PI).round();
            let candidates = [k - 1.0, k, k + 1.0];
            for kk in candidates {
                let zero_pole = kk == 0.0 && t.b.norm() == 0.0;
                if zero_pole && t.removable_at_zero {
                    continue;
                }
                let pole = (C64::new(0.0, PI * kk) - t.b) / t.a;
                let dist = (s - pole).norm();
                if best.is_none_or(|(_, d)| dist < d) {
                    best = Some((pole, dist));
                }
            }
        }
        best
    }

    fn series(&self, s: C64) -> Option<C64> {
        let scale = self.epsilon().map_or(1.0, |e| e.norm().max(1.0));
        if (s * scale).norm() >= SERIES_RADIUS {
            return None;
        }
        let s2 = s * s;
        let half_coth = 1.0 + s2 / 12.0 - s2 * s2 / 720.0;
        match self.kind {
            FunKind::RationalTrigF0 => Some(-s / 12.0 + s * s2 / 720.0),
            FunKind::TrigF0 { epsilon } => {
                let e2 = epsilon * epsilon;
                Some((1.0 - e2) * s / 12.0 - (1.0 - e2 * e2) * s * s2 / 720.0)
            }
            FunKind::HalfCoth => Some(half_coth),
            FunKind::LeftTrivialization => Some(half_coth + s / 2.0),
            FunKind::RightTrivialization => Some(half_coth - s / 2.0),
            _ => None,
        }
    }

    /// Closed-form value without guards or series.
    pub fn direct(&self, s: C64) -> C64 {
        match self.kind {
            FunKind::CothScaled { epsilon } => epsilon / 2.0 * coth(epsilon * s / 2.0),
            FunKind::RationalTrigF0 => 1.0 / s - 0.5 * coth(s / 2.0),
            FunKind::TrigF0 { epsilon } => {
                0.5 * coth(s / 2.0) - epsilon / 2.0 * coth(epsilon * s / 2.0)
            }
            FunKind::ShiftedCoth { epsilon, j, n } => {
                -epsilon / 2.0 * coth(epsilon * s / 2.0 + C64::new(0.0, PI * j as f64 / n as f64))
            }
            FunKind::HalfCoth => s / 2.0 * coth(s / 2.0),
            FunKind::LeftTrivialization => s / 2.0 * coth(s / 2.0) + s / 2.0,
            FunKind::RightTrivialization => s / 2.0 * coth(s / 2.0) - s / 2.0,
            FunKind::Identity => s,
        }
    }

    /// Guarded evaluation: the series near a removable point, an error within
    /// `pole_guard` of a genuine pole, the closed form otherwise.
    pub fn eval(&self, s: C64) -> Result<C64> {
        if let Some(e) = self.epsilon() {
            if e.norm() == 0.0 {
                return Err(Error::input(format!("{self} needs a nonzero epsilon")));
            }
        }
        if let Some((pole, distance)) = self.nearest_pole(s) {
            if distance < self.pole_guard {
                return Err(Error::PoleProximity {
                    function: self.to_string(),
                    argument: s,
                    pole,
                    distance,
                });
            }
        }
        Ok(self.series(s).unwrap_or_else(|| self.direct(s)))
    }
}

/// `f(A)` for a diagonalizable `A`.
pub fn apply_scalar(f: &ScalarFun, spec: &SpectralData) -> Result<DMatrix<C64>> {
    spec.apply(|s| f.eval(s))
}

/// `f(A|_V)` extended by zero on the complement of `V`. The spectral step runs
/// on the compressed operator, so eigenvalues outside `V` are never evaluated.
pub fn apply_on_subspace(
    f: &ScalarFun,
    a: &DMatrix<C64>,
    sub: &InvariantSubspace,
) -> Result<DMatrix<C64>> {
    if sub.dim() == 0 {
        return Ok(DMatrix::zeros(a.nrows(), a.ncols()));
    }
    let spec = spectral_decompose(&sub.compress(a))?;
    Ok(sub.expand(&apply_scalar(f, &spec)?))
}

/// Check that every eigenvalue of `a` on `sub` is admissible for `f`.
pub fn check_spectrum(
    f: &ScalarFun,
    a: &DMatrix<C64>,
    sub: &InvariantSubspace,
) -> Result<SpectralData> {
    let spec = spectral_decompose(&sub.compress(a))?;
    for &s in &spec.eigenvalues {
        f.eval(s)?;
    }
    Ok(spec)
}
