//! Scalar fields the structural layer is generic over.
//!
//! Lie algebras, tensors and quasitriangular pairs only need field
//! arithmetic, so they work over `f32`, `f64`, their complex versions and
//! exact rationals. Anything that needs `coth` or an eigensolver is pinned
//! to [`C64`](crate::C64).

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::Num;

/// Field element usable as a coordinate.
pub trait Scalar:
    Num + Copy + Neg<Output = Self> + Debug + PartialEq + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    /// Absolute value, used for norms and pivoting.
    fn modulus(&self) -> f64;

    /// Default tolerance for structural residuals. Zero for exact fields.
    fn structural_tolerance() -> f64;

    fn to_c64(&self) -> Complex<f64>;

    fn is_exact() -> bool {
        Self::structural_tolerance() == 0.0
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn structural_tolerance() -> f64 {
        1e-12
    }
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(*self, 0.0)
    }
}

impl Scalar for f32 {
    fn from_i64(v: i64) -> Self {
        v as f32
    }
    fn modulus(&self) -> f64 {
        self.abs() as f64
    }
    fn structural_tolerance() -> f64 {
        1e-5
    }
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(*self as f64, 0.0)
    }
}

impl Scalar for Complex<f64> {
    fn from_i64(v: i64) -> Self {
        Complex::new(v as f64, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn structural_tolerance() -> f64 {
        1e-12
    }
    fn to_c64(&self) -> Complex<f64> {
        *self
    }
}

impl Scalar for Complex<f32> {
    fn from_i64(v: i64) -> Self {
        Complex::new(v as f32, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm() as f64
    }
    fn structural_tolerance() -> f64 {
        1e-5
    }
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(self.re as f64, self.im as f64)
    }
}

impl Scalar for Ratio<i64> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn modulus(&self) -> f64 {
        (*self.numer() as f64 / *self.denom() as f64).abs()
    }
    fn structural_tolerance() -> f64 {
        0.0
    }
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(*self.numer() as f64 / *self.denom() as f64, 0.0)
    }
}

/// Max-abs norm of a coordinate slice.
pub fn max_abs<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(Scalar::modulus).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ratio_is_reduced() {
        let x = <Ratio<i64> as Scalar>::from_ratio(2, 4);
        assert_eq!(x, Ratio::new(1, 2));
        assert!(<Ratio<i64> as Scalar>::is_exact());
        assert!(!<f64 as Scalar>::is_exact());
    }

    #[test]
    fn modulus_of_complex() {
        assert_eq!(Complex::new(3.0, 4.0).modulus(), 5.0);
        assert_eq!(max_abs(&[1.0, -7.5, 2.0]), 7.5);
    }
}
