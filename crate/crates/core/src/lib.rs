//! Dynamical r-matrices over abelian and Poisson-Lie base manifolds, with
//! numerical certification of the identities they satisfy.
//!
//! The structural layer ([`LieAlgebra`], [`Tensor2`], [`Tensor3`],
//! [`QuasiTriangular`]) is generic over [`Scalar`], so identities without
//! transcendental functions can be checked exactly over the rationals. The
//! analytic layer (matrix functions, r-matrix constructors, derivatives,
//! residual evaluators) runs on [`C64`].

pub mod cli;
pub mod dynfield;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod matfun;
pub mod rmat;
pub mod scalar;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use liealg::{
    build_sl, cyclic_automorphism, diagonal_subalgebra, direct_sum, levi_subalgebra, Automorphism,
    LieAlgebra, RootDatum, Subalgebra,
};
pub use rmat::{QuasiTriangular, ZElement};
pub use scalar::Scalar;
pub use tensor::{Tensor2, Tensor3};

/// Complex double precision, the working field of the analytic layer.
pub type C64 = num_complex::Complex<f64>;
/// Exact rationals for structural checks.
pub type Q = num_rational::Ratio<i64>;

pub type LieAlgebraC64 = LieAlgebra<C64>;
pub type LieAlgebraF64 = LieAlgebra<f64>;
pub type LieAlgebraF32 = LieAlgebra<f32>;
pub type LieAlgebraQ = LieAlgebra<Q>;
pub type Tensor2C64 = Tensor2<C64>;
pub type Tensor3C64 = Tensor3<C64>;
pub type Tensor2Q = Tensor2<Q>;
pub type Tensor3Q = Tensor3<Q>;
pub type QuasiTriangularC64 = QuasiTriangular<C64>;
pub type QuasiTriangularQ = QuasiTriangular<Q>;
