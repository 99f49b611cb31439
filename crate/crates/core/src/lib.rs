//! Exact index calculus, kernels and quadrature for Bergman-type projections
//! on generalized Hartogs triangles H_{m/n} = {|z1|^{m/n} < |z2| < 1}.
// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod diagram;
pub mod error;
pub mod exact;
pub mod kernels;
pub mod monomial;
pub mod quadrature;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{GammaShape, LatticeIndex, PInterval, Rational};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
pub type HPoint64 = kernels::HPoint<f64>;
pub type HPoint32 = kernels::HPoint<f32>;
pub type IntegralResult64 = quadrature::IntegralResult<f64>;
