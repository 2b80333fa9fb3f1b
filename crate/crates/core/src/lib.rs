//! Higher mean curvatures of closed hypersurfaces in space forms and
//! numerical verification of the Hsiung–Minkowski and Katsurada integral
//! identities, together with an exact model of the exterior forms `α_i` on
//! the tangent sphere bundle.
//!
//! The numerical modules are generic over the stored scalar type
//! ([`Scalar`]: `f32` or `f64`) and evaluate charts and fields through
//! [`Real`], which forward-mode [`dual::Dual`] numbers also implement. The
//! curvature recursions are generic over [`scalar::Field`], so they run on
//! exact rationals too. Aliases for the common `f64` instantiation are
//! exported at the crate root.

pub mod curvature;
pub mod dual;
pub mod error;
pub mod framealgebra;
pub mod identities;
pub mod immersion;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod spaceform;
pub mod surfaces;

pub use error::{Error, Result};
pub use scalar::{Field, Real, Scalar};

pub use num_rational::BigRational;

pub type Model64 = spaceform::AmbientModel<f64>;
pub type Point64 = spaceform::AmbientPoint<f64>;
pub type Tangent64 = spaceform::TangentVector<f64>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type RationalMatrix = linalg::Matrix<BigRational>;
pub type Surface64 = immersion::Hypersurface<f64, surfaces::Builtin<f64>>;
pub type ShapeData64 = immersion::ShapeData<f64>;
pub type Grid64 = quadrature::GridRule<f64>;
pub type Report64 = identities::IdentityReport<f64>;
