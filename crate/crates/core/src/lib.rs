//! Exact and numerical tools for δ_λ-homogeneous Hörmander systems of
//! polynomial vector fields: structural certificates, brackets, Carnot lift
//! verification, homogeneous norms and balls, and empirical constants for
//! Sobolev-type inequalities.
//!
//! The symbolic core is generic over the coefficient type ([`Coeff`]); exact
//! certificates use [`Rational`], numerical paths use `f64`.

#![allow(clippy::type_complexity, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod fields;
pub mod fixtures;
pub mod hormander;
pub mod io;
pub mod lifting;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod run;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Coeff, Real};

/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
pub type QPoly = algebra::Poly<Rational>;
pub type Jet64 = algebra::Jet<f64>;
pub type QJet = algebra::Jet<Rational>;
pub type QField = fields::VectorField<Rational>;
pub type QSystem = fields::VectorFieldSystem<Rational>;
