//! Exact polynomials, truncated Taylor jets and expression-tree scalar fields.

pub mod expr;
pub mod jet;
pub mod poly;
pub mod profile;

pub use expr::{Expr, ScalarField, MAX_JET_ORDER};
pub use jet::{Jet, JetLayout};
pub use poly::{Exponents, Poly};
