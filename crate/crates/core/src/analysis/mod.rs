//! Cutoffs, X-Sobolev norms, the Φ_k functionals and harnesses that estimate
//! the constants of the interpolation and a-priori inequalities over a family
//! of test functions.
//!
//! All constants reported here are empirical lower bounds: the maximum of the
//! defining ratio over a finite family.

pub mod cutoff;
pub mod family;
pub mod harness;
pub mod norms;

pub use cutoff::{cutoff_derivative_bounds, make_cutoff, CutoffBound, CutoffSpec};
pub use family::{default_family, TestFunction};
pub use harness::{apriori_harness, interpolation_harness, leibniz_check, AprioriConfig, InequalityReport, InterpolationConfig, LeibnizReport, RatioRow};
pub use norms::{phi_functional, sobolev_norm, word_norms, PhiReport, PhiTerm, SobolevReport, WordNorms};

/// Default grid for the sup over `σ ∈ (0, 1)` in `Φ_k`: `0.1, 0.2, …, 0.9`.
pub fn default_sigma_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// Default ε grid `0.1, 0.2, …, 1.0`.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 * 0.1).collect()
}
