//! Empirical constants for the interpolation and a-priori inequalities.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::family::TestFunction;
use super::norms::{check_sigma_grid, float_fields, phi_from_norms, word_norms, WordNorms, DEFAULT_REL_TOL};
use super::{default_eps_grid, default_sigma_grid};
use crate::algebra::ScalarField;
use crate::error::{Error, Result};
use crate::fields::{word_values, VectorFieldSystem};
use crate::geometry::{dilate, random_unit_vector, shard_rng};
use crate::quadrature::QuadSettings;
use crate::Rational;

/// Report format version.
pub const SCHEMA: u32 = 1;

const SUPPORT_SAMPLES: usize = 256;

/// One radial panel of 16 nodes per breakpoint interval.
pub fn harness_quadrature() -> QuadSettings {
    QuadSettings {
        resolution: 24,
        panels: 1,
        ..QuadSettings::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterpolationConfig {
    pub p: f64,
    pub eps_grid: Vec<f64>,
    /// Radii `R` for the ball forms on `B_{R/4}, B_R` and for `Φ_k`.
    #[serde(rename = "R_grid")]
    pub r_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub quadrature: QuadSettings,
    /// Relative quadrature error tolerated before the report is marked soft-failed.
    pub tolerance: f64,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        InterpolationConfig {
            p: 2.0,
            eps_grid: default_eps_grid(),
            r_grid: vec![1.0, 2.0, 4.0],
            sigma_grid: default_sigma_grid(),
            quadrature: harness_quadrature(),
            tolerance: DEFAULT_REL_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AprioriConfig {
    pub p: f64,
    pub k: usize,
    pub quadrature: QuadSettings,
    pub tolerance: f64,
}

impl Default for AprioriConfig {
    fn default() -> Self {
        AprioriConfig {
            p: 2.0,
            k: 0,
            quadrature: harness_quadrature(),
            tolerance: DEFAULT_REL_TOL,
        }
    }
}

/// One evaluation of a defining ratio.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub function: String,
    /// `global`, `ball`, `phi`, `theta` or `lambda`.
    pub form: String,
    pub index: Option<usize>,
    pub eps: Option<f64>,
    pub radius: Option<f64>,
    pub lhs: f64,
    /// Second-order term multiplied by `ε` in the interpolation forms.
    pub second: Option<f64>,
    /// Term divided into the ratio.
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub schema: u32,
    pub inequality: String,
    pub p: f64,
    pub k: Option<usize>,
    pub eps_grid: Vec<f64>,
    pub family: Vec<String>,
    /// Maxima of the defining ratios over the family; lower bounds for the true constants.
    pub constants: BTreeMap<String, f64>,
    pub rows: Vec<RatioRow>,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub quadrature_ok: bool,
    pub passed: bool,
}

impl InequalityReport {
    fn new(inequality: &str, p: f64, k: Option<usize>, eps_grid: Vec<f64>, tolerance: f64) -> Self {
        InequalityReport {
            schema: SCHEMA,
            inequality: inequality.to_string(),
            p,
            k,
            eps_grid,
            family: Vec::new(),
            constants: BTreeMap::new(),
            rows: Vec::new(),
            max_rel_error: 0.0,
            tolerance,
            quadrature_ok: true,
            passed: true,
        }
    }

    fn finish(&mut self) {
        self.quadrature_ok = self.max_rel_error <= self.tolerance;
        self.passed = self.constants.values().all(|c| c.is_finite());
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }
}

/// `ε(a − εb)/c` clamped at zero.
fn interpolation_ratio(eps: f64, a: f64, b: f64, c: f64) -> f64 {
    let num = eps * (a - eps * b);
    if num <= 0.0 {
        0.0
    } else if c > 0.0 {
        num / c
    } else {
        f64::INFINITY
    }
}

/// `a / c` with `0/0 = 0`.
fn plain_ratio(a: f64, c: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if c > 0.0 {
        a / c
    } else {
        f64::INFINITY
    }
}

fn check_common(sys: &VectorFieldSystem<Rational>, family: &[TestFunction], p: f64) -> Result<Vec<f64>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent p must be in [1, ∞), got {p}")));
    }
    family
        .iter()
        .enumerate()
        .map(|(j, f)| f.checked_support(sys.sigma(), SUPPORT_SAMPLES, j as u64))
        .collect()
}

fn bump(constants: &mut BTreeMap<String, f64>, name: &str, v: f64) {
    let e = constants.entry(name.to_string()).or_insert(0.0);
    if v > *e || v.is_nan() {
        *e = v;
    }
}

/// Constants `c_p` (whole space), `c_p_ball` (`B_{R/4}` against `B_R`) and
/// `alpha_p` (the `Φ_k` form) over the family.
pub fn interpolation_harness(
    sys: &VectorFieldSystem<Rational>,
    family: &[TestFunction],
    cfg: &InterpolationConfig,
) -> Result<InequalityReport> {
    let supports = check_common(sys, family, cfg.p)?;
    if cfg.eps_grid.is_empty() || cfg.eps_grid.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::InvalidArgument("ε grid must be nonempty and inside (0, 1]".into()));
    }
    if cfg.r_grid.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument("R grid must contain positive radii".into()));
    }
    check_sigma_grid(&cfg.sigma_grid)?;
    let m = sys.m();
    let mut report = InequalityReport::new("interpolation", cfg.p, None, cfg.eps_grid.clone(), cfg.tolerance);
    for name in ["c_p", "c_p_ball", "alpha_p"] {
        report.constants.insert(name.to_string(), 0.0);
    }
    let per_function = family
        .iter()
        .zip(&supports)
        .map(|(f, &support)| {
            let mut radii = vec![support];
            for &r in &cfg.r_grid {
                radii.push(r / 4.0);
                radii.push(r);
                radii.extend(cfg.sigma_grid.iter().map(|s| s * r));
            }
            let norms = word_norms(sys, &f.field, &radii, &f.knots, 2, None, cfg.p, &cfg.quadrature)?;
            Ok((f, norms))
        })
        .collect::<Result<Vec<(&TestFunction, Vec<WordNorms>)>>>()?;
    let stride = 2 + cfg.sigma_grid.len();
    for (f, norms) in per_function {
        report.family.push(f.name.clone());
        for n in &norms {
            report.max_rel_error = report.max_rel_error.max(n.max_rel_error());
        }
        let global = &norms[0];
        let zero = global.semi(0).0;
        for &eps in &cfg.eps_grid {
            for i in 1..=m {
                let (a, b) = (global.level(1)[i - 1].0, global.square(i).0);
                let ratio = interpolation_ratio(eps, a, b, zero);
                bump(&mut report.constants, "c_p", ratio);
                report.rows.push(RatioRow {
                    function: f.name.clone(),
                    form: "global".into(),
                    index: Some(i),
                    eps: Some(eps),
                    radius: None,
                    lhs: a,
                    second: Some(b),
                    rhs: zero,
                    ratio,
                });
            }
        }
        for (j, &r) in cfg.r_grid.iter().enumerate() {
            let block = &norms[1 + j * stride..1 + (j + 1) * stride];
            let (inner, outer) = (&block[0], &block[1]);
            let zero = outer.semi(0).0;
            for &eps in &cfg.eps_grid {
                for i in 1..=m {
                    let (a, b) = (inner.level(1)[i - 1].0, outer.square(i).0);
                    let ratio = interpolation_ratio(eps, a, b, zero);
                    bump(&mut report.constants, "c_p_ball", ratio);
                    report.rows.push(RatioRow {
                        function: f.name.clone(),
                        form: "ball".into(),
                        index: Some(i),
                        eps: Some(eps),
                        radius: Some(r),
                        lhs: a,
                        second: Some(b),
                        rhs: zero,
                        ratio,
                    });
                }
            }
            let sigma_norms: Vec<&WordNorms> = block[2..].iter().collect();
            let phi: Vec<f64> = (0..=2)
                .map(|k| phi_from_norms(k, r, cfg.p, &cfg.sigma_grid, &sigma_norms).value)
                .collect();
            for &eps in &cfg.eps_grid {
                let ratio = interpolation_ratio(eps, phi[1], phi[2], phi[0]);
                bump(&mut report.constants, "alpha_p", ratio);
                report.rows.push(RatioRow {
                    function: f.name.clone(),
                    form: "phi".into(),
                    index: None,
                    eps: Some(eps),
                    radius: Some(r),
                    lhs: phi[1],
                    second: Some(phi[2]),
                    rhs: phi[0],
                    ratio,
                });
            }
        }
    }
    report.finish();
    Ok(report)
}

/// Constants `theta_i` for `‖D^{i+2}u‖ ≤ Θ‖D^i(Lu)‖`, their maximum `theta`,
/// and `lambda` for `‖u‖_{W^{k+2,p}} ≤ Λ(‖Lu‖_{W^{k,p}} + ‖u‖_{L^p})`.
pub fn apriori_harness(sys: &VectorFieldSystem<Rational>, family: &[TestFunction], cfg: &AprioriConfig) -> Result<InequalityReport> {
    let supports = check_common(sys, family, cfg.p)?;
    let k = cfg.k;
    if k > 2 {
        return Err(Error::OrderTooHigh { order: k, max: 2 });
    }
    let mut report = InequalityReport::new("apriori", cfg.p, Some(k), Vec::new(), cfg.tolerance);
    for i in 0..=k {
        report.constants.insert(format!("theta_{i}"), 0.0);
    }
    report.constants.insert("theta".into(), 0.0);
    report.constants.insert("lambda".into(), 0.0);
    for (f, &support) in family.iter().zip(&supports) {
        let wn = word_norms(sys, &f.field, &[support], &f.knots, k + 2, Some(k), cfg.p, &cfg.quadrature)?.remove(0);
        report.max_rel_error = report.max_rel_error.max(wn.max_rel_error());
        report.family.push(f.name.clone());
        let row = |form: &str, index: Option<usize>, lhs: f64, rhs: f64| RatioRow {
            function: f.name.clone(),
            form: form.into(),
            index,
            eps: None,
            radius: Some(support),
            lhs,
            second: None,
            rhs,
            ratio: plain_ratio(lhs, rhs),
        };
        for i in 0..=k {
            let r = row("theta", Some(i), wn.semi(i + 2).0, wn.lu_semi(i).0);
            bump(&mut report.constants, &format!("theta_{i}"), r.ratio);
            bump(&mut report.constants, "theta", r.ratio);
            report.rows.push(r);
        }
        let lhs: f64 = (0..=k + 2).map(|i| wn.semi(i).0).sum();
        let rhs: f64 = (0..=k).map(|i| wn.lu_semi(i).0).sum::<f64>() + wn.semi(0).0;
        let r = row("lambda", None, lhs, rhs);
        bump(&mut report.constants, "lambda", r.ratio);
        report.rows.push(r);
    }
    report.finish();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeibnizReport {
    pub function: String,
    pub samples: usize,
    pub seed: u64,
    /// Largest `|lhs − rhs|` relative to the sum of the term magnitudes, over
    /// points where that sum is a normal (not subnormal) float.
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `X_i²(φu) = u X_i²φ + 2 (X_iφ)(X_iu) + φ X_i²u` at random points of
/// `B_radius`, with all terms from jets.
pub fn leibniz_check(
    sys: &VectorFieldSystem<Rational>,
    u: &TestFunction,
    phi: &ScalarField,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<LeibnizReport> {
    const TOL: f64 = 1e-8;
    let fields = float_fields(sys);
    let product = phi.mul(&u.field);
    let m = sys.m();
    let errors = (0..samples)
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let mut rng = shard_rng(seed, j as u64);
            let omega = random_unit_vector(&mut rng, sys.n());
            let rho: f64 = rng.random_range(0.0..radius);
            let x = dilate(sys.sigma(), &omega, rho);
            let wp = word_values(&fields, &product, &x, 2)?;
            let wf = word_values(&fields, phi, &x, 2)?;
            let wu = word_values(&fields, &u.field, &x, 2)?;
            let (f0, u0) = (*wf.value(), *wu.value());
            let mut worst: f64 = 0.0;
            for i in 0..m {
                let ii = i * m + i;
                let lhs = wp.level(2)[ii];
                let terms = [u0 * wf.level(2)[ii], 2.0 * wf.level(1)[i] * wu.level(1)[i], f0 * wu.level(2)[ii]];
                let rhs: f64 = terms.iter().sum();
                let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(lhs.abs());
                if scale.is_normal() {
                    worst = worst.max((lhs - rhs).abs() / scale);
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_rel_error = errors.into_iter().fold(0.0, f64::max);
    Ok(LeibnizReport {
        function: u.name.clone(),
        samples,
        seed,
        max_rel_error,
        tolerance: TOL,
        passed: max_rel_error <= TOL,
    })
}
