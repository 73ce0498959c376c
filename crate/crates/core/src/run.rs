//! Harness runs driven by a [`HarnessFile`].

use serde::Serialize;

use crate::algebra::ScalarField;
use crate::analysis::{apriori_harness, interpolation_harness, leibniz_check, make_cutoff, AprioriConfig, InequalityReport, InterpolationConfig, LeibnizReport};
use crate::error::{Error, Result};
use crate::io::{Check, HarnessFile, Ref, SCHEMA};
use crate::lifting::{projected_norm_sandwich, SandwichReport};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichEntry {
    pub function: String,
    #[serde(flatten)]
    pub report: SandwichReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessReport {
    pub schema: u32,
    /// The configuration with every reference inlined.
    pub config: HarnessFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<InequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apriori: Option<InequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sandwich: Option<Vec<SandwichEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leibniz: Option<Vec<LeibnizReport>>,
    pub passed: bool,
    pub quadrature_ok: bool,
}

/// Resolves `config` against `base_dir` and runs the requested checks in a
/// fixed order.
pub fn run_harness(config: &HarnessFile, base_dir: &Path) -> Result<HarnessReport> {
    let config = config.resolved(base_dir)?;
    let Ref::Inline(system) = &config.system else {
        unreachable!("resolved configs are inline")
    };
    let sys = system.to_system()?;
    let family = config.family_members(&sys)?;
    let wants = |c: Check| config.checks.contains(&c);

    let interpolation = if wants(Check::Interpolation) {
        let cfg = InterpolationConfig {
            p: config.p,
            eps_grid: config.eps_grid.clone(),
            r_grid: config.r_grid.clone(),
            sigma_grid: config.sigma_grid.clone(),
            quadrature: config.quadrature.clone(),
            tolerance: config.tolerance,
        };
        Some(interpolation_harness(&sys, &family, &cfg)?)
    } else {
        None
    };
    let apriori = if wants(Check::Apriori) {
        let cfg = AprioriConfig {
            p: config.p,
            k: config.k,
            quadrature: config.quadrature.clone(),
            tolerance: config.tolerance,
        };
        Some(apriori_harness(&sys, &family, &cfg)?)
    } else {
        None
    };
    let sandwich = if wants(Check::Sandwich) {
        let Some(Ref::Inline(lift)) = &config.lift else {
            return Err(Error::InvalidArgument("the sandwich check needs a `lift`".into()));
        };
        let spec = lift.to_spec(base_dir)?;
        if spec.base() != &sys {
            return Err(Error::InvalidArgument("the lift does not lift the configured system".into()));
        }
        let mut out = Vec::new();
        for expr in &config.sandwich.functions {
            let u = ScalarField::parse(sys.n(), expr)?;
            for &r in &config.sandwich.radii {
                for &p in &config.sandwich.exponents {
                    out.push(SandwichEntry {
                        function: expr.clone(),
                        report: projected_norm_sandwich(&spec, &u, r, p, &config.quadrature)?,
                    });
                }
            }
        }
        Some(out)
    } else {
        None
    };
    let leibniz = if wants(Check::Leibniz) {
        let [r1, r2] = config.leibniz.cutoff;
        let phi = make_cutoff(sys.sigma(), r1, r2)?.phi;
        let seed = config.quadrature.seed;
        Some(
            family
                .iter()
                .enumerate()
                .map(|(j, u)| {
                    let radius = 1.25 * r2.max(u.support.unwrap_or(r2));
                    leibniz_check(&sys, u, &phi, radius, config.leibniz.samples, seed.wrapping_add(j as u64))
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };

    let reports = interpolation.iter().chain(&apriori);
    let passed = reports.clone().all(|r| r.passed)
        && sandwich.iter().flatten().all(|s| s.report.passed)
        && leibniz.iter().flatten().all(|l| l.passed);
    let quadrature_ok = reports.into_iter().all(|r| r.quadrature_ok);
    Ok(HarnessReport {
        schema: SCHEMA,
        config,
        interpolation,
        apriori,
        sandwich,
        leibniz,
        passed,
        quadrature_ok,
    })
}
