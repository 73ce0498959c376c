use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use hsq_core::fields::H1Certificate;
use hsq_core::geometry::hom_norm;
use hsq_core::hormander::{check_rank_at_origin, default_max_depth, HormanderCertificate};
use hsq_core::io::{parent_dir, read_json, to_json_pretty, write_atomic, HarnessFile, LiftFile, SystemFile, SCHEMA};
use hsq_core::lifting::{verify_group, verify_lift as verify_lift_identities, GroupCertificate, LiftCertificate};
use hsq_core::run::{run_harness, HarnessReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Fail = 2,
    SoftFail = 3,
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<()> {
    let text = to_json_pretty(report)?;
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(passed: bool) -> Status {
    if passed {
        Status::Pass
    } else {
        Status::Fail
    }
}

#[derive(Serialize)]
struct CheckReport {
    schema: u32,
    command: &'static str,
    system: SystemFile,
    q: u32,
    h1: H1Certificate,
    hormander: HormanderCertificate,
    minimal_depth: Option<usize>,
    passed: bool,
}

pub fn check(path: &Path, max_depth: Option<usize>, out: Option<&Path>) -> Result<Status> {
    let file: SystemFile = read_json(path)?;
    let sys = file.to_system().with_context(|| format!("in {}", path.display()))?;
    let depth = max_depth.unwrap_or_else(|| default_max_depth(&sys));
    let h1 = sys.check_h1();
    let hormander = check_rank_at_origin(&sys, depth)?;
    let passed = h1.passed && hormander.passed;
    eprintln!(
        "{}: homogeneity {}, rank {}/{} at depth ≤ {depth}{}",
        sys.name(),
        if h1.passed { "ok" } else { "FAILED" },
        hormander.rank,
        sys.n(),
        if hormander.passed { format!(", minimal depth {}", hormander.depth_used) } else { String::new() }
    );
    let report = CheckReport {
        schema: SCHEMA,
        command: "check",
        q: sys.q(),
        minimal_depth: hormander.passed.then_some(hormander.depth_used),
        system: SystemFile::from_system(&sys),
        h1,
        hormander,
        passed,
    };
    emit(&report, out)?;
    Ok(verdict(passed))
}

#[derive(Serialize)]
struct LiftReport {
    schema: u32,
    command: &'static str,
    lift: LiftFile,
    group: GroupCertificate,
    lift_certificate: LiftCertificate,
    passed: bool,
}

pub fn verify_lift(path: &Path, out: Option<&Path>) -> Result<Status> {
    let dir = parent_dir(path);
    let file: LiftFile = read_json(path)?;
    let file = file.resolved(&dir)?;
    let spec = file.to_spec(&dir).with_context(|| format!("in {}", path.display()))?;
    let group = verify_group(&spec)?;
    let lift_certificate = verify_lift_identities(&spec)?;
    let passed = group.passed && lift_certificate.passed;
    for c in group.checks.iter().chain(&lift_certificate.items) {
        let mark = if c.skipped { "skipped" } else if c.passed { "ok" } else { "FAILED" };
        eprintln!("{}: {} {mark}", spec.name(), c.name);
    }
    let report = LiftReport {
        schema: SCHEMA,
        command: "verify-lift",
        lift: file,
        group,
        lift_certificate,
        passed,
    };
    emit(&report, out)?;
    Ok(verdict(passed))
}

#[derive(Serialize)]
struct NormReport {
    schema: u32,
    command: &'static str,
    system: String,
    sigma: Vec<u32>,
    point: Vec<f64>,
    norm: f64,
}

fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t.parse().with_context(|| format!("bad coordinate `{t}`"))?;
            if !v.is_finite() {
                bail!("coordinate `{t}` is not finite");
            }
            Ok(v)
        })
        .collect()
}

pub fn norm(system: &Path, point: &str, out: Option<&Path>) -> Result<Status> {
    let sys = read_json::<SystemFile>(system)?
        .to_system()
        .with_context(|| format!("in {}", system.display()))?;
    let x = parse_point(point)?;
    if x.len() != sys.n() {
        bail!("point has {} coordinates, the system lives in R^{}", x.len(), sys.n());
    }
    let report = NormReport {
        schema: SCHEMA,
        command: "norm",
        system: sys.name().to_string(),
        sigma: sys.sigma().to_vec(),
        norm: hom_norm(sys.sigma(), &x),
        point: x,
    };
    emit(&report, out)?;
    Ok(Status::Pass)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, report: &HarnessReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["inequality", "function", "form", "index", "eps", "radius", "lhs", "second", "rhs", "ratio"])?;
    for r in report.interpolation.iter().chain(&report.apriori) {
        for row in &r.rows {
            w.write_record([
                r.inequality.clone(),
                row.function.clone(),
                row.form.clone(),
                row.index.map(|i| i.to_string()).unwrap_or_default(),
                fmt_opt(row.eps),
                fmt_opt(row.radius),
                row.lhs.to_string(),
                fmt_opt(row.second),
                row.rhs.to_string(),
                row.ratio.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().context("flushing CSV")?;
    write_atomic(path, &bytes)?;
    Ok(())
}

pub fn harness(path: &Path, resolution: Option<usize>, seed: Option<u64>, out: Option<&Path>) -> Result<Status> {
    let mut config: HarnessFile = read_json(path)?;
    if let Some(r) = resolution {
        if r == 0 {
            bail!("--resolution must be positive");
        }
        config.quadrature.resolution = r;
    }
    if let Some(s) = seed {
        config.quadrature.seed = s;
    }
    let report = run_harness(&config, &parent_dir(path))?;
    for r in report.interpolation.iter().chain(&report.apriori) {
        let constants: Vec<String> = r.constants.iter().map(|(k, v)| format!("{k} = {v:.6}")).collect();
        eprintln!(
            "{}: {} (max relative quadrature error {:.2e})",
            r.inequality,
            constants.join(", "),
            r.max_rel_error
        );
    }
    if let Some(s) = &report.sandwich {
        eprintln!("sandwich: {}/{} passed", s.iter().filter(|e| e.report.passed).count(), s.len());
    }
    if let Some(l) = &report.leibniz {
        let worst = l.iter().map(|e| e.max_rel_error).fold(0.0, f64::max);
        eprintln!("leibniz: {}/{} passed, worst relative error {worst:.2e}", l.iter().filter(|e| e.passed).count(), l.len());
    }
    emit(&report, out)?;
    if let Some(out) = out {
        write_csv(&out.with_extension("csv"), &report)?;
    }
    Ok(if !report.passed {
        Status::Fail
    } else if !report.quadrature_ok {
        Status::SoftFail
    } else {
        Status::Pass
    })
}
