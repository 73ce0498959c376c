//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::Value;

use hsq_core::algebra::ScalarField;
use hsq_core::analysis::{cutoff_derivative_bounds, default_family, interpolation_harness, make_cutoff, InterpolationConfig};
use hsq_core::fields::{brackets_up_to, MultiIndex};
use hsq_core::fixtures::{chain, grushin, grushin2_lift, grushin_k, grushin_lift};
use hsq_core::geometry::{ball_inclusions_check, ball_measure, dilate, hom_norm, random_unit_vector, shard_rng};
use hsq_core::lifting::projected_norm_sandwich;
use hsq_core::quadrature::{integrate_monte_carlo, QuadSettings};

type Check = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn hsq(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hsq"))
        .args(args)
        .output()
        .expect("hsq binary runs");
    (out, start.elapsed())
}

fn stdout_json(out: &Output) -> Result<Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("stdout is not JSON: {e}"))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn hypothesis_certificates() -> Check {
    let cases = [
        ("grushin.json", 3, 2),
        ("grushin_k.json", 4, 3),
        ("grushin_k3.json", 5, 4),
        ("chain3.json", 6, 3),
        ("chain.json", 10, 4),
    ];
    let mut slowest = Duration::ZERO;
    for (file, q, depth) in cases {
        let (out, took) = hsq(&["check", fixture(file).to_str().unwrap()]);
        slowest = slowest.max(took);
        ensure(out.status.code() == Some(0), format!("{file}: exit {:?}", out.status.code()))?;
        let v = stdout_json(&out)?;
        ensure(v["q"] == q, format!("{file}: q = {}, expected {q}", v["q"]))?;
        ensure(v["minimal_depth"] == depth, format!("{file}: depth {}, expected {depth}", v["minimal_depth"]))?;
        ensure(v["h1"]["passed"] == true, format!("{file}: homogeneity not certified"))?;
        ensure(took < Duration::from_secs(1), format!("{file}: took {took:?}"))?;
    }
    Ok(format!("5 fixtures certified, slowest {slowest:.0?}"))
}

fn bracket_homogeneity() -> Check {
    let mut count = 0;
    let systems = [grushin(), grushin_k(2), grushin_k(3), chain(3), chain(4)];
    for sys in &systems {
        for word in MultiIndex::enumerate(sys.m(), 5) {
            let b = sys.nested_bracket(&word).map_err(|e| e.to_string())?;
            let ok = b.is_homogeneous(sys.sigma(), word.len() as u32).map_err(|e| e.to_string())?;
            ensure(ok, format!("{}: bracket {:?} is not homogeneous", sys.name(), word.word()))?;
            count += 1;
        }
    }
    for spec in [grushin_lift(), grushin2_lift()] {
        let weights = spec.weights();
        for (word, b) in brackets_up_to(spec.lifted_fields(), 5).map_err(|e| e.to_string())? {
            let ok = b.is_homogeneous(&weights, word.len() as u32).map_err(|e| e.to_string())?;
            ensure(ok, format!("{}: lifted bracket {:?} is not homogeneous", spec.name(), word.word()))?;
            count += 1;
        }
    }
    Ok(format!("{count} brackets of length ≤ 5 exactly homogeneous"))
}

fn norm_oracle() -> Check {
    let closed = |x: &[f64]| ((x[0].powi(4) + 4.0 * x[1] * x[1]).sqrt() + x[0] * x[0]).sqrt() / 2f64.sqrt();
    let mut rng = shard_rng(2024, 0);
    let mut worst_abs: f64 = 0.0;
    for _ in 0..10_000 {
        let x = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
        worst_abs = worst_abs.max((hom_norm(&[1, 2], &x) - closed(&x)).abs());
    }
    ensure(worst_abs <= 1e-10, format!("closed form mismatch {worst_abs:e}"))?;
    let mut worst_rel: f64 = 0.0;
    for sigma in [&[1u32, 2][..], &[1, 3], &[1, 1, 2, 3]] {
        for _ in 0..2_000 {
            let omega = random_unit_vector(&mut rng, sigma.len());
            let rho: f64 = rng.random_range(0.1..10.0);
            let x = dilate(sigma, &omega, rho);
            let lambda = 10f64.powf(rng.random_range(-3.0..3.0));
            let lhs = hom_norm(sigma, &dilate(sigma, &x, lambda));
            worst_rel = worst_rel.max((lhs - lambda * rho).abs() / (lambda * rho));
        }
    }
    ensure(worst_rel <= 1e-9, format!("homogeneity defect {worst_rel:e}"))?;
    let (out, _) = hsq(&["norm", fixture("grushin.json").to_str().unwrap(), "1.5,-2"]);
    let cli = stdout_json(&out)?["norm"].as_f64().ok_or("norm missing")?;
    ensure((cli - closed(&[1.5, -2.0])).abs() <= 1e-10, "CLI norm disagrees")?;
    Ok(format!("max |Δ| {worst_abs:.1e} on 10^4 points, homogeneity defect {worst_rel:.1e}"))
}

fn ball_inclusions() -> Check {
    let mut tested = 0;
    for spec in [grushin_lift(), grushin2_lift()] {
        for (j, r) in [1.0, 2.0].into_iter().enumerate() {
            let rep = ball_inclusions_check(r, spec.base().sigma(), spec.tau(), 100_000, 40 + j as u64).map_err(|e| e.to_string())?;
            ensure(
                rep.outer_violations == 0 && rep.inner_violations == 0,
                format!("{} r={r}: {} / {} violations", spec.name(), rep.outer_violations, rep.inner_violations),
            )?;
            tested += rep.outer_tested + rep.inner_tested;
        }
    }
    let mut worst_se: f64 = 0.0;
    for (sigma, r) in [(vec![1u32, 2], 2.0), (vec![1, 3], 1.3), (vec![1, 2, 1], 1.0)] {
        let exact = ball_measure::<f64>(&sigma, r).map_err(|e| e.to_string())?;
        let (mean, se) = integrate_monte_carlo(&sigma, r, 1_000_000, 77, 1, |_x: &[f64]| Ok(vec![1.0])).map_err(|e| e.to_string())?;
        let z = (mean[0] - exact).abs() / se[0];
        ensure(z <= 3.0, format!("{sigma:?}, r={r}: Monte Carlo off by {z:.2} standard errors"))?;
        worst_se = worst_se.max(z);
    }
    let m = ball_measure::<f64>(&[1, 2], 2.0).map_err(|e| e.to_string())?;
    let rel = (m - 8.0 * std::f64::consts::PI).abs() / (8.0 * std::f64::consts::PI);
    ensure(rel <= 1e-3, format!("|B_2| = {m}"))?;
    Ok(format!("0 violations in {tested} tested samples, Monte Carlo within {worst_se:.2} SE, |B_2| = 8π"))
}

fn lifting_verification() -> Check {
    for file in ["grushin_lift.json", "grushin2_lift.json"] {
        let (out, took) = hsq(&["verify-lift", fixture(file).to_str().unwrap()]);
        ensure(out.status.code() == Some(0), format!("{file}: exit {:?}", out.status.code()))?;
        let v = stdout_json(&out)?;
        let items = v["lift_certificate"]["items"].as_array().ok_or("items missing")?;
        ensure(items.len() == 5 && items.iter().all(|i| i["passed"] == true && i["skipped"] == false), format!("{file}: items {items:?}"))?;
        ensure(took < Duration::from_secs(5), format!("{file}: took {took:?}"))?;
    }
    for file in ["grushin_lift_bad_law.json", "grushin_lift_no_xi.json"] {
        let (out, took) = hsq(&["verify-lift", fixture(file).to_str().unwrap()]);
        ensure(out.status.code() == Some(2), format!("{file}: exit {:?}", out.status.code()))?;
        let v = stdout_json(&out)?;
        let failed: Vec<&Value> = v["group"]["checks"]
            .as_array()
            .into_iter()
            .flatten()
            .chain(v["lift_certificate"]["items"].as_array().into_iter().flatten())
            .filter(|c| c["passed"] == false)
            .collect();
        ensure(!failed.is_empty(), format!("{file}: nothing failed"))?;
        ensure(
            failed.iter().all(|c| c["residuals"].as_array().is_some_and(|r| !r.is_empty())),
            format!("{file}: a failed identity has no residual"),
        )?;
        ensure(took < Duration::from_secs(5), format!("{file}: took {took:?}"))?;
    }
    Ok("both lifts certified, both mutations rejected with residuals".into())
}

fn projected_norm_sandwich_check() -> Check {
    let spec = grushin_lift();
    let settings = QuadSettings::default();
    let mut worst: f64 = 0.0;
    for u in ["1", "x1", "(* x1 x2)"] {
        let f = ScalarField::parse(2, u).map_err(|e| e.to_string())?;
        for r in [1.0, 2.0] {
            for p in [2.0, 3.0] {
                let rep = projected_norm_sandwich(&spec, &f, r, p, &settings).map_err(|e| e.to_string())?;
                ensure(rep.passed, format!("u={u}, r={r}, p={p}: {rep:?}"))?;
                let rel = rep.tolerance / rep.norm_lifted;
                ensure(rel <= 1e-4, format!("u={u}, r={r}, p={p}: relative error {rel:e}"))?;
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("12 cases inside [c1‖u‖, c2‖u‖], combined relative error ≤ {worst:.1e}"))
}

fn cutoff_scaling() -> Check {
    let sys = grushin();
    let mut spreads = Vec::new();
    for j in 0..=2 {
        let mut values = Vec::new();
        for (a, b) in [(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)] {
            let c = make_cutoff(sys.sigma(), a, b).map_err(|e| e.to_string())?;
            values.push(cutoff_derivative_bounds(&c, &sys, j, 20_000, 9).map_err(|e| e.to_string())?.normalized);
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0, f64::max);
        ensure(lo > 0.0 && hi <= 2.0 * lo, format!("j={j}: normalized sups {values:?}"))?;
        spreads.push(format!("{:.3}", hi / lo));
    }
    Ok(format!("max/min of sup‖D^jφ‖(r2−r1)^j for j=0,1,2: {}", spreads.join(", ")))
}

struct HarnessRuns {
    coarse: Value,
    fine: Value,
}

fn run_harness(resolution: &str, out: &Path) -> Result<Value, String> {
    let (o, _) = hsq(&["harness", fixture("grushin_harness.json").to_str().unwrap(), "--resolution", resolution, "--out", out.to_str().unwrap()]);
    ensure(matches!(o.status.code(), Some(0) | Some(3)), format!("harness at resolution {resolution}: exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))?;
    let text = fs::read_to_string(out).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn constant(report: &Value, section: &str, name: &str) -> Result<f64, String> {
    report[section]["constants"][name].as_f64().ok_or_else(|| format!("{section}.{name} missing"))
}

fn interpolation(runs: &HarnessRuns) -> Check {
    let mut parts = Vec::new();
    for name in ["c_p", "c_p_ball", "alpha_p"] {
        let (a, b) = (constant(&runs.coarse, "interpolation", name)?, constant(&runs.fine, "interpolation", name)?);
        ensure(a.is_finite() && b.is_finite() && b > 0.0, format!("{name}: {a} / {b}"))?;
        let change = (a - b).abs() / b;
        ensure(change <= 0.2, format!("{name}: {a} at resolution 12 vs {b} at 24"))?;
        parts.push(format!("{name} = {b:.4} (Δ {change:.1e})"));
    }
    let rows = runs.fine["interpolation"]["rows"].as_array().ok_or("rows missing")?;
    ensure(
        rows.iter().filter_map(|r| r["eps"].as_f64()).all(|e| e > 0.0 && e <= 1.0),
        "a row uses ε outside (0, 1]",
    )?;
    let sys = grushin();
    let family = default_family(&sys).map_err(|e| e.to_string())?;
    let bad = InterpolationConfig {
        eps_grid: vec![0.5, 1.5],
        ..InterpolationConfig::default()
    };
    ensure(interpolation_harness(&sys, &family, &bad).is_err(), "ε = 1.5 accepted")?;
    let coarse_q = QuadSettings {
        resolution: 12,
        panels: 1,
        ..QuadSettings::default()
    };
    let fine_sigma = InterpolationConfig {
        sigma_grid: (1..=19).map(|k| k as f64 * 0.05).collect(),
        quadrature: coarse_q.clone(),
        ..InterpolationConfig::default()
    };
    let refined = interpolation_harness(&sys, &family, &fine_sigma).map_err(|e| e.to_string())?;
    let alpha_refined = refined.constant("alpha_p").ok_or("alpha_p missing")?;
    let alpha = constant(&runs.coarse, "interpolation", "alpha_p")?;
    ensure((alpha_refined - alpha).abs() <= 0.2 * alpha, format!("σ-grid refinement moved α̂_p from {alpha} to {alpha_refined}"))?;
    parts.push(format!("α̂_p with σ step 0.05: {alpha_refined:.4}"));
    Ok(parts.join(", "))
}

fn apriori(runs: &HarnessRuns, suite_start: Instant) -> Check {
    let theta = constant(&runs.fine, "apriori", "theta_0")?;
    let lambda = constant(&runs.fine, "apriori", "lambda")?;
    ensure(theta.is_finite() && lambda.is_finite() && theta > 0.0 && lambda > 0.0, format!("Θ = {theta}, Λ = {lambda}"))?;
    let leibniz = runs.fine["leibniz"].as_array().ok_or("leibniz missing")?;
    ensure(leibniz.len() == 18, format!("{} Leibniz reports", leibniz.len()))?;
    let mut worst: f64 = 0.0;
    for l in leibniz {
        ensure(l["samples"].as_u64() >= Some(1000), "fewer than 10^3 points")?;
        let e = l["max_rel_error"].as_f64().ok_or("max_rel_error missing")?;
        ensure(e <= 1e-8, format!("{}: {e:e}", l["function"]))?;
        worst = worst.max(e);
    }
    let elapsed = suite_start.elapsed();
    ensure(elapsed < Duration::from_secs(300), format!("acceptance run took {elapsed:?}"))?;
    Ok(format!("Θ̂_0 = {theta:.4}, Λ̂ = {lambda:.4}, Leibniz worst {worst:.1e} over 18×10^3 points, elapsed {:.0?}", elapsed))
}

fn determinism(dir: &Path) -> Check {
    let a = dir.join("a/report.json");
    let b = dir.join("b/report.json");
    run_harness("12", &a)?;
    run_harness("12", &b)?;
    for ext in ["json", "csv"] {
        let x = fs::read(a.with_extension(ext)).map_err(|e| e.to_string())?;
        let y = fs::read(b.with_extension(ext)).map_err(|e| e.to_string())?;
        ensure(x == y, format!("{ext} reports differ"))?;
    }
    let first = hsq(&["check", fixture("chain.json").to_str().unwrap()]).0.stdout;
    let second = hsq(&["check", fixture("chain.json").to_str().unwrap()]).0.stdout;
    ensure(first == second, "check output differs")?;
    Ok("harness JSON and CSV byte-identical across runs".into())
}

fn report(n: usize, title: &str, result: std::thread::Result<Check>) -> bool {
    let (ok, detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(e)) => (false, e),
        Err(p) => (false, p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()),
    };
    println!("{} {n:>2} {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn main() -> ExitCode {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut all = true;
    all &= report(1, "hypothesis certificates", catch_unwind(hypothesis_certificates));
    all &= report(2, "bracket homogeneity", catch_unwind(bracket_homogeneity));
    all &= report(3, "homogeneous norm oracle", catch_unwind(norm_oracle));
    all &= report(4, "ball inclusions and measure", catch_unwind(ball_inclusions));
    all &= report(5, "lifting verification", catch_unwind(lifting_verification));
    all &= report(6, "projected-norm sandwich", catch_unwind(projected_norm_sandwich_check));
    all &= report(7, "cutoff scaling", catch_unwind(cutoff_scaling));
    let runs = (|| -> Result<HarnessRuns, String> {
        Ok(HarnessRuns {
            coarse: run_harness("12", &dir.path().join("coarse/report.json"))?,
            fine: run_harness("24", &dir.path().join("fine/report.json"))?,
        })
    })();
    match &runs {
        Ok(runs) => {
            all &= report(8, "interpolation inequality", catch_unwind(AssertUnwindSafe(|| interpolation(runs))));
            all &= report(9, "a-priori harness", catch_unwind(AssertUnwindSafe(|| apriori(runs, start))));
        }
        Err(e) => {
            all &= report(8, "interpolation inequality", Ok(Err(e.clone())));
            all &= report(9, "a-priori harness", Ok(Err(e.clone())));
        }
    }
    all &= report(10, "determinism", catch_unwind(AssertUnwindSafe(|| determinism(dir.path()))));
    println!("acceptance finished in {:.1?}", start.elapsed());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
