use std::path::PathBuf;

use hsq_core::algebra::ScalarField;
use hsq_core::fixtures::{grushin2_lift, grushin_lift, grushin_lift_bad_law, grushin_lift_no_xi};
use hsq_core::io::read_lift;
use hsq_core::lifting::{projected_norm_sandwich, verify_group, verify_lift};
use hsq_core::quadrature::QuadSettings;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

#[test]
fn shipped_lifts_pass() {
    for (file, spec) in [("grushin_lift.json", grushin_lift()), ("grushin2_lift.json", grushin2_lift())] {
        let loaded = read_lift(&fixture(file)).unwrap();
        assert_eq!(loaded, spec);
        let g = verify_group(&spec).unwrap();
        assert!(g.passed, "{file}: {g:#?}");
        let l = verify_lift(&spec).unwrap();
        assert!(l.passed, "{file}: {l:#?}");
        assert_eq!(l.items.len(), 5);
        assert!(l.items.iter().all(|i| i.passed && !i.skipped));
    }
}

#[test]
fn grushin2_law_has_the_twisted_term() {
    let spec = grushin2_lift();
    let g = verify_group(&spec).unwrap();
    let inverse = g.inverse.expect("inverse solved");
    assert_eq!(inverse.len(), spec.big_n());
    assert_eq!(spec.homogeneous_dim(), spec.base().q() + spec.tau().iter().sum::<u32>());
}

#[test]
fn mutated_lifts_fail_with_residuals() {
    let bad_law = grushin_lift_bad_law();
    assert_eq!(read_lift(&fixture("grushin_lift_bad_law.json")).unwrap(), bad_law);
    let g = verify_group(&bad_law).unwrap();
    assert!(!g.passed);
    assert!(g.checks.iter().filter(|c| !c.passed).all(|c| !c.residuals.is_empty()));
    let l = verify_lift(&bad_law).unwrap();
    assert!(!l.passed);
    assert!(l.items.iter().filter(|c| !c.passed).all(|c| !c.residuals.is_empty()));

    let no_xi = grushin_lift_no_xi();
    let l = verify_lift(&no_xi).unwrap();
    assert!(!l.passed);
    assert!(l.items.iter().any(|c| !c.passed && !c.residuals.is_empty()));
}

#[test]
fn projected_norm_sandwich_on_grushin_lift() {
    let spec = grushin_lift();
    let s = QuadSettings::default();
    for u in ["1", "x1", "(* x1 x2)"] {
        let f = ScalarField::parse(2, u).unwrap();
        for r in [1.0, 2.0] {
            for p in [2.0, 3.0] {
                let rep = projected_norm_sandwich(&spec, &f, r, p, &s).unwrap();
                assert!(rep.passed, "{u}, r = {r}, p = {p}: {rep:#?}");
                let rel = rep.tolerance / rep.norm_lifted;
                assert!(rel <= 1e-4, "{u}, r = {r}, p = {p}: relative tolerance {rel}");
            }
        }
    }
}
