use hsq_core::algebra::{Expr, Poly, ScalarField};
use hsq_core::Rational;
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn poly2() -> impl Strategy<Value = Poly<Rational>> {
    prop::collection::vec(((0u32..4, 0u32..4), -5i64..=5), 1..5).prop_map(|terms| {
        Poly::from_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], q(c)))).unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-7i64..=7, 1i64..=4), 2).prop_map(|v| v.into_iter().map(|(a, b)| Rational::new(a.into(), b.into())).collect())
}

fn partial_poly(p: &Poly<Rational>, alpha: &[u32]) -> Poly<Rational> {
    let mut d = p.clone();
    for (var, &a) in alpha.iter().enumerate() {
        for _ in 0..a {
            d = d.derivative(var);
        }
    }
    d
}

fn smooth_field() -> ScalarField {
    // x1 · exp(x1 x2 − x2²) + χ(x1/4)
    ScalarField::parse(2, "(+ (* x1 (exp (- (* x1 x2) (pow x2 2)))) (chi (/ x1 4)))").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_jets_are_exact(p in poly2(), x in point()) {
        let jet = ScalarField::from_poly(&p).jet(&x, 4).unwrap();
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let alpha = [a, b];
                let expect = partial_poly(&p, &alpha).eval(&x).unwrap();
                prop_assert_eq!(jet.partial(&alpha).unwrap(), expect);
            }
        }
    }

    #[test]
    fn product_jets_follow_leibniz(p in poly2(), r in poly2(), x in point()) {
        let f = ScalarField::from_poly(&p).mul(&ScalarField::from_poly(&r));
        let direct = f.jet(&x, 3).unwrap();
        let product = ScalarField::from_poly(&(p.clone() * r.clone())).jet(&x, 3).unwrap();
        prop_assert_eq!(direct.coeffs(), product.coeffs());
    }

    #[test]
    fn float_jets_match_finite_differences(x1 in -1.5f64..1.5, x2 in -1.5f64..1.5) {
        let f = smooth_field();
        let jet = f.jet(&[x1, x2], 2).unwrap();
        let h = 1e-5;
        let e = |a: f64, b: f64| f.eval(&[a, b]).unwrap();
        let d1 = (e(x1 + h, x2) - e(x1 - h, x2)) / (2.0 * h);
        let d2 = (e(x1, x2 + h) - e(x1, x2 - h)) / (2.0 * h);
        let d11 = (e(x1 + h, x2) - 2.0 * e(x1, x2) + e(x1 - h, x2)) / (h * h);
        let scale = 1.0 + jet.value().abs();
        prop_assert!((jet.partial(&[1, 0]).unwrap() - d1).abs() < 1e-6 * scale);
        prop_assert!((jet.partial(&[0, 1]).unwrap() - d2).abs() < 1e-6 * scale);
        prop_assert!((jet.partial(&[2, 0]).unwrap() - d11).abs() < 1e-3 * scale);
    }
}

#[test]
fn gaussian_jet() {
    let f = ScalarField::new(2, Expr::Exp(Box::new(Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var(0)), 2)))))).unwrap();
    let jet = f.jet(&[0.0, 0.0], 2).unwrap();
    assert_eq!(jet.partial(&[0, 0]), Some(1.0));
    assert_eq!(jet.partial(&[1, 0]), Some(0.0));
    assert_eq!(jet.partial(&[2, 0]), Some(-2.0));
    assert!(f.jet(&[q(0), q(0)], 2).is_err());
}
