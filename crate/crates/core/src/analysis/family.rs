//! Compactly supported smooth test functions.

use num_integer::Integer;
use rand::Rng;

use super::cutoff::make_cutoff;
use crate::algebra::{Expr, Poly, ScalarField};
use crate::error::{Error, Result};
use crate::fields::VectorFieldSystem;
use crate::geometry::{dilate, random_unit_vector, shard_rng};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub name: String,
    pub field: ScalarField,
    /// Radius of a homogeneous ball outside which the function vanishes.
    pub support: Option<f64>,
    /// Radii where the function is not analytic, used as quadrature breakpoints.
    pub knots: Vec<f64>,
}

impl TestFunction {
    pub fn new(name: impl Into<String>, field: ScalarField, support: Option<f64>, knots: Vec<f64>) -> Self {
        TestFunction {
            name: name.into(),
            field,
            support,
            knots,
        }
    }

    /// `field · φ(r, 2r)`, supported in `B_{2r}`.
    pub fn with_cutoff(name: impl Into<String>, field: &ScalarField, exponents: &[u32], r: f64) -> Result<Self> {
        let c = make_cutoff(exponents, r, 2.0 * r)?;
        Ok(TestFunction::new(name, field.mul(&c.phi), Some(2.0 * r), vec![r, 2.0 * r]))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        TestFunction {
            field: self.field.scale(c),
            ..self.clone()
        }
    }

    /// The declared support radius, after checking that the function vanishes
    /// at sampled points of the shell `support < ‖x‖ < 2·support`.
    pub fn checked_support(&self, exponents: &[u32], samples: usize, seed: u64) -> Result<f64> {
        let Some(r) = self.support.filter(|r| *r > 0.0 && r.is_finite()) else {
            return Err(Error::UnboundedSupport(self.name.clone()));
        };
        let mut rng = shard_rng(seed, 0);
        for _ in 0..samples {
            let omega = random_unit_vector(&mut rng, exponents.len());
            let t: f64 = rng.random_range(1.0..2.0);
            let x = dilate(exponents, &omega, r * t);
            if self.field.eval(&x)? != 0.0 {
                return Err(Error::UnboundedSupport(self.name.clone()));
            }
        }
        Ok(r)
    }
}

/// Exponent vectors of all monomials of weighted degree `≤ max_degree`, in
/// increasing degree and then lexicographic order.
pub fn weighted_monomials(weights: &[u32], max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(weights: &[u32], budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == weights.len() {
            out.push(prefix.clone());
            return;
        }
        let w = weights[prefix.len()];
        for e in 0..=budget / w {
            prefix.push(e);
            rec(weights, budget - e * w, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(weights, max_degree, &mut Vec::new(), &mut out);
    let degree = |e: &Vec<u32>| e.iter().zip(weights).map(|(a, w)| a * w).sum::<u32>();
    out.sort_by(|a, b| degree(a).cmp(&degree(b)).then_with(|| b.cmp(a)));
    out
}

/// The homogeneous Gaussian `exp(−Σ x_i^{2L/σ_i})` with `L = lcm(σ)`: the
/// exponent is a polynomial, δ_λ-homogeneous of degree `2L`.
pub fn homogeneous_gaussian(exponents: &[u32]) -> Result<ScalarField> {
    let l = exponents.iter().fold(1u32, |acc, &s| acc.lcm(&s.max(1)));
    let sum = Expr::Add(
        exponents
            .iter()
            .enumerate()
            .map(|(i, &s)| Expr::Pow(Box::new(Expr::Var(i)), (2 * l / s.max(1)) as i32))
            .collect(),
    );
    ScalarField::new(exponents.len(), Expr::Exp(Box::new(Expr::Neg(Box::new(sum)))))
}

/// `x^α · G(x) · φ(r, 2r)` for `α` of weighted degree `≤ 4`, `r ∈ {1, 2}` and
/// `G` the [`homogeneous_gaussian`].
pub fn default_family(sys: &VectorFieldSystem<Rational>) -> Result<Vec<TestFunction>> {
    let n = sys.n();
    let gauss = homogeneous_gaussian(sys.sigma())?;
    let one = Rational::from_integer(1.into());
    let mut family = Vec::new();
    for r in [1.0, 2.0] {
        for alpha in weighted_monomials(sys.sigma(), 4) {
            let mono = Poly::monomial(n, alpha, one.clone());
            let label = if mono.total_degree() == Some(0) { "1".to_string() } else { mono.to_string() };
            let field = ScalarField::from_poly(&mono).mul(&gauss);
            family.push(TestFunction::with_cutoff(format!("{label}*gauss*cutoff({r},{})", 2.0 * r), &field, sys.sigma(), r)?);
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomials_by_weight() {
        let m = weighted_monomials(&[1, 2], 4);
        assert_eq!(m.len(), 9);
        assert_eq!(m[0], vec![0, 0]);
        assert!(m.contains(&vec![0, 2]) && m.contains(&vec![2, 1]) && !m.contains(&vec![1, 2]));
        assert_eq!(weighted_monomials(&[1, 1], 2).len(), 6);
    }

    #[test]
    fn support_is_checked() {
        let f = TestFunction::with_cutoff("x1", &ScalarField::var(2, 0), &[1, 2], 1.0).unwrap();
        assert_eq!(f.checked_support(&[1, 2], 200, 1).unwrap(), 2.0);
        let wrong = TestFunction::new("x1", ScalarField::var(2, 0), Some(2.0), vec![]);
        assert!(matches!(wrong.checked_support(&[1, 2], 200, 1), Err(Error::UnboundedSupport(_))));
        let none = TestFunction::new("gauss", ScalarField::var(2, 0), None, vec![]);
        assert!(none.checked_support(&[1, 2], 10, 1).is_err());
    }

    #[test]
    fn gaussian_is_radial_in_scale() {
        let g = homogeneous_gaussian(&[1, 2]).unwrap();
        assert_eq!(g.eval(&[0.0, 0.0]).unwrap(), 1.0);
        assert!((g.eval(&[1.5, 0.0]).unwrap() - (-(1.5f64).powi(4)).exp()).abs() < 1e-15);
        assert!((g.eval(&[0.0, 1.5]).unwrap() - (-(1.5f64).powi(2)).exp()).abs() < 1e-15);
    }
}
