//! Verification of Carnot-group lifts `X̃_i = X_i + R_i` on `R^N = R^n × R^s`.
//!
//! Every group and lift property is checked as an exact polynomial identity;
//! a failed check carries its nonzero residual polynomials.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Poly, ScalarField};
use crate::error::{check_dim, Error, Result};
use crate::fields::{word_values, VectorField, VectorFieldSystem};
use crate::scalar::Coeff;
use crate::geometry::ball_measure;
use crate::hormander::rank_at_origin;
use crate::quadrature::{integrate_ball, QuadSettings};
use crate::Rational;

type QPoly = Poly<Rational>;

/// A candidate lift: group law `(x, ξ) ∗ (x', ξ')` on `R^N`, exponents `τ` of
/// the added variables and lifted fields.
#[derive(Clone, Debug, PartialEq)]
pub struct CarnotGroupSpec {
    name: String,
    base: VectorFieldSystem<Rational>,
    tau: Vec<u32>,
    /// `N` polynomials in the `2N` variables `(y, y')`.
    law: Vec<QPoly>,
    lifted: Vec<VectorField<Rational>>,
}

impl CarnotGroupSpec {
    pub fn new(
        name: impl Into<String>,
        base: VectorFieldSystem<Rational>,
        tau: Vec<u32>,
        law: Vec<QPoly>,
        lifted: Vec<VectorField<Rational>>,
    ) -> Result<Self> {
        if tau.contains(&0) || tau.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidExponents(format!("τ must satisfy 1 ≤ τ_1 ≤ … ≤ τ_s, got {tau:?}")));
        }
        let big_n = base.n() + tau.len();
        check_dim("group law components", big_n, law.len())?;
        for p in &law {
            check_dim("group law variables", 2 * big_n, p.n_vars())?;
        }
        check_dim("lifted field count", base.m(), lifted.len())?;
        for f in &lifted {
            check_dim("lifted field dimension", big_n, f.dim())?;
        }
        Ok(CarnotGroupSpec {
            name: name.into(),
            base,
            tau,
            law,
            lifted,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &VectorFieldSystem<Rational> {
        &self.base
    }

    pub fn tau(&self) -> &[u32] {
        &self.tau
    }

    pub fn law(&self) -> &[QPoly] {
        &self.law
    }

    pub fn lifted_fields(&self) -> &[VectorField<Rational>] {
        &self.lifted
    }

    /// Lifted dimension `N`.
    pub fn big_n(&self) -> usize {
        self.law.len()
    }

    /// Number `s = N − n` of added variables.
    pub fn s(&self) -> usize {
        self.tau.len()
    }

    /// Exponents of `D_λ`: `σ` followed by `τ`.
    pub fn weights(&self) -> Vec<u32> {
        self.base.sigma().iter().chain(&self.tau).copied().collect()
    }

    /// `Q = Σσ_i + Στ_i`.
    pub fn homogeneous_dim(&self) -> u32 {
        self.weights().iter().sum()
    }

    /// `(y ∗ y')` with `y`, `y'` given as polynomials in a common ring.
    fn product(&self, a: &[QPoly], b: &[QPoly]) -> Result<Vec<QPoly>> {
        let subs: Vec<QPoly> = a.iter().chain(b).cloned().collect();
        self.law.par_iter().map(|p| p.compose(&subs)).collect()
    }
}

/// One identity and its nonzero residuals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    /// `"label: polynomial"` for every nonzero residual.
    pub residuals: Vec<String>,
}

impl IdentityCheck {
    fn from_residuals(name: &str, residuals: Vec<(String, QPoly)>) -> Self {
        let residuals: Vec<String> = residuals
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(label, p)| format!("{label}: {p}"))
            .collect();
        IdentityCheck {
            name: name.into(),
            passed: residuals.is_empty(),
            skipped: false,
            residuals,
        }
    }

    fn failure(name: &str, msg: String) -> Self {
        IdentityCheck {
            name: name.into(),
            passed: false,
            skipped: false,
            residuals: vec![msg],
        }
    }

    fn skipped(name: &str) -> Self {
        IdentityCheck {
            name: name.into(),
            passed: true,
            skipped: true,
            residuals: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupCertificate {
    pub passed: bool,
    pub checks: Vec<IdentityCheck>,
    /// Components of `y^{-1}` when they could be solved for.
    pub inverse: Option<Vec<String>>,
}

fn vars(n_vars: usize, offset: usize, count: usize) -> Vec<QPoly> {
    (0..count).map(|i| Poly::var(n_vars, offset + i)).collect()
}

fn component_residuals(lhs: &[QPoly], rhs: &[QPoly]) -> Vec<(String, QPoly)> {
    lhs.iter()
        .zip(rhs)
        .enumerate()
        .map(|(j, (a, b))| (format!("component {}", j + 1), a - b))
        .collect()
}

/// Solves `y ∗ v = 0` for `v` coordinate by coordinate in increasing weight.
///
/// Each coordinate must take the form `c·v_j + R` with `c` a nonzero constant
/// and `R` free of the unknown coordinates once the lighter ones are known.
pub fn solve_inverse(spec: &CarnotGroupSpec) -> Result<Vec<QPoly>> {
    let n = spec.big_n();
    let weights = spec.weights();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (weights[j], j));
    // Ring: y (n variables) then unknowns v (n variables).
    let mut known: Vec<Option<QPoly>> = vec![None; n];
    for &j in &order {
        let subs: Vec<QPoly> = (0..n)
            .map(|k| Poly::var(2 * n, k))
            .chain((0..n).map(|k| match &known[k] {
                Some(p) => p.embed(2 * n, 0),
                None => Poly::var(2 * n, n + k),
            }))
            .collect();
        let pj = spec.law[j].compose(&subs)?;
        let unknown = n + j;
        let mut c = None;
        let mut rest = Poly::zero(2 * n);
        for (e, a) in pj.terms() {
            let in_v = e[n..].iter().any(|&k| k > 0);
            let is_linear = e[unknown] == 1 && e.iter().enumerate().all(|(i, &k)| i == unknown || k == 0);
            if is_linear {
                c = Some(a.clone());
            } else if in_v {
                return Err(Error::InvalidArgument(format!(
                    "group law component {} is not triangular in the inverse variables",
                    j + 1
                )));
            } else {
                rest = rest + Poly::monomial(2 * n, e.clone(), a.clone());
            }
        }
        let c = c.ok_or_else(|| Error::InvalidArgument(format!("group law component {} does not involve y'_{}", j + 1, j + 1)))?;
        let inv_c = Rational::from_integer(1.into()) / c;
        known[j] = Some(rest.restrict(n)?.scale(&-inv_c));
    }
    Ok(known.into_iter().map(|p| p.expect("every coordinate solved")).collect())
}

pub fn verify_group(spec: &CarnotGroupSpec) -> Result<GroupCertificate> {
    let n = spec.big_n();
    let weights = spec.weights();
    let mut checks = Vec::new();

    let (x, y, z) = (vars(3 * n, 0, n), vars(3 * n, n, n), vars(3 * n, 2 * n, n));
    let left = spec.product(&spec.product(&x, &y)?, &z)?;
    let right = spec.product(&x, &spec.product(&y, &z)?)?;
    checks.push(IdentityCheck::from_residuals("associativity", component_residuals(&left, &right)));

    let y = vars(n, 0, n);
    let origin = vec![Poly::zero(n); n];
    let mut identity = component_residuals(&spec.product(&origin, &y)?, &y);
    identity.extend(component_residuals(&spec.product(&y, &origin)?, &y));
    checks.push(IdentityCheck::from_residuals("identity", identity));

    let inverse = match solve_inverse(spec) {
        Ok(inv) => {
            let mut r = component_residuals(&spec.product(&y, &inv)?, &origin);
            r.extend(component_residuals(&spec.product(&inv, &y)?, &origin));
            checks.push(IdentityCheck::from_residuals("inverse", r));
            Some(inv.iter().map(|p| p.to_string()).collect())
        }
        Err(e) => {
            checks.push(IdentityCheck::failure("inverse", e.to_string()));
            None
        }
    };

    // D_λ(y ∗ y') = D_λ y ∗ D_λ y' with λ as the last of 2N + 1 variables.
    let both: Vec<u32> = weights.iter().chain(&weights).copied().collect();
    let lambda = Poly::var(2 * n + 1, 2 * n);
    let auto = spec
        .law
        .par_iter()
        .enumerate()
        .map(|(j, p)| {
            let lhs = &lambda.pow(weights[j]) * &p.embed(2 * n + 1, 0);
            Ok((format!("component {}", j + 1), lhs - p.dilate_symbolic(&both)?))
        })
        .collect::<Result<Vec<_>>>()?;
    checks.push(IdentityCheck::from_residuals("dilation automorphism", auto));

    Ok(GroupCertificate {
        passed: checks.iter().all(|c| c.passed),
        checks,
        inverse,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftCertificate {
    pub passed: bool,
    /// Items (a)–(e) in order.
    pub items: Vec<IdentityCheck>,
    pub lie_depth: usize,
    pub lie_rank: usize,
    pub lie_words: Vec<crate::fields::MultiIndex>,
}

pub fn verify_lift(spec: &CarnotGroupSpec) -> Result<LiftCertificate> {
    let n = spec.base.n();
    let big_n = spec.big_n();
    let weights = spec.weights();
    let s = spec.s();
    let mut items = Vec::new();

    // (a) x-coefficients do not depend on ξ.
    items.push(if s == 0 {
        IdentityCheck::skipped("(a) x-coefficients independent of xi")
    } else {
        let r: Vec<(String, QPoly)> = spec
            .lifted
            .iter()
            .enumerate()
            .flat_map(|(i, f)| {
                (0..n).flat_map(move |k| {
                    (n..big_n).map(move |v| (format!("d/dxi{} of X~{} component {}", v - n + 1, i + 1, k + 1), f.component(k).derivative(v)))
                })
            })
            .collect();
        IdentityCheck::from_residuals("(a) x-coefficients independent of xi", r)
    });

    // (b) R_i = X̃_i − X_i has no x-components.
    items.push(if s == 0 {
        let r = spec
            .lifted
            .iter()
            .zip(spec.base.fields())
            .enumerate()
            .flat_map(|(i, (lf, f))| {
                (0..n).map(move |k| (format!("X~{} - X{} component {}", i + 1, i + 1, k + 1), lf.component(k) - f.component(k)))
            })
            .collect();
        IdentityCheck::from_residuals("(b) remainder acts on xi only", r)
    } else {
        let r = spec
            .lifted
            .iter()
            .zip(spec.base.fields())
            .enumerate()
            .flat_map(|(i, (lf, f))| {
                (0..n).map(move |k| {
                    (format!("X~{} - X{} component {}", i + 1, i + 1, k + 1), lf.component(k) - &f.component(k).embed(big_n, 0))
                })
            })
            .collect();
        IdentityCheck::from_residuals("(b) remainder acts on xi only", r)
    });

    // (c) homogeneity of degree 1 for D_λ.
    let mut r = Vec::new();
    for (i, f) in spec.lifted.iter().enumerate() {
        for (k, p) in f.homogeneity_residuals(&weights, 1)?.into_iter().enumerate() {
            r.push((format!("X~{} component {}", i + 1, k + 1), p));
        }
    }
    items.push(IdentityCheck::from_residuals("(c) D_lambda-homogeneous of degree 1", r));

    // (d) left invariance: J_y(a ∗ y) X̃(y) = X̃(a ∗ y), ring (a, y).
    let a = vars(2 * big_n, 0, big_n);
    let y = vars(2 * big_n, big_n, big_n);
    let ay = spec.product(&a, &y)?;
    let r = spec
        .lifted
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let at_y: Vec<QPoly> = f.components().iter().map(|c| c.embed(2 * big_n, big_n)).collect();
            let mut out = Vec::new();
            for j in 0..big_n {
                let mut push = Poly::zero(2 * big_n);
                for (k, ck) in at_y.iter().enumerate() {
                    if !ck.is_zero() {
                        push = push + &ay[j].derivative(big_n + k) * ck;
                    }
                }
                let at_ay = f.component(j).compose(&ay)?;
                out.push((format!("X~{} component {}", i + 1, j + 1), push - at_ay));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    items.push(IdentityCheck::from_residuals("(d) left invariance", r));

    // (e) Lie generation at the origin.
    let depth = weights.iter().copied().max().unwrap_or(1) as usize;
    let rank = rank_at_origin(&spec.lifted, depth)?;
    items.push(if rank.rank == big_n {
        IdentityCheck::from_residuals("(e) Lie generation", Vec::new())
    } else {
        IdentityCheck::failure(
            "(e) Lie generation",
            format!("brackets up to length {depth} reach rank {} < {big_n} at 0", rank.rank),
        )
    });

    Ok(LiftCertificate {
        passed: items.iter().all(|c| c.passed),
        items,
        lie_depth: depth,
        lie_rank: rank.rank,
        lie_words: rank.words,
    })
}

/// The three sides of `c₁‖u‖_{L^p(B_{r/2})} ≤ ‖ũ‖_{L^p(B̃_r)} ≤ c₂‖u‖_{L^p(B_r)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub r: f64,
    pub p: f64,
    pub c1: f64,
    pub c2: f64,
    pub norm_half: f64,
    pub norm_half_err: f64,
    pub norm_lifted: f64,
    pub norm_lifted_err: f64,
    pub norm_full: f64,
    pub norm_full_err: f64,
    pub lower: f64,
    pub upper: f64,
    /// Combined error estimate used as tolerance on both comparisons.
    pub tolerance: f64,
    pub passed: bool,
}

pub fn projected_norm_sandwich(spec: &CarnotGroupSpec, u: &ScalarField, r: f64, p: f64, settings: &QuadSettings) -> Result<SandwichReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, ∞), got {p}")));
    }
    let n = spec.base.n();
    check_dim("test function variables", n, u.n_vars())?;
    let sigma = spec.base.sigma();
    let settings = &QuadSettings {
        axis_panels: true,
        ..settings.clone()
    };
    let integrand = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![u.eval::<f64>(&x[..n])?.abs().powf(p)]) };
    let half = integrate_ball(sigma, r / 2.0, &[], settings, 1, integrand)?;
    let full = integrate_ball(sigma, r, &[], settings, 1, integrand)?;
    let lifted = integrate_ball(&spec.weights(), r, &[], settings, 1, integrand)?;
    let (norm_half, norm_half_err) = half.lp_norm(0, p);
    let (norm_full, norm_full_err) = full.lp_norm(0, p);
    let (norm_lifted, norm_lifted_err) = lifted.lp_norm(0, p);
    let c1 = ball_measure(&spec.tau, r / 2.0)?.powf(1.0 / p);
    let c2 = ball_measure(&spec.tau, r)?.powf(1.0 / p);
    let lower = c1 * norm_half;
    let upper = c2 * norm_full;
    let tolerance = c1 * norm_half_err + norm_lifted_err + c2 * norm_full_err;
    let passed = lower <= norm_lifted + tolerance && norm_lifted <= upper + tolerance;
    Ok(SandwichReport {
        r,
        p,
        c1,
        c2,
        norm_half,
        norm_half_err,
        norm_lifted,
        norm_lifted_err,
        norm_full,
        norm_full_err,
        lower,
        upper,
        tolerance,
        passed,
    })
}

/// `Σ_i X̃_i² ũ` at `(x, ξ)` for `ũ(x, ξ) = u(x)`, next to `Lu(x)`.
pub fn lifted_sublaplacian_pair(spec: &CarnotGroupSpec, u: &ScalarField, point: &[f64]) -> Result<(f64, f64)> {
    let n = spec.base.n();
    check_dim("lifted point", spec.big_n(), point.len())?;
    let lifted_fields: Vec<VectorField<f64>> = spec.lifted.iter().map(|f| f.map_coeffs(Coeff::to_f64)).collect();
    let base = spec.base.map_coeffs(Coeff::to_f64);
    let ut = u.extend_vars(spec.big_n())?;
    let lifted = word_values(&lifted_fields, &ut, point, 2)?.sublaplacian_word(&[]);
    let projected = base.word_values(u, &point[..n], 2)?.sublaplacian_word(&[]);
    Ok((lifted, projected))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn grushin() -> VectorFieldSystem<Rational> {
        VectorFieldSystem::new(
            "grushin",
            vec![1, 2],
            vec![
                VectorField::coordinate(2, 0),
                VectorField::new(vec![Poly::zero(2), Poly::var(2, 0)]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn heisenberg_lift(bad_law: bool, drop_xi: bool) -> CarnotGroupSpec {
        let v = |i| Poly::<Rational>::var(6, i);
        let coupling = if bad_law { &v(0).pow(2) * &v(5) } else { &v(0) * &v(5) };
        let law = vec![&v(0) + &v(3), &(&v(1) + &v(4)) + &coupling, &v(2) + &v(5)];
        let w = |i| Poly::<Rational>::var(3, i);
        let x2 = if drop_xi {
            VectorField::new(vec![Poly::zero(3), w(0), Poly::zero(3)]).unwrap()
        } else {
            VectorField::new(vec![Poly::zero(3), w(0), Poly::one(3)]).unwrap()
        };
        CarnotGroupSpec::new("grushin lift", grushin(), vec![1], law, vec![VectorField::coordinate(3, 0), x2]).unwrap()
    }

    #[test]
    fn paper_lift_passes() {
        let spec = heisenberg_lift(false, false);
        let g = verify_group(&spec).unwrap();
        assert!(g.passed, "{g:#?}");
        let l = verify_lift(&spec).unwrap();
        assert!(l.passed, "{l:#?}");
        assert_eq!(spec.homogeneous_dim(), 4);
        let inv = solve_inverse(&spec).unwrap();
        // (x1, x2, ξ1)^{-1} = (−x1, −x2 + x1ξ1, −ξ1)
        assert_eq!(inv[1], &(-Poly::var(3, 1)) + &(&Poly::var(3, 0) * &Poly::var(3, 2)));
    }

    #[test]
    fn mutations_fail() {
        let g = verify_group(&heisenberg_lift(true, false)).unwrap();
        let assoc = &g.checks[0];
        assert!(!assoc.passed && !assoc.residuals.is_empty());
        let l = verify_lift(&heisenberg_lift(false, true)).unwrap();
        assert!(!l.items[4].passed);
        assert_eq!(l.lie_rank, 2);
    }

    #[test]
    fn constant_function_sandwich() {
        let spec = heisenberg_lift(false, false);
        let one = ScalarField::constant(2, q(1));
        let rep = projected_norm_sandwich(&spec, &one, 1.0, 2.0, &QuadSettings::default()).unwrap();
        let lifted = ball_measure(&[1, 2, 1], 1.0f64).unwrap().sqrt();
        assert!((rep.norm_lifted - lifted).abs() < 1e-10);
        assert!(rep.passed);
    }

    #[test]
    fn lifted_sublaplacian_projects() {
        let spec = heisenberg_lift(false, false);
        let u = ScalarField::parse(2, "(* (exp (neg (* x1 x1))) (+ x2 (* x1 x2 x2)))").unwrap();
        let (a, b) = lifted_sublaplacian_pair(&spec, &u, &[0.3, -0.7, 1.9]).unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }
}
