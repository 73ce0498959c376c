//! The example systems and lifts, also shipped as JSON under `fixtures/`.

use crate::algebra::Poly;
use crate::fields::{VectorField, VectorFieldSystem};
use crate::lifting::CarnotGroupSpec;
use crate::{QPoly, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn var(n: usize, i: usize) -> QPoly {
    Poly::var(n, i)
}

/// `X₁ = ∂₁`, `X₂ = x₁^k ∂₂` with `δ_λ(x) = (λx₁, λ^{k+1}x₂)`.
pub fn grushin_k(k: u32) -> VectorFieldSystem<Rational> {
    let name = if k == 1 { "grushin".to_string() } else { format!("grushin_k{k}") };
    VectorFieldSystem::new(
        name,
        vec![1, k + 1],
        vec![
            VectorField::coordinate(2, 0),
            VectorField::new(vec![Poly::zero(2), var(2, 0).pow(k)]).expect("two components"),
        ],
    )
    .expect("valid Grushin system")
}

pub fn grushin() -> VectorFieldSystem<Rational> {
    grushin_k(1)
}

/// `X₁ = ∂₁`, `X₂ = x₁∂₂ + x₂∂₃ + … + x_{n−1}∂_n` with `σ = (1, 2, …, n)`.
pub fn chain(n: usize) -> VectorFieldSystem<Rational> {
    assert!(n >= 2, "chain systems need n ≥ 2");
    let mut comps = vec![Poly::zero(n)];
    comps.extend((1..n).map(|k| var(n, k - 1)));
    VectorFieldSystem::new(
        format!("chain{n}"),
        (1..=n as u32).collect(),
        vec![VectorField::coordinate(n, 0), VectorField::new(comps).expect("n components")],
    )
    .expect("valid chain system")
}

/// Lift of [`grushin`] to the Heisenberg-type group on `R³`:
/// `(x, ξ) ∗ (x', ξ') = (x₁+x₁', x₂+x₂'+x₁ξ₁', ξ₁+ξ₁')`, `X̃₁ = ∂_{x₁}`,
/// `X̃₂ = x₁∂_{x₂} + ∂_{ξ₁}`.
pub fn grushin_lift() -> CarnotGroupSpec {
    grushin_lift_variant(false, false)
}

/// [`grushin_lift`] with `x₁ξ₁'` replaced by `x₁²ξ₁'` in the law.
pub fn grushin_lift_bad_law() -> CarnotGroupSpec {
    grushin_lift_variant(true, false)
}

/// [`grushin_lift`] with the `∂_{ξ₁}` part of `X̃₂` removed.
pub fn grushin_lift_no_xi() -> CarnotGroupSpec {
    grushin_lift_variant(false, true)
}

fn grushin_lift_variant(bad_law: bool, drop_xi: bool) -> CarnotGroupSpec {
    let v = |i| var(6, i);
    let coupling = if bad_law { &v(0).pow(2) * &v(5) } else { &v(0) * &v(5) };
    let law = vec![&v(0) + &v(3), &(&v(1) + &v(4)) + &coupling, &v(2) + &v(5)];
    let w = |i| var(3, i);
    let xi = if drop_xi { Poly::zero(3) } else { Poly::one(3) };
    let x2 = VectorField::new(vec![Poly::zero(3), w(0), xi]).expect("three components");
    let name = match (bad_law, drop_xi) {
        (false, false) => "grushin_lift",
        (true, _) => "grushin_lift_bad_law",
        (false, true) => "grushin_lift_no_xi",
    };
    CarnotGroupSpec::new(name, grushin(), vec![1], law, vec![VectorField::coordinate(3, 0), x2]).expect("valid lift")
}

/// Lift of [`grushin_k`]`(2)` to `R⁴` with `τ = (1, 2)`.
pub fn grushin2_lift() -> CarnotGroupSpec {
    let v = |i| var(8, i);
    // (x1, x2, ξ1, ξ2) are variables 0..4, the primed copy 4..8
    let (x1, x2, e1, e2) = (v(0), v(1), v(2), v(3));
    let (y1, y2, f1, f2) = (v(4), v(5), v(6), v(7));
    let law = vec![
        &x1 + &y1,
        &(&(&x2 + &y2) + &(&(&x1 * &(&x1 + &y1)) * &f1)) + &(&x1 * &f2).scale(&q(2, 1)),
        &e1 + &f1,
        &(&e2 + &f2) + &(&(&x1 * &f1) - &(&y1 * &e1)).scale(&q(1, 2)),
    ];
    let w = |i| var(4, i);
    let x1_field = VectorField::new(vec![Poly::one(4), Poly::zero(4), Poly::zero(4), w(2).scale(&q(-1, 2))]).expect("four components");
    let x2_field = VectorField::new(vec![Poly::zero(4), w(0).pow(2), Poly::one(4), w(0).scale(&q(1, 2))]).expect("four components");
    CarnotGroupSpec::new("grushin2_lift", grushin_k(2), vec![1, 2], law, vec![x1_field, x2_field]).expect("valid lift")
}
