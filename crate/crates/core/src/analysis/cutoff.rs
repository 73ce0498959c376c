//! Radial cutoffs `φ = χ(‖x‖/(2(r₂−r₁)) − (r₁+r₂)/(4(r₂−r₁)))`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Expr, ScalarField};
use crate::error::{Error, Result};
use crate::fields::{word_values, VectorField, VectorFieldSystem};
use crate::geometry::{dilate, random_unit_vector, shard_rng, SHARD_SIZE};
use crate::scalar::{rational_from_f64, Coeff};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffSpec {
    pub r1: f64,
    pub r2: f64,
    pub exponents: Vec<u32>,
    pub phi: ScalarField,
}

fn exact(v: f64) -> Result<Rational> {
    rational_from_f64(v).ok_or_else(|| Error::InvalidArgument(format!("non-finite radius {v}")))
}

/// `φ ≡ 1` on `B_{r1}`, `φ ≡ 0` outside `B_{r2}`.
pub fn make_cutoff(exponents: &[u32], r1: f64, r2: f64) -> Result<CutoffSpec> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::InvalidArgument(format!("cutoff radii must satisfy 0 < r1 < r2, got ({r1}, {r2})")));
    }
    if exponents.is_empty() || exponents.contains(&0) {
        return Err(Error::InvalidExponents(format!("{exponents:?}")));
    }
    let (a, b) = (exact(r1)?, exact(r2)?);
    let gap = &b - &a;
    let two = Rational::from_integer(2.into());
    let scale = Rational::from_integer(1.into()) / (&two * &gap);
    let shift = -(&a + &b) / (&two * &two * &gap);
    let norm = Expr::Norm {
        exponents: exponents.to_vec(),
        args: (0..exponents.len()).map(Expr::Var).collect(),
    };
    let arg = Expr::Add(vec![Expr::Mul(vec![Expr::Const(scale), norm]), Expr::Const(shift)]);
    let phi = ScalarField::new(exponents.len(), Expr::Chi(Box::new(arg)))?;
    Ok(CutoffSpec {
        r1,
        r2,
        exponents: exponents.to_vec(),
        phi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffBound {
    pub r1: f64,
    pub r2: f64,
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    /// Sampled `sup Σ_{|I|=j} |X_I φ|`.
    pub sup: f64,
    /// `sup · (r2 − r1)^j`.
    pub normalized: f64,
}

/// Samples `x = δ_ρ(ω)` with `ω` uniform on the sphere and `ρ` uniform in
/// `[r1/2, r2]`, where `D^j φ` is supported for `j ≥ 1`.
pub fn cutoff_derivative_bounds(
    c: &CutoffSpec,
    sys: &VectorFieldSystem<Rational>,
    order: usize,
    samples: usize,
    seed: u64,
) -> Result<CutoffBound> {
    if order > 3 {
        return Err(Error::OrderTooHigh { order, max: 3 });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    if sys.sigma() != c.exponents.as_slice() {
        return Err(Error::InvalidArgument("cutoff and system use different dilations".into()));
    }
    let fields: Vec<VectorField<f64>> = sys.fields().iter().map(|f| f.map_coeffs(Coeff::to_f64)).collect();
    let shards = samples.div_ceil(SHARD_SIZE);
    let sups = (0..shards)
        .into_par_iter()
        .map(|shard| -> Result<f64> {
            let mut rng = shard_rng(seed, shard as u64);
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut best: f64 = 0.0;
            for _ in 0..count {
                let omega = random_unit_vector(&mut rng, c.exponents.len());
                let t: f64 = rng.random_range(0.0..1.0);
                let rho = c.r1 / 2.0 + t * (c.r2 - c.r1 / 2.0);
                let x = dilate(&c.exponents, &omega, rho);
                let wv = word_values(&fields, &c.phi, &x, order)?;
                let s: f64 = wv.level(order).iter().map(|v| v.abs()).sum();
                best = best.max(s);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    let sup = sups.into_iter().fold(0.0, f64::max);
    Ok(CutoffBound {
        r1: c.r1,
        r2: c.r2,
        order,
        samples,
        seed,
        sup,
        normalized: sup * (c.r2 - c.r1).powi(order as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hom_norm;

    #[test]
    fn cutoff_values() {
        let c = make_cutoff(&[1, 2], 1.0, 2.0).unwrap();
        assert_eq!(c.phi.eval(&[0.0f64, 0.0]).unwrap(), 1.0);
        // a point with ‖x‖ = 1.5: δ_{1.5}(1, 0)
        let v = c.phi.eval(&[1.5f64, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-13);
        let x = [0.3f64, 3.9];
        assert!(hom_norm(&[1, 2], &x) > 1.97 && c.phi.eval(&x).unwrap() < 1e-6);
        assert_eq!(c.phi.eval(&[2.5f64, 0.0]).unwrap(), 0.0);
        assert_eq!(c.phi.eval(&[0.5f64, 0.5]).unwrap(), 1.0);
        assert!(make_cutoff(&[1, 2], 2.0, 1.0).is_err());
    }
}
