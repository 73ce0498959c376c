//! Homogeneous norms induced by anisotropic dilations, the associated balls,
//! and their Lebesgue measures.
//!
//! For exponents `w = (w_1, …, w_d)` the dilation is
//! `δ_λ(x) = (λ^{w_1} x_1, …, λ^{w_d} x_d)` and the norm `‖x‖` of a nonzero
//! point is `1/t*`, where `t*` is the unique positive root of
//! `Σ x_i² t^{2 w_i} = 1`. Balls centred at the origin are the ellipsoids
//! `Σ x_i² / r^{2 w_i} < 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Maximum number of Newton polishing steps after bisection.
const NEWTON_STEPS: usize = 5;

/// Samples drawn per shard in the parallel sampling loops.
pub const SHARD_SIZE: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomNorm {
    exponents: Vec<u32>,
}

impl HomNorm {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.contains(&0) {
            return Err(Error::InvalidExponents(format!(
                "dilation exponents must be positive, got {exponents:?}"
            )));
        }
        Ok(HomNorm { exponents })
    }

    /// Norm on a product space, exponents concatenated (e.g. `σ` then `τ`).
    pub fn product(&self, other: &HomNorm) -> HomNorm {
        let mut exponents = self.exponents.clone();
        exponents.extend_from_slice(&other.exponents);
        HomNorm { exponents }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Homogeneous dimension `Σ w_i`.
    pub fn homogeneous_dim(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn norm<F: Real>(&self, x: &[F]) -> Result<F> {
        check_dim("homogeneous norm point", self.dim(), x.len())?;
        Ok(hom_norm(&self.exponents, x))
    }

    pub fn dilate<F: Real>(&self, x: &[F], lambda: F) -> Vec<F> {
        dilate(&self.exponents, x, lambda)
    }

    pub fn ball<F: Real>(&self, radius: F) -> Result<Ball<F>> {
        Ball::new(self.clone(), radius)
    }
}

pub fn dilate<F: Real>(exponents: &[u32], x: &[F], lambda: F) -> Vec<F> {
    x.iter()
        .zip(exponents)
        .map(|(&xi, &w)| xi * lambda.powi(w as i32))
        .collect()
}

fn residual<F: Real>(exponents: &[u32], x: &[F], t: F) -> F {
    x.iter()
        .zip(exponents)
        .map(|(&xi, &w)| xi * xi * t.powi(2 * w as i32))
        .fold(F::zero(), |a, b| a + b)
        - F::one()
}

fn residual_slope<F: Real>(exponents: &[u32], x: &[F], t: F) -> F {
    x.iter()
        .zip(exponents)
        .map(|(&xi, &w)| F::lit(2.0 * w as f64) * xi * xi * t.powi(2 * w as i32 - 1))
        .fold(F::zero(), |a, b| a + b)
}

/// The positive root `t*` of `Σ x_i² t^{2 w_i} = 1`, or `None` at the origin.
///
/// Bracketing uses `t_lo = min_i (d x_i²)^{-1/(2 w_i)}` (every term `≤ 1/d`)
/// and `t_hi = min_i |x_i|^{-1/w_i}` (one term equals 1). Bisection runs to
/// relative width `1e-14`, then at most five Newton steps polish the residual.
pub fn dilation_root<F: Real>(exponents: &[u32], x: &[F]) -> Option<F> {
    let d = F::lit(x.len() as f64);
    let mut lo = F::infinity();
    let mut hi = F::infinity();
    for (&xi, &w) in x.iter().zip(exponents) {
        if xi == F::zero() {
            continue;
        }
        let w = F::lit(w as f64);
        let a = xi.abs();
        lo = lo.min((d * a * a).powf(-F::one() / (F::lit(2.0) * w)));
        hi = hi.min(a.powf(-F::one() / w));
    }
    if !hi.is_finite() {
        return None;
    }
    // Floating error in the powf calls can put the root a hair outside.
    lo = lo * F::lit(1.0 - 1e-6);
    hi = hi * F::lit(1.0 + 1e-6);
    let width_tol = F::lit(1e-14).max(F::epsilon() * F::lit(4.0));
    for _ in 0..400 {
        if hi - lo <= width_tol * hi {
            break;
        }
        let mid = if hi > lo * F::lit(2.0) { (lo * hi).sqrt() } else { (lo + hi) / F::lit(2.0) };
        if residual(exponents, x, mid) < F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = (lo + hi) / F::lit(2.0);
    let res_tol = F::lit(1e-12).max(F::epsilon() * F::lit(16.0));
    for _ in 0..NEWTON_STEPS {
        let g = residual(exponents, x, t);
        if g.abs() <= res_tol {
            break;
        }
        let slope = residual_slope(exponents, x, t);
        if slope <= F::zero() {
            break;
        }
        let next = t - g / slope;
        if !(next > F::zero()) {
            break;
        }
        t = next;
    }
    Some(t)
}

/// `‖x‖` for the dilation with the given exponents; `0` at the origin.
pub fn hom_norm<F: Real>(exponents: &[u32], x: &[F]) -> F {
    match dilation_root(exponents, x) {
        Some(t) => F::one() / t,
        None => F::zero(),
    }
}

/// Lebesgue measure of the Euclidean unit ball of `R^d`.
pub fn unit_ball_volume<F: Real>(d: usize) -> F {
    // V_0 = 1, V_1 = 2, V_d = 2π/d · V_{d-2}
    let mut v = if d.is_multiple_of(2) { F::one() } else { F::lit(2.0) };
    let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
    while k <= d {
        v = v * F::lit(2.0) * F::PI() / F::lit(k as f64);
        k += 2;
    }
    v
}

/// `meas(B_r) = r^{Σ w_i} · meas(unit Euclidean ball)`, since `B_r = δ_r(B_1)`
/// and `B_1` is the Euclidean unit ball. For `d = 0` this is `1`.
pub fn ball_measure<F: Real>(exponents: &[u32], r: F) -> Result<F> {
    if !(r > F::zero()) {
        return Err(Error::InvalidArgument("ball radius must be positive".into()));
    }
    let q: u32 = exponents.iter().sum();
    Ok(r.powi(q as i32) * unit_ball_volume(exponents.len()))
}

/// Open ball `{x : ‖x‖ < r}` centred at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<F> {
    norm: HomNorm,
    radius: F,
}

impl<F: Real> Ball<F> {
    pub fn new(norm: HomNorm, radius: F) -> Result<Self> {
        if !(radius > F::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument("ball radius must be positive and finite".into()));
        }
        Ok(Ball { norm, radius })
    }

    pub fn norm(&self) -> &HomNorm {
        &self.norm
    }

    pub fn radius(&self) -> F {
        self.radius
    }

    /// Ellipsoid form `Σ x_i² / r^{2 w_i}`; the point lies inside iff `< 1`.
    pub fn ellipsoid_sum(&self, x: &[F]) -> F {
        ellipsoid_sum(self.norm.exponents(), self.radius, x)
    }

    pub fn contains(&self, x: &[F]) -> bool {
        self.ellipsoid_sum(x) < F::one()
    }

    pub fn measure(&self) -> F {
        ball_measure(self.norm.exponents(), self.radius).expect("radius validated")
    }

    /// Half-widths `r^{w_i}` of the bounding box.
    pub fn semi_axes(&self) -> Vec<F> {
        self.norm
            .exponents()
            .iter()
            .map(|&w| self.radius.powi(w as i32))
            .collect()
    }
}

pub fn ellipsoid_sum<F: Real>(exponents: &[u32], r: F, x: &[F]) -> F {
    x.iter()
        .zip(exponents)
        .map(|(&xi, &w)| xi * xi / r.powi(2 * w as i32))
        .fold(F::zero(), |a, b| a + b)
}

/// Uniform point on the Euclidean unit sphere of `R^d`.
pub fn random_unit_vector<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// Deterministic per-shard generator: `seed` selects the key, the shard index
/// the stream, so results do not depend on the thread count.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub radius: f64,
    pub sigma: Vec<u32>,
    pub tau: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    /// Samples that fell in the lifted ball and were tested against the product.
    pub outer_tested: usize,
    pub outer_violations: usize,
    /// Samples that fell in the half-radius product and were tested against the lifted ball.
    pub inner_tested: usize,
    pub inner_violations: usize,
    pub counterexamples: Vec<Vec<f64>>,
    pub passed: bool,
}

/// Samples the inclusions `B̃_r ⊆ B_r × B*_r` and `B_{r/2} × B*_{r/2} ⊆ B̃_r`.
///
/// Both tests draw `samples` points uniformly from the bounding box of the
/// relevant set and test the ones landing inside it.
pub fn ball_inclusions_check(r: f64, sigma: &[u32], tau: &[u32], samples: usize, seed: u64) -> Result<InclusionReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument("ball radius must be positive".into()));
    }
    HomNorm::new(sigma.to_vec())?;
    HomNorm::new(tau.to_vec())?;
    let n = sigma.len();
    let lifted: Vec<u32> = sigma.iter().chain(tau).copied().collect();
    let outer_box: Vec<f64> = lifted.iter().map(|&w| r.powi(w as i32)).collect();
    let inner_box: Vec<f64> = lifted.iter().map(|&w| (r / 2.0).powi(w as i32)).collect();

    let shards = samples.div_ceil(SHARD_SIZE);
    let per_shard: Vec<(usize, usize, usize, usize, Vec<Vec<f64>>)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut rng = shard_rng(seed, shard as u64);
            let (mut ot, mut ov, mut it, mut iv) = (0, 0, 0, 0);
            let mut bad = Vec::new();
            for _ in 0..count {
                let p: Vec<f64> = outer_box.iter().map(|&h| rng.random_range(-h..h)).collect();
                if ellipsoid_sum(&lifted, r, &p) < 1.0 {
                    ot += 1;
                    let in_base = ellipsoid_sum(sigma, r, &p[..n]) < 1.0;
                    let in_fibre = ellipsoid_sum(tau, r, &p[n..]) < 1.0;
                    if !(in_base && in_fibre) {
                        ov += 1;
                        bad.push(p);
                    }
                }
                let p: Vec<f64> = inner_box.iter().map(|&h| rng.random_range(-h..h)).collect();
                let in_base = ellipsoid_sum(sigma, r / 2.0, &p[..n]) < 1.0;
                let in_fibre = ellipsoid_sum(tau, r / 2.0, &p[n..]) < 1.0;
                if in_base && in_fibre {
                    it += 1;
                    if ellipsoid_sum(&lifted, r, &p) >= 1.0 {
                        iv += 1;
                        bad.push(p);
                    }
                }
            }
            (ot, ov, it, iv, bad)
        })
        .collect();

    let mut report = InclusionReport {
        radius: r,
        sigma: sigma.to_vec(),
        tau: tau.to_vec(),
        samples,
        seed,
        outer_tested: 0,
        outer_violations: 0,
        inner_tested: 0,
        inner_violations: 0,
        counterexamples: Vec::new(),
        passed: false,
    };
    for (ot, ov, it, iv, bad) in per_shard {
        report.outer_tested += ot;
        report.outer_violations += ov;
        report.inner_tested += it;
        report.inner_violations += iv;
        report.counterexamples.extend(bad.into_iter().take(8));
    }
    report.counterexamples.truncate(16);
    report.passed = report.outer_violations == 0 && report.inner_violations == 0;
    Ok(report)
}
