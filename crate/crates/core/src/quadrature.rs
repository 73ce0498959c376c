//! Quadrature over anisotropic balls `B_r = {‖x‖ < r}`.
//!
//! The default scheme integrates in homogeneous polar coordinates
//! `x = δ_ρ(ω)`, `ρ ∈ (0, r)`, `ω ∈ S^{d-1}`, where Lebesgue measure becomes
//! `ρ^{q-1} ⟨Wω, ω⟩ dρ dS(ω)` with `W = diag(w)` and `q = Σ w_i`. The ball is
//! then a product domain: composite Gauss–Legendre in `ρ`, Gauss–Legendre in
//! the polar angles and the trapezoidal rule in the periodic azimuth. Error
//! estimates compare two resolutions. A Monte Carlo scheme (bounding box with
//! membership masking) is available for high-dimensional lifted balls.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ellipsoid_sum, shard_rng};
use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<F: Real>(n: usize) -> (Vec<F>, Vec<F>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![F::zero(); n];
    let mut weights = vec![F::zero(); n];
    let nf = F::lit(n as f64);
    for i in 0..n.div_ceil(2) {
        let mut x = (F::PI() * (F::lit(i as f64) + F::lit(0.75)) / (nf + F::lit(0.5))).cos();
        let mut dp = F::one();
        for _ in 0..100 {
            // Three-term recurrence for P_n and its derivative.
            let (mut p0, mut p1) = (F::one(), x);
            for k in 2..=n {
                let kf = F::lit(k as f64);
                let p2 = ((F::lit(2.0) * kf - F::one()) * x * p1 - (kf - F::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { F::one() } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - F::one());
            let dx = pn / dp;
            x = x - dx;
            if dx.abs() <= F::epsilon() * F::lit(4.0) {
                break;
            }
        }
        let w = F::lit(2.0) / ((F::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = F::zero();
    }
    (nodes, weights)
}

/// Cached `f64` Gauss–Legendre rule.
pub fn gauss_legendre_f64(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(gauss_legendre(n))).clone()
}

/// Composite Gauss–Legendre on `[a, b]` split at the given interior breakpoints
/// and then into `panels` equal pieces each.
pub fn composite_nodes(a: f64, b: f64, breakpoints: &[f64], panels: usize, order: usize) -> Vec<(f64, f64)> {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);
    let rule = gauss_legendre_f64(order);
    let mut out = Vec::new();
    for seg in cuts.windows(2) {
        let h = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let lo = seg[0] + h * p as f64;
            for (x, w) in rule.0.iter().zip(&rule.1) {
                out.push((lo + h * (x + 1.0) / 2.0, w * h / 2.0));
            }
        }
    }
    out
}

/// Quadrature on `S^{d-1}` (surface measure). `d = 0` yields one empty node.
///
/// Polar angles use Gauss panels split at `π/2`; the azimuth uses the
/// trapezoid rule with `2·resolution` nodes, or with `axis_panels` four Gauss
/// panels of `resolution / 2` nodes ending at multiples of `π/2`.
pub fn sphere_nodes(d: usize, resolution: usize, axis_panels: bool) -> Vec<(Vec<f64>, f64)> {
    use std::f64::consts::{FRAC_PI_2, PI};
    match d {
        0 => vec![(Vec::new(), 1.0)],
        1 => vec![(vec![-1.0], 1.0), (vec![1.0], 1.0)],
        _ => {
            let half = resolution.div_ceil(2).max(1);
            let az: Vec<(f64, f64)> = if axis_panels {
                composite_nodes(0.0, 2.0 * PI, &[FRAC_PI_2, PI, 3.0 * FRAC_PI_2], 1, half)
            } else {
                let n_az = 2 * resolution;
                (0..n_az)
                    .map(|j| (2.0 * PI * (j as f64 + 0.5) / n_az as f64, 2.0 * PI / n_az as f64))
                    .collect()
            };
            let polar = composite_nodes(0.0, PI, &[FRAC_PI_2], 1, half);
            // angles φ_1..φ_{d-2} in [0, π], azimuth θ in [0, 2π)
            let mut out = Vec::new();
            let mut idx = vec![0usize; d - 2];
            loop {
                let mut w_polar = 1.0;
                let mut prefix = 1.0;
                let mut omega = Vec::with_capacity(d);
                for (j, &k) in idx.iter().enumerate() {
                    let (phi, w) = polar[k];
                    w_polar *= w * phi.sin().powi((d - 2 - j) as i32);
                    omega.push(prefix * phi.cos());
                    prefix *= phi.sin();
                }
                for &(theta, w) in &az {
                    let mut p = omega.clone();
                    p.push(prefix * theta.cos());
                    p.push(prefix * theta.sin());
                    out.push((p, w_polar * w));
                }
                // odometer over polar indices
                let mut j = 0;
                loop {
                    if j == idx.len() {
                        return out;
                    }
                    idx[j] += 1;
                    if idx[j] < polar.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Gauss–Legendre in homogeneous polar coordinates up to dimension 4,
    /// Monte Carlo beyond.
    #[default]
    Auto,
    Gauss,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadSettings {
    pub scheme: Scheme,
    /// Nodes per radial panel and per polar angle; the azimuth uses twice as many.
    pub resolution: usize,
    /// Equal radial panels inside each breakpoint interval.
    pub panels: usize,
    /// Monte Carlo samples at the coarse level.
    pub mc_samples: usize,
    pub seed: u64,
    /// Split the azimuth into quadrants with Gauss panels, so that kinks of
    /// the integrand on coordinate hyperplanes fall on panel ends.
    pub axis_panels: bool,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            scheme: Scheme::Auto,
            resolution: 16,
            panels: 2,
            mc_samples: 200_000,
            seed: 0x5eed,
            axis_panels: false,
        }
    }
}

impl QuadSettings {
    pub fn doubled(&self) -> Self {
        QuadSettings {
            resolution: self.resolution * 2,
            mc_samples: self.mc_samples * 2,
            ..self.clone()
        }
    }

    fn effective_scheme(&self, dim: usize) -> Scheme {
        match self.scheme {
            Scheme::Auto if dim <= 4 => Scheme::Gauss,
            Scheme::Auto => Scheme::MonteCarlo,
            s => s,
        }
    }
}

/// Quadrature nodes `(x, weight)` for the ball of radius `r`.
pub fn ball_nodes(exponents: &[u32], r: f64, breakpoints: &[f64], settings: &QuadSettings) -> Vec<(Vec<f64>, f64)> {
    shell_nodes(exponents, &[r], breakpoints, settings)
        .into_iter()
        .map(|(x, w, _)| (x, w))
        .collect()
}

fn sorted_cuts(values: impl Iterator<Item = f64>, top: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = values.filter(|&c| c > 0.0 && c <= top).collect();
    cuts.push(0.0);
    cuts.push(top);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// `0 = t_0 < t_1 < … < t_J`: the radii plus the breakpoints below the largest.
fn radial_cuts(radii: &[f64], breakpoints: &[f64]) -> Vec<f64> {
    let top = radii.iter().copied().fold(0.0, f64::max);
    sorted_cuts(radii.iter().chain(breakpoints).copied(), top)
}

/// Radial Gauss nodes `(ρ, weight, shell)`. Each interval between consecutive
/// breakpoints gets `panels` panels of `resolution` nodes; a shell covering
/// only a fraction of its interval gets proportionally fewer, but at least
/// `resolution / 4` (and 2). Shells touching a breakpoint (or the origin) always get `resolution`.
fn radial_nodes(radii: &[f64], breakpoints: &[f64], settings: &QuadSettings) -> Vec<(f64, f64, usize)> {
    let cuts = radial_cuts(radii, breakpoints);
    let knots = sorted_cuts(breakpoints.iter().copied(), *cuts.last().expect("nonempty cuts"));
    let panels = settings.panels.max(1);
    let order = settings.resolution.max(1);
    let min_order = (order / 4).max(2).min(order);
    let mut out = Vec::new();
    for (j, seg) in cuts.windows(2).enumerate() {
        let k = knots.partition_point(|&t| t <= seg[0]) - 1;
        let span = knots[k + 1] - knots[k];
        let fraction = (seg[1] - seg[0]) / span * panels as f64;
        let (p, o) = if fraction >= 1.0 - 1e-9 {
            ((fraction - 1e-9).ceil() as usize, order)
        } else if seg[0] == knots[k] || seg[1] == knots[k + 1] {
            (1, order)
        } else {
            (1, ((order as f64 * fraction).ceil() as usize).max(min_order))
        };
        out.extend(composite_nodes(seg[0], seg[1], &[], p, o).into_iter().map(|(r, w)| (r, w, j)));
    }
    out
}

/// Nodes `(x, weight, shell)` where shell `j` is `t_j < ‖x‖ < t_{j+1}` for
/// the cuts of [`radial_cuts`].
fn shell_nodes(exponents: &[u32], radii: &[f64], breakpoints: &[f64], settings: &QuadSettings) -> Vec<(Vec<f64>, f64, usize)> {
    let d = exponents.len();
    if d == 0 {
        return vec![(Vec::new(), 1.0, 0)];
    }
    let q: u32 = exponents.iter().sum();
    let order = settings.resolution.max(1);
    let radial = radial_nodes(radii, breakpoints, settings);
    let sphere = sphere_nodes(d, order, settings.axis_panels);
    let mut out = Vec::with_capacity(radial.len() * sphere.len());
    for (omega, ws) in &sphere {
        let jac: f64 = omega.iter().zip(exponents).map(|(o, &w)| w as f64 * o * o).sum();
        for &(rho, wr, j) in &radial {
            let x: Vec<f64> = omega
                .iter()
                .zip(exponents)
                .map(|(o, &w)| o * rho.powi(w as i32))
                .collect();
            out.push((x, ws * wr * rho.powi(q as i32 - 1) * jac, j));
        }
    }
    out
}

fn integrate_by_shell<G>(nodes: &[(Vec<f64>, f64, usize)], shells: usize, n_out: usize, f: &G) -> Result<Vec<Vec<f64>>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let partial: Vec<Result<Vec<Vec<f64>>>> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![vec![0.0; n_out]; shells];
            for (x, w, j) in chunk {
                for (a, b) in acc[*j].iter_mut().zip(f(x)?) {
                    *a += w * b;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![vec![0.0; n_out]; shells];
    for p in partial {
        for (t, s) in total.iter_mut().zip(p?) {
            for (a, b) in t.iter_mut().zip(s) {
                *a += b;
            }
        }
    }
    Ok(total)
}

/// Integrals over each of the nested balls `B_{r_k}` from a single pass: in
/// homogeneous polar coordinates every ball is a union of radial shells.
pub fn integrate_shells<G>(
    exponents: &[u32],
    radii: &[f64],
    breakpoints: &[f64],
    settings: &QuadSettings,
    n_out: usize,
    f: G,
) -> Result<Vec<Estimate>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument("integration radii must be positive".into()));
    }
    if settings.effective_scheme(exponents.len()) == Scheme::MonteCarlo {
        return radii
            .iter()
            .map(|&r| integrate_ball(exponents, r, breakpoints, settings, n_out, &f))
            .collect();
    }
    let cuts = radial_cuts(radii, breakpoints);
    let shells = cuts.len() - 1;
    let cumulative = |s: &QuadSettings| -> Result<Vec<Vec<f64>>> {
        let by_shell = integrate_by_shell(&shell_nodes(exponents, radii, breakpoints, s), shells.max(1), n_out, &f)?;
        let mut acc = vec![0.0; n_out];
        Ok(by_shell
            .into_iter()
            .map(|v| {
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b;
                }
                acc.clone()
            })
            .collect())
    };
    let coarse = cumulative(settings)?;
    let fine = cumulative(&settings.doubled())?;
    Ok(radii
        .iter()
        .map(|r| {
            let j = cuts.iter().position(|c| c == r).expect("radius is a cut") - 1;
            let j = if exponents.is_empty() { 0 } else { j };
            Estimate {
                fine: fine[j].clone(),
                coarse: coarse[j].clone(),
                stderr: None,
            }
        })
        .collect())
}

const CHUNK: usize = 512;

/// `Σ_k w_k f(x_k)` for a vector-valued integrand, reduced in a fixed order.
pub fn integrate_nodes<G>(nodes: &[(Vec<f64>, f64)], n_out: usize, f: G) -> Result<Vec<f64>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let partial: Vec<Result<Vec<f64>>> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n_out];
            for (x, w) in chunk {
                let v = f(x)?;
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += w * b;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; n_out];
    for p in partial {
        for (a, b) in total.iter_mut().zip(p?) {
            *a += b;
        }
    }
    Ok(total)
}

/// Monte Carlo estimate over the ball; returns `(means, standard errors)`.
pub fn integrate_monte_carlo<G>(
    exponents: &[u32],
    r: f64,
    samples: usize,
    seed: u64,
    n_out: usize,
    f: G,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let half: Vec<f64> = exponents.iter().map(|&w| r.powi(w as i32)).collect();
    let box_volume: f64 = half.iter().map(|h| 2.0 * h).product();
    let shards = samples.div_ceil(crate::geometry::SHARD_SIZE);
    let partial: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let count = crate::geometry::SHARD_SIZE.min(samples - shard * crate::geometry::SHARD_SIZE);
            let mut rng = shard_rng(seed, shard as u64);
            let mut s1 = vec![0.0; n_out];
            let mut s2 = vec![0.0; n_out];
            for _ in 0..count {
                let x: Vec<f64> = half.iter().map(|&h| rng.random_range(-h..h)).collect();
                if ellipsoid_sum(exponents, r, &x) < 1.0 {
                    for (k, v) in f(&x)?.into_iter().enumerate() {
                        s1[k] += v;
                        s2[k] += v * v;
                    }
                }
            }
            Ok((s1, s2))
        })
        .collect();
    let mut s1 = vec![0.0; n_out];
    let mut s2 = vec![0.0; n_out];
    for p in partial {
        let (a, b) = p?;
        for k in 0..n_out {
            s1[k] += a[k];
            s2[k] += b[k];
        }
    }
    let n = samples as f64;
    let means: Vec<f64> = s1.iter().map(|s| box_volume * s / n).collect();
    let errs: Vec<f64> = s1
        .iter()
        .zip(&s2)
        .map(|(a, b)| {
            let mean = a / n;
            let var = (b / n - mean * mean).max(0.0);
            box_volume * (var / n).sqrt()
        })
        .collect();
    Ok((means, errs))
}

/// Integrals at two resolutions; `fine` is the reported value.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub fine: Vec<f64>,
    pub coarse: Vec<f64>,
    /// For Monte Carlo: standard errors of `fine`.
    pub stderr: Option<Vec<f64>>,
}

impl Estimate {
    /// Error estimate for the `k`-th integral.
    pub fn error(&self, k: usize) -> f64 {
        match &self.stderr {
            Some(se) => 3.0 * se[k],
            None => error_floor((self.fine[k] - self.coarse[k]).abs(), self.fine[k]),
        }
    }

    /// `(∫|g|^p)^{1/p}` for the `k`-th integral and its error estimate.
    pub fn lp_norm(&self, k: usize, p: f64) -> (f64, f64) {
        let fine = self.fine[k].max(0.0).powf(1.0 / p);
        match &self.stderr {
            Some(_) => {
                let hi = (self.fine[k] + self.error(k)).max(0.0).powf(1.0 / p);
                (fine, hi - fine)
            }
            None => {
                let coarse = self.coarse[k].max(0.0).powf(1.0 / p);
                (fine, error_floor((fine - coarse).abs(), fine))
            }
        }
    }
}

fn error_floor(err: f64, value: f64) -> f64 {
    err.max(1e-12 * value.abs())
}

/// Integrates a vector-valued function over `B_r` at two resolutions.
pub fn integrate_ball<G>(
    exponents: &[u32],
    r: f64,
    breakpoints: &[f64],
    settings: &QuadSettings,
    n_out: usize,
    f: G,
) -> Result<Estimate>
where
    G: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument("integration radius must be positive".into()));
    }
    match settings.effective_scheme(exponents.len()) {
        Scheme::MonteCarlo => {
            let (fine, se) = integrate_monte_carlo(exponents, r, settings.mc_samples * 2, settings.seed, n_out, &f)?;
            let (coarse, _) = integrate_monte_carlo(exponents, r, settings.mc_samples, settings.seed ^ 0x9e37_79b9, n_out, &f)?;
            Ok(Estimate {
                fine,
                coarse,
                stderr: Some(se),
            })
        }
        _ => {
            let coarse = integrate_nodes(&ball_nodes(exponents, r, breakpoints, settings), n_out, &f)?;
            let fine = integrate_nodes(&ball_nodes(exponents, r, breakpoints, &settings.doubled()), n_out, &f)?;
            Ok(Estimate {
                fine,
                coarse,
                stderr: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ball_measure;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 12] {
            let (x, w) = gauss_legendre::<f64>(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn sphere_areas() {
        let area = |d: usize| -> f64 { sphere_nodes(d, 12, false).iter().map(|(_, w)| w).sum() };
        assert!((area(1) - 2.0).abs() < 1e-14);
        assert!((area(2) - 2.0 * PI).abs() < 1e-12);
        assert!((area(3) - 4.0 * PI).abs() < 1e-10);
        assert!((area(4) - 2.0 * PI * PI).abs() < 1e-9);
        for (p, _) in sphere_nodes(4, 3, true) {
            let n: f64 = p.iter().map(|a| a * a).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn kinks_on_coordinate_planes_are_resolved() {
        // ∫_{S^2} |ω_1|^3 = π
        let s: f64 = sphere_nodes(3, 16, false).iter().map(|(p, w)| w * p[0].abs().powi(3)).sum();
        assert!((s - PI).abs() < 1e-12);
        // ∫_{S^1} |ω_1|^3 = 8/3 needs the azimuthal panels
        let s: f64 = sphere_nodes(2, 16, true).iter().map(|(p, w)| w * p[0].abs().powi(3)).sum();
        assert!((s - 8.0 / 3.0).abs() < 1e-10, "{s}");
        let area: f64 = sphere_nodes(3, 16, true).iter().map(|(_, w)| w).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn ball_volumes_match_closed_form() {
        let s = QuadSettings::default();
        for (w, r) in [(vec![1u32, 2], 2.0), (vec![1], 3.0), (vec![1, 2, 1], 0.7), (vec![1, 3, 1, 2], 1.3)] {
            let est = integrate_ball(&w, r, &[], &s, 1, |_| Ok(vec![1.0])).unwrap();
            let exact = ball_measure(&w, r).unwrap();
            assert!((est.fine[0] - exact).abs() < 1e-9 * exact, "{w:?}: {} vs {exact}", est.fine[0]);
        }
    }

    #[test]
    fn polynomial_moment() {
        // ∫_{B_1} x1^2 over σ = (1, 2): ellipse with semi-axes 1, 1: π/4
        let s = QuadSettings::default();
        let est = integrate_ball(&[1, 2], 1.0, &[], &s, 1, |x| Ok(vec![x[0] * x[0]])).unwrap();
        assert!((est.fine[0] - PI / 4.0).abs() < 1e-12);
        // radius 2: semi-axes 2, 4: ∫ x^2 = π a^3 b / 4 = 8π
        let est = integrate_ball(&[1, 2], 2.0, &[0.5], &s, 1, |x| Ok(vec![x[0] * x[0]])).unwrap();
        assert!((est.fine[0] - 8.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn shells_match_separate_balls() {
        let s = QuadSettings::default();
        let f = |x: &[f64]| Ok(vec![(-x[0] * x[0] - x[1].abs()).exp(), x[0] * x[0] * x[1] * x[1]]);
        let radii = [0.3, 1.0, 0.7, 2.0];
        let shells = integrate_shells(&[1, 2], &radii, &[1.5], &s, 2, f).unwrap();
        for (r, est) in radii.iter().zip(&shells) {
            let direct = integrate_ball(&[1, 2], *r, &[1.5], &s, 2, f).unwrap();
            for k in 0..2 {
                assert!((est.fine[k] - direct.fine[k]).abs() <= 1e-6 * direct.fine[k].abs().max(1e-12), "r={r}");
            }
        }
        let vol = integrate_shells(&[1, 2], &[2.0, 0.5], &[], &s, 1, |_| Ok(vec![1.0])).unwrap();
        assert!((vol[0].fine[0] - 8.0 * PI).abs() < 1e-10);
        assert!((vol[1].fine[0] - PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let s = QuadSettings {
            scheme: Scheme::MonteCarlo,
            mc_samples: 20_000,
            ..QuadSettings::default()
        };
        let a = integrate_ball(&[1, 2], 1.0, &[], &s, 1, |_| Ok(vec![1.0])).unwrap();
        let b = integrate_ball(&[1, 2], 1.0, &[], &s, 1, |_| Ok(vec![1.0])).unwrap();
        assert_eq!(a, b);
        assert!((a.fine[0] - PI).abs() < a.error(0) + 1e-12);
    }
}
