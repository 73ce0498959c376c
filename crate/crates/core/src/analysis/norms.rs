//! `L^p` norms of `X_I u` over homogeneous balls, the `D^i` semi-norms and `Φ_k`.

use serde::Serialize;

use crate::algebra::ScalarField;
use crate::error::{Error, Result};
use crate::fields::{word_values, MultiIndex, VectorField, VectorFieldSystem};
use crate::quadrature::{integrate_shells, QuadSettings};
use crate::scalar::Coeff;
use crate::Rational;

/// Relative quadrature error above which a report is flagged.
pub const DEFAULT_REL_TOL: f64 = 1e-4;

/// `‖X_I u‖_{L^p(B_r)}` for every word up to `max_len`, and optionally
/// `‖X_I Lu‖_{L^p(B_r)}` for words up to `lu_len`. Entries are `(value, error)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WordNorms {
    pub radius: f64,
    pub p: f64,
    m: usize,
    levels: Vec<Vec<(f64, f64)>>,
    lu_levels: Vec<Vec<(f64, f64)>>,
}

fn sum_pairs(v: &[(f64, f64)]) -> (f64, f64) {
    v.iter().fold((0.0, 0.0), |(a, e), &(b, f)| (a + b, e + f))
}

impl WordNorms {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_len(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, len: usize) -> &[(f64, f64)] {
        &self.levels[len]
    }

    pub fn word(&self, word: &MultiIndex) -> (f64, f64) {
        self.levels[word.len()][word.lex_rank(self.m)]
    }

    /// `‖D^i u‖ = Σ_{|I|=i} ‖X_I u‖`.
    pub fn semi(&self, i: usize) -> (f64, f64) {
        sum_pairs(&self.levels[i])
    }

    /// `‖D^i (Lu)‖`.
    pub fn lu_semi(&self, i: usize) -> (f64, f64) {
        sum_pairs(&self.lu_levels[i])
    }

    /// `‖X_i X_i u‖`, `i` 1-based.
    pub fn square(&self, i: usize) -> (f64, f64) {
        self.levels[2][(i - 1) * self.m + (i - 1)]
    }

    /// Largest `error / value` over all entries with nonnegligible value.
    pub fn max_rel_error(&self) -> f64 {
        self.levels
            .iter()
            .chain(&self.lu_levels)
            .flatten()
            .filter(|(v, _)| *v > 1e-300)
            .map(|(v, e)| e / v)
            .fold(0.0, f64::max)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent p must be in [1, ∞), got {p}")))
    }
}

pub(crate) fn float_fields(sys: &VectorFieldSystem<Rational>) -> Vec<VectorField<f64>> {
    sys.fields().iter().map(|f| f.map_coeffs(Coeff::to_f64)).collect()
}

/// All word norms on each ball `B_r`, `r ∈ radii`, from one quadrature pass.
#[allow(clippy::too_many_arguments)]
pub fn word_norms(
    sys: &VectorFieldSystem<Rational>,
    u: &ScalarField,
    radii: &[f64],
    breakpoints: &[f64],
    max_len: usize,
    lu_len: Option<usize>,
    p: f64,
    settings: &QuadSettings,
) -> Result<Vec<WordNorms>> {
    check_p(p)?;
    if u.n_vars() != sys.n() {
        return Err(Error::DimensionMismatch {
            context: "test function".into(),
            expected: sys.n(),
            found: u.n_vars(),
        });
    }
    let m = sys.m();
    let order = max_len.max(lu_len.map_or(0, |l| l + 2));
    let lu_count = lu_len.map_or(0, |l| l + 1);
    let words_by_len: Vec<Vec<Vec<usize>>> = (0..lu_count).map(|l| words_of_len(m, l)).collect();
    let n_out: usize = (0..=max_len).chain(0..lu_count).map(|l| m.pow(l as u32)).sum();
    let fields = float_fields(sys);
    let integrand = |x: &[f64]| -> Result<Vec<f64>> {
        let wv = word_values(&fields, u, x, order)?;
        let mut out = Vec::with_capacity(n_out);
        for l in 0..=max_len {
            out.extend(wv.level(l).iter().map(|v| v.abs().powf(p)));
        }
        for words in &words_by_len {
            out.extend(words.iter().map(|w| wv.sublaplacian_word(w).abs().powf(p)));
        }
        Ok(out)
    };
    let estimates = integrate_shells(sys.sigma(), radii, breakpoints, settings, n_out, integrand)?;
    Ok(radii
        .iter()
        .zip(estimates)
        .map(|(&radius, est)| {
            let mut k = 0;
            let mut take = |count: usize| -> Vec<(f64, f64)> {
                let v = (k..k + count).map(|j| est.lp_norm(j, p)).collect();
                k += count;
                v
            };
            let levels = (0..=max_len).map(|l| take(m.pow(l as u32))).collect();
            let lu_levels = (0..lu_count).map(|l| take(m.pow(l as u32))).collect();
            WordNorms {
                radius,
                p,
                m,
                levels,
                lu_levels,
            }
        })
        .collect())
}

/// Words of length `len` over `1..=m` in lexicographic order.
pub fn words_of_len(m: usize, len: usize) -> Vec<Vec<usize>> {
    (0..m.pow(len as u32))
        .map(|mut idx| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = idx % m + 1;
                idx /= m;
            }
            w
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordNorm {
    /// Letters of `I`, empty for `u` itself.
    pub word: Vec<usize>,
    pub norm: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SobolevReport {
    pub p: f64,
    pub k: usize,
    pub radius: f64,
    /// `‖D^i u‖_{L^p}` for `i = 0..=k`.
    pub semi_norms: Vec<f64>,
    pub semi_norm_errors: Vec<f64>,
    pub words: Vec<WordNorm>,
    pub total: f64,
    pub total_error: f64,
    pub tolerance: f64,
    pub flagged: bool,
}

/// `‖u‖_{W^{k,p}_X(B_r)}` with its per-word breakdown.
pub fn sobolev_norm(
    sys: &VectorFieldSystem<Rational>,
    u: &ScalarField,
    radius: f64,
    breakpoints: &[f64],
    k: usize,
    p: f64,
    settings: &QuadSettings,
) -> Result<SobolevReport> {
    if k > 4 {
        return Err(Error::OrderTooHigh { order: k, max: 4 });
    }
    let wn = word_norms(sys, u, &[radius], breakpoints, k, None, p, settings)?.remove(0);
    let m = sys.m();
    let mut words = Vec::new();
    for l in 0..=k {
        for (w, &(norm, error)) in words_of_len(m, l).into_iter().zip(wn.level(l)) {
            words.push(WordNorm {
                word: w,
                norm,
                error,
            });
        }
    }
    let (semi_norms, semi_norm_errors): (Vec<f64>, Vec<f64>) = (0..=k).map(|i| wn.semi(i)).unzip();
    let total: f64 = semi_norms.iter().sum();
    let total_error: f64 = semi_norm_errors.iter().sum();
    Ok(SobolevReport {
        p,
        k,
        radius,
        semi_norms,
        semi_norm_errors,
        words,
        total,
        total_error,
        tolerance: DEFAULT_REL_TOL,
        flagged: total_error > DEFAULT_REL_TOL * total.max(f64::MIN_POSITIVE),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiTerm {
    pub sigma: f64,
    /// `‖D^k u‖_{L^p(B_{σR})}`.
    pub norm: f64,
    pub error: f64,
    /// `((1−σ)R)^k · norm`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiReport {
    pub k: usize,
    pub radius: f64,
    pub p: f64,
    pub terms: Vec<PhiTerm>,
    /// Maximum over the grid, a lower bound for the supremum over `σ ∈ (0, 1)`.
    pub value: f64,
    pub error: f64,
}

pub(crate) fn check_sigma_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(Error::InvalidArgument("σ grid must be nonempty and inside (0, 1)".into()));
    }
    Ok(())
}

/// Builds `Φ_k` from norms on the balls `B_{σR}`; `norms[j]` must belong to `sigma_grid[j]`.
pub(crate) fn phi_from_norms(k: usize, radius: f64, p: f64, sigma_grid: &[f64], norms: &[&WordNorms]) -> PhiReport {
    let terms: Vec<PhiTerm> = sigma_grid
        .iter()
        .zip(norms)
        .map(|(&sigma, wn)| {
            let (norm, error) = wn.semi(k);
            PhiTerm {
                sigma,
                norm,
                error,
                value: norm * ((1.0 - sigma) * radius).powi(k as i32),
            }
        })
        .collect();
    let best = terms
        .iter()
        .enumerate()
        .fold(0, |b, (j, t)| if t.value > terms[b].value { j } else { b });
    PhiReport {
        k,
        radius,
        p,
        value: terms[best].value,
        error: terms[best].error * ((1.0 - terms[best].sigma) * radius).powi(k as i32),
        terms,
    }
}

/// `Φ_k(u) = max_σ ((1−σ)R)^k ‖D^k u‖_{L^p(B_{σR})}` over the grid.
#[allow(clippy::too_many_arguments)]
pub fn phi_functional(
    sys: &VectorFieldSystem<Rational>,
    u: &ScalarField,
    radius: f64,
    breakpoints: &[f64],
    k: usize,
    p: f64,
    sigma_grid: &[f64],
    settings: &QuadSettings,
) -> Result<PhiReport> {
    if k > 2 {
        return Err(Error::OrderTooHigh { order: k, max: 2 });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    check_sigma_grid(sigma_grid)?;
    let radii: Vec<f64> = sigma_grid.iter().map(|s| s * radius).collect();
    let norms = word_norms(sys, u, &radii, breakpoints, k, None, p, settings)?;
    let refs: Vec<&WordNorms> = norms.iter().collect();
    Ok(phi_from_norms(k, radius, p, sigma_grid, &refs))
}
