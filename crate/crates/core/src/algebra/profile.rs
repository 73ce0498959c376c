//! The smooth step used to build radial cutoffs.
//!
//! `χ(s) = 1 - S(2s + 1/2)` where `S(u) = ∫_0^u ψ / ∫_0^1 ψ` and
//! `ψ(t) = exp(-1/(t(1-t)))` on `(0, 1)`. Thus `χ ≡ 1` on `(-∞, -1/4]`,
//! `χ ≡ 0` on `[1/4, ∞)`, `χ` is decreasing, and `χ(0) = 1/2` by symmetry.

use std::sync::OnceLock;

use super::jet::{Jet, JetLayout};
use crate::quadrature::{composite_nodes, gauss_legendre};

/// Left end of the transition region of `χ`.
pub const CHI_LOWER: f64 = -0.25;
/// Right end of the transition region of `χ`.
pub const CHI_UPPER: f64 = 0.25;

fn psi(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

const CELLS: usize = 256;

/// `∫_a^b ψ` by an 8-point Gauss rule; accurate on cells of width `≤ 1/CELLS`.
fn psi_cell(a: f64, b: f64) -> f64 {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = RULE.get_or_init(|| gauss_legendre::<f64>(8));
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter().zip(w).map(|(t, w)| w * half * psi(mid + half * t)).sum()
}

/// `∫_0^{j/CELLS} ψ` for `j = 0..=CELLS/2`.
fn psi_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = 1.0 / CELLS as f64;
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for j in 1..=CELLS / 2 {
            acc += composite_nodes((j - 1) as f64 * h, j as f64 * h, &[], 4, 16)
                .into_iter()
                .map(|(t, w)| w * psi(t))
                .sum::<f64>();
            out.push(acc);
        }
        out
    })
}

/// `∫_0^u ψ` for `0 ≤ u ≤ 1/2`.
fn psi_integral(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let j = ((u * CELLS as f64) as usize).min(CELLS / 2);
    let a = j as f64 / CELLS as f64;
    psi_table()[j] + psi_cell(a, u)
}

fn psi_total() -> f64 {
    2.0 * psi_table()[CELLS / 2]
}

/// Normalised primitive `S(u)`, using `S(u) = 1 - S(1-u)` past the midpoint.
fn step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else if u <= 0.5 {
        psi_integral(u) / psi_total()
    } else {
        1.0 - psi_integral(1.0 - u) / psi_total()
    }
}

/// Derivatives `ψ^{(k)}(t)`, `k = 0..=order`, by univariate Taylor arithmetic.
fn psi_derivatives(t: f64, order: usize) -> Vec<f64> {
    if t <= 0.0 || t >= 1.0 {
        return vec![0.0; order + 1];
    }
    let layout = JetLayout::get(1, order);
    let x = Jet::variable(&layout, 0, t);
    let one_minus = x.neg().add_constant(&1.0);
    let g = x
        .mul(&one_minus)
        .recip()
        .expect("t(1-t) > 0 inside (0, 1)")
        .neg();
    let e = g.value().exp();
    let psi = g.compose_univariate(&vec![e; order + 1]);
    (0..=order).map(|k| psi.partial(&[k as u32]).unwrap()).collect()
}

/// `χ(s)`.
pub fn chi(s: f64) -> f64 {
    1.0 - step(2.0 * s + 0.5)
}

/// `χ^{(k)}(s)` for `k = 0..=order`.
pub fn chi_derivatives(s: f64, order: usize) -> Vec<f64> {
    let u = 2.0 * s + 0.5;
    let mut out = Vec::with_capacity(order + 1);
    out.push(chi(s));
    if order == 0 {
        return out;
    }
    let dpsi = psi_derivatives(u, order - 1);
    let z = psi_total();
    let mut scale = 1.0;
    for d in dpsi.iter().take(order) {
        scale *= 2.0;
        out.push(-scale * d / z);
    }
    out
}

/// Whether `χ` is locally constant at `s` (all derivatives vanish nearby).
pub fn chi_is_flat(s: f64) -> bool {
    !(CHI_LOWER..=CHI_UPPER).contains(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        assert_eq!(chi(-1.0), 1.0);
        assert_eq!(chi(-0.25), 1.0);
        assert_eq!(chi(0.25), 0.0);
        assert_eq!(chi(3.0), 0.0);
        assert!((chi(0.0) - 0.5).abs() < 1e-14);
        let mut prev = 1.0;
        for k in 0..=100 {
            let s = -0.25 + 0.005 * k as f64;
            let v = chi(s);
            assert!(v <= prev + 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
        // symmetry χ(s) + χ(-s) = 1
        for s in [0.01, 0.1, 0.2, 0.249] {
            assert!((chi(s) + chi(-s) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for s in [-0.2, -0.05, 0.0, 0.13, 0.22] {
            let d = chi_derivatives(s, 3);
            let fd1 = (chi(s + h) - chi(s - h)) / (2.0 * h);
            let fd2 = (chi(s + h) - 2.0 * chi(s) + chi(s - h)) / (h * h);
            let h3 = 1e-6;
            let fd3 = (chi_derivatives(s + h3, 2)[2] - chi_derivatives(s - h3, 2)[2]) / (2.0 * h3);
            let scale = 1.0 + d[1].abs();
            assert!((d[1] - fd1).abs() < 1e-6 * scale, "s={s}: {} vs {fd1}", d[1]);
            assert!((d[2] - fd2).abs() < 1e-4 * (1.0 + d[2].abs()), "s={s}: {} vs {fd2}", d[2]);
            assert!((d[3] - fd3).abs() < 1e-5 * (1.0 + d[3].abs()), "s={s}: {} vs {fd3}", d[3]);
        }
        assert_eq!(chi_derivatives(0.3, 4), vec![0.0; 5]);
        assert!(chi_is_flat(-0.3) && !chi_is_flat(0.0));
    }
}
