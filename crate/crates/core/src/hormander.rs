//! Hörmander rank condition at the origin and its replay at other points.

use serde::{Deserialize, Serialize};

use crate::algebra::Poly;
use crate::error::{check_dim, Error, Result};
use crate::fields::{brackets_up_to, MultiIndex, VectorField, VectorFieldSystem};
use crate::linalg::{determinant, poly_determinant, EchelonBasis};
use crate::scalar::{parse_rational, rational_to_string};
use crate::Rational;

/// Greedy spanning words of the bracket algebra at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HormanderCertificate {
    pub passed: bool,
    pub max_depth: usize,
    /// Longest selected word; equals the minimal spanning depth when passed.
    pub depth_used: usize,
    pub rank: usize,
    pub basis_words: Vec<MultiIndex>,
    /// Rows of `M(0)`; column `j` is `X_{[I_j]}(0)`. Entries are exact
    /// rationals written as `p` or `p/q`.
    pub matrix_at_origin: Vec<Vec<String>>,
}

impl HormanderCertificate {
    pub fn matrix(&self) -> Result<Vec<Vec<Rational>>> {
        self.matrix_at_origin
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s).ok_or_else(|| Error::Format(format!("bad rational `{s}`"))))
                    .collect()
            })
            .collect()
    }
}

/// Outcome of the greedy selection over an arbitrary list of fields on `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct OriginRank {
    pub rank: usize,
    pub words: Vec<MultiIndex>,
    pub columns: Vec<Vec<Rational>>,
}

/// Walks left-nested brackets in shortlex order up to `max_depth`, keeping
/// each word whose value at the origin increases the rank.
pub fn rank_at_origin(fields: &[VectorField<Rational>], max_depth: usize) -> Result<OriginRank> {
    let Some(first) = fields.first() else {
        return Err(Error::InvalidArgument("no fields".into()));
    };
    let dim = first.dim();
    let origin = vec![Rational::from_integer(0.into()); dim];
    let mut basis = EchelonBasis::new(dim);
    let mut words = Vec::new();
    let mut columns = Vec::new();
    for (w, b) in brackets_up_to(fields, max_depth)? {
        let v = b.eval(&origin)?;
        if basis.insert(&v) {
            words.push(w);
            columns.push(v);
            if basis.is_full() {
                break;
            }
        }
    }
    Ok(OriginRank {
        rank: basis.rank(),
        words,
        columns,
    })
}

/// Default depth bound: the largest dilation exponent.
pub fn default_max_depth(sys: &VectorFieldSystem<Rational>) -> usize {
    *sys.sigma().last().expect("nonempty exponents") as usize
}

pub fn check_rank_at_origin(sys: &VectorFieldSystem<Rational>, max_depth: usize) -> Result<HormanderCertificate> {
    if max_depth == 0 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    let r = rank_at_origin(sys.fields(), max_depth)?;
    let n = sys.n();
    let matrix_at_origin = (0..n)
        .map(|i| r.columns.iter().map(|c| rational_to_string(&c[i])).collect())
        .collect();
    let passed = r.rank == n;
    Ok(HormanderCertificate {
        passed,
        max_depth,
        depth_used: r.words.iter().map(MultiIndex::len).max().unwrap_or(0),
        rank: r.rank,
        basis_words: r.words,
        matrix_at_origin,
    })
}

/// Smallest `d ≤ max_depth` such that brackets of length `≤ d` span `R^n` at 0.
pub fn minimal_depth(sys: &VectorFieldSystem<Rational>, max_depth: usize) -> Result<Option<usize>> {
    let cert = check_rank_at_origin(sys, max_depth)?;
    Ok(cert.passed.then_some(cert.depth_used))
}

/// `M(x)` for the given words, as rows.
pub fn bracket_matrix(sys: &VectorFieldSystem<Rational>, words: &[MultiIndex], x: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    check_dim("evaluation point", sys.n(), x.len())?;
    let cols = words
        .iter()
        .map(|w| sys.nested_bracket(w)?.eval(x))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..sys.n()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DilationFallback {
    pub lambda: String,
    pub det: String,
    pub nonsingular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointRankReport {
    pub words: Vec<MultiIndex>,
    pub point: Vec<String>,
    pub det: String,
    pub nonsingular: bool,
    /// When `M(x)` is singular: the first `λ = 2^{-k}`, `k ≤ 32`, with
    /// `det M(δ_λ x) ≠ 0`, if any.
    pub fallback: Option<DilationFallback>,
}

/// Whether `det M(x) ≠ 0` for the given words, with the dilation fallback.
pub fn check_words_at_point(sys: &VectorFieldSystem<Rational>, words: &[MultiIndex], x: &[Rational]) -> Result<PointRankReport> {
    if words.len() != sys.n() {
        return Err(Error::InvalidArgument(format!("need {} words, got {}", sys.n(), words.len())));
    }
    let det = determinant(&bracket_matrix(sys, words, x)?);
    let nonsingular = det != Rational::from_integer(0.into());
    let fallback = if nonsingular {
        None
    } else {
        let half = Rational::new(1.into(), 2.into());
        let mut lambda = Rational::from_integer(1.into());
        let mut last = None;
        for _ in 0..32 {
            lambda *= half.clone();
            let y: Vec<Rational> = x
                .iter()
                .zip(sys.sigma())
                .map(|(xi, &s)| xi * num_traits::pow(lambda.clone(), s as usize))
                .collect();
            let d = determinant(&bracket_matrix(sys, words, &y)?);
            let ok = d != Rational::from_integer(0.into());
            last = Some(DilationFallback {
                lambda: rational_to_string(&lambda),
                det: rational_to_string(&d),
                nonsingular: ok,
            });
            if ok {
                break;
            }
        }
        last
    };
    Ok(PointRankReport {
        words: words.to_vec(),
        point: x.iter().map(rational_to_string).collect(),
        det: rational_to_string(&det),
        nonsingular,
        fallback,
    })
}

/// [`check_words_at_point`] with the certified words.
pub fn check_rank_at_point(cert: &HormanderCertificate, sys: &VectorFieldSystem<Rational>, x: &[Rational]) -> Result<PointRankReport> {
    if !cert.passed {
        return Err(Error::InvalidArgument("certificate did not pass".into()));
    }
    check_words_at_point(sys, &cert.basis_words, x)
}

/// `λ^{Σ|I_j|} det M(δ_λ x) − λ^{Σσ_i} det M(x)` as a polynomial in `λ`;
/// zero for homogeneous systems.
pub fn det_scaling_residual(sys: &VectorFieldSystem<Rational>, words: &[MultiIndex], x: &[Rational]) -> Result<Poly<Rational>> {
    check_dim("evaluation point", sys.n(), x.len())?;
    let n = sys.n();
    let lambda = Poly::<Rational>::var(1, 0);
    let scaled_point: Vec<Poly<Rational>> = x
        .iter()
        .zip(sys.sigma())
        .map(|(xi, &s)| lambda.pow(s).scale(xi))
        .collect();
    let cols = words
        .iter()
        .map(|w| {
            let b = sys.nested_bracket(w)?;
            b.components().iter().map(|c| c.compose(&scaled_point)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m: Vec<Vec<Poly<Rational>>> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let total_len: u32 = words.iter().map(|w| w.len() as u32).sum();
    let lhs = &lambda.pow(total_len) * &poly_determinant(&m, 1);
    let det_x = determinant(&bracket_matrix(sys, words, x)?);
    let rhs = lambda.pow(sys.q()).scale(&det_x);
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn grushin_k(k: u32) -> VectorFieldSystem<Rational> {
        VectorFieldSystem::new(
            "grushin",
            vec![1, k + 1],
            vec![
                VectorField::coordinate(2, 0),
                VectorField::new(vec![Poly::zero(2), Poly::monomial(2, vec![k, 0], q(1))]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn w(v: Vec<usize>) -> MultiIndex {
        MultiIndex::new(v, 2).unwrap()
    }

    #[test]
    fn grushin_certificate() {
        let g = grushin_k(1);
        let c = check_rank_at_origin(&g, 2).unwrap();
        assert!(c.passed);
        assert_eq!(c.depth_used, 2);
        assert_eq!(c.basis_words, vec![w(vec![1]), w(vec![1, 2])]);
        assert_eq!(c.matrix().unwrap(), vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
        let c1 = check_rank_at_origin(&g, 1).unwrap();
        assert!(!c1.passed);
        assert_eq!(c1.rank, 1);
        assert_eq!(minimal_depth(&g, 1).unwrap(), None);
        assert!(check_rank_at_point(&c, &g, &[q(5), q(7)]).unwrap().nonsingular);
        assert!(check_rank_at_origin(&g, 0).is_err());
    }

    #[test]
    fn point_replay_and_fallback() {
        let g = grushin_k(2);
        assert_eq!(minimal_depth(&g, 3).unwrap(), Some(3));
        let r = check_words_at_point(&g, &[w(vec![1]), w(vec![1, 2])], &[q(0), q(1)]).unwrap();
        assert!(!r.nonsingular);
        assert!(!r.fallback.unwrap().nonsingular);
        assert!(check_words_at_point(&g, &[w(vec![1]), w(vec![2, 1, 1])], &[q(0), q(1)]).unwrap().nonsingular);
        let c = check_rank_at_origin(&g, 3).unwrap();
        assert_eq!(c.basis_words, vec![w(vec![1]), w(vec![1, 2, 1])]);
        let r = check_words_at_point(&g, &[w(vec![1]), w(vec![1, 2])], &[q(1), q(1)]).unwrap();
        assert!(r.nonsingular && r.fallback.is_none());
    }

    #[test]
    fn determinant_scaling() {
        let g = grushin_k(2);
        for words in [vec![w(vec![1]), w(vec![1, 2])], vec![w(vec![2]), w(vec![1, 1, 2])]] {
            let r = det_scaling_residual(&g, &words, &[Rational::new(3.into(), 7.into()), q(-2)]).unwrap();
            assert!(r.is_zero(), "{r}");
        }
    }
}
