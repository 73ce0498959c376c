//! Polynomial vector fields, dilation-homogeneity checks, brackets and
//! iterated differential operators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Jet, Poly, ScalarField, MAX_JET_ORDER};
use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::scalar::Coeff;

/// `X = Σ_k c_k(x) ∂_{x_k}` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<C> {
    components: Vec<Poly<C>>,
}

impl<C: Coeff> VectorField<C> {
    pub fn new(components: Vec<Poly<C>>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidArgument("vector field on R^0".into()));
        }
        for c in &components {
            check_dim("vector field coefficient", n, c.n_vars())?;
        }
        Ok(VectorField { components })
    }

    pub fn zero(n: usize) -> Self {
        VectorField {
            components: vec![Poly::zero(n); n],
        }
    }

    /// `∂_{x_{k+1}}`.
    pub fn coordinate(n: usize, k: usize) -> Self {
        let mut f = Self::zero(n);
        f.components[k] = Poly::one(n);
        f
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly<C>] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Poly<C> {
        &self.components[k]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// `X p = Σ_k c_k ∂_k p`.
    pub fn apply(&self, p: &Poly<C>) -> Result<Poly<C>> {
        check_dim("polynomial variables", self.dim(), p.n_vars())?;
        let mut acc = Poly::zero(self.dim());
        for (k, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = p.derivative(k);
            if !d.is_zero() {
                acc = acc + c * &d;
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &[C]) -> Result<Vec<C>> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("vector field sum", self.dim(), other.dim())?;
        Ok(VectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim("vector field difference", self.dim(), other.dim())?;
        Ok(VectorField {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &C) -> Self {
        VectorField {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `Σ_k ∂_k c_k`.
    pub fn divergence(&self) -> Poly<C> {
        self.components
            .iter()
            .enumerate()
            .fold(Poly::zero(self.dim()), |acc, (k, c)| acc + c.derivative(k))
    }

    /// Residuals of the homogeneity identity `X(δ_λ x) = λ^{-d} δ_λ(X(x))`,
    /// written as `λ^d c_k(δ_λ x) - λ^{w_k} c_k(x)` in the variables
    /// `(x, λ)`. All residuals vanish iff `X` is `δ_λ`-homogeneous of degree `d`.
    pub fn homogeneity_residuals(&self, weights: &[u32], degree: u32) -> Result<Vec<Poly<C>>> {
        check_dim("dilation exponents", self.dim(), weights.len())?;
        let n = self.dim();
        let lambda = Poly::var(n + 1, n);
        self.components
            .iter()
            .zip(weights)
            .map(|(c, &w)| {
                let lhs = &lambda.pow(degree) * &c.dilate_symbolic(weights)?;
                let rhs = &lambda.pow(w) * &c.embed(n + 1, 0);
                Ok(lhs - rhs)
            })
            .collect()
    }

    pub fn is_homogeneous(&self, weights: &[u32], degree: u32) -> Result<bool> {
        Ok(self.homogeneity_residuals(weights, degree)?.iter().all(Poly::is_zero))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> VectorField<D> {
        VectorField {
            components: self.components.iter().map(|p| p.map_coeffs(f)).collect(),
        }
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for VectorField<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}) d/dx{}", k + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `[a, b] = a∘b − b∘a`, component-wise `a(b_k) − b(a_k)`.
pub fn lie_bracket<C: Coeff>(a: &VectorField<C>, b: &VectorField<C>) -> Result<VectorField<C>> {
    check_dim("bracket operands", a.dim(), b.dim())?;
    let components = a
        .components
        .iter()
        .zip(&b.components)
        .map(|(ak, bk)| Ok(a.apply(bk)? - b.apply(ak)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorField { components })
}

/// A nonempty word over `{1, …, m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(word: Vec<usize>, m: usize) -> Result<Self> {
        if word.is_empty() || word.iter().any(|&i| i == 0 || i > m) {
            return Err(Error::InvalidMultiIndex { word, m });
        }
        Ok(MultiIndex(word))
    }

    pub fn word(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        Self::new(self.0.clone(), m).map(|_| ())
    }

    /// All words of length `1..=max_len` in shortlex order.
    pub fn enumerate(m: usize, max_len: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_len {
            level = level
                .iter()
                .flat_map(|w| {
                    (1..=m).map(move |i| {
                        let mut v = w.clone();
                        v.push(i);
                        v
                    })
                })
                .collect();
            out.extend(level.iter().cloned().map(MultiIndex));
        }
        out
    }

    /// Position among the words of the same length in lexicographic order.
    pub fn lex_rank(&self, m: usize) -> usize {
        self.0.iter().fold(0, |acc, &i| acc * m + (i - 1))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Left-nested brackets `X_{[I]}` for every word up to `max_len`, in shortlex
/// order. Words extending a zero bracket are omitted (their brackets vanish).
pub fn brackets_up_to<C: Coeff>(fields: &[VectorField<C>], max_len: usize) -> Result<Vec<(MultiIndex, VectorField<C>)>> {
    let mut out: Vec<(MultiIndex, VectorField<C>)> = Vec::new();
    let mut level: Vec<(MultiIndex, VectorField<C>)> = Vec::new();
    for len in 1..=max_len {
        level = if len == 1 {
            fields.iter().enumerate().map(|(i, f)| (MultiIndex(vec![i + 1]), f.clone())).collect()
        } else {
            let mut next = Vec::new();
            for (w, f) in &level {
                for (i, g) in fields.iter().enumerate() {
                    let b = lie_bracket(f, g)?;
                    if !b.is_zero() {
                        let mut word = w.0.clone();
                        word.push(i + 1);
                        next.push((MultiIndex(word), b));
                    }
                }
            }
            next
        };
        level.retain(|(_, f)| !f.is_zero());
        out.extend(level.iter().cloned());
        if level.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Per-coefficient weighted-degree defect found by [`check_h1`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Violation {
    /// 1-based field index.
    pub field: usize,
    /// 1-based coordinate index.
    pub coordinate: usize,
    pub monomial: Vec<u32>,
    pub weighted_degree: u64,
    pub expected_degree: u64,
}

/// A coefficient `b_{j,k}` depending on some `x_i` with `i ≥ k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangularViolation {
    pub field: usize,
    pub coordinate: usize,
    pub variable: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Certificate {
    pub passed: bool,
    pub triangular: bool,
    pub violations: Vec<H1Violation>,
    pub triangular_violations: Vec<TriangularViolation>,
}

/// `m` linearly independent polynomial vector fields on `R^n` together with
/// dilation exponents `1 = σ_1 ≤ … ≤ σ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSystem<C> {
    name: String,
    sigma: Vec<u32>,
    fields: Vec<VectorField<C>>,
}

impl<C: Coeff> VectorFieldSystem<C> {
    pub fn new(name: impl Into<String>, sigma: Vec<u32>, fields: Vec<VectorField<C>>) -> Result<Self> {
        let n = sigma.len();
        if n == 0 {
            return Err(Error::InvalidExponents("empty exponent vector".into()));
        }
        if sigma[0] != 1 {
            return Err(Error::InvalidExponents(format!("σ_1 must be 1, got {}", sigma[0])));
        }
        if sigma.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidExponents(format!("exponents must be nondecreasing: {sigma:?}")));
        }
        if fields.is_empty() {
            return Err(Error::InvalidArgument("a system needs at least one field".into()));
        }
        for f in &fields {
            check_dim("vector field dimension", n, f.dim())?;
        }
        let rank = operator_rank(&fields);
        if rank < fields.len() {
            return Err(Error::LinearlyDependent { rank, m: fields.len() });
        }
        Ok(VectorFieldSystem {
            name: name.into(),
            sigma,
            fields,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn m(&self) -> usize {
        self.fields.len()
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    /// Homogeneous dimension `q = Σ_k σ_k`.
    pub fn q(&self) -> u32 {
        self.sigma.iter().sum()
    }

    pub fn fields(&self) -> &[VectorField<C>] {
        &self.fields
    }

    /// Field `X_i`, 1-based.
    pub fn field(&self, i: usize) -> &VectorField<C> {
        &self.fields[i - 1]
    }

    pub fn check_h1(&self) -> H1Certificate {
        let mut violations = Vec::new();
        let mut triangular_violations = Vec::new();
        for (j, f) in self.fields.iter().enumerate() {
            for (k, c) in f.components.iter().enumerate() {
                let expected = self.sigma[k] as u64 - 1;
                for (e, _) in c.terms() {
                    let d = crate::algebra::poly::weighted_degree(e, &self.sigma);
                    if d != expected {
                        violations.push(H1Violation {
                            field: j + 1,
                            coordinate: k + 1,
                            monomial: e.clone(),
                            weighted_degree: d,
                            expected_degree: expected,
                        });
                    }
                }
                for v in c.variables() {
                    if v >= k {
                        triangular_violations.push(TriangularViolation {
                            field: j + 1,
                            coordinate: k + 1,
                            variable: v + 1,
                        });
                    }
                }
            }
        }
        H1Certificate {
            passed: violations.is_empty(),
            triangular: triangular_violations.is_empty(),
            violations,
            triangular_violations,
        }
    }

    /// `X_{[I]}`.
    pub fn nested_bracket(&self, word: &MultiIndex) -> Result<VectorField<C>> {
        word.validate(self.m())?;
        let mut acc = self.field(word.0[0]).clone();
        for &i in &word.0[1..] {
            acc = lie_bracket(&acc, self.field(i))?;
        }
        Ok(acc)
    }

    /// Divergences `Σ_k ∂_k b_{j,k}` of every field.
    pub fn divergences(&self) -> Vec<Poly<C>> {
        self.fields.iter().map(VectorField::divergence).collect()
    }

    /// `X_I p` as a polynomial, applying the single fields right to left.
    pub fn apply_word_poly(&self, word: &MultiIndex, p: &Poly<C>) -> Result<Poly<C>> {
        word.validate(self.m())?;
        let mut acc = p.clone();
        for &i in word.0.iter().rev() {
            acc = self.field(i).apply(&acc)?;
        }
        Ok(acc)
    }

    /// Value of `X_I u` at `x`, from the order-`|I|` jet of `u`.
    pub fn apply_operator(&self, word: &MultiIndex, u: &ScalarField, x: &[C]) -> Result<C> {
        word.validate(self.m())?;
        let order = word.len();
        if order > MAX_JET_ORDER {
            return Err(Error::OrderTooHigh {
                order,
                max: MAX_JET_ORDER,
            });
        }
        check_dim("evaluation point", self.n(), x.len())?;
        let coeffs = coefficient_jets(&self.fields, x, order.saturating_sub(1))?;
        let mut jet = u.jet(x, order)?;
        for &i in word.0.iter().rev() {
            jet = apply_to_jet(&coeffs[i - 1], &jet);
        }
        Ok(jet.value().clone())
    }

    /// Values `X_I u(x)` for every word with `|I| ≤ max_len`, computed from a
    /// single jet of `u` at `x`.
    pub fn word_values(&self, u: &ScalarField, x: &[C], max_len: usize) -> Result<WordValues<C>> {
        word_values(&self.fields, u, x, max_len)
    }

    pub fn word_values_from_jet(&self, jet: &Jet<C>, x: &[C], max_len: usize) -> Result<WordValues<C>> {
        word_values_from_jet(&self.fields, jet, x, max_len)
    }

    /// The same system with coefficients converted, e.g. to `f64`.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> VectorFieldSystem<D> {
        VectorFieldSystem {
            name: self.name.clone(),
            sigma: self.sigma.clone(),
            fields: self.fields.iter().map(|v| v.map_coeffs(f)).collect(),
        }
    }
}

/// [`VectorFieldSystem::word_values`] for an arbitrary list of fields.
pub fn word_values<C: Coeff>(fields: &[VectorField<C>], u: &ScalarField, x: &[C], max_len: usize) -> Result<WordValues<C>> {
    if max_len > MAX_JET_ORDER {
        return Err(Error::OrderTooHigh {
            order: max_len,
            max: MAX_JET_ORDER,
        });
    }
    let jet = u.jet(x, max_len)?;
    word_values_from_jet(fields, &jet, x, max_len)
}

/// Word values from a precomputed jet of order at least `max_len`.
pub fn word_values_from_jet<C: Coeff>(fields: &[VectorField<C>], jet: &Jet<C>, x: &[C], max_len: usize) -> Result<WordValues<C>> {
    let m = fields.len();
    let coeffs = coefficient_jets(fields, x, max_len.saturating_sub(1))?;
    let mut levels = vec![vec![jet.value().clone()]];
    let mut current = vec![jet.truncate(max_len)];
    for _ in 1..=max_len {
        let mut next = Vec::with_capacity(current.len() * m);
        for c in &coeffs {
            for j in &current {
                next.push(apply_to_jet(c, j));
            }
        }
        levels.push(next.iter().map(|j| j.value().clone()).collect());
        current = next;
    }
    Ok(WordValues { m, levels })
}

fn coefficient_jets<C: Coeff>(fields: &[VectorField<C>], x: &[C], order: usize) -> Result<Vec<Vec<Jet<C>>>> {
    fields
        .iter()
        .map(|f| {
            check_dim("evaluation point", f.dim(), x.len())?;
            f.components.iter().map(|c| Jet::from_poly(c, x, order)).collect()
        })
        .collect()
}

/// `X_I u(x)` for all words up to a length, grouped by length, each level in
/// lexicographic order of the words.
#[derive(Clone, Debug, PartialEq)]
pub struct WordValues<C> {
    m: usize,
    levels: Vec<Vec<C>>,
}

impl<C: Coeff> WordValues<C> {
    pub fn max_len(&self) -> usize {
        self.levels.len() - 1
    }

    /// `u(x)`.
    pub fn value(&self) -> &C {
        &self.levels[0][0]
    }

    pub fn level(&self, len: usize) -> &[C] {
        &self.levels[len]
    }

    pub fn get(&self, word: &MultiIndex) -> &C {
        &self.levels[word.len()][word.lex_rank(self.m)]
    }

    /// `X_{i_1} ⋯ X_{i_k} X_j X_j u` summed over `j`, i.e. `X_I (L u)` with
    /// `L = Σ_j X_j²`; the empty word gives `Lu` itself.
    pub fn sublaplacian_word(&self, word: &[usize]) -> C {
        let len = word.len() + 2;
        let prefix = word.iter().fold(0, |acc, &i| acc * self.m + (i - 1));
        (0..self.m).fold(C::zero(), |acc, j| {
            let idx = (prefix * self.m + j) * self.m + j;
            acc + self.levels[len][idx].clone()
        })
    }
}

/// Applies `Σ_k c_k ∂_k` to a jet, lowering its order by one.
fn apply_to_jet<C: Coeff>(coeffs: &[Jet<C>], jet: &Jet<C>) -> Jet<C> {
    let order = jet.order().saturating_sub(1);
    let mut acc: Option<Jet<C>> = None;
    for (k, c) in coeffs.iter().enumerate() {
        if c.coeffs().iter().all(|v| v.is_zero()) {
            continue;
        }
        let term = c.truncate(order).mul(&jet.derivative(k));
        acc = Some(match acc {
            Some(a) => a.add(&term),
            None => term,
        });
    }
    acc.unwrap_or_else(|| Jet::zero(&crate::algebra::JetLayout::get(jet.n_vars(), order)))
}

/// Rank of the fields as differential operators over the constants: each
/// field is flattened into its vector of (coordinate, monomial) coefficients.
pub fn operator_rank<C: Coeff>(fields: &[VectorField<C>]) -> usize {
    let mut keys = std::collections::BTreeSet::new();
    for f in fields {
        for (k, c) in f.components.iter().enumerate() {
            for (e, _) in c.terms() {
                keys.insert((k, e.clone()));
            }
        }
    }
    let rows: Vec<Vec<C>> = fields
        .iter()
        .map(|f| keys.iter().map(|(k, e)| f.components[*k].coeff(e)).collect())
        .collect();
    if keys.is_empty() {
        return 0;
    }
    linalg::rank(&rows)
}
