//! Sparse multivariate polynomials over a coefficient field.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{check_dim, Error, Result};
use crate::scalar::Coeff;

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// A polynomial in `n_vars` variables stored as a map from exponent vector to
/// nonzero coefficient.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C> {
    n_vars: usize,
    terms: BTreeMap<Exponents, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(n_vars: usize) -> Self {
        Poly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, C::one())
    }

    pub fn constant(n_vars: usize, c: C) -> Self {
        Self::monomial(n_vars, vec![0; n_vars], c)
    }

    /// The coordinate function `x_{var+1}` (variables are 0-based here).
    pub fn var(n_vars: usize, var: usize) -> Self {
        assert!(var < n_vars, "variable {var} out of range for {n_vars} variables");
        let mut e = vec![0; n_vars];
        e[var] = 1;
        Self::monomial(n_vars, e, C::one())
    }

    pub fn monomial(n_vars: usize, exponents: Exponents, c: C) -> Self {
        assert_eq!(exponents.len(), n_vars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponents, c);
        }
        Poly { n_vars, terms }
    }

    /// Collects terms, merging repeated exponents and dropping zeros.
    pub fn from_terms<I>(n_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, C)>,
    {
        let mut p = Poly::zero(n_vars);
        for (e, c) in terms {
            check_dim("monomial exponents", n_vars, e.len())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.n_vars])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Variables (0-based) that occur with a positive exponent.
    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms
            .keys()
            .flat_map(|e| e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, _)| i))
            .collect()
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(self.n_vars);
        }
        Poly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a.clone() * c.clone()))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one(self.n_vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to the 0-based variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        assert!(var < self.n_vars);
        let mut out = Poly::zero(self.n_vars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(d, c.clone() * C::from_i64(e[var] as i64));
        }
        out
    }

    pub fn eval(&self, x: &[C]) -> Result<C> {
        check_dim("polynomial evaluation point", self.n_vars, x.len())?;
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Evaluates in another field, converting coefficients through `f64`.
    pub fn eval_in<F: Coeff>(&self, x: &[F]) -> Result<F> {
        check_dim("polynomial evaluation point", self.n_vars, x.len())?;
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut t = convert::<C, F>(c)?;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.n_vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes must share one
    /// ring, which becomes the ring of the result.
    pub fn compose(&self, subs: &[Poly<C>]) -> Result<Self> {
        check_dim("substitution list", self.n_vars, subs.len())?;
        let target = match subs.first() {
            Some(s) => s.n_vars,
            None => return Ok(Poly::constant(0, self.constant_term())),
        };
        for s in subs {
            check_dim("substitute ring", target, s.n_vars)?;
        }
        let mut powers: Vec<Vec<Poly<C>>> = subs.iter().map(|s| vec![Poly::one(target), s.clone()]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    t = &t * &powers[i][k];
                }
            }
            out = out + t;
        }
        Ok(out)
    }

    /// Re-embeds into a ring of `n_vars` variables, mapping variable `i` to
    /// `i + offset`.
    pub fn embed(&self, n_vars: usize, offset: usize) -> Self {
        assert!(offset + self.n_vars <= n_vars, "embedding does not fit");
        let mut out = Poly::zero(n_vars);
        for (e, c) in &self.terms {
            let mut f = vec![0; n_vars];
            f[offset..offset + self.n_vars].copy_from_slice(e);
            out.add_term(f, c.clone());
        }
        out
    }

    /// Drops trailing variables that do not occur.
    pub fn restrict(&self, n_vars: usize) -> Result<Self> {
        if self.terms.keys().any(|e| e[n_vars..].iter().any(|&k| k > 0)) {
            return Err(Error::InvalidArgument(format!(
                "polynomial depends on variables beyond x{n_vars}"
            )));
        }
        let mut out = Poly::zero(n_vars);
        for (e, c) in &self.terms {
            out.add_term(e[..n_vars].to_vec(), c.clone());
        }
        Ok(out)
    }

    /// Weighted degrees `Σ w_i α_i` of the terms.
    pub fn weighted_degrees(&self, weights: &[u32]) -> Result<BTreeSet<u64>> {
        check_dim("weight vector", self.n_vars, weights.len())?;
        Ok(self.terms.keys().map(|e| weighted_degree(e, weights)).collect())
    }

    /// Zero is homogeneous of every degree.
    pub fn is_weighted_homogeneous(&self, weights: &[u32], degree: u64) -> Result<bool> {
        Ok(self.weighted_degrees(weights)?.iter().all(|&d| d == degree))
    }

    /// `p(δ_λ x)` as a polynomial in `n_vars + 1` variables, the last one
    /// being the dilation parameter `λ`.
    pub fn dilate_symbolic(&self, weights: &[u32]) -> Result<Self> {
        check_dim("weight vector", self.n_vars, weights.len())?;
        let n = self.n_vars;
        let mut out = Poly::zero(n + 1);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f.push(weighted_degree(e, weights) as u32);
            out.add_term(f, c.clone());
        }
        Ok(out)
    }
}

pub(crate) fn weighted_degree(e: &[u32], weights: &[u32]) -> u64 {
    e.iter().zip(weights).map(|(&a, &w)| a as u64 * w as u64).sum()
}

fn convert<C: Coeff, F: Coeff>(c: &C) -> Result<F> {
    if C::is_exact() && F::is_exact() {
        // Only one exact field exists; round-trip through f64 would lose it.
        let any: &dyn std::any::Any = c;
        if let Some(v) = any.downcast_ref::<F>() {
            return Ok(v.clone());
        }
    }
    F::from_f64(c.to_f64()).ok_or_else(|| {
        Error::InvalidArgument("cannot convert coefficient into an exact field".into())
    })
}

impl<'a, C: Coeff> Add<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;

    fn add(self, rhs: &'a Poly<C>) -> Poly<C> {
        assert_eq!(self.n_vars, rhs.n_vars, "adding polynomials from different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Add for Poly<C> {
    type Output = Poly<C>;

    fn add(self, rhs: Poly<C>) -> Poly<C> {
        assert_eq!(self.n_vars, rhs.n_vars, "adding polynomials from different rings");
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        for (e, c) in small.terms {
            big.add_term(e, c);
        }
        big
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;

    fn neg(self) -> Poly<C> {
        Poly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;

    fn neg(self) -> Poly<C> {
        -&self
    }
}

impl<'a, C: Coeff> Sub<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;

    fn sub(self, rhs: &'a Poly<C>) -> Poly<C> {
        assert_eq!(self.n_vars, rhs.n_vars, "subtracting polynomials from different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for Poly<C> {
    type Output = Poly<C>;

    fn sub(self, rhs: Poly<C>) -> Poly<C> {
        &self - &rhs
    }
}

impl<'a, C: Coeff> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;

    fn mul(self, rhs: &'a Poly<C>) -> Poly<C> {
        assert_eq!(self.n_vars, rhs.n_vars, "multiplying polynomials from different rings");
        let mut out = Poly::zero(self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Mul for Poly<C> {
    type Output = Poly<C>;

    fn mul(self, rhs: Poly<C>) -> Poly<C> {
        &self * &rhs
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, a) })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "({c})*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}
