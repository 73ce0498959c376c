//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A jet of order `K` at a point `x` stores the coefficients of the Taylor
//! polynomial of a function around `x` in the increments `h`, for every
//! monomial `h^α` with `|α| ≤ K`. Arithmetic on jets is truncated at order `K`,
//! which gives forward-mode Taylor differentiation of arbitrary expression
//! trees.

use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::poly::Poly;
use crate::error::{check_dim, Error, Result};
use crate::scalar::Coeff;

/// Monomial table shared by every jet of a given `(n_vars, order)`.
///
/// Monomials are graded: all monomials of degree `d` precede those of degree
/// `d + 1`, and the ordering within a degree does not depend on the order, so a
/// lower-order layout is a prefix of a higher-order one.
#[derive(Debug)]
pub struct JetLayout {
    n_vars: usize,
    order: usize,
    monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// For each left factor `i`: pairs `(j, k)` with `mono[i] + mono[j] = mono[k]`.
    products: Vec<Vec<(usize, usize)>>,
}

fn monomials_of_degree(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == n {
        prefix.push(d);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=d).rev() {
        prefix.push(k);
        monomials_of_degree(n, d - k, prefix, out);
        prefix.pop();
    }
}

impl JetLayout {
    fn build(n_vars: usize, order: usize) -> Self {
        let mut monomials = Vec::new();
        if n_vars == 0 {
            monomials.push(Vec::new());
        } else {
            for d in 0..=order as u32 {
                monomials_of_degree(n_vars, d, &mut Vec::new(), &mut monomials);
            }
        }
        let index: HashMap<Vec<u32>, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let products = monomials
            .iter()
            .map(|a| {
                monomials
                    .iter()
                    .enumerate()
                    .filter_map(|(j, b)| {
                        let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        index.get(&s).map(|&k| (j, k))
                    })
                    .collect()
            })
            .collect();
        JetLayout {
            n_vars,
            order,
            monomials,
            index,
            products,
        }
    }

    /// Shared layout for `(n_vars, order)`.
    pub fn get(n_vars: usize, order: usize) -> Arc<JetLayout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetLayout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet layout cache poisoned");
        guard
            .entry((n_vars, order))
            .or_insert_with(|| Arc::new(JetLayout::build(n_vars, order)))
            .clone()
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn index_of(&self, alpha: &[u32]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

#[derive(Clone, Debug)]
pub struct Jet<C> {
    layout: Arc<JetLayout>,
    coeffs: Vec<C>,
}

impl<C: Coeff> PartialEq for Jet<C> {
    fn eq(&self, other: &Self) -> bool {
        self.layout.n_vars == other.layout.n_vars
            && self.layout.order == other.layout.order
            && self.coeffs == other.coeffs
    }
}

impl<C: Coeff> Jet<C> {
    pub fn constant(layout: &Arc<JetLayout>, c: C) -> Self {
        let mut coeffs = vec![C::zero(); layout.len()];
        coeffs[0] = c;
        Jet {
            layout: layout.clone(),
            coeffs,
        }
    }

    pub fn zero(layout: &Arc<JetLayout>) -> Self {
        Self::constant(layout, C::zero())
    }

    /// The jet of the coordinate function `x_var` at a point whose `var`-th
    /// coordinate is `value`.
    pub fn variable(layout: &Arc<JetLayout>, var: usize, value: C) -> Self {
        let mut j = Self::constant(layout, value);
        if layout.order >= 1 {
            let mut e = vec![0; layout.n_vars];
            e[var] = 1;
            let k = layout.index[&e];
            j.coeffs[k] = C::one();
        }
        j
    }

    /// Taylor expansion of a polynomial around `x`.
    pub fn from_poly(poly: &Poly<C>, x: &[C], order: usize) -> Result<Self> {
        check_dim("jet expansion point", poly.n_vars(), x.len())?;
        let layout = JetLayout::get(x.len(), order);
        let vars: Vec<Jet<C>> = x
            .iter()
            .enumerate()
            .map(|(i, xi)| Jet::variable(&layout, i, xi.clone()))
            .collect();
        let mut powers: Vec<Vec<Jet<C>>> = vars.iter().map(|v| vec![Jet::constant(&layout, C::one()), v.clone()]).collect();
        let mut acc = Jet::zero(&layout);
        for (e, c) in poly.terms() {
            let mut t = Jet::constant(&layout, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().unwrap().mul(&vars[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k]);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn n_vars(&self) -> usize {
        self.layout.n_vars
    }

    pub fn value(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Taylor coefficient of `h^α`.
    pub fn coeff(&self, alpha: &[u32]) -> Option<&C> {
        self.layout.index_of(alpha).map(|k| &self.coeffs[k])
    }

    /// Mixed partial derivative `∂^α f(x)`.
    pub fn partial(&self, alpha: &[u32]) -> Option<C> {
        let c = self.coeff(alpha)?.clone();
        let mut fact = C::one();
        for &a in alpha {
            for k in 2..=a as i64 {
                fact = fact * C::from_i64(k);
            }
        }
        Some(c * fact)
    }

    /// Restriction to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.layout.order, "cannot raise jet order by truncation");
        if order == self.layout.order {
            return self.clone();
        }
        let layout = JetLayout::get(self.layout.n_vars, order);
        Jet {
            coeffs: self.coeffs[..layout.len()].to_vec(),
            layout,
        }
    }

    fn aligned<'a>(&'a self, other: &'a Self) -> (Cow<'a, Jet<C>>, Cow<'a, Jet<C>>) {
        assert_eq!(self.layout.n_vars, other.layout.n_vars, "jets over different variables");
        let order = self.layout.order.min(other.layout.order);
        let cut = |j: &'a Jet<C>| {
            if j.layout.order == order {
                Cow::Borrowed(j)
            } else {
                Cow::Owned(j.truncate(order))
            }
        };
        (cut(self), cut(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let mut a = a.into_owned();
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.clone() + y.clone();
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let mut a = a.into_owned();
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.clone() - y.clone();
        }
        a
    }

    pub fn neg(&self) -> Self {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn add_constant(&self, s: &C) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + s.clone();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let layout = a.layout.clone();
        let mut out = vec![C::zero(); layout.len()];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for &(j, k) in &layout.products[i] {
                let bj = &b.coeffs[j];
                if bj.is_zero() {
                    continue;
                }
                out[k] = out[k].clone() + ai.clone() * bj.clone();
            }
        }
        Jet { layout, coeffs: out }
    }

    /// Reciprocal; fails when the value vanishes.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.value().clone();
        if a0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // 1/(a0 + h) = Σ_k (-1)^k h^k / a0^{k+1}
        let order = self.order();
        let mut derivs = Vec::with_capacity(order + 1);
        let inv = C::one() / a0;
        let mut term = inv.clone();
        let mut fact = C::one();
        for k in 0..=order {
            if k > 0 {
                term = -(term * inv.clone());
                fact = fact * C::from_i64(k as i64);
            }
            // f^{(k)}(a0) = (-1)^k k! / a0^{k+1}
            derivs.push(term.clone() * fact.clone());
        }
        Ok(self.compose_univariate(&derivs))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Jet::constant(&base.layout, C::one());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// `f ∘ self`, given the derivatives `f^{(k)}(a0)`, `k = 0..=order`, of a
    /// univariate `f` at the value `a0` of `self`.
    pub fn compose_univariate(&self, derivs: &[C]) -> Self {
        let order = self.order();
        assert!(derivs.len() > order, "need derivatives up to the jet order");
        let mut h = self.clone();
        h.coeffs[0] = C::zero();
        let mut out = Jet::constant(&self.layout, derivs[0].clone());
        let mut power = Jet::constant(&self.layout, C::one());
        let mut fact = C::one();
        for (k, d) in derivs.iter().enumerate().take(order + 1).skip(1) {
            power = power.mul(&h);
            fact = fact * C::from_i64(k as i64);
            if d.is_zero() {
                continue;
            }
            out = out.add(&power.scale(&(d.clone() / fact.clone())));
        }
        out
    }

    /// Partial derivative along the 0-based variable `var`, one order lower.
    pub fn derivative(&self, var: usize) -> Self {
        let order = self.order();
        assert!(order >= 1, "cannot differentiate an order-0 jet");
        let layout = JetLayout::get(self.layout.n_vars, order - 1);
        let mut out = vec![C::zero(); layout.len()];
        for (k, beta) in layout.monomials.iter().enumerate() {
            let mut alpha = beta.clone();
            alpha[var] += 1;
            let src = self.layout.index[&alpha];
            let c = &self.coeffs[src];
            if !c.is_zero() {
                out[k] = c.clone() * C::from_i64(alpha[var] as i64);
            }
        }
        Jet { layout, coeffs: out }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Jet<D> {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}
