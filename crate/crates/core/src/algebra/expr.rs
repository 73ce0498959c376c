//! Scalar fields as expression trees with Taylor-mode point differentiation.
//!
//! Expressions serialize to a prefix (S-expression) grammar:
//!
//! ```text
//! expr  := atom | "(" op expr* ")"
//! atom  := "x" INDEX          1-based variable, e.g. x1
//!        | RATIONAL           3, -1/2, 0.25, 1e-3 (parsed exactly)
//! op    := "+" | "*"          one or more arguments
//!        | "-"                one argument (negation) or two (difference)
//!        | "/"                two arguments
//!        | "neg" | "exp" | "chi"            one argument
//!        | "pow" expr INTEGER               integer power, may be negative
//!        | "norm" "(" INTEGER+ ")" expr+    homogeneous norm of the arguments
//! ```
//!
//! `chi` is the cutoff profile of [`super::profile`], `norm` the homogeneous
//! norm for the listed dilation exponents.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::jet::{Jet, JetLayout};
use super::poly::Poly;
use super::profile;
use crate::error::{check_dim, Error, Result};
use crate::geometry::dilation_root;
use crate::scalar::{parse_rational, rational_to_string, Coeff};
use crate::Rational;

/// Highest supported jet order.
pub const MAX_JET_ORDER: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// 0-based variable index.
    Var(usize),
    Const(Rational),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Chi(Box<Expr>),
    Norm { exponents: Vec<u32>, args: Vec<Expr> },
}

impl Expr {
    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(v) | Expr::Mul(v) | Expr::Norm { args: v, .. } => v.iter().filter_map(Expr::max_var).max(),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Chi(a) => a.max_var(),
            Expr::Sub(a, b) | Expr::Div(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Expr::Var(_) | Expr::Const(_) => Ok(()),
            Expr::Add(v) | Expr::Mul(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidArgument("empty sum or product".into()));
                }
                v.iter().try_for_each(Expr::validate)
            }
            Expr::Norm { exponents, args } => {
                check_dim("norm arguments", exponents.len(), args.len())?;
                if exponents.is_empty() || exponents.contains(&0) {
                    return Err(Error::InvalidExponents(format!("norm exponents {exponents:?}")));
                }
                args.iter().try_for_each(Expr::validate)
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Chi(a) => a.validate(),
            Expr::Sub(a, b) | Expr::Div(a, b) => {
                a.validate()?;
                b.validate()
            }
        }
    }

    fn map_vars(&self, f: &impl Fn(usize) -> Expr) -> Expr {
        let bx = |e: &Expr| Box::new(e.map_vars(f));
        match self {
            Expr::Var(i) => f(*i),
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Add(v) => Expr::Add(v.iter().map(|e| e.map_vars(f)).collect()),
            Expr::Mul(v) => Expr::Mul(v.iter().map(|e| e.map_vars(f)).collect()),
            Expr::Norm { exponents, args } => Expr::Norm {
                exponents: exponents.clone(),
                args: args.iter().map(|e| e.map_vars(f)).collect(),
            },
            Expr::Neg(a) => Expr::Neg(bx(a)),
            Expr::Pow(a, k) => Expr::Pow(bx(a), *k),
            Expr::Exp(a) => Expr::Exp(bx(a)),
            Expr::Chi(a) => Expr::Chi(bx(a)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Div(a, b) => Expr::Div(bx(a), bx(b)),
        }
    }

    fn to_poly(&self, n: usize) -> Option<Poly<Rational>> {
        Some(match self {
            Expr::Var(i) => Poly::var(n, *i),
            Expr::Const(c) => Poly::constant(n, c.clone()),
            Expr::Add(v) => v.iter().try_fold(Poly::zero(n), |acc, e| Some(acc + e.to_poly(n)?))?,
            Expr::Mul(v) => v.iter().try_fold(Poly::one(n), |acc, e| Some(acc * e.to_poly(n)?))?,
            Expr::Neg(a) => -a.to_poly(n)?,
            Expr::Sub(a, b) => a.to_poly(n)? - b.to_poly(n)?,
            Expr::Pow(a, k) if *k >= 0 => a.to_poly(n)?.pow(*k as u32),
            Expr::Div(a, b) => {
                let d = b.to_poly(n)?;
                if d.total_degree() != Some(0) {
                    return None;
                }
                a.to_poly(n)?.scale(&(Rational::one() / d.constant_term()))
            }
            _ => return None,
        })
    }
}

/// A closed-form function `R^n → R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    n_vars: usize,
    expr: Expr,
}

impl ScalarField {
    pub fn new(n_vars: usize, expr: Expr) -> Result<Self> {
        if let Some(i) = expr.max_var() {
            if i >= n_vars {
                return Err(Error::InvalidArgument(format!(
                    "variable x{} used in a field over {n_vars} variables",
                    i + 1
                )));
            }
        }
        expr.validate()?;
        Ok(ScalarField { n_vars, expr })
    }

    pub fn parse(n_vars: usize, s: &str) -> Result<Self> {
        Self::new(n_vars, s.parse()?)
    }

    pub fn constant(n_vars: usize, c: Rational) -> Self {
        ScalarField {
            n_vars,
            expr: Expr::Const(c),
        }
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars);
        ScalarField {
            n_vars,
            expr: Expr::Var(i),
        }
    }

    pub fn from_poly(p: &Poly<Rational>) -> Self {
        let terms: Vec<Expr> = p
            .terms()
            .map(|(e, c)| {
                let mut factors = vec![Expr::Const(c.clone())];
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => factors.push(Expr::Var(i)),
                        k => factors.push(Expr::Pow(Box::new(Expr::Var(i)), k as i32)),
                    }
                }
                Expr::Mul(factors)
            })
            .collect();
        let expr = if terms.is_empty() { Expr::Const(Rational::zero()) } else { Expr::Add(terms) };
        ScalarField {
            n_vars: p.n_vars(),
            expr,
        }
    }

    /// `‖(x_1, …, x_n)‖` for the given exponents.
    pub fn hom_norm(exponents: &[u32]) -> Result<Self> {
        Self::new(
            exponents.len(),
            Expr::Norm {
                exponents: exponents.to_vec(),
                args: (0..exponents.len()).map(Expr::Var).collect(),
            },
        )
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    fn combine(&self, other: &ScalarField, f: impl Fn(Expr, Expr) -> Expr) -> ScalarField {
        assert_eq!(self.n_vars, other.n_vars, "combining fields over different spaces");
        ScalarField {
            n_vars: self.n_vars,
            expr: f(self.expr.clone(), other.expr.clone()),
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, |a, b| Expr::Add(vec![a, b]))
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, |a, b| Expr::Sub(Box::new(a), Box::new(b)))
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        self.combine(other, |a, b| Expr::Mul(vec![a, b]))
    }

    pub fn scale(&self, c: &Rational) -> ScalarField {
        ScalarField {
            n_vars: self.n_vars,
            expr: Expr::Mul(vec![Expr::Const(c.clone()), self.expr.clone()]),
        }
    }

    pub fn exp(&self) -> ScalarField {
        ScalarField {
            n_vars: self.n_vars,
            expr: Expr::Exp(Box::new(self.expr.clone())),
        }
    }

    /// `x ↦ u(δ_λ x)`.
    pub fn compose_dilation(&self, exponents: &[u32], lambda: &Rational) -> Result<ScalarField> {
        check_dim("dilation exponents", self.n_vars, exponents.len())?;
        let expr = self.expr.map_vars(&|i| {
            Expr::Mul(vec![Expr::Const(num_traits::pow(lambda.clone(), exponents[i] as usize)), Expr::Var(i)])
        });
        Ok(ScalarField {
            n_vars: self.n_vars,
            expr,
        })
    }

    /// Views the field on `R^N ⊇ R^n` as a function of the first `n` coordinates.
    pub fn extend_vars(&self, n_vars: usize) -> Result<ScalarField> {
        if n_vars < self.n_vars {
            return Err(Error::InvalidArgument("cannot shrink the variable count".into()));
        }
        Ok(ScalarField {
            n_vars,
            expr: self.expr.clone(),
        })
    }

    /// The polynomial this expression denotes, if it is one.
    pub fn as_poly(&self) -> Option<Poly<Rational>> {
        self.expr.to_poly(self.n_vars)
    }

    /// Jet of order `order` at `x`: value and all partials up to that order.
    ///
    /// With an exact coefficient type only polynomial expressions are
    /// accepted; transcendental nodes report [`Error::NotPolynomial`].
    pub fn jet<C: Coeff>(&self, x: &[C], order: usize) -> Result<Jet<C>> {
        check_dim("evaluation point", self.n_vars, x.len())?;
        if order > MAX_JET_ORDER {
            return Err(Error::OrderTooHigh {
                order,
                max: MAX_JET_ORDER,
            });
        }
        let layout = JetLayout::get(self.n_vars, order);
        let node = eval(&self.expr, x, &layout)?;
        if !node.smooth {
            return Err(Error::NonSmoothPoint(format!("`{self}` is not differentiable at {x:?}")));
        }
        Ok(node.jet)
    }

    pub fn eval<C: Coeff>(&self, x: &[C]) -> Result<C> {
        Ok(self.jet(x, 0)?.value().clone())
    }
}

struct Node<C> {
    jet: Jet<C>,
    /// `false` when the subtree is not differentiable at the point; only the
    /// value of `jet` is meaningful then.
    smooth: bool,
}

fn lift_const<C: Coeff>(q: &Rational) -> Result<C> {
    if C::is_exact() {
        let any: &dyn std::any::Any = q;
        if let Some(v) = any.downcast_ref::<C>() {
            return Ok(v.clone());
        }
    }
    C::from_f64(Coeff::to_f64(q)).ok_or(Error::NotPolynomial)
}

fn float_of<C: Coeff>(v: f64) -> Result<C> {
    C::from_f64(v).ok_or(Error::NotPolynomial)
}

fn eval<C: Coeff>(e: &Expr, x: &[C], layout: &std::sync::Arc<JetLayout>) -> Result<Node<C>> {
    let smooth = |jet| Node { jet, smooth: true };
    Ok(match e {
        Expr::Var(i) => smooth(Jet::variable(layout, *i, x[*i].clone())),
        Expr::Const(q) => smooth(Jet::constant(layout, lift_const(q)?)),
        Expr::Add(v) => {
            let mut acc = eval(&v[0], x, layout)?;
            for t in &v[1..] {
                let n = eval(t, x, layout)?;
                acc = Node {
                    jet: acc.jet.add(&n.jet),
                    smooth: acc.smooth && n.smooth,
                };
            }
            acc
        }
        Expr::Mul(v) => {
            let mut acc = eval(&v[0], x, layout)?;
            for t in &v[1..] {
                let n = eval(t, x, layout)?;
                acc = Node {
                    jet: acc.jet.mul(&n.jet),
                    smooth: acc.smooth && n.smooth,
                };
            }
            acc
        }
        Expr::Neg(a) => {
            let n = eval(a, x, layout)?;
            Node {
                jet: n.jet.neg(),
                smooth: n.smooth,
            }
        }
        Expr::Sub(a, b) => {
            let (a, b) = (eval(a, x, layout)?, eval(b, x, layout)?);
            Node {
                jet: a.jet.sub(&b.jet),
                smooth: a.smooth && b.smooth,
            }
        }
        Expr::Div(a, b) => {
            let (a, b) = (eval(a, x, layout)?, eval(b, x, layout)?);
            Node {
                jet: a.jet.div(&b.jet)?,
                smooth: a.smooth && b.smooth,
            }
        }
        Expr::Pow(a, k) => {
            let n = eval(a, x, layout)?;
            Node {
                jet: n.jet.powi(*k)?,
                smooth: n.smooth,
            }
        }
        Expr::Exp(a) => {
            let n = eval(a, x, layout)?;
            let v: C = float_of(n.jet.value().to_f64().exp())?;
            Node {
                jet: n.jet.compose_univariate(&vec![v; layout.order() + 1]),
                smooth: n.smooth,
            }
        }
        Expr::Chi(a) => {
            if !C::is_exact() {
                let xf: Vec<f64> = x.iter().map(Coeff::to_f64).collect();
                if let Some(s) = value_f64(a, &xf).filter(|&s| profile::chi_is_flat(s)) {
                    return Ok(smooth(Jet::constant(layout, float_of(profile::chi(s))?)));
                }
            }
            let n = eval(a, x, layout)?;
            let s = n.jet.value().to_f64();
            if profile::chi_is_flat(s) {
                // χ is locally constant: the composition is smooth whatever the argument.
                smooth(Jet::constant(layout, float_of(profile::chi(s))?))
            } else {
                let d = profile::chi_derivatives(s, layout.order())
                    .into_iter()
                    .map(float_of)
                    .collect::<Result<Vec<C>>>()?;
                Node {
                    jet: n.jet.compose_univariate(&d),
                    smooth: n.smooth,
                }
            }
        }
        Expr::Norm { exponents, args } => {
            let nodes = args.iter().map(|a| eval(a, x, layout)).collect::<Result<Vec<_>>>()?;
            let values: Vec<f64> = nodes.iter().map(|n| n.jet.value().to_f64()).collect();
            let t0 = match dilation_root(exponents, &values) {
                Some(t) => t,
                None => {
                    return Ok(Node {
                        jet: Jet::zero(layout),
                        smooth: false,
                    })
                }
            };
            if nodes.iter().any(|n| !n.smooth) {
                return Ok(Node {
                    jet: Jet::constant(layout, float_of(1.0 / t0)?),
                    smooth: false,
                });
            }
            let jets: Vec<Jet<C>> = nodes.into_iter().map(|n| n.jet).collect();
            smooth(norm_jet(exponents, &jets, t0)?)
        }
    })
}

/// Plain floating-point value, `None` where undefined.
fn value_f64(e: &Expr, x: &[f64]) -> Option<f64> {
    Some(match e {
        Expr::Var(i) => x[*i],
        Expr::Const(q) => Coeff::to_f64(q),
        Expr::Add(v) => v.iter().map(|t| value_f64(t, x)).sum::<Option<f64>>()?,
        Expr::Mul(v) => v.iter().map(|t| value_f64(t, x)).product::<Option<f64>>()?,
        Expr::Neg(a) => -value_f64(a, x)?,
        Expr::Sub(a, b) => value_f64(a, x)? - value_f64(b, x)?,
        Expr::Div(a, b) => {
            let d = value_f64(b, x)?;
            if d == 0.0 {
                return None;
            }
            value_f64(a, x)? / d
        }
        Expr::Pow(a, k) => {
            let v = value_f64(a, x)?;
            if v == 0.0 && *k < 0 {
                return None;
            }
            v.powi(*k)
        }
        Expr::Exp(a) => value_f64(a, x)?.exp(),
        Expr::Chi(a) => profile::chi(value_f64(a, x)?),
        Expr::Norm { exponents, args } => {
            let ys = args.iter().map(|t| value_f64(t, x)).collect::<Option<Vec<f64>>>()?;
            dilation_root(exponents, &ys).map_or(0.0, |t| 1.0 / t)
        }
    })
}

/// Solves `Σ y_i² t^{2w_i} = 1` for the jet `t` by Newton's method in jet
/// arithmetic (each step doubles the number of correct orders), then returns
/// `1/t`.
fn norm_jet<C: Coeff>(exponents: &[u32], args: &[Jet<C>], t0: f64) -> Result<Jet<C>> {
    let layout = args[0].layout().clone();
    let squares: Vec<Jet<C>> = args.iter().map(|y| y.mul(y)).collect();
    let mut t = Jet::constant(&layout, float_of(t0)?);
    let mut correct = 1;
    while correct <= layout.order() {
        correct *= 2;
        let mut g = Jet::constant(&layout, -C::one());
        let mut dg = Jet::zero(&layout);
        for (y2, &w) in squares.iter().zip(exponents) {
            let tp = t.powi(2 * w as i32 - 1)?;
            g = g.add(&y2.mul(&tp.mul(&t)));
            dg = dg.add(&y2.mul(&tp).scale(&C::from_i64(2 * w as i64)));
        }
        t = t.sub(&g.div(&dg)?);
    }
    t.recip()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, args: &[&Expr]| -> fmt::Result {
            write!(f, "({op}")?;
            for a in args {
                write!(f, " {a}")?;
            }
            write!(f, ")")
        };
        match self {
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Const(q) => write!(f, "{}", rational_to_string(q)),
            Expr::Add(v) => list(f, "+", &v.iter().collect::<Vec<_>>()),
            Expr::Mul(v) => list(f, "*", &v.iter().collect::<Vec<_>>()),
            Expr::Neg(a) => list(f, "neg", &[a]),
            Expr::Sub(a, b) => list(f, "-", &[a, b]),
            Expr::Div(a, b) => list(f, "/", &[a, b]),
            Expr::Pow(a, k) => write!(f, "(pow {a} {k})"),
            Expr::Exp(a) => list(f, "exp", &[a]),
            Expr::Chi(a) => list(f, "chi", &[a]),
            Expr::Norm { exponents, args } => {
                let w: Vec<String> = exponents.iter().map(u32::to_string).collect();
                write!(f, "(norm ({})", w.join(" "))?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn tokenize(s: &str) -> Result<Sexp> {
    fn parse_at(s: &[u8], i: &mut usize) -> Result<Sexp> {
        while *i < s.len() && s[*i].is_ascii_whitespace() {
            *i += 1;
        }
        if *i >= s.len() {
            return Err(Error::Parse {
                pos: *i,
                msg: "unexpected end of input".into(),
            });
        }
        let start = *i;
        match s[*i] {
            b'(' => {
                *i += 1;
                let mut items = Vec::new();
                loop {
                    while *i < s.len() && s[*i].is_ascii_whitespace() {
                        *i += 1;
                    }
                    if *i >= s.len() {
                        return Err(Error::Parse {
                            pos: start,
                            msg: "unclosed parenthesis".into(),
                        });
                    }
                    if s[*i] == b')' {
                        *i += 1;
                        return Ok(Sexp::List(items, start));
                    }
                    items.push(parse_at(s, i)?);
                }
            }
            b')' => Err(Error::Parse {
                pos: start,
                msg: "unexpected ')'".into(),
            }),
            _ => {
                while *i < s.len() && !s[*i].is_ascii_whitespace() && s[*i] != b'(' && s[*i] != b')' {
                    *i += 1;
                }
                let text = String::from_utf8_lossy(&s[start..*i]).into_owned();
                Ok(Sexp::Atom(text, start))
            }
        }
    }
    let bytes = s.as_bytes();
    let mut i = 0;
    let out = parse_at(bytes, &mut i)?;
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    if i != bytes.len() {
        return Err(Error::Parse {
            pos: i,
            msg: "trailing input".into(),
        });
    }
    Ok(out)
}

fn perr<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

fn to_expr(s: &Sexp) -> Result<Expr> {
    match s {
        Sexp::Atom(a, pos) => {
            if let Some(idx) = a.strip_prefix('x') {
                return match idx.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(Expr::Var(k - 1)),
                    _ => perr(*pos, format!("bad variable `{a}` (variables are x1, x2, ...)")),
                };
            }
            match parse_rational(a) {
                Some(q) => Ok(Expr::Const(q)),
                None => perr(*pos, format!("unknown atom `{a}`")),
            }
        }
        Sexp::List(items, pos) => {
            let (op, args) = match items.split_first() {
                Some((Sexp::Atom(op, _), args)) => (op.as_str(), args),
                _ => return perr(*pos, "expected an operator after '('"),
            };
            let arity = |n: usize| -> Result<()> {
                if args.len() != n {
                    return perr(*pos, format!("`{op}` takes {n} argument(s), got {}", args.len()));
                }
                Ok(())
            };
            let sub = |k: usize| to_expr(&args[k]).map(Box::new);
            match op {
                "+" | "*" => {
                    if args.is_empty() {
                        return perr(*pos, format!("`{op}` needs at least one argument"));
                    }
                    let v = args.iter().map(to_expr).collect::<Result<Vec<_>>>()?;
                    Ok(if op == "+" { Expr::Add(v) } else { Expr::Mul(v) })
                }
                "-" => match args.len() {
                    1 => Ok(Expr::Neg(sub(0)?)),
                    2 => Ok(Expr::Sub(sub(0)?, sub(1)?)),
                    n => perr(*pos, format!("`-` takes 1 or 2 arguments, got {n}")),
                },
                "/" => {
                    arity(2)?;
                    Ok(Expr::Div(sub(0)?, sub(1)?))
                }
                "neg" | "exp" | "chi" => {
                    arity(1)?;
                    let a = sub(0)?;
                    Ok(match op {
                        "neg" => Expr::Neg(a),
                        "exp" => Expr::Exp(a),
                        _ => Expr::Chi(a),
                    })
                }
                "pow" => {
                    arity(2)?;
                    match &args[1] {
                        Sexp::Atom(k, p) => match k.parse::<i32>() {
                            Ok(k) => Ok(Expr::Pow(sub(0)?, k)),
                            Err(_) => perr(*p, "`pow` exponent must be an integer literal"),
                        },
                        other => perr(other.pos(), "`pow` exponent must be an integer literal"),
                    }
                }
                "norm" => {
                    let (w, rest) = match args.split_first() {
                        Some((Sexp::List(w, _), rest)) => (w, rest),
                        _ => return perr(*pos, "`norm` expects an exponent list first, e.g. (norm (1 2) x1 x2)"),
                    };
                    let exponents = w
                        .iter()
                        .map(|a| match a {
                            Sexp::Atom(t, p) => t.parse::<u32>().or_else(|_| perr(*p, "exponent must be a positive integer")),
                            other => perr(other.pos(), "exponent must be a positive integer"),
                        })
                        .collect::<Result<Vec<u32>>>()?;
                    if exponents.len() != rest.len() {
                        return perr(*pos, "`norm` needs one argument per exponent");
                    }
                    let args = rest.iter().map(to_expr).collect::<Result<Vec<_>>>()?;
                    Ok(Expr::Norm { exponents, args })
                }
                other => perr(*pos, format!("unknown operator `{other}`")),
            }
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let e = to_expr(&tokenize(s)?)?;
        e.validate()?;
        Ok(e)
    }
}

/// True when `|a - b| ≤ tol · max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

impl ScalarField {
    /// Whether the expression contains only exact polynomial operations.
    pub fn is_polynomial(&self) -> bool {
        self.as_poly().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn jet_examples() {
        let f = ScalarField::parse(2, "(* x1 x2)").unwrap();
        let j = f.jet(&[q(1, 1), q(1, 1)], 2).unwrap();
        assert_eq!(j.partial(&[1, 1]).unwrap(), q(1, 1));
        assert_eq!(j.partial(&[2, 0]).unwrap(), q(0, 1));

        let g = ScalarField::parse(1, "(exp (neg (* x1 x1)))").unwrap();
        let j = g.jet(&[0.0f64], 2).unwrap();
        assert_eq!(*j.value(), 1.0);
        assert_eq!(j.partial(&[1]).unwrap(), 0.0);
        assert!((j.partial(&[2]).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn norm_node_value_and_origin() {
        let f = ScalarField::hom_norm(&[1, 2]).unwrap();
        let v = f.eval(&[1.0f64, 1.0]).unwrap();
        assert!((v - (5f64.sqrt() + 1.0).sqrt() / 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(f.jet(&[0.0f64, 0.0], 1), Err(Error::NonSmoothPoint(_))));
    }

    #[test]
    fn norm_node_derivatives_match_closed_form() {
        // Grushin closed form N(x) = sqrt(sqrt(x1^4 + 4 x2^2) + x1^2)/sqrt(2)
        let closed = ScalarField::parse(
            2,
            "(* (pow (+ (pow (+ (pow x1 4) (* 4 (pow x2 2))) 1/2) (pow x1 2)) 1/2) 1/2)",
        );
        // fractional powers are not in the grammar; compare against finite differences instead
        assert!(closed.is_err());
        let f = ScalarField::hom_norm(&[1, 2]).unwrap();
        let n = |x: f64, y: f64| ((x.powi(4) + 4.0 * y * y).sqrt() + x * x).sqrt() / 2f64.sqrt();
        let (x, y) = (0.7, -0.4);
        let j = f.jet(&[x, y], 2).unwrap();
        let h = 1e-5;
        let dx = (n(x + h, y) - n(x - h, y)) / (2.0 * h);
        let dy = (n(x, y + h) - n(x, y - h)) / (2.0 * h);
        assert!((j.partial(&[1, 0]).unwrap() - dx).abs() < 1e-8);
        assert!((j.partial(&[0, 1]).unwrap() - dy).abs() < 1e-8);
        let dxy = (n(x + h, y + h) - n(x + h, y - h) - n(x - h, y + h) + n(x - h, y - h)) / (4.0 * h * h);
        assert!((j.partial(&[1, 1]).unwrap() - dxy).abs() < 1e-4);
    }

    #[test]
    fn exact_path_rejects_transcendental_nodes() {
        let g = ScalarField::parse(1, "(exp x1)").unwrap();
        assert!(matches!(g.jet(&[q(0, 1)], 1), Err(Error::NotPolynomial)));
        let f = ScalarField::parse(2, "(/ (+ x1 (* 3 x2)) 2)").unwrap();
        let j = f.jet(&[q(1, 3), q(2, 1)], 1).unwrap();
        assert_eq!(*j.value(), q(19, 6));
        assert!(f.is_polynomial());
        assert!(!g.is_polynomial());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("(+ x1".parse::<Expr>(), Err(Error::Parse { .. })));
        assert!(matches!("(foo x1)".parse::<Expr>(), Err(Error::Parse { .. })));
        assert!(matches!("(pow x1 x2)".parse::<Expr>(), Err(Error::Parse { .. })));
        assert!(matches!("(norm (1 2) x1)".parse::<Expr>(), Err(Error::Parse { .. })));
        assert!(matches!("x0".parse::<Expr>(), Err(Error::Parse { .. })));
        assert!(matches!("x1 x2".parse::<Expr>(), Err(Error::Parse { .. })));
        assert!(ScalarField::parse(1, "(* x1 x2)").is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in [
            "(+ (* 3/2 x1 x2) (neg x1) (- x2 1))",
            "(chi (+ (* 1/2 (norm (1 2) x1 x2)) -3/4))",
            "(/ (exp (pow x1 -2)) (pow x2 3))",
        ] {
            let e: Expr = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
    }

    #[test]
    fn division_by_zero_is_reported() {
        let f = ScalarField::parse(1, "(/ 1 x1)").unwrap();
        assert!(matches!(f.eval(&[0.0f64]), Err(Error::DivisionByZero)));
        let g = ScalarField::parse(1, "(pow x1 -1)").unwrap();
        assert!(matches!(g.eval(&[0.0f64]), Err(Error::DivisionByZero)));
    }

    #[test]
    fn dilation_composition() {
        let u = ScalarField::parse(2, "(+ (* x1 x1) x2)").unwrap();
        let v = u.compose_dilation(&[1, 2], &q(2, 1)).unwrap();
        // u(δ_2 x) = 4 x1^2 + 4 x2 = 4 u(x)
        let x = [q(3, 2), q(-1, 3)];
        assert_eq!(v.eval(&x).unwrap(), u.eval(&x).unwrap() * q(4, 1));
        assert!(close(1.0, 1.0 + 1e-12, 1e-10));
    }
}
