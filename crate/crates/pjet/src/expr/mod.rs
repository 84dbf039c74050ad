//! Exact scalar expressions.
//!
//! A [`ScalarExpr`] is always kept normalized: a reduced quotient of two
//! polynomials over the rationals whose indeterminates are chart variables and
//! opaque `exp`/`sin`/`cos` atoms. Syntax trees ([`Expr`]) come from the parser
//! or from builders and are turned into canonical values by [`Expr::normalize`].

mod dual;
mod parse;
mod poly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use dual::Dual;
pub use parse::parse_expr;
pub use poly::{gcd, rat, Monomial, Poly, RingOps, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by an identically zero polynomial")]
    DivisionByZero,
    #[error("pole of a quotient at the sample point")]
    Pole,
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
}

/// Ordered variable names with an optional base/fiber split.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
    base_len: Option<usize>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Arc<Chart> {
        Arc::new(Chart::build(names, None).expect("variable names must be unique"))
    }

    /// Chart whose first `base_len` variables are the base and the rest the fiber.
    pub fn split<S: AsRef<str>>(names: &[S], base_len: usize) -> Arc<Chart> {
        Arc::new(Chart::build(names, Some(base_len)).expect("invalid split chart"))
    }

    pub fn build<S: AsRef<str>>(names: &[S], base_len: Option<usize>) -> Result<Chart, String> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(format!("duplicate variable name `{n}`"));
            }
        }
        if let Some(b) = base_len {
            if b > names.len() {
                return Err("split exceeds chart dimension".into());
            }
        }
        Ok(Chart { names, base_len })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn base_len(&self) -> Option<usize> {
        self.base_len
    }

    pub fn base_indices(&self) -> Vec<usize> {
        (0..self.base_len.unwrap_or(self.dim())).collect()
    }

    pub fn fiber_indices(&self) -> Vec<usize> {
        (self.base_len.unwrap_or(self.dim())..self.dim()).collect()
    }

    pub fn parse(&self, src: &str) -> Result<ScalarExpr, ExprError> {
        parse_expr(src, &self.names)?.normalize()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

/// An opaque elementary-function node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub func: Func,
    pub arg: ScalarExpr,
}

/// Unnormalized syntax tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(BigRational),
    Var(usize),
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Div(Box<Expr>, Box<Expr>),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn normalize(&self) -> Result<ScalarExpr, ExprError> {
        Ok(match self {
            Expr::Const(c) => ScalarExpr::constant(c.clone()),
            Expr::Var(i) => ScalarExpr::var(*i),
            Expr::Neg(e) => -e.normalize()?,
            Expr::Add(es) => {
                let mut acc = ScalarExpr::zero();
                for e in es {
                    acc = &acc + &e.normalize()?;
                }
                acc
            }
            Expr::Mul(es) => {
                let mut acc = ScalarExpr::one();
                for e in es {
                    acc = &acc * &e.normalize()?;
                }
                acc
            }
            Expr::Pow(b, k) => b.normalize()?.powi(*k)?,
            Expr::Div(a, b) => a.normalize()?.checked_div(&b.normalize()?)?,
            Expr::Func(f, a) => ScalarExpr::apply(*f, a.normalize()?),
        })
    }
}

/// Normalized exact scalar: `num / den` with `gcd(num, den) = 1`, `den` monic,
/// and `den = 1` whenever the value is polynomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        ScalarExpr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        ScalarExpr::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        ScalarExpr::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        ScalarExpr::constant(rat(n, d))
    }

    pub fn var(i: usize) -> Self {
        ScalarExpr::from_poly(Poly::var(i))
    }

    pub fn from_poly(p: Poly) -> Self {
        ScalarExpr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Reduced quotient `num / den`.
    pub fn ratio(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(ScalarExpr::zero());
        }
        if let Some(c) = den.as_constant() {
            return Ok(ScalarExpr::from_poly(num.scale(&c.recip())));
        }
        let g = gcd(&num, &den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = d.leading_coeff();
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        if d.is_one() {
            return Ok(ScalarExpr::from_poly(n));
        }
        Ok(ScalarExpr { num: n, den: d })
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Polynomial in chart variables only.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one() && !self.num.has_atoms()
    }

    /// Quotient of polynomials in chart variables only.
    pub fn is_rational(&self) -> bool {
        !self.num.has_atoms() && !self.den.has_atoms()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn apply(f: Func, arg: ScalarExpr) -> ScalarExpr {
        if arg.is_zero() {
            return match f {
                Func::Exp | Func::Cos => ScalarExpr::one(),
                Func::Sin => ScalarExpr::zero(),
            };
        }
        ScalarExpr::from_poly(Poly::symbol(Symbol::Atom(Arc::new(Atom { func: f, arg }))))
    }

    pub fn exp(arg: ScalarExpr) -> ScalarExpr {
        ScalarExpr::apply(Func::Exp, arg)
    }

    pub fn sin(arg: ScalarExpr) -> ScalarExpr {
        ScalarExpr::apply(Func::Sin, arg)
    }

    pub fn cos(arg: ScalarExpr) -> ScalarExpr {
        ScalarExpr::apply(Func::Cos, arg)
    }

    pub fn checked_div(&self, other: &ScalarExpr) -> Result<ScalarExpr, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        ScalarExpr::ratio(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn recip(&self) -> Result<ScalarExpr, ExprError> {
        ScalarExpr::one().checked_div(self)
    }

    pub fn powi(&self, k: i64) -> Result<ScalarExpr, ExprError> {
        let e = u32::try_from(k.unsigned_abs()).map_err(|_| ExprError::Parse {
            pos: 0,
            msg: "exponent too large".into(),
        })?;
        let p = ScalarExpr {
            num: self.num.pow(e),
            den: self.den.pow(e),
        };
        if k < 0 {
            p.recip()
        } else {
            Ok(p)
        }
    }

    pub fn scale(&self, k: &BigRational) -> ScalarExpr {
        if k.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    fn add_impl(&self, other: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return ScalarExpr::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return ScalarExpr::ratio(self.num.add(&other.num), self.den.clone())
                .expect("nonzero denominator");
        }
        // over the lcm of the denominators rather than their product
        let g = gcd(&self.den, &other.den);
        let (sd, od) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (self.den.div_exact(&g).expect("gcd divides"), other.den.div_exact(&g).expect("gcd divides"))
        };
        let num = self.num.mul(&od).add(&other.num.mul(&sd));
        ScalarExpr::ratio(num, self.den.mul(&od)).expect("nonzero denominator")
    }

    fn mul_impl(&self, other: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || other.is_zero() {
            return ScalarExpr::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return ScalarExpr::from_poly(self.num.mul(&other.num));
        }
        // cross-cancel before multiplying to keep the gcd work small
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = other.den.div_exact(&g1).expect("gcd divides");
        let c = other.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        ScalarExpr::ratio(a.mul(&c), b.mul(&d)).expect("nonzero denominator")
    }

    /// Partial derivative with respect to chart variable `i`.
    pub fn differentiate(&self, i: usize) -> ScalarExpr {
        let dn = diff_poly(&self.num, i);
        if self.den.is_one() {
            return dn;
        }
        let dd = diff_poly(&self.den, i);
        let n = ScalarExpr::from_poly(self.num.clone());
        let d = ScalarExpr::from_poly(self.den.clone());
        let top = &(&dn * &d) - &(&n * &dd);
        top.checked_div(&(&d * &d)).expect("nonzero denominator")
    }

    /// Replace every chart variable `j` by `sub(j)`.
    pub fn substitute(&self, sub: &dyn Fn(usize) -> ScalarExpr) -> Result<ScalarExpr, ExprError> {
        let n = subst_poly(&self.num, sub)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = subst_poly(&self.den, sub)?;
        n.checked_div(&d)
    }

    /// Set chart variable `i` to the rational `value`.
    pub fn substitute_const(&self, i: usize, value: &BigRational) -> Result<ScalarExpr, ExprError> {
        self.substitute(&|j| {
            if j == i {
                ScalarExpr::constant(value.clone())
            } else {
                ScalarExpr::var(j)
            }
        })
    }

    /// Largest chart variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        fn walk(p: &Poly, acc: &mut Option<usize>) {
            for s in p.symbols() {
                match s {
                    Symbol::Var(i) => *acc = Some(acc.map_or(i, |a: usize| a.max(i))),
                    Symbol::Atom(a) => {
                        walk(&a.arg.num, acc);
                        walk(&a.arg.den, acc);
                    }
                }
            }
        }
        let mut acc = None;
        walk(&self.num, &mut acc);
        walk(&self.den, &mut acc);
        acc
    }

    /// Chart variables appearing anywhere in the expression.
    pub fn variables(&self) -> Vec<usize> {
        fn walk(p: &Poly, acc: &mut Vec<usize>) {
            for s in p.symbols() {
                match s {
                    Symbol::Var(i) => acc.push(i),
                    Symbol::Atom(a) => {
                        walk(&a.arg.num, acc);
                        walk(&a.arg.den, acc);
                    }
                }
            }
        }
        let mut acc = Vec::new();
        walk(&self.num, &mut acc);
        walk(&self.den, &mut acc);
        acc.sort_unstable();
        acc.dedup();
        acc
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        let zeros = vec![0.0; point.len()];
        Ok(self.eval_dual(point, &zeros)?.re)
    }

    /// Value and directional derivative at `point` along `tangent`.
    pub fn eval_dual(&self, point: &[f64], tangent: &[f64]) -> Result<Dual, ExprError> {
        if let Some(i) = self.max_var() {
            if i >= point.len() || i >= tangent.len() {
                return Err(ExprError::VariableOutOfRange(i));
            }
        }
        let x: Vec<Dual> = point
            .iter()
            .zip(tangent)
            .map(|(&p, &t)| Dual::new(p, t))
            .collect();
        self.eval_at(&x)
    }

    fn eval_at(&self, x: &[Dual]) -> Result<Dual, ExprError> {
        let n = eval_poly(&self.num, x)?;
        if self.den.is_one() {
            return Ok(n);
        }
        if let Some(i) = single_variable(&self.den) {
            if x[i].re.abs() < REMOVABLE_GUARD {
                if let Some(v) = self.removable_quotient(i, x)? {
                    return Ok(v);
                }
            }
        }
        let d = eval_poly(&self.den, x)?;
        if d.re == 0.0 {
            return Err(ExprError::Pole);
        }
        let v = n / d;
        if !v.is_finite() {
            return Err(ExprError::Pole);
        }
        Ok(v)
    }

    /// `num / x_i` near `x_i = 0` by a Taylor expansion of `num` in `x_i`.
    fn removable_quotient(&self, i: usize, x: &[Dual]) -> Result<Option<Dual>, ExprError> {
        let zero = BigRational::zero();
        let mut deriv = ScalarExpr::from_poly(self.num.clone());
        let mut coeffs = Vec::with_capacity(TAYLOR_TERMS + 1);
        let mut fact = 1.0;
        for k in 0..=TAYLOR_TERMS {
            if k > 0 {
                fact *= k as f64;
            }
            let c = deriv.substitute_const(i, &zero)?.eval_at(x)?;
            coeffs.push(Dual::new(c.re / fact, c.eps / fact));
            deriv = deriv.differentiate(i);
        }
        if coeffs[0].re.abs() > 1e-12 {
            return Ok(None);
        }
        let mut acc = Dual::constant(0.0);
        for c in coeffs[1..].iter().rev() {
            acc = acc * x[i] + *c;
        }
        Ok(Some(acc))
    }

    /// Back to a syntax tree; normalizing it returns `self`.
    pub fn to_expr(&self) -> Expr {
        let n = poly_to_expr(&self.num);
        if self.den.is_one() {
            n
        } else {
            Expr::Div(Box::new(n), Box::new(poly_to_expr(&self.den)))
        }
    }

    /// Infix rendering with the given variable names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> Display<'a> {
        Display { e: self, names }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }
}

const REMOVABLE_GUARD: f64 = 1e-6;
const TAYLOR_TERMS: usize = 6;

fn single_variable(p: &Poly) -> Option<usize> {
    if p.len() != 1 {
        return None;
    }
    let (m, c) = p.leading()?;
    if !c.is_one() {
        return None;
    }
    match m.factors() {
        [(Symbol::Var(i), 1)] => Some(*i),
        _ => None,
    }
}

fn diff_poly(p: &Poly, i: usize) -> ScalarExpr {
    let mut out = ScalarExpr::from_poly(p.diff_symbol(&Symbol::Var(i)));
    for s in p.symbols() {
        if let Symbol::Atom(a) = &s {
            let da = a.arg.differentiate(i);
            if da.is_zero() {
                continue;
            }
            let outer = match a.func {
                Func::Exp => ScalarExpr::from_poly(Poly::symbol(s.clone())),
                Func::Sin => ScalarExpr::cos(a.arg.clone()),
                Func::Cos => -ScalarExpr::sin(a.arg.clone()),
            };
            let partial = ScalarExpr::from_poly(p.diff_symbol(&s));
            out = &out + &(&partial * &(&outer * &da));
        }
    }
    out
}

struct ExprRing;

impl RingOps<ScalarExpr> for ExprRing {
    fn zero(&self) -> ScalarExpr {
        ScalarExpr::zero()
    }
    fn one(&self) -> ScalarExpr {
        ScalarExpr::one()
    }
    fn from_rational(&self, c: &BigRational) -> ScalarExpr {
        ScalarExpr::constant(c.clone())
    }
    fn add(&self, a: &ScalarExpr, b: &ScalarExpr) -> ScalarExpr {
        a + b
    }
    fn mul(&self, a: &ScalarExpr, b: &ScalarExpr) -> ScalarExpr {
        a * b
    }
}

fn subst_poly(p: &Poly, sub: &dyn Fn(usize) -> ScalarExpr) -> Result<ScalarExpr, ExprError> {
    // atom arguments are substituted first so that errors surface
    let mut images = std::collections::BTreeMap::new();
    for s in p.symbols() {
        let img = match &s {
            Symbol::Var(j) => sub(*j),
            Symbol::Atom(a) => ScalarExpr::apply(a.func, a.arg.substitute(sub)?),
        };
        images.insert(s, img);
    }
    Ok(p.eval_with(&ExprRing, |s| images[s].clone()))
}

struct DualRing;

impl RingOps<Dual> for DualRing {
    fn zero(&self) -> Dual {
        Dual::constant(0.0)
    }
    fn one(&self) -> Dual {
        Dual::constant(1.0)
    }
    fn from_rational(&self, c: &BigRational) -> Dual {
        Dual::constant(c.to_f64().unwrap_or(f64::NAN))
    }
    fn add(&self, a: &Dual, b: &Dual) -> Dual {
        *a + *b
    }
    fn mul(&self, a: &Dual, b: &Dual) -> Dual {
        *a * *b
    }
    fn pow(&self, a: &Dual, e: u32) -> Dual {
        a.powi(e as i32)
    }
}

fn eval_poly(p: &Poly, x: &[Dual]) -> Result<Dual, ExprError> {
    let mut images = std::collections::BTreeMap::new();
    for s in p.symbols() {
        let v = match &s {
            Symbol::Var(j) => *x.get(*j).ok_or(ExprError::VariableOutOfRange(*j))?,
            Symbol::Atom(a) => {
                let v = a.arg.eval_at(x)?;
                match a.func {
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                }
            }
        };
        images.insert(s, v);
    }
    Ok(p.eval_with(&DualRing, |s| images[s]))
}

fn poly_to_expr(p: &Poly) -> Expr {
    let terms: Vec<Expr> = p
        .terms()
        .rev()
        .map(|(m, c)| {
            let mut factors = vec![Expr::Const(c.clone())];
            for (s, e) in m.factors() {
                let base = match s {
                    Symbol::Var(i) => Expr::Var(*i),
                    Symbol::Atom(a) => Expr::Func(a.func, Box::new(a.arg.to_expr())),
                };
                factors.push(if *e == 1 {
                    base
                } else {
                    Expr::Pow(Box::new(base), *e as i64)
                });
            }
            Expr::Mul(factors)
        })
        .collect();
    Expr::Add(terms)
}

pub struct Display<'a> {
    e: &'a ScalarExpr,
    names: &'a [String],
}

fn var_name(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("x{i}"))
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly, names: &[String]) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let neg = c < &BigRational::zero();
        let a = if neg { -c.clone() } else { c.clone() };
        match (k, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let mut first = true;
        if !a.is_one() || m.is_one() {
            write!(f, "{}", a)?;
            first = false;
        }
        for (s, e) in m.factors() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            match s {
                Symbol::Var(i) => write!(f, "{}", var_name(names, *i))?,
                Symbol::Atom(at) => write!(f, "{}({})", at.func.name(), at.arg.display(names))?,
            }
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.den.is_one() {
            return write_poly(f, &self.e.num, self.names);
        }
        write!(f, "(")?;
        write_poly(f, &self.e.num, self.names)?;
        write!(f, ")/(")?;
        write_poly(f, &self.e.den, self.names)?;
        write!(f, ")")
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(&[]).fmt(f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: &ScalarExpr) -> ScalarExpr {
                $body(self, o)
            }
        }
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: ScalarExpr) -> ScalarExpr {
                $body(&self, &o)
            }
        }
        impl $tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: &ScalarExpr) -> ScalarExpr {
                $body(&self, o)
            }
        }
        impl $tr<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: ScalarExpr) -> ScalarExpr {
                $body(self, &o)
            }
        }
    };
}

binop!(Add, add, |a: &ScalarExpr, b: &ScalarExpr| a.add_impl(b));
binop!(Sub, sub, |a: &ScalarExpr, b: &ScalarExpr| a.add_impl(&-b));
binop!(Mul, mul, |a: &ScalarExpr, b: &ScalarExpr| a.mul_impl(b));

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl Default for ScalarExpr {
    fn default() -> Self {
        ScalarExpr::zero()
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        ScalarExpr::int(n)
    }
}

impl From<Poly> for ScalarExpr {
    fn from(p: Poly) -> Self {
        ScalarExpr::from_poly(p)
    }
}

#[cfg(test)]
mod tests;
