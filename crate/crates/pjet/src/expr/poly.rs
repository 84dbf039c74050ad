//! Sparse multivariate polynomials over the rationals.
//!
//! Monomials are sparse exponent vectors over [`Symbol`]s: chart variables and
//! opaque elementary-function atoms. Terms are kept in a `BTreeMap` under the
//! graded-lex order, so the representation is canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Atom;

/// A polynomial indeterminate: a chart variable or an opaque function node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Var(usize),
    Atom(Arc<Atom>),
}

/// Sparse exponent vector, sorted by symbol, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn symbol(s: Symbol, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(s, e)])
        }
    }

    pub fn var(i: usize) -> Self {
        Monomial::symbol(Symbol::Var(i), 1)
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (Symbol::Var(i), e))
                .collect(),
        )
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Exponent of chart variable `i`.
    pub fn var_exponent(&self, i: usize) -> u32 {
        self.exponent(&Symbol::Var(i))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (s, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *s {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *s {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((s.clone(), e - f)),
                }
            } else {
                out.push((s.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Remove the factor `s^k` entirely, returning `(k, rest)`.
    pub fn split_off(&self, s: &Symbol) -> (u32, Monomial) {
        let mut k = 0;
        let rest = self
            .0
            .iter()
            .filter(|(t, e)| {
                if t == s {
                    k = *e;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (k, Monomial(rest))
    }

    /// Lower the exponent of `s` by one.
    pub fn lower(&self, s: &Symbol) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(t, e)| {
                    if t == s {
                        (*e > 1).then(|| (t.clone(), e - 1))
                    } else {
                        Some((t.clone(), *e))
                    }
                })
                .collect(),
        )
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// smallest symbol at which the two vectors differ.
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial with rational coefficients; zero coefficients never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(i: usize) -> Self {
        Poly::term(Monomial::var(i), BigRational::one())
    }

    pub fn symbol(s: Symbol) -> Self {
        Poly::term(Monomial::symbol(s, 1), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    /// The constant value when the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn has_atoms(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(s, _)| matches!(s, Symbol::Atom(_))))
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(s, _)| s.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.mul(m), c * k))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Divide by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = rm.div(&lm)?;
            let c = rc / &lc;
            r = r.sub(&d.mul_term(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Partial derivative treating atoms as independent symbols.
    pub fn diff_symbol(&self, s: &Symbol) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(s);
            if e > 0 {
                out.add_term(m.lower(s), c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `s`.
    pub fn coefficients_in(&self, s: &Symbol) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let (k, rest) = m.split_off(s);
            out[k as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coefficients(s: &Symbol, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (k, p) in coeffs.iter().enumerate() {
            let m = Monomial::symbol(s.clone(), k as u32);
            for (n, c) in &p.terms {
                out.add_term(n.mul(&m), c.clone());
            }
        }
        out
    }

    /// Evaluate in any ring, given the image of each symbol.
    pub fn eval_with<T, F>(&self, ring: &impl RingOps<T>, mut sym: F) -> T
    where
        T: Clone,
        F: FnMut(&Symbol) -> T,
    {
        let mut cache: BTreeMap<Symbol, T> = BTreeMap::new();
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = ring.from_rational(c);
            for (s, e) in &m.0 {
                let base = cache.entry(s.clone()).or_insert_with(|| sym(s)).clone();
                t = ring.mul(&t, &ring.pow(&base, *e));
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    /// Keep only terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &BigRational) -> (Monomial, BigRational)) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (n, d) = f(m, c);
            out.add_term(n, d);
        }
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    /// Sign of the leading coefficient (1 for zero).
    pub fn leading_sign(&self) -> i32 {
        match self.leading() {
            Some((_, c)) if c.is_negative() => -1,
            _ => 1,
        }
    }
}

/// Minimal ring interface used for evaluation in different carriers.
pub trait RingOps<T> {
    fn zero(&self) -> T;
    fn one(&self) -> T;
    fn from_rational(&self, c: &BigRational) -> T;
    fn add(&self, a: &T, b: &T) -> T;
    fn mul(&self, a: &T, b: &T) -> T;
    fn pow(&self, a: &T, mut e: u32) -> T
    where
        T: Clone,
    {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// Greatest common divisor, monic in the graded-lex order.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    // common in practice: denominators that are powers of one factor
    if b.div_exact(a).is_some() {
        return a.monic();
    }
    if a.div_exact(b).is_some() {
        return b.monic();
    }
    let mut syms = a.symbols();
    syms.extend(b.symbols());
    syms.sort();
    syms.dedup();
    let v = syms.last().cloned().expect("non-constant polynomial has a symbol");
    let ua = a.coefficients_in(&v);
    let ub = b.coefficients_in(&v);
    let ca = content(&ua);
    let cb = content(&ub);
    let c = gcd(&ca, &cb);
    let pa = divide_all(&ua, &ca);
    let pb = divide_all(&ub, &cb);
    let g = primitive_gcd(pa, pb);
    let g = primitive_part(&g);
    c.mul(&Poly::from_coefficients(&v, &g)).monic()
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_all(coeffs: &[Poly], d: &Poly) -> Vec<Poly> {
    coeffs
        .iter()
        .map(|c| c.div_exact(d).expect("content divides every coefficient"))
        .collect()
}

/// Divide out the polynomial content and then the rational content, so the
/// coefficients stay small along the remainder sequence.
fn primitive_part(coeffs: &[Poly]) -> Vec<Poly> {
    let c = content(coeffs);
    if c.is_zero() {
        return coeffs.to_vec();
    }
    let out = divide_all(coeffs, &c);
    let k = rational_content(&out);
    if k.is_one() {
        return out;
    }
    let inv = k.recip();
    out.iter().map(|p| p.scale(&inv)).collect()
}

/// `gcd(numerators) / lcm(denominators)` over every coefficient.
fn rational_content(coeffs: &[Poly]) -> BigRational {
    let (mut g, mut l) = (BigInt::zero(), BigInt::one());
    for (_, c) in coeffs.iter().flat_map(|p| p.terms.iter()) {
        g = g.gcd(c.numer());
        l = l.lcm(c.denom());
    }
    if g.is_zero() {
        BigRational::one()
    } else {
        BigRational::new(g, l)
    }
}

fn trim(mut v: Vec<Poly>) -> Vec<Poly> {
    while v.len() > 1 && v.last().map(Poly::is_zero).unwrap_or(false) {
        v.pop();
    }
    v
}

fn is_zero_uni(v: &[Poly]) -> bool {
    v.iter().all(Poly::is_zero)
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = trim(a.to_vec());
    while !is_zero_uni(&r) && r.len() - 1 >= db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(&lb)).collect();
        for (k, bc) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&bc.mul(&lr));
        }
        next.pop();
        r = trim(next);
    }
    r
}

fn primitive_gcd(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut a, mut b) = (trim(a), trim(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if is_zero_uni(&b) {
            return a;
        }
        let r = prem(&a, &b);
        if is_zero_uni(&r) {
            return b;
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        a = b;
        b = primitive_part(&r);
    }
}
