//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! The variable set is fixed: the system constants `a, b, c, d`, the wave
//! parameters `λ, m, σ`, and the ansatz coefficients `j_r`, `k_r`. Terms are
//! stored in a `BTreeMap` keyed by sorted exponent vectors with no zero
//! coefficients, so two polynomials are equal exactly when they are
//! structurally equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial variable. The derived order is the canonical print order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    A,
    B,
    C,
    D,
    Lambda,
    M,
    Sigma,
    J(u32),
    K(u32),
}

impl Var {
    /// True for `λ`, `m`, `σ` and the ansatz coefficients.
    pub fn is_unknown(self) -> bool {
        !matches!(self, Var::A | Var::B | Var::C | Var::D)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::A => f.write_str("a"),
            Var::B => f.write_str("b"),
            Var::C => f.write_str("c"),
            Var::D => f.write_str("d"),
            Var::Lambda => f.write_str("lambda"),
            Var::M => f.write_str("m"),
            Var::Sigma => f.write_str("sigma"),
            Var::J(r) => write!(f, "j{r}"),
            Var::K(r) => write!(f, "k{r}"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let index = |rest: &str| -> Result<u32> {
            let rest = rest.strip_prefix('_').unwrap_or(rest);
            rest.parse().map_err(|_| Error::Parse(format!("bad coefficient index in `{s}`")))
        };
        Ok(match s {
            "a" => Var::A,
            "b" => Var::B,
            "c" => Var::C,
            "d" => Var::D,
            "lambda" | "λ" => Var::Lambda,
            "m" => Var::M,
            "sigma" | "σ" => Var::Sigma,
            _ if s.starts_with('j') && s.len() > 1 => Var::J(index(&s[1..])?),
            _ if s.starts_with('k') && s.len() > 1 => Var::K(index(&s[1..])?),
            _ => return Err(Error::Parse(format!("unknown variable `{s}`"))),
        })
    }
}

/// Power product of variables, sorted by [`Var`] with positive exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut out = Monomial::one();
        for (v, e) in powers {
            out = out.mul(&Monomial(if e == 0 { vec![] } else { vec![(v, e)] }));
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |&(_, e)| e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (mut i, mut j) = (0, 0);
        let (x, y) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(x.len() + y.len());
        while i < x.len() && j < y.len() {
            match x[i].0.cmp(&y[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(x[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(y[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((x[i].0, x[i].1 + y[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&x[i..]);
        out.extend_from_slice(&y[j..]);
        Monomial(out)
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut it = other.0.iter().peekable();
        for &(v, e) in &self.0 {
            match it.peek() {
                Some(&&(w, f)) if w == v => {
                    it.next();
                    match e.cmp(&f) {
                        std::cmp::Ordering::Less => return None,
                        std::cmp::Ordering::Equal => {}
                        std::cmp::Ordering::Greater => out.push((v, e - f)),
                    }
                }
                Some(&&(w, _)) if w < v => return None,
                _ => out.push((v, e)),
            }
        }
        if it.next().is_some() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Greatest common divisor of two monomials.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(v, e)| {
                    let f = other.degree_in(v);
                    (f > 0).then_some((v, e.min(f)))
                })
                .collect(),
        )
    }

    /// Removes `v` and returns its exponent together with the remainder.
    pub fn split_off(&self, v: Var) -> (u32, Monomial) {
        let e = self.degree_in(v);
        (e, Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect()))
    }

    pub fn eval(&self, value: &impl Fn(Var) -> f64) -> f64 {
        self.0.iter().map(|&(v, e)| value(v).powi(e as i32)).product()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Exact rational polynomial in [`Var`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RationalPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(q: BigRational) -> Self {
        Self::term(q, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::term(BigRational::one(), Monomial::var(v))
    }

    pub fn term(q: BigRational, mono: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(mono, q);
        }
        RationalPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|&(v, _)| v)).collect()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    fn add_term(&mut self, mono: Monomial, q: BigRational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += q;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        RationalPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        RationalPoly { terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Replaces `v` by `value` everywhere.
    pub fn subs(&self, v: Var, value: &RationalPoly) -> Self {
        if self.degree_in(v) == 0 {
            return self.clone();
        }
        let mut powers = vec![Self::one()];
        let mut out = Self::zero();
        for (mono, q) in &self.terms {
            let (e, rest) = mono.split_off(v);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            out += &powers[e as usize].mul_monomial(&rest).scale(q);
        }
        out
    }

    pub fn subs_all(&self, values: &BTreeMap<Var, RationalPoly>) -> Self {
        values.iter().fold(self.clone(), |p, (v, val)| p.subs(*v, val))
    }

    pub fn eval(&self, value: &impl Fn(Var) -> f64) -> f64 {
        self.terms.iter().map(|(m, q)| to_f64(q) * m.eval(value)).sum()
    }

    /// Partial derivative with respect to `v`.
    pub fn partial(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (mono, q) in &self.terms {
            let (e, rest) = mono.split_off(v);
            if e == 0 {
                continue;
            }
            let mono = rest.mul(&Monomial::from_powers([(v, e - 1)]));
            out.add_term(mono, q * BigRational::from_integer(e.into()));
        }
        out
    }

    /// Greatest common monomial divisor of all terms (one for the zero poly).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, mono: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, q) in &self.terms {
            terms.insert(m.div(mono)?, q.clone());
        }
        Some(RationalPoly { terms })
    }
}

/// Nearest `f64` to an exact rational, robust to huge numerators and
/// denominators.
pub fn to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64 - 60;
    let two = BigInt::from(2);
    let scaled = if shift >= 0 {
        q.numer().clone() / (q.denom() * num_traits::pow(two, shift as usize))
    } else {
        q.numer() * num_traits::pow(two, (-shift) as usize) / q.denom()
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Parses an exact rational: integers, `p/q`, or finite decimals such as
/// `-0.1667` or `2.5e-3`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Parse(format!("not a rational literal: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigRational = parse_rational(n)?;
        let d: BigRational = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| err())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

impl From<Var> for RationalPoly {
    fn from(v: Var) -> Self {
        RationalPoly::var(v)
    }
}

impl From<BigRational> for RationalPoly {
    fn from(q: BigRational) -> Self {
        RationalPoly::constant(q)
    }
}

impl<'a> AddAssign<&'a RationalPoly> for RationalPoly {
    fn add_assign(&mut self, rhs: &'a RationalPoly) {
        for (m, q) in &rhs.terms {
            self.add_term(m.clone(), q.clone());
        }
    }
}

impl<'a> SubAssign<&'a RationalPoly> for RationalPoly {
    fn sub_assign(&mut self, rhs: &'a RationalPoly) {
        for (m, q) in &rhs.terms {
            self.add_term(m.clone(), -q.clone());
        }
    }
}

impl<'a> Add<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &'a RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &'a RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a RationalPoly> for &'a RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &'a RationalPoly) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (m1, q1) in &self.terms {
            for (m2, q2) in &rhs.terms {
                out.add_term(m1.mul(m2), q1 * q2);
            }
        }
        out
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly { terms: self.terms.iter().map(|(m, q)| (m.clone(), -q.clone())).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $f(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $f(self, rhs: &'a RationalPoly) -> RationalPoly {
                (&self).$f(rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (mono, q)) in self.terms.iter().enumerate() {
            let mag = q.abs();
            match (i == 0, q.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            if mono.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for RationalPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens: &tokens, pos: 0 };
        let out = p.expr()?;
        if p.pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{s}`")));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
        } else if ch.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                digits.push(c);
                chars.next();
            }
            out.push(Token::Num(digits.parse().expect("ascii digits")));
        } else if ch.is_alphabetic() {
            let mut ident = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_alphanumeric() || **c == '_') {
                ident.push(c);
                chars.next();
            }
            out.push(Token::Ident(ident));
        } else if "+-*/^()".contains(ch) {
            out.push(Token::Op(ch));
            chars.next();
        } else {
            return Err(Error::Parse(format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<RationalPoly> {
        let mut out = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                -self.product()?
            }
            Some('+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            if op == '+' {
                out += &rhs;
            } else {
                out -= &rhs;
            }
        }
        Ok(out)
    }

    fn product(&mut self) -> Result<RationalPoly> {
        let mut out = self.power()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.power()?;
            if op == '*' {
                out = &out * &rhs;
            } else {
                let q = rhs
                    .as_constant()
                    .filter(|q| !q.is_zero())
                    .ok_or_else(|| Error::Parse("division only by nonzero constants".into()))?;
                out = out.scale(&q.recip());
            }
        }
        Ok(out)
    }

    fn power(&mut self) -> Result<RationalPoly> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e = n.to_u32().ok_or_else(|| Error::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("expected integer exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalPoly> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Token::Num(n)) => Ok(RationalPoly::constant(BigRational::from_integer(n))),
            Some(Token::Ident(s)) => Ok(RationalPoly::var(s.parse()?)),
            Some(Token::Op('(')) => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Op('-')) => Ok(-self.power()?),
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}
