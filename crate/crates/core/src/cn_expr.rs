//! The ring `Q[vars][cn] ⊕ sn·dn·Q[vars][cn]` and the coefficient systems
//! obtained by substituting the finite cn-series ansatz into the traveling-wave
//! equations.
//!
//! Every element is kept in normal form `E(cn) + sn·dn·O(cn)`: products of two
//! odd parts are rewritten with `(sn·dn)² = (1 - cn²)(1 - m² + m²cn²)`, so no
//! other powers of `sn` or `dn` ever appear.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::elliptic::JacobiPoint;
use crate::error::{Error, Result};
use crate::poly::{RationalPoly, Var};

/// `Σ even[q] cn^q + sn·dn · Σ odd[q] cn^q`, coefficients in [`RationalPoly`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnExpression {
    even: Vec<RationalPoly>,
    odd: Vec<RationalPoly>,
}

/// Which component of the ansatz: `η = Σ j_r cn^r` or `w = Σ k_r cn^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Eta,
    W,
}

fn trim(v: &mut Vec<RationalPoly>) {
    while v.last().is_some_and(RationalPoly::is_zero) {
        v.pop();
    }
}

fn add_at(v: &mut Vec<RationalPoly>, q: usize, p: &RationalPoly) {
    if p.is_zero() {
        return;
    }
    if v.len() <= q {
        v.resize(q + 1, RationalPoly::zero());
    }
    v[q] += p;
}

fn poly_mul(x: &[RationalPoly], y: &[RationalPoly]) -> Vec<RationalPoly> {
    let mut out = Vec::new();
    for (i, p) in x.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for (j, q) in y.iter().enumerate() {
            if !q.is_zero() {
                add_at(&mut out, i + j, &(p * q));
            }
        }
    }
    out
}

fn m2() -> RationalPoly {
    RationalPoly::var(Var::M).pow(2)
}

/// `(sn·dn)² = (1 - m²) + (2m² - 1) cn² - m² cn⁴`.
fn sn_dn_squared() -> Vec<RationalPoly> {
    let one = RationalPoly::one();
    vec![
        &one - &m2(),
        RationalPoly::zero(),
        &(&m2() + &m2()) - &one,
        RationalPoly::zero(),
        -m2(),
    ]
}

impl CnExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_parts(mut even: Vec<RationalPoly>, mut odd: Vec<RationalPoly>) -> Self {
        trim(&mut even);
        trim(&mut odd);
        CnExpression { even, odd }
    }

    pub fn constant(p: RationalPoly) -> Self {
        Self::from_parts(vec![p], vec![])
    }

    /// `p · cn^q`.
    pub fn cn_power(q: usize, p: RationalPoly) -> Self {
        let mut even = vec![RationalPoly::zero(); q];
        even.push(p);
        Self::from_parts(even, vec![])
    }

    /// `p · sn·dn · cn^q`.
    pub fn sn_dn_cn_power(q: usize, p: RationalPoly) -> Self {
        let mut odd = vec![RationalPoly::zero(); q];
        odd.push(p);
        Self::from_parts(vec![], odd)
    }

    /// The ansatz `Σ_{r=0}^{n} j_r cn^r` (or `k_r` for `w`).
    pub fn ansatz(n: u32, which: Component) -> Self {
        let coeff = |r| match which {
            Component::Eta => Var::J(r),
            Component::W => Var::K(r),
        };
        Self::from_parts((0..=n).map(|r| RationalPoly::var(coeff(r))).collect(), vec![])
    }

    pub fn even_part(&self) -> &[RationalPoly] {
        &self.even
    }

    pub fn odd_part(&self) -> &[RationalPoly] {
        &self.odd
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    /// Highest cn power with a nonzero coefficient in either part (the
    /// `sn·dn` factor does not count). `None` for the zero expression.
    pub fn rho(&self) -> Option<usize> {
        self.even.len().max(self.odd.len()).checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut even = self.even.clone();
        let mut odd = self.odd.clone();
        for (q, p) in other.even.iter().enumerate() {
            add_at(&mut even, q, p);
        }
        for (q, p) in other.odd.iter().enumerate() {
            add_at(&mut odd, q, p);
        }
        Self::from_parts(even, odd)
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(self.even.iter().map(|p| -p).collect(), self.odd.iter().map(|p| -p).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by a coefficient polynomial.
    pub fn scale(&self, c: &RationalPoly) -> Self {
        Self::from_parts(self.even.iter().map(|p| p * c).collect(), self.odd.iter().map(|p| p * c).collect())
    }

    /// Ring product, rewriting `(sn·dn)²` into a polynomial in `cn`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut even = poly_mul(&self.even, &other.even);
        let odd_odd = poly_mul(&self.odd, &other.odd);
        for (q, p) in poly_mul(&odd_odd, &sn_dn_squared()).iter().enumerate() {
            add_at(&mut even, q, p);
        }
        let mut odd = poly_mul(&self.even, &other.odd);
        for (q, p) in poly_mul(&self.odd, &other.even).iter().enumerate() {
            add_at(&mut odd, q, p);
        }
        Self::from_parts(even, odd)
    }

    /// `d/dξ` where every `cn`, `sn`, `dn` is evaluated at `(λξ, m)`.
    ///
    /// `(cn^r)' = -rλ sn·dn cn^{r-1}` and
    /// `(sn·dn cn^r)' = λ[-r cn^{r-1}(sn·dn)² + cn^{r+1}(1 - 2m² + 2m²cn²)]`.
    pub fn differentiate(&self) -> Self {
        let lambda = RationalPoly::var(Var::Lambda);
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for (r, p) in self.even.iter().enumerate() {
            if r > 0 && !p.is_zero() {
                add_at(&mut odd, r - 1, &(p * &lambda).scale(&BigRational::from_integer((-(r as i64)).into())));
            }
        }
        let s = sn_dn_squared();
        let one = RationalPoly::one();
        let tail = [&one - &(&m2() + &m2()), &m2() + &m2()];
        for (r, p) in self.odd.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let pl = p * &lambda;
            if r > 0 {
                let c = pl.scale(&BigRational::from_integer((-(r as i64)).into()));
                for (i, sq) in s.iter().enumerate() {
                    add_at(&mut even, r - 1 + i, &(&c * sq));
                }
            }
            add_at(&mut even, r + 1, &(&pl * &tail[0]));
            add_at(&mut even, r + 3, &(&pl * &tail[1]));
        }
        Self::from_parts(even, odd)
    }

    /// Numerical value at a Jacobi point, with coefficient variables taken
    /// from `value`.
    pub fn eval(&self, value: &impl Fn(Var) -> f64, p: &JacobiPoint) -> f64 {
        let horner = |coeffs: &[RationalPoly]| coeffs.iter().rev().fold(0.0, |acc, c| acc * p.cn + c.eval(value));
        horner(&self.even) + p.sn * p.dn * horner(&self.odd)
    }

    pub fn subs(&self, v: Var, value: &RationalPoly) -> Self {
        Self::from_parts(
            self.even.iter().map(|p| p.subs(v, value)).collect(),
            self.odd.iter().map(|p| p.subs(v, value)).collect(),
        )
    }
}

impl fmt::Display for CnExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut part = |f: &mut fmt::Formatter<'_>, coeffs: &[RationalPoly], prefix: &str| -> fmt::Result {
            for (q, p) in coeffs.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                write!(f, "({p}){prefix}")?;
                if q > 0 {
                    write!(f, "*cn^{q}")?;
                }
            }
            Ok(())
        };
        part(f, &self.even, "")?;
        part(f, &self.odd, "*sn*dn")?;
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Values for the system constants `a, b, c, d`; `None` keeps a constant
/// symbolic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Constants {
    pub a: Option<BigRational>,
    pub b: Option<BigRational>,
    pub c: Option<BigRational>,
    pub d: Option<BigRational>,
}

impl Constants {
    /// All four constants symbolic.
    pub fn symbolic() -> Self {
        Self::default()
    }

    /// All four constants fixed.
    pub fn numeric(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Constants { a: Some(a), b: Some(b), c: Some(c), d: Some(d) }
    }

    /// Symbolic `a, b, d` with `c = 0`.
    pub fn c_zero() -> Self {
        Constants { c: Some(BigRational::zero()), ..Self::default() }
    }

    fn get(&self, v: Var) -> RationalPoly {
        let slot = match v {
            Var::A => &self.a,
            Var::B => &self.b,
            Var::C => &self.c,
            Var::D => &self.d,
            _ => unreachable!("only a, b, c, d are constants"),
        };
        match slot {
            Some(q) => RationalPoly::constant(q.clone()),
            None => RationalPoly::var(v),
        }
    }
}

/// The two traveling-wave residuals for given `η`, `w`:
///
/// `E1 = -ση' + w' + (ηw)' + a w''' + bσ η'''`,
/// `E2 = -σw' + η' + w w' + c η''' + dσ w'''`.
pub fn residual_expressions(eta: &CnExpression, w: &CnExpression, k: &Constants) -> (CnExpression, CnExpression) {
    let sigma = RationalPoly::var(Var::Sigma);
    let d1 = |e: &CnExpression| e.differentiate();
    let d3 = |e: &CnExpression| e.differentiate().differentiate().differentiate();
    let (eta1, eta3, w1, w3) = (d1(eta), d3(eta), d1(w), d3(w));
    let e1 = eta1
        .scale(&-&sigma)
        .add(&w1)
        .add(&d1(&eta.multiply(w)))
        .add(&w3.scale(&k.get(Var::A)))
        .add(&eta3.scale(&(&k.get(Var::B) * &sigma)));
    let e2 = w1
        .scale(&-&sigma)
        .add(&eta1)
        .add(&w.multiply(&w1))
        .add(&eta3.scale(&k.get(Var::C)))
        .add(&w3.scale(&(&k.get(Var::D) * &sigma)));
    (e1, e2)
}

/// The coefficient system `h_{p,q} = 0` with residual
/// `E_p = -λ·sn·dn·Σ_q h_{p,q} cn^q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HSystem {
    pub n_eta: u32,
    pub n_w: u32,
    /// `h[p-1][q]`.
    h: [Vec<RationalPoly>; 2],
}

/// One named equation of an [`HSystem`].
#[derive(Debug, Clone, Serialize)]
pub struct HEquation {
    pub p: usize,
    pub q: usize,
    pub poly: String,
}

fn extract_h(e: CnExpression, p: usize) -> Result<Vec<RationalPoly>> {
    if let Some((q, _)) = e.even.iter().enumerate().find(|(_, c)| !c.is_zero()) {
        return Err(Error::Factorization(format!("equation {p} has a cn^{q} term without sn*dn")));
    }
    let lambda = crate::poly::Monomial::var(Var::Lambda);
    let minus_one = -BigRational::one();
    e.odd
        .into_iter()
        .enumerate()
        .map(|(q, c)| {
            c.div_monomial(&lambda)
                .map(|h| h.scale(&minus_one))
                .ok_or_else(|| Error::Factorization(format!("coefficient of sn*dn*cn^{q} in equation {p} is not divisible by lambda")))
        })
        .collect()
}

/// Substitutes the degree-`(n_eta, n_w)` ansatz into the traveling-wave
/// equations and extracts `h_{p,q}`.
pub fn build_h_system(n_eta: u32, n_w: u32, constants: &Constants) -> Result<HSystem> {
    if n_eta == 0 || n_w == 0 {
        return Err(Error::Usage("ansatz degrees must be at least 1".into()));
    }
    let eta = CnExpression::ansatz(n_eta, Component::Eta);
    let w = CnExpression::ansatz(n_w, Component::W);
    let (e1, e2) = residual_expressions(&eta, &w, constants);
    Ok(HSystem { n_eta, n_w, h: [extract_h(e1, 1)?, extract_h(e2, 2)?] })
}

impl HSystem {
    /// Builds a system directly from its two coefficient lists.
    pub fn from_coefficients(n_eta: u32, n_w: u32, h1: Vec<RationalPoly>, h2: Vec<RationalPoly>) -> Self {
        let (mut h1, mut h2) = (h1, h2);
        trim(&mut h1);
        trim(&mut h2);
        HSystem { n_eta, n_w, h: [h1, h2] }
    }

    /// `h_{p,q}`; zero outside the stored range.
    pub fn h(&self, p: usize, q: usize) -> RationalPoly {
        self.h.get(p.wrapping_sub(1)).and_then(|v| v.get(q)).cloned().unwrap_or_default()
    }

    /// Number of stored `q` slots for equation `p` (highest power + 1).
    pub fn len(&self, p: usize) -> usize {
        self.h[p - 1].len()
    }

    /// All nonzero equations in canonical order: `p` ascending, `q` descending.
    pub fn equations(&self) -> Vec<(usize, usize, &RationalPoly)> {
        let mut out = Vec::new();
        for p in 1..=2 {
            for (q, poly) in self.h[p - 1].iter().enumerate().rev() {
                if !poly.is_zero() {
                    out.push((p, q, poly));
                }
            }
        }
        out
    }

    /// Variables that occur in some equation.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.h.iter().flatten().flat_map(|p| p.vars()).collect()
    }

    /// Substitutes `v := value` in every equation.
    pub fn subs(&self, v: Var, value: &RationalPoly) -> HSystem {
        let map = |hs: &Vec<RationalPoly>| hs.iter().map(|p| p.subs(v, value)).collect();
        HSystem::from_coefficients(self.n_eta, self.n_w, map(&self.h[0]), map(&self.h[1]))
    }

    /// Sets each listed variable to zero.
    pub fn restrict_zero(&self, vars: &[Var]) -> HSystem {
        vars.iter().fold(self.clone(), |s, &v| s.subs(v, &RationalPoly::zero()))
    }

    pub fn to_equations(&self) -> Vec<HEquation> {
        self.equations().into_iter().map(|(p, q, poly)| HEquation { p, q, poly: poly.to_string() }).collect()
    }

    /// Canonical text form, one `h<p>,<q> = <poly>` line per nonzero equation.
    pub fn canonical_text(&self) -> String {
        self.equations().into_iter().map(|(p, q, poly)| format!("h{p},{q} = {poly}\n")).collect()
    }
}

/// Parses the [`HSystem::canonical_text`] format back into `(p, q, h_{p,q})`
/// triples. Blank lines and lines starting with `#` are skipped.
pub fn parse_listing(text: &str) -> Result<Vec<(usize, usize, RationalPoly)>> {
    let bad = |line: &str| Error::Parse(format!("expected `h<p>,<q> = <poly>`, got `{line}`"));
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| bad(line))?;
        let (p, q) = lhs.trim().strip_prefix('h').and_then(|s| s.split_once(',')).ok_or_else(|| bad(line))?;
        let p = p.trim().parse().map_err(|_| bad(line))?;
        let q = q.trim().parse().map_err(|_| bad(line))?;
        out.push((p, q, rhs.parse()?));
    }
    Ok(out)
}
