//! Closed-form cnoidal solution families, their validity predicates and
//! their `m → 1` solitary-wave limits.
//!
//! Every family has `η = Σ j_r cn^r(λξ, m)` and `w = Σ k_r cn^r(λξ, m)`:
//!
//! | tag    | requires          | shape                    | free inputs    |
//! |--------|-------------------|--------------------------|----------------|
//! | `S411` | `c ≠ 0`           | `j0..j2`, `k0..k2`       | `m`, `τ1`, `τ2` |
//! | `S412` | `c ≠ 0`           | `j0, j2`, `k0, k2`       | `λ, σ, m`, `±` |
//! | `S421` | `c = 0`, `4b ≠ d` | `j0, j2, j4`, `k0, k2`   | `λ, σ, m`      |
//! | `S422` | `c = 0`, `b ≠ 2d` | `j0, j2`, `k0, k2`       | `λ, σ, m`      |
//! | `S43`  | `a = b = 0`       | `η ≡ -1`, `k0, k2`       | `d, λ, σ, m`   |
//!
//! In `S411` the wave number and speed are outputs; everywhere else they are
//! inputs. The physical relations between `a, b, c, d` are not required by the
//! constructors; see [`check_physical_constraint`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::elliptic::{jacobi_eval, Modulus};
use crate::error::{Error, Result};
use crate::poly::{rat, to_f64, RationalPoly, Var};
use crate::surd::QuadSurd;

/// Relative size below which a denominator counts as vanishing.
const SINGULAR_TOL: f64 = 1e-12;

/// Serde helpers storing a [`BigRational`] as a `"p/q"` string. Numbers and
/// decimal strings are accepted on input.
pub mod rational_serde {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Int(i64),
        Float(f64),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Int(n) => n.to_string(),
            Raw::Float(x) => format!("{x:e}"),
        };
        crate::poly::parse_rational(&text).map_err(de::Error::custom)
    }
}

/// The constants `a, b, c, d` of the system, plus an optional `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    #[serde(with = "rational_serde")]
    pub a: BigRational,
    #[serde(with = "rational_serde")]
    pub b: BigRational,
    #[serde(with = "rational_serde")]
    pub c: BigRational,
    #[serde(with = "rational_serde")]
    pub d: BigRational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl ParameterSet {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        ParameterSet { a, b, c, d, theta: None }
    }

    /// Parses four rational literals such as `"-5/6"` or `"0.25"`.
    pub fn parse(a: &str, b: &str, c: &str, d: &str) -> Result<Self> {
        use crate::poly::parse_rational as q;
        Ok(Self::new(q(a)?, q(b)?, q(c)?, q(d)?))
    }

    pub fn as_f64(&self) -> [f64; 4] {
        [to_f64(&self.a), to_f64(&self.b), to_f64(&self.c), to_f64(&self.d)]
    }
}

/// Checks `a + b + c + d = 1/3` and `c + d = (1 - θ²)/2` with `θ ∈ [0, 1]`,
/// returning `θ`. The third relation `a + b = (θ² - 1/3)/2` follows from the
/// other two. A supplied `theta` must agree with the computed one.
pub fn check_physical_constraint(p: &ParameterSet) -> Result<f64> {
    let third = rat(1, 3);
    let sum = &p.a + &p.b + &p.c + &p.d;
    if sum != third {
        return Err(Error::Constraint(format!("a + b + c + d = {sum}, expected 1/3")));
    }
    let cd = &p.c + &p.d;
    if cd.is_negative() {
        return Err(Error::Constraint(format!("c + d = {cd} is negative")));
    }
    if cd > rat(1, 2) {
        return Err(Error::Constraint(format!("c + d = {cd} exceeds 1/2, so theta^2 < 0")));
    }
    let theta = (1.0 - 2.0 * to_f64(&cd)).sqrt();
    if let Some(given) = p.theta {
        if (given - theta).abs() > 1e-12 {
            return Err(Error::Constraint(format!("theta = {given} but c + d requires theta = {theta}")));
        }
    }
    Ok(theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyTag {
    S411,
    S412,
    S421,
    S422,
    S43,
    SolitaryLimit,
    /// A root found by the coefficient solver rather than a closed form.
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_i64(s: i64) -> Result<Self> {
        match s {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Usage(format!("sign must be 1 or -1, got {s}"))),
        }
    }
}

/// Top (`+` in `±`, `-` in `∓`) or bottom sign choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pm {
    Top,
    Bottom,
}

impl Pm {
    pub fn value(self) -> i64 {
        match self {
            Pm::Top => 1,
            Pm::Bottom => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau1: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau2: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pm: Option<Pm>,
}

/// One solution: `η = Σ_{r≤4} j_r cn^r(λξ, m)`, `w = Σ_{r≤2} k_r cn^r(λξ, m)`,
/// traveling with speed `σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionParams {
    pub family: FamilyTag,
    #[serde(default)]
    pub branch: Branch,
    pub j: [f64; 5],
    pub k: [f64; 3],
    pub lambda: f64,
    pub m: f64,
    pub sigma: f64,
}

impl SolutionParams {
    /// `(η(ξ), w(ξ))`.
    pub fn profile(&self, xi: f64) -> Result<(f64, f64)> {
        let cn = jacobi_eval(self.lambda * xi, Modulus::new(self.m)?)?.cn;
        let series = |c: &[f64]| c.iter().rev().fold(0.0, |acc, x| acc * cn + x);
        Ok((series(&self.j), series(&self.k)))
    }

    /// Coefficient list `[j0, …, j4, k0, k1, k2]`.
    pub fn coefficients(&self) -> [f64; 8] {
        let [j0, j1, j2, j3, j4] = self.j;
        let [k0, k1, k2] = self.k;
        [j0, j1, j2, j3, j4, k0, k1, k2]
    }

    /// Largest absolute difference in `j`, `k` against another solution.
    pub fn coefficient_distance(&self, other: &SolutionParams) -> f64 {
        self.coefficients().iter().zip(other.coefficients()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// Checks the per-family zero pattern of the coefficients.
    pub fn check_shape(&self) -> Result<()> {
        let zero = |idx: &[usize], v: &[f64]| idx.iter().all(|&i| v[i] == 0.0);
        let ok = match self.family {
            FamilyTag::S411 => zero(&[3, 4], &self.j),
            FamilyTag::S412 => zero(&[1, 3, 4], &self.j) && zero(&[1], &self.k),
            FamilyTag::S421 | FamilyTag::S422 => zero(&[1, 3], &self.j) && zero(&[1], &self.k),
            FamilyTag::S43 => zero(&[1, 2, 3, 4], &self.j) && zero(&[1], &self.k),
            FamilyTag::SolitaryLimit | FamilyTag::Numeric => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("{:?} coefficients violate the family zero pattern", self.family)))
        }
    }
}

fn check_modulus(m: f64) -> Result<()> {
    if m == 0.0 {
        return Err(Error::domain("m = 0 is excluded (the series degenerates to a cosine series)"));
    }
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::domain(format!("m must lie in (0, 1], got {m}")));
    }
    Ok(())
}

fn check_wave(lambda: f64, sigma: f64, m: f64) -> Result<()> {
    check_modulus(m)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    if !sigma.is_finite() || sigma == 0.0 {
        return Err(Error::domain(format!("sigma must be finite and nonzero, got {sigma}")));
    }
    Ok(())
}

/// Rejects a factor that is zero or tiny compared with the terms it is made of.
fn nonsingular(name: &str, value: f64, scale: f64) -> Result<()> {
    if value == 0.0 || value.abs() < SINGULAR_TOL * scale {
        return Err(Error::domain(format!("{name} vanishes")));
    }
    Ok(())
}

fn exact_nonzero(name: &str, q: &BigRational) -> Result<()> {
    if q.is_zero() {
        return Err(Error::domain(format!("{name} = 0")));
    }
    Ok(())
}

/// Solution (4.1.1): non-trivial `j1`, `k1`, wave number and speed fixed by
/// `a, b, c, d, m`.
///
/// Validity: `ac(b-6d)(3b-2d) < 0`, `c(2m²-1)(b+2d)(3b+2d) < 0` and
/// `(2m²-1)(3b+2d)(b-d) ≥ 0`, the last with equality only when `b = d`.
pub fn build_4_1_1(p: &ParameterSet, m: f64, tau1: Sign, tau2: Sign) -> Result<SolutionParams> {
    check_modulus(m)?;
    exact_nonzero("c", &p.c)?;
    let (b6d, b32d) = (&p.b - &p.d * rat(6, 1), &p.b * rat(3, 1) - &p.d * rat(2, 1));
    exact_nonzero("b - 6d", &b6d)?;
    exact_nonzero("3b - 2d", &b32d)?;
    let [a, b, c, d] = p.as_f64();
    let m2 = m * m;
    let e = 2.0 * m2 - 1.0;
    nonsingular("2m^2 - 1", e, 2.0 * m2 + 1.0)?;
    let (b6d, b32d) = (to_f64(&b6d), to_f64(&b32d));
    let (b2d, b3d) = (b + 2.0 * d, 3.0 * b + 2.0 * d);
    nonsingular("b + 2d", b2d, b.abs() + 2.0 * d.abs())?;
    let r1 = a * c * b6d * b32d;
    if r1.is_nan() || r1 >= 0.0 {
        return Err(Error::domain("requires a c (b - 6d)(3b - 2d) < 0"));
    }
    if c * e * b2d * b3d >= 0.0 {
        return Err(Error::domain("requires c (2m^2 - 1)(b + 2d)(3b + 2d) < 0"));
    }
    let r3 = e * b3d * (b - d);
    if r3 < 0.0 {
        return Err(Error::domain("requires (2m^2 - 1)(3b + 2d)(b - d) >= 0"));
    }
    let sq = (-2.0 * r1).sqrt();
    let (t1, t2) = (tau1.value(), tau2.value());
    let lambda = 0.5 * (-6.0 * b3d / (c * e * b2d)).sqrt();
    let sigma = t1 * 4.0 * sq / (b6d * b32d);
    let j0 = -(a * b3d * (21.0 * b - 46.0 * d) + 2.0 * c * b32d * b6d) / (2.0 * c * b32d * b6d);
    let j1 = -t1 * t2 * 12.0 * a * m * b3d * r3.sqrt() / (c * b6d * b32d * e);
    let j2 = 9.0 * a * m2 * b3d / (c * b32d * e);
    let k0 = t1 * (21.0 * b + 8.0 * c + 14.0 * d) * sq / (2.0 * c * b6d * b32d);
    let k1 = t2 * 6.0 * m * sq * r3.sqrt() / (c * e * b6d * b32d);
    let k2 = -t1 * 9.0 * m2 * b3d * sq / (c * e * b6d * b32d);
    Ok(SolutionParams {
        family: FamilyTag::S411,
        branch: Branch { tau1: Some(tau1), tau2: Some(tau2), pm: None },
        j: [j0, j1, j2, 0.0, 0.0],
        k: [k0, k1, k2],
        lambda,
        m,
        sigma,
    })
}

/// All four `(τ1, τ2)` choices of [`build_4_1_1`].
pub fn build_4_1_1_all(p: &ParameterSet, m: f64) -> Result<Vec<SolutionParams>> {
    let mut out = Vec::with_capacity(4);
    for t1 in [Sign::Plus, Sign::Minus] {
        for t2 in [Sign::Plus, Sign::Minus] {
            out.push(build_4_1_1(p, m, t1, t2)?);
        }
    }
    Ok(out)
}

struct Formulas412 {
    n0: RationalPoly,
    n1: RationalPoly,
    k0: RationalPoly,
    k1: RationalPoly,
}

fn formulas_412() -> &'static Formulas412 {
    static CELL: OnceLock<Formulas412> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = |s: &str| s.parse::<RationalPoly>().expect("formula parses");
        Formulas412 {
            n0: p("-8*b^4*c*lambda^2*m^2*sigma^4 + 16*b^3*c*d*lambda^2*m^2*sigma^4 - 64*a*b^2*c^2*lambda^2*m^2*sigma^2 \
                - 32*a*b*c^2*d*lambda^2*m^2*sigma^2 - 64*a*c^2*d^2*lambda^2*m^2*sigma^2 + 4*b^4*c*lambda^2*sigma^4 \
                - 8*b^3*c*d*lambda^2*sigma^4 - 64*a^2*c^3*lambda^2*m^2 + 32*a*b^2*c^2*lambda^2*sigma^2 \
                + 16*a*b*c^2*d*lambda^2*sigma^2 + 32*a*c^2*d^2*lambda^2*sigma^2 + b^4*sigma^4 - 4*b^3*d*sigma^4 \
                + 4*b^2*d^2*sigma^4 + 32*a^2*c^3*lambda^2 + 8*a*b^2*c*sigma^2 - 8*a*b*c*d*sigma^2 - 4*b^2*c^2*sigma^2 \
                - 16*c^2*d^2*sigma^2 + 8*a^2*c^2 - 16*a*c^3"),
            n1: p("8*b^3*c*lambda^2*m^2*sigma^2 + 32*a*b*c^2*lambda^2*m^2 + 32*a*c^2*d*lambda^2*m^2 \
                - 4*b^3*c*lambda^2*sigma^2 - 16*a*b*c^2*lambda^2 - 16*a*c^2*d*lambda^2 - b^3*sigma^2 + 2*b^2*d*sigma^2 \
                - 4*a*b*c + 4*b*c^2 + 8*c^2*d"),
            k0: p("-8*b^2*c*lambda^2*m^2*sigma^2 - 32*c*d^2*lambda^2*m^2*sigma^2 - 32*a*c^2*lambda^2*m^2 \
                + 4*b^2*c*lambda^2*sigma^2 + 16*c*d^2*lambda^2*sigma^2 + 16*a*c^2*lambda^2 - b^2*sigma^2 + 2*b*c*sigma^2 \
                + 2*b*d*sigma^2 + 4*c*d*sigma^2 - 4*a*c"),
            k1: p("8*b*c*lambda^2*m^2 + 16*c*d*lambda^2*m^2 - 4*b*c*lambda^2 - 8*c*d*lambda^2 + b - 2*c"),
        }
    })
}

fn eval_exact(poly: &RationalPoly, values: &BTreeMap<Var, BigRational>) -> BigRational {
    let subs: BTreeMap<Var, RationalPoly> = values.iter().map(|(v, q)| (*v, RationalPoly::constant(q.clone()))).collect();
    poly.subs_all(&subs).as_constant().expect("all variables substituted")
}

/// Exact `(j0, j2, k0, k2)` of solution (4.1.2) in `Q(√D)`,
/// `D = 8ac + σ²(b-2d)²`, for rational `λ, σ, m`.
pub fn solution_4_1_2_exact(
    p: &ParameterSet,
    lambda: &BigRational,
    sigma: &BigRational,
    m: &BigRational,
    pm: Pm,
) -> Result<[QuadSurd; 4]> {
    exact_nonzero("c", &p.c)?;
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let two = rat(2, 1);
    let b2d = b - d * &two;
    let disc = rat(8, 1) * a * c + sigma * sigma * &b2d * &b2d;
    if !disc.is_positive() {
        return Err(Error::domain("requires 8ac + sigma^2 (b - 2d)^2 > 0"));
    }
    let values: BTreeMap<Var, BigRational> = [
        (Var::A, a.clone()),
        (Var::B, b.clone()),
        (Var::C, c.clone()),
        (Var::D, d.clone()),
        (Var::Lambda, lambda.clone()),
        (Var::M, m.clone()),
        (Var::Sigma, sigma.clone()),
    ]
    .into();
    let f = formulas_412();
    let q = |x: BigRational| QuadSurd::rational(x, &disc);
    let pm = BigRational::from_integer(pm.value().into());
    let root = &QuadSurd::root(&disc) * &pm;
    let c2 = c * c;
    let (l2m2, b_plus_2d) = (lambda * lambda * m * m, b + d * &two);

    let num = &q(eval_exact(&f.n0, &values)) - &(&root * &(sigma * eval_exact(&f.n1, &values)));
    let den = &q(rat(4, 1) * &c2 * (rat(4, 1) * a * c + sigma * sigma * (b * b + rat(4, 1) * d * d)))
        + &(&root * &(rat(4, 1) * &c2 * sigma * &b_plus_2d));
    if den.is_zero() || den.to_f64().abs() < SINGULAR_TOL * den.scale() {
        return Err(Error::domain("the j0 denominator 4c^2(4ac + sigma^2(b^2 + 4d^2) ± sigma(b + 2d) sqrt(D)) vanishes"));
    }
    let wave = q(sigma * &b_plus_2d);
    let wave = &wave + &root;
    let kden = &wave * &(c * &two);
    if kden.is_zero() || kden.to_f64().abs() < SINGULAR_TOL * kden.scale() {
        return Err(Error::domain("the k0 denominator 2c(sigma(b + 2d) ± sqrt(D)) vanishes"));
    }
    let j0 = &num / &den;
    let j2_inner = &q(rat(4, 1) * a * c + b * sigma * sigma * &b2d) + &(&root * &(b * sigma));
    let j2 = &j2_inner * &(rat(3, 1) * &l2m2 / (c * &two));
    let knum = &q(eval_exact(&f.k0, &values)) - &(&root * &(sigma * eval_exact(&f.k1, &values)));
    let k0 = &knum / &kden;
    let k2 = &wave * &(rat(3, 1) * &l2m2);
    Ok([j0, j2, k0, k2])
}

/// Solution (4.1.2): `j1 = k1 = 0`, free `λ, σ, m`, valid when
/// `8ac + σ²(b-2d)² > 0`. `pm` picks the upper or lower signs coherently in
/// every `±`/`∓`.
pub fn build_4_1_2(p: &ParameterSet, lambda: f64, sigma: f64, m: f64, pm: Pm) -> Result<SolutionParams> {
    check_wave(lambda, sigma, m)?;
    let exact = |x: f64| BigRational::from_float(x).expect("finite");
    let [j0, j2, k0, k2] = solution_4_1_2_exact(p, &exact(lambda), &exact(sigma), &exact(m), pm)?;
    Ok(SolutionParams {
        family: FamilyTag::S412,
        branch: Branch { pm: Some(pm), ..Branch::default() },
        j: [j0.to_f64(), 0.0, j2.to_f64(), 0.0, 0.0],
        k: [k0.to_f64(), 0.0, k2.to_f64()],
        lambda,
        m,
        sigma,
    })
}

fn require_c_zero(p: &ParameterSet) -> Result<()> {
    if !p.c.is_zero() {
        return Err(Error::domain(format!("this family needs c = 0, got c = {}", p.c)));
    }
    Ok(())
}

/// Solution (4.2.1): quartic `η`, quadratic `w`, for `c = 0` and `4b ≠ d`.
pub fn build_4_2_1(p: &ParameterSet, lambda: f64, sigma: f64, m: f64) -> Result<SolutionParams> {
    require_c_zero(p)?;
    check_wave(lambda, sigma, m)?;
    exact_nonzero("4b - d", &(&p.b * rat(4, 1) - &p.d))?;
    let [a, b, _, d] = p.as_f64();
    let (l2, m2, s2) = (lambda * lambda, m * m, sigma * sigma);
    let (q, r) = (4.0 * b - d, 5.0 * b - 3.0 * d);
    nonsingular("4b - d", q, 4.0 * b.abs() + d.abs())?;
    let e = 2.0 * m2 - 1.0;
    let j0 = (-8.0 * b * l2 * l2 * s2 * s2 * q * q * r * (11.0 * m2 * m2 - 11.0 * m2 - 4.0)
        + 3.0 * s2 * q * (3.0 * d - 4.0 * b * (3.0 + 5.0 * a * l2 * e))
        + 9.0 * a * a)
        / (9.0 * s2 * q * q);
    let j2 = 20.0 * b * l2 * m2 * (3.0 * a + 4.0 * l2 * s2 * q * r * e) / (3.0 * q);
    let j4 = -40.0 * b * l2 * l2 * m2 * m2 * s2 * r;
    let k0 = (-3.0 * a + s2 * q * (3.0 - 20.0 * b * l2 * e)) / (3.0 * sigma * q);
    let k2 = 20.0 * b * l2 * m2 * sigma;
    Ok(SolutionParams {
        family: FamilyTag::S421,
        branch: Branch::default(),
        j: [j0, 0.0, j2, 0.0, j4],
        k: [k0, 0.0, k2],
        lambda,
        m,
        sigma,
    })
}

/// Exact `(j0, j2, k0, k2)` of solution (4.2.2) for rational `λ, σ, m`.
pub fn solution_4_2_2_exact(
    p: &ParameterSet,
    lambda: &BigRational,
    sigma: &BigRational,
    m: &BigRational,
) -> Result<[BigRational; 4]> {
    let (a, b, d) = (&p.a, &p.b, &p.d);
    let b2d = b - d * rat(2, 1);
    exact_nonzero("b - 2d", &b2d)?;
    exact_nonzero("sigma", sigma)?;
    let (l2, m2, s2) = (lambda * lambda, m * m, sigma * sigma);
    let e = &m2 * rat(2, 1) - BigRational::one();
    let j0 = (a * a - &s2 * &b2d * (b - d * rat(2, 1) * (BigRational::one() + a * &l2 * rat(2, 1) * &e))) / (&s2 * &b2d * &b2d);
    let j2 = -(a * d * &l2 * &m2 * rat(12, 1)) / &b2d;
    let k0 = (a + &s2 * &b2d * (BigRational::one() - d * &l2 * &e * rat(4, 1))) / (sigma * &b2d);
    let k2 = d * &l2 * &m2 * sigma * rat(12, 1);
    Ok([j0, j2, k0, k2])
}

/// Solution (4.2.2): quadratic `η` and `w` for `c = 0` and `b ≠ 2d`.
pub fn build_4_2_2(p: &ParameterSet, lambda: f64, sigma: f64, m: f64) -> Result<SolutionParams> {
    require_c_zero(p)?;
    check_wave(lambda, sigma, m)?;
    let [b, d] = [to_f64(&p.b), to_f64(&p.d)];
    nonsingular("b - 2d", b - 2.0 * d, b.abs() + 2.0 * d.abs())?;
    let exact = |x: f64| BigRational::from_float(x).expect("finite");
    let [j0, j2, k0, k2] = solution_4_2_2_exact(p, &exact(lambda), &exact(sigma), &exact(m))?;
    Ok(SolutionParams {
        family: FamilyTag::S422,
        branch: Branch::default(),
        j: [to_f64(&j0), 0.0, to_f64(&j2), 0.0, 0.0],
        k: [to_f64(&k0), 0.0, to_f64(&k2)],
        lambda,
        m,
        sigma,
    })
}

/// Solution (4.3) for `a = b = 0`: `η ≡ -1` and a cnoidal `w`. Valid for any
/// `c`.
pub fn build_4_3(d: &BigRational, lambda: f64, sigma: f64, m: f64) -> Result<SolutionParams> {
    check_wave(lambda, sigma, m)?;
    let d = to_f64(d);
    let (l2, m2) = (lambda * lambda, m * m);
    Ok(SolutionParams {
        family: FamilyTag::S43,
        branch: Branch::default(),
        j: [-1.0, 0.0, 0.0, 0.0, 0.0],
        k: [-8.0 * d * l2 * m2 * sigma + 4.0 * d * l2 * sigma + sigma, 0.0, 12.0 * d * l2 * m2 * sigma],
        lambda,
        m,
        sigma,
    })
}

/// Everything except `m` needed to build one family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set")]
pub enum FamilyInputs {
    #[serde(rename = "4.1.1")]
    S411 { params: ParameterSet, tau1: Sign, tau2: Sign },
    #[serde(rename = "4.1.2")]
    S412 { params: ParameterSet, lambda: f64, sigma: f64, pm: Pm },
    #[serde(rename = "4.2.1")]
    S421 { params: ParameterSet, lambda: f64, sigma: f64 },
    #[serde(rename = "4.2.2")]
    S422 { params: ParameterSet, lambda: f64, sigma: f64 },
    #[serde(rename = "4.3")]
    S43 {
        #[serde(with = "rational_serde")]
        d: BigRational,
        lambda: f64,
        sigma: f64,
    },
}

impl FamilyInputs {
    pub fn build(&self, m: f64) -> Result<SolutionParams> {
        match self {
            FamilyInputs::S411 { params, tau1, tau2 } => build_4_1_1(params, m, *tau1, *tau2),
            FamilyInputs::S412 { params, lambda, sigma, pm } => build_4_1_2(params, *lambda, *sigma, m, *pm),
            FamilyInputs::S421 { params, lambda, sigma } => build_4_2_1(params, *lambda, *sigma, m),
            FamilyInputs::S422 { params, lambda, sigma } => build_4_2_2(params, *lambda, *sigma, m),
            FamilyInputs::S43 { d, lambda, sigma } => build_4_3(d, *lambda, *sigma, m),
        }
    }

    /// The constants the solution belongs to. Solution (4.3) is reported with
    /// `a = b = c = 0`; it solves the system for every `c`.
    pub fn parameters(&self) -> ParameterSet {
        match self {
            FamilyInputs::S411 { params, .. }
            | FamilyInputs::S412 { params, .. }
            | FamilyInputs::S421 { params, .. }
            | FamilyInputs::S422 { params, .. } => params.clone(),
            FamilyInputs::S43 { d, .. } => ParameterSet::new(rat(0, 1), rat(0, 1), rat(0, 1), d.clone()),
        }
    }

    pub fn tag(&self) -> FamilyTag {
        match self {
            FamilyInputs::S411 { .. } => FamilyTag::S411,
            FamilyInputs::S412 { .. } => FamilyTag::S412,
            FamilyInputs::S421 { .. } => FamilyTag::S421,
            FamilyInputs::S422 { .. } => FamilyTag::S422,
            FamilyInputs::S43 { .. } => FamilyTag::S43,
        }
    }
}

/// Solitary wave `η = Σ j̄_r sechʳ(λξ)`, `w = Σ k̄_r sechʳ(λξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitaryParams {
    pub source: FamilyTag,
    pub j_bar: [f64; 5],
    pub k_bar: [f64; 3],
    pub lambda: f64,
    pub sigma: f64,
}

impl SolitaryParams {
    /// The same wave as a `m = 1` solution record.
    pub fn as_solution(&self) -> SolutionParams {
        SolutionParams {
            family: FamilyTag::SolitaryLimit,
            branch: Branch::default(),
            j: self.j_bar,
            k: self.k_bar,
            lambda: self.lambda,
            m: 1.0,
            sigma: self.sigma,
        }
    }

    pub fn profile(&self, xi: f64) -> (f64, f64) {
        let sech = 1.0 / (self.lambda * xi).cosh();
        let series = |c: &[f64]| c.iter().rev().fold(0.0, |acc, x| acc * sech + x);
        (series(&self.j_bar), series(&self.k_bar))
    }
}

/// The `m → 1` limit of a family: its formulas evaluated at `m = 1`, where
/// `cn = sech`.
pub fn m1_limit(inputs: &FamilyInputs) -> Result<SolitaryParams> {
    let s = inputs.build(1.0)?;
    Ok(SolitaryParams { source: inputs.tag(), j_bar: s.j, k_bar: s.k, lambda: s.lambda, sigma: s.sigma })
}

/// A named parameter point from the figure gallery: a family, its inputs
/// and the modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub name: String,
    pub inputs: FamilyInputs,
    pub m: f64,
}

impl Figure {
    pub fn build(&self) -> Result<SolutionParams> {
        self.inputs.build(self.m)
    }
}

fn s41x(params: (&str, &str, &str, &str)) -> ParameterSet {
    ParameterSet::parse(params.0, params.1, params.2, params.3).expect("literal parameters")
}

/// The cnoidal figures `1a` to `4b` and the solitary figures `5a`, `6a`,
/// `6b` (those have `m = 1`).
pub fn figures() -> Vec<Figure> {
    use std::f64::consts::FRAC_1_SQRT_2;
    let fig = |name: &str, inputs: FamilyInputs, m: f64| Figure { name: name.into(), inputs, m };
    vec![
        fig("1a", FamilyInputs::S411 { params: s41x(("-5/6", "1", "-5/6", "1")), tau1: Sign::Plus, tau2: Sign::Plus }, 0.75),
        fig("1b", FamilyInputs::S411 { params: s41x(("-7", "2", "4/3", "4")), tau1: Sign::Minus, tau2: Sign::Plus }, 0.25),
        fig(
            "2a",
            FamilyInputs::S412 { params: s41x(("1", "-8/3", "1", "1")), lambda: 1.0, sigma: 1.0, pm: Pm::Top },
            FRAC_1_SQRT_2,
        ),
        fig(
            "2b",
            FamilyInputs::S412 { params: s41x(("0", "-1", "-2/3", "2")), lambda: 0.5, sigma: -1.0 / 3.0, pm: Pm::Bottom },
            0.25,
        ),
        fig("3a", FamilyInputs::S421 { params: s41x(("1", "-1", "0", "1/3")), lambda: 0.5, sigma: -2.0 }, 0.5),
        fig("3b", FamilyInputs::S421 { params: s41x(("0", "1/6", "0", "1/6")), lambda: 1.0, sigma: 1.0 }, 0.9),
        fig("4a", FamilyInputs::S422 { params: s41x(("-11/3", "2", "0", "2")), lambda: 1.0, sigma: -1.0 }, FRAC_1_SQRT_2),
        fig("4b", FamilyInputs::S422 { params: s41x(("0", "-5/3", "0", "2")), lambda: 2.0, sigma: 0.125 }, 0.75),
        fig("5a", FamilyInputs::S412 { params: s41x(("1", "-8/3", "1", "1")), lambda: 1.0, sigma: 1.0, pm: Pm::Top }, 1.0),
        fig("6a", FamilyInputs::S421 { params: s41x(("0", "1/6", "0", "1/6")), lambda: 1.0, sigma: 1.0 }, 1.0),
        fig("6b", FamilyInputs::S411 { params: s41x(("-5/6", "1", "-1/6", "1/3")), tau1: Sign::Plus, tau2: Sign::Minus }, 1.0),
    ]
}

/// Looks up one of [`figures`] by name, e.g. `"2a"`.
pub fn figure(name: &str) -> Result<Figure> {
    figures()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::Usage(format!("unknown figure {name:?}")))
}
