//! Jacobi elliptic functions and the complete elliptic integral of the first
//! kind.
//!
//! The modulus `m` used throughout this crate is the *modulus* `k`, not the
//! parameter `k²`: identities read `dn² = 1 - m² + m² cn²`, and
//! `K(m) = ∫₀^{π/2} dt / sqrt(1 - m² sin² t)`. References that tabulate by
//! parameter (Abramowitz & Stegun, mpmath, scipy) expect `m²` where this module
//! expects `m`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping tolerance on the AGM gap `c_n = (a_{n-1} - b_{n-1}) / 2`.
const AGM_TOL: f64 = 1e-15;
const AGM_MAX_STEPS: usize = 64;

/// Elliptic modulus `m ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(m: f64) -> Result<Self> {
        if !m.is_finite() || !(0.0..=1.0).contains(&m) {
            return Err(Error::domain(format!("modulus must lie in [0, 1], got {m}")));
        }
        Ok(Modulus(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `m²`, the quantity most references call the parameter.
    pub fn parameter(self) -> f64 {
        self.0 * self.0
    }

    /// Complementary modulus `sqrt(1 - m²)`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

impl TryFrom<f64> for Modulus {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Modulus::new(m)
    }
}

impl From<Modulus> for f64 {
    fn from(m: Modulus) -> f64 {
        m.0
    }
}

/// Values of `sn`, `cn` and `dn` at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiPoint {
    pub v: f64,
    pub m: Modulus,
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Complete elliptic integral of the first kind, `K(m)`, by the
/// arithmetic-geometric mean: `K = π / (2 AGM(1, sqrt(1 - m²)))`.
///
/// `K(1)` diverges and is reported as a domain error.
pub fn complete_k(m: Modulus) -> Result<f64> {
    if m.value() >= 1.0 {
        return Err(Error::domain("K(m) diverges at m = 1"));
    }
    let mut a = 1.0_f64;
    let mut b = m.complement();
    for _ in 0..AGM_MAX_STEPS {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(FRAC_PI_2 / a)
}

/// Evaluates `(sn, cn, dn)(v, m)` by descending Landen / AGM recursion.
///
/// `m = 0` and `m = 1` use the closed forms `(sin, cos, 1)` and
/// `(tanh, sech, sech)`; everything in between stays on the AGM path.
pub fn jacobi_eval(v: f64, m: Modulus) -> Result<JacobiPoint> {
    if !v.is_finite() {
        return Err(Error::domain(format!("elliptic argument must be finite, got {v}")));
    }
    let k = m.value();
    let (sn, cn, dn) = if k == 0.0 {
        (v.sin(), v.cos(), 1.0)
    } else if k == 1.0 {
        let sech = 1.0 / v.cosh();
        (v.tanh(), sech, sech)
    } else {
        let phi = amplitude(v, m);
        let (sn, cn) = phi.sin_cos();
        // dn > 0 for real arguments; evaluating it from cn keeps the
        // dn² identity exact up to rounding.
        let dn = (1.0 - m.parameter() + m.parameter() * cn * cn).sqrt();
        (sn, cn, dn)
    };
    Ok(JacobiPoint { v, m, sn, cn, dn })
}

/// Jacobi amplitude `am(v, m)` for `0 < m < 1`.
fn amplitude(v: f64, m: Modulus) -> f64 {
    let mut a = [0.0_f64; AGM_MAX_STEPS + 1];
    let mut c = [0.0_f64; AGM_MAX_STEPS + 1];
    a[0] = 1.0;
    c[0] = m.value();
    let mut b = m.complement();
    let mut steps = 0;
    while steps < AGM_MAX_STEPS && c[steps].abs() > AGM_TOL * a[steps] {
        let (prev_a, prev_b) = (a[steps], b);
        steps += 1;
        a[steps] = 0.5 * (prev_a + prev_b);
        b = (prev_a * prev_b).sqrt();
        c[steps] = 0.5 * (prev_a - prev_b);
    }
    let mut phi = (1u64 << steps) as f64 * a[steps] * v;
    for n in (1..=steps).rev() {
        phi = 0.5 * (phi + (c[n] / a[n] * phi.sin()).asin());
    }
    phi
}

/// `d^order/dξ^order cn^r(λξ, m)` from the closed derivative formulas.
///
/// Orders 1 and 3 carry the `sn·dn` prefactor, order 2 is a pure polynomial
/// in `cn`.
pub fn cn_power_derivative(r: u32, order: u32, lambda: f64, m: Modulus, xi: f64) -> Result<f64> {
    let p = jacobi_eval(lambda * xi, m)?;
    cn_power_derivative_at(r, order, lambda, &p)
}

/// Same as [`cn_power_derivative`] but reuses an already evaluated point
/// `p = (sn, cn, dn)(λξ, m)`.
pub fn cn_power_derivative_at(r: u32, order: u32, lambda: f64, p: &JacobiPoint) -> Result<f64> {
    if r == 0 {
        return Err(Error::Usage("cn power must be at least 1".into()));
    }
    let m2 = p.m.parameter();
    let rf = r as f64;
    let cn = p.cn;
    // cn^e for e possibly negative; a zero coefficient always accompanies e < 0.
    let pow = |coef: f64, e: i64| if coef == 0.0 { 0.0 } else { coef * cn.powi(e as i32) };
    let r = r as i64;
    match order {
        0 => Ok(cn.powi(r as i32)),
        1 => Ok(-rf * lambda * pow(1.0, r - 1) * p.sn * p.dn),
        2 => {
            let bracket = pow((rf + 1.0) * m2, r + 2)
                + pow(rf * (1.0 - 2.0 * m2), r)
                + pow((rf - 1.0) * (m2 - 1.0), r - 2);
            Ok(-rf * lambda * lambda * bracket)
        }
        3 => {
            let bracket = pow((rf + 1.0) * (rf + 2.0) * m2, r + 1)
                + pow(rf * rf * (1.0 - 2.0 * m2), r - 1)
                + pow((rf - 1.0) * (rf - 2.0) * (m2 - 1.0), r - 3);
            Ok(rf * lambda.powi(3) * p.sn * p.dn * bracket)
        }
        _ => Err(Error::Usage(format!("derivative order must be 1, 2 or 3, got {order}"))),
    }
}
