//! Exact arithmetic in a quadratic field `Q(√D)`.
//!
//! Closed forms with a single square root, such as the `±√(8ac + σ²(b-2d)²)`
//! family, cancel catastrophically in `f64` when a parameter goes to zero.
//! Evaluating them as `r + s√D` with rational `r, s` and rounding once at the
//! end avoids that.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::poly::to_f64;

/// `r + s·√d` for a fixed positive rational `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSurd {
    pub r: BigRational,
    pub s: BigRational,
    pub d: BigRational,
}

impl QuadSurd {
    pub fn rational(r: BigRational, d: &BigRational) -> Self {
        QuadSurd { r, s: BigRational::zero(), d: d.clone() }
    }

    /// `√d` itself.
    pub fn root(d: &BigRational) -> Self {
        QuadSurd { r: BigRational::zero(), s: num_traits::One::one(), d: d.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    /// `r - s√d`.
    pub fn conjugate(&self) -> Self {
        QuadSurd { r: self.r.clone(), s: -self.s.clone(), d: self.d.clone() }
    }

    /// `(r + s√d)(r - s√d) = r² - s²d`, always rational.
    pub fn norm(&self) -> BigRational {
        &self.r * &self.r - &self.s * &self.s * &self.d
    }

    /// Nearest `f64`. When `r` and `s√d` have opposite signs the value is
    /// rewritten as `(r² - s²d) / (r - s√d)` so the subtraction never cancels.
    pub fn to_f64(&self) -> f64 {
        let root = to_f64(&self.d).sqrt();
        let (r, s) = (to_f64(&self.r), to_f64(&self.s));
        if self.r.is_zero() || self.s.is_zero() || self.r.is_positive() == self.s.is_positive() {
            r + s * root
        } else {
            to_f64(&self.norm()) / (r - s * root)
        }
    }

    /// Magnitude scale `|r| + |s|√d` used for near-zero tests.
    pub fn scale(&self) -> f64 {
        to_f64(&self.r).abs() + to_f64(&self.s).abs() * to_f64(&self.d).sqrt()
    }

    fn check(&self, other: &Self) {
        debug_assert_eq!(self.d, other.d, "surds over different fields");
    }
}

impl Add for &QuadSurd {
    type Output = QuadSurd;
    fn add(self, o: &QuadSurd) -> QuadSurd {
        self.check(o);
        QuadSurd { r: &self.r + &o.r, s: &self.s + &o.s, d: self.d.clone() }
    }
}

impl Sub for &QuadSurd {
    type Output = QuadSurd;
    fn sub(self, o: &QuadSurd) -> QuadSurd {
        self.check(o);
        QuadSurd { r: &self.r - &o.r, s: &self.s - &o.s, d: self.d.clone() }
    }
}

impl Mul for &QuadSurd {
    type Output = QuadSurd;
    fn mul(self, o: &QuadSurd) -> QuadSurd {
        self.check(o);
        QuadSurd {
            r: &self.r * &o.r + &self.s * &o.s * &self.d,
            s: &self.r * &o.s + &self.s * &o.r,
            d: self.d.clone(),
        }
    }
}

impl Div for &QuadSurd {
    type Output = QuadSurd;
    /// Panics on division by zero; callers test denominators first.
    fn div(self, o: &QuadSurd) -> QuadSurd {
        let n = o.norm();
        assert!(!n.is_zero(), "division by zero in Q(sqrt d)");
        let num = self * &o.conjugate();
        QuadSurd { r: num.r / &n, s: num.s / &n, d: self.d.clone() }
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { r: -self.r.clone(), s: -self.s.clone(), d: self.d.clone() }
    }
}

impl Mul<&BigRational> for &QuadSurd {
    type Output = QuadSurd;
    fn mul(self, q: &BigRational) -> QuadSurd {
        QuadSurd { r: &self.r * q, s: &self.s * q, d: self.d.clone() }
    }
}
