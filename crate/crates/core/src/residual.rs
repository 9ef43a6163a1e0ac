//! Ground-truth checks that use only the elliptic kernel: the traveling-wave
//! ODE residual, periodicity, the BBM reduction and limit tables.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, cn_power_derivative_at, jacobi_eval, JacobiPoint, Modulus};
use crate::error::{Error, Result};
use crate::families::{
    build_4_2_2, build_4_3, m1_limit, solution_4_1_2_exact, solution_4_2_2_exact, FamilyInputs, FamilyTag, ParameterSet,
    Pm, SolutionParams,
};
use crate::poly::{rat, to_f64};

/// Half-width, in units of `1/λ`, of the window sampled when `m = 1`.
pub const SOLITARY_HALF_WIDTH: f64 = 10.0;

pub const DEFAULT_SAMPLES: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs_eq1: f64,
    pub max_abs_eq2: f64,
    /// Largest magnitude of any single term of either equation.
    pub scale: f64,
    /// `max(max_abs_eq1, max_abs_eq2) / scale`; zero when every term vanishes.
    pub relative: f64,
    pub n_samples: usize,
    /// Length of the sampled interval: one period `4K(m)/λ`, or `20/λ` for
    /// `m = 1`.
    pub period: f64,
}

/// Value, first and third derivative of `Σ c_r cn^r(λξ, m)` at a point.
fn series_derivatives(c: &[f64], lambda: f64, p: &JacobiPoint) -> [f64; 3] {
    let mut out = [c.first().copied().unwrap_or(0.0), 0.0, 0.0];
    for (r, &coef) in c.iter().enumerate().skip(1) {
        if coef == 0.0 {
            continue;
        }
        for (slot, order) in [(0, 0), (1, 1), (2, 3)] {
            out[slot] += coef * cn_power_derivative_at(r as u32, order, lambda, p).expect("orders 0, 1, 3 with r >= 1");
        }
    }
    out
}

/// Both residuals and their individual terms at one point, in the order
/// `E1 = -ση' + w' + (ηw)' + a w''' + bσ η'''` and
/// `E2 = -σw' + η' + w w' + c η''' + dσ w'''`.
fn residual_terms(s: &SolutionParams, abcd: [f64; 4], p: &JacobiPoint) -> ([f64; 5], [f64; 5]) {
    let [a, b, c, d] = abcd;
    let sigma = s.sigma;
    let [eta, eta1, eta3] = series_derivatives(&s.j, s.lambda, p);
    let [w, w1, w3] = series_derivatives(&s.k, s.lambda, p);
    (
        [-sigma * eta1, w1, eta1 * w + eta * w1, a * w3, b * sigma * eta3],
        [-sigma * w1, eta1, w * w1, c * eta3, d * sigma * w3],
    )
}

fn sample_points(s: &SolutionParams, n: usize) -> Result<(Vec<f64>, f64)> {
    let m = Modulus::new(s.m)?;
    if s.m < 1.0 {
        let quarter = complete_k(m)? / s.lambda;
        let period = 4.0 * quarter;
        let mut xs: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
        xs.extend((0..4).map(|i| quarter * i as f64));
        Ok((xs, period))
    } else {
        let half = SOLITARY_HALF_WIDTH / s.lambda;
        let mut xs: Vec<f64> = (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect();
        xs.push(0.0);
        Ok((xs, 2.0 * half))
    }
}

/// Samples both traveling-wave equations over one period (plus the quarter
/// points, where `sn·dn` vanishes) using analytic derivatives.
pub fn ode_residual(s: &SolutionParams, p: &ParameterSet, n_samples: usize) -> Result<ResidualReport> {
    if n_samples < 64 {
        return Err(Error::Usage(format!("at least 64 samples are needed, got {n_samples}")));
    }
    if !(s.lambda > 0.0) || !s.lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be positive, got {}", s.lambda)));
    }
    let (xs, period) = sample_points(s, n_samples)?;
    let m = Modulus::new(s.m)?;
    let abcd = p.as_f64();
    let (mut e1, mut e2, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for xi in xs {
        let pt = jacobi_eval(s.lambda * xi, m)?;
        let (t1, t2) = residual_terms(s, abcd, &pt);
        e1 = e1.max(t1.iter().sum::<f64>().abs());
        e2 = e2.max(t2.iter().sum::<f64>().abs());
        scale = t1.iter().chain(&t2).fold(scale, |acc, t| acc.max(t.abs()));
    }
    let worst = e1.max(e2);
    let relative = if worst == 0.0 { 0.0 } else { worst / scale };
    Ok(ResidualReport { max_abs_eq1: e1, max_abs_eq2: e2, scale, relative, n_samples, period })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub period: f64,
    /// `max |η(ξ+T) - η(ξ)| + |w(ξ+T) - w(ξ)|` over the test points.
    pub defect: f64,
    /// The same with `T/2` in place of `T`.
    pub half_period_defect: f64,
    pub half_periodic: bool,
}

/// Checks `T = 4K(m)/λ` periodicity and whether `T/2` is a period as well.
pub fn periodicity_check(s: &SolutionParams) -> Result<PeriodicityReport> {
    if s.m >= 1.0 {
        return Err(Error::domain("m = 1 has no finite period"));
    }
    let period = 4.0 * complete_k(Modulus::new(s.m)?)? / s.lambda;
    let (mut defect, mut half, mut size) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..97 {
        let xi = period * (i as f64 / 97.0 - 0.3);
        let (e0, w0) = s.profile(xi)?;
        let (e1, w1) = s.profile(xi + period)?;
        let (eh, wh) = s.profile(xi + 0.5 * period)?;
        defect = defect.max((e1 - e0).abs() + (w1 - w0).abs());
        half = half.max((eh - e0).abs() + (wh - w0).abs());
        size = size.max(e0.abs() + w0.abs());
    }
    let half_periodic = half <= 1e-10 * size.max(1.0);
    Ok(PeriodicityReport { period, defect, half_period_defect: half, half_periodic })
}

/// For a solution with `η ≡ -1` and `a = b = 0`: the first equation collapses
/// to `w' - w' = 0` and the second to the BBM traveling-wave equation
/// `-σw' + w w' + dσ w''' = 0` for any `c`. Evaluates both.
pub fn bbm_reduction_check(s: &SolutionParams, c: &BigRational, d: &BigRational, n_samples: usize) -> Result<ResidualReport> {
    if s.family != FamilyTag::S43 || s.j != [-1.0, 0.0, 0.0, 0.0, 0.0] {
        return Err(Error::Usage("the BBM reduction applies only to eta = -1 solutions of family 4.3".into()));
    }
    let p = ParameterSet::new(rat(0, 1), rat(0, 1), c.clone(), d.clone());
    ode_residual(s, &p, n_samples)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitKind {
    /// Solution (4.1.2) with bottom signs against (4.2.2) as `c → 0`;
    /// `params.c` is ignored.
    CToZero { params: ParameterSet, lambda: f64, sigma: f64, m: f64 },
    /// Solution (4.2.2) against (4.3) as `a → 0`; `params.a` is ignored.
    AToZero { params: ParameterSet, lambda: f64, sigma: f64, m: f64 },
    /// A family at `m = 1 - ε` against its sech limit.
    MToOne { inputs: FamilyInputs },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub parameter: f64,
    /// Largest absolute coefficient difference.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub kind: String,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log parameter` over the
    /// rows with nonzero error.
    pub order: Option<f64>,
    /// Errors strictly decrease along the rows with nonzero parameter.
    pub monotone: bool,
    /// Error at the limit point itself (`c`, `a` or `1 - m` equal to zero),
    /// when that point is in the table.
    pub at_limit: Option<f64>,
}

fn max_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::domain(format!("non-finite input {x}")))
}

fn table(kind: &str, rows: Vec<ConvergenceRow>, at_limit: Option<f64>) -> ConvergenceTable {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.parameter > 0.0 && r.error > 0.0)
        .map(|r| (r.parameter.ln(), r.error.ln()))
        .collect();
    let order = (pts.len() >= 2).then(|| {
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let errs: Vec<f64> = rows.iter().filter(|r| r.parameter > 0.0).map(|r| r.error).collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    ConvergenceTable { kind: kind.into(), rows, order, monotone, at_limit }
}

/// Tabulates coefficient differences along `10^-k` for `k` in `exponents`.
pub fn limit_consistency(kind: &LimitKind, exponents: std::ops::RangeInclusive<i32>) -> Result<ConvergenceTable> {
    match kind {
        LimitKind::CToZero { params, lambda, sigma, m } => {
            let side = sigma * (to_f64(&params.b) - 2.0 * to_f64(&params.d));
            if !(side > 0.0) {
                return Err(Error::domain("the c -> 0 limit of the bottom branch needs sigma (b - 2d) > 0"));
            }
            let (l, s, mm) = (exact(*lambda)?, exact(*sigma)?, exact(*m)?);
            let target = ParameterSet { c: BigRational::zero(), ..params.clone() };
            let t = solution_4_2_2_exact(&target, &l, &s, &mm)?.map(|q| to_f64(&q));
            let mut rows = Vec::new();
            for k in exponents {
                let c = BigRational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), k as usize));
                let p = ParameterSet { c: c.clone(), ..params.clone() };
                let v = solution_4_1_2_exact(&p, &l, &s, &mm, Pm::Bottom)?.map(|q| q.to_f64());
                rows.push(ConvergenceRow { parameter: to_f64(&c), error: max_diff(&v, &t) });
            }
            Ok(table("c_to_zero", rows, None))
        }
        LimitKind::AToZero { params, lambda, sigma, m } => {
            let target = build_4_3(&params.d, *lambda, *sigma, *m)?;
            let mut rows = Vec::new();
            let point = |a: BigRational| -> Result<ConvergenceRow> {
                let p = ParameterSet { a: a.clone(), c: BigRational::zero(), ..params.clone() };
                let s = build_4_2_2(&p, *lambda, *sigma, *m)?;
                Ok(ConvergenceRow { parameter: to_f64(&a), error: s.coefficient_distance(&target) })
            };
            for k in exponents {
                rows.push(point(BigRational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), k as usize)))?);
            }
            let last = point(BigRational::zero())?;
            let at_limit = Some(last.error);
            rows.push(last);
            Ok(table("a_to_zero", rows, at_limit))
        }
        LimitKind::MToOne { inputs } => {
            let limit = m1_limit(inputs)?.as_solution();
            let mut rows = Vec::new();
            for k in exponents {
                let eps = 10f64.powi(-k);
                let s = inputs.build(1.0 - eps)?;
                rows.push(ConvergenceRow { parameter: eps, error: s.coefficient_distance(&limit).max((s.lambda - limit.lambda).abs()) });
            }
            let at_one = inputs.build(1.0)?;
            let err = at_one.coefficient_distance(&limit);
            rows.push(ConvergenceRow { parameter: 0.0, error: err });
            Ok(table("m_to_one", rows, Some(err)))
        }
    }
}
