//! Numerical rediscovery of solution branches: damped Gauss-Newton with a
//! truncated-SVD step on the coefficient systems, deterministic multistart,
//! and the non-existence sweeps for the `c = 0` system.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cn_expr::{build_h_system, Constants, HSystem};
use crate::error::{Error, Result};
use crate::families::{Branch, FamilyTag, ParameterSet, SolutionParams};
use crate::poly::{to_f64, RationalPoly, Var};

/// A polynomial compiled to `f64` over the indices of the unknowns.
#[derive(Debug, Clone)]
struct Compiled {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl Compiled {
    fn new(p: &RationalPoly, index: &BTreeMap<Var, usize>) -> Self {
        let terms = p
            .terms()
            .map(|(mono, q)| (to_f64(q), mono.powers().iter().map(|&(v, e)| (index[&v], e as i32)).collect()))
            .collect();
        Compiled { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e))).sum()
    }

    fn largest_term(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)).abs()).fold(0.0, f64::max)
    }
}

/// A coefficient system with some variables pinned to numbers.
#[derive(Debug, Clone)]
pub struct HSystemNumeric {
    unknowns: Vec<Var>,
    pinned: BTreeMap<Var, f64>,
    labels: Vec<(usize, usize)>,
    equations: Vec<Compiled>,
    exact: Vec<RationalPoly>,
    /// `jacobian[i][j] = ∂h_i/∂x_j`.
    jacobian: Vec<Vec<Compiled>>,
}

/// Substitutes `pins` exactly (each `f64` is converted to the rational it
/// represents), drops equations that vanish identically and checks that no
/// fewer equations than unknowns remain. `a, b, c, d` must be numeric in
/// `sys` or pinned.
pub fn pin_and_square(sys: &HSystem, pins: &BTreeMap<Var, f64>) -> Result<HSystemNumeric> {
    for (&v, &x) in pins {
        let ok = match v {
            Var::Lambda => x > 0.0,
            Var::M => x > 0.0 && x <= 1.0,
            Var::Sigma => x != 0.0 && x.is_finite(),
            _ => x.is_finite(),
        };
        if !ok {
            return Err(Error::domain(format!("pin {v} = {x} is outside its domain")));
        }
    }
    let mut pinned_sys = sys.clone();
    for (&v, &x) in pins {
        let q = BigRational::from_float(x).expect("finite pin");
        pinned_sys = pinned_sys.subs(v, &RationalPoly::constant(q));
    }
    let vars = pinned_sys.vars();
    if let Some(v) = vars.iter().find(|v| !v.is_unknown()) {
        return Err(Error::Usage(format!("constant {v} must be numeric or pinned")));
    }
    let unknowns: Vec<Var> = vars.into_iter().collect();
    let index: BTreeMap<Var, usize> = unknowns.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let eqs = pinned_sys.equations();
    if eqs.len() < unknowns.len() {
        return Err(Error::Underdetermined { deficit: unknowns.len() - eqs.len() });
    }
    let labels = eqs.iter().map(|&(p, q, _)| (p, q)).collect();
    let equations = eqs.iter().map(|&(_, _, poly)| Compiled::new(poly, &index)).collect();
    let jacobian = eqs
        .iter()
        .map(|&(_, _, poly)| unknowns.iter().map(|&v| Compiled::new(&poly.partial(v), &index)).collect())
        .collect();
    let exact = eqs.iter().map(|&(_, _, poly)| poly.clone()).collect();
    Ok(HSystemNumeric { unknowns, pinned: pins.clone(), labels, equations, exact, jacobian })
}

impl HSystemNumeric {
    pub fn unknowns(&self) -> &[Var] {
        &self.unknowns
    }

    pub fn pinned(&self) -> &BTreeMap<Var, f64> {
        &self.pinned
    }

    pub fn n_equations(&self) -> usize {
        self.equations.len()
    }

    /// `(p, q)` of each remaining equation.
    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.equations.iter().map(|e| e.eval(x)).collect()
    }

    /// Largest magnitude of any single term of any equation at `x`: the size
    /// below which `f64` rounding makes `‖h‖∞` meaningless.
    pub fn term_scale(&self, x: &[f64]) -> f64 {
        self.equations.iter().map(|e| e.largest_term(x)).fold(0.0, f64::max)
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.equations.len(), self.unknowns.len(), |i, j| self.jacobian[i][j].eval(x))
    }

    fn exact_values(&self, x: &[BigRational]) -> Vec<BigRational> {
        let index: BTreeMap<Var, usize> = self.unknowns.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        self.exact
            .iter()
            .map(|p| {
                p.terms().fold(BigRational::zero(), |acc, (mono, c)| {
                    acc + mono.powers().iter().fold(c.clone(), |t, &(v, e)| t * num_traits::pow(x[index[&v]].clone(), e as usize))
                })
            })
            .collect()
    }

    /// `‖h‖∞` evaluated in exact arithmetic at a rational point.
    pub fn exact_residual(&self, x: &[BigRational]) -> f64 {
        self.exact_values(x).iter().map(|v| to_f64(v).abs()).fold(0.0, f64::max)
    }

    /// Iterative refinement of a root with residuals computed exactly and
    /// steps from the truncated pseudo-inverse of the `f64` Jacobian.
    ///
    /// A regular root keeps improving far below `f64` resolution, a multiple
    /// root or a point on a solution manifold at least linearly; a near-miss
    /// stalls. Stops early once the residual is below `1e-24` or has not
    /// dropped tenfold over the last six steps.
    pub fn refine_exact(&self, x: &[f64], max_steps: usize) -> Refinement {
        let mut xq: Vec<BigRational> = x.iter().map(|&v| BigRational::from_float(v).expect("finite root")).collect();
        let grain = BigRational::new(1.into(), num_bigint::BigInt::from(1) << 400);
        let mut out = vec![self.exact_residual(&xq)];
        while out.len() <= max_steps {
            let n = out.len();
            if out[n - 1] <= CONFIRM_RESIDUAL || (n > 6 && out[n - 1] > 0.1 * out[n - 7]) {
                break;
            }
            let h: Vec<f64> = self.exact_values(&xq).iter().map(to_f64).collect();
            let xf: Vec<f64> = xq.iter().map(to_f64).collect();
            let svd = self.jacobian(&xf).svd(true, true);
            let cutoff = 1e-12 * svd.singular_values.max();
            let Ok(step) = svd.solve(&DVector::from_vec(h), cutoff) else { break };
            for (xi, di) in xq.iter_mut().zip(step.iter()) {
                if let Some(d) = BigRational::from_float(*di) {
                    // Rounded to a 2^-400 grid so denominators stay bounded.
                    *xi = ((&*xi - d) / &grain).round() * &grain;
                }
            }
            out.push(self.exact_residual(&xq));
        }
        let x = xq.iter().map(to_f64).collect();
        let confirmed = out[out.len() - 1] <= CONFIRM_RESIDUAL.max(1e-6 * out[0]);
        Refinement { trail: out, x, confirmed }
    }

    /// [`HSystemNumeric::refine_exact`] with 60 steps.
    pub fn confirm_root(&self, x: &[f64]) -> Refinement {
        self.refine_exact(x, 60)
    }

    /// Value of `v` from the pins or from the unknown vector `x`.
    pub fn value(&self, v: Var, x: &[f64]) -> Option<f64> {
        self.pinned.get(&v).copied().or_else(|| self.unknowns.iter().position(|&u| u == v).map(|i| x[i]))
    }

    /// Unknown vector read off a solution (pinned variables are skipped).
    pub fn seed_from(&self, s: &SolutionParams) -> Vec<f64> {
        self.unknowns
            .iter()
            .map(|&v| match v {
                Var::Lambda => s.lambda,
                Var::M => s.m,
                Var::Sigma => s.sigma,
                Var::J(r) => s.j.get(r as usize).copied().unwrap_or(0.0),
                Var::K(r) => s.k.get(r as usize).copied().unwrap_or(0.0),
                _ => 0.0,
            })
            .collect()
    }

    /// Promotes a root to a solution record tagged [`FamilyTag::Numeric`].
    pub fn solution(&self, x: &[f64]) -> Result<SolutionParams> {
        let get = |v: Var| self.value(v, x).ok_or_else(|| Error::Usage(format!("{v} is neither pinned nor solved for")));
        let mut j = [0.0; 5];
        let mut k = [0.0; 3];
        for v in self.unknowns.iter().chain(self.pinned.keys()) {
            match *v {
                Var::J(r) if r as usize >= j.len() => return Err(Error::Usage(format!("j{r} does not fit a solution record"))),
                Var::K(r) if r as usize >= k.len() => return Err(Error::Usage(format!("k{r} does not fit a solution record"))),
                Var::J(r) => j[r as usize] = get(*v)?,
                Var::K(r) => k[r as usize] = get(*v)?,
                _ => {}
            }
        }
        Ok(SolutionParams {
            family: FamilyTag::Numeric,
            branch: Branch::default(),
            j,
            k,
            lambda: get(Var::Lambda)?.abs(),
            m: get(Var::M)?.abs(),
            sigma: get(Var::Sigma)?,
        })
    }
}

/// Outcome of [`HSystemNumeric::refine_exact`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    /// Exact `‖h‖∞` after each step, starting with the value at the input.
    pub trail: Vec<f64>,
    /// Refined point, rounded to `f64`.
    pub x: Vec<f64>,
    /// The residual fell below `1e-24`, or at least six orders of magnitude
    /// below its starting value.
    pub confirmed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_condition: f64,
    /// Keep every iterate in [`Root::history`].
    pub record_history: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-12, max_iter: 200, max_condition: 1e14, record_history: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖h‖∞` at `x`.
    pub residual: f64,
    /// `σ_max / σ_min` of the Jacobian at `x`; infinite when rank deficient.
    pub condition: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<Vec<f64>>,
}

const STALL_WINDOW: usize = 30;
const CONFIRM_RESIDUAL: f64 = 1e-24;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn condition(s: &DVector<f64>) -> f64 {
    let max = s.max();
    let min = s.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Damped Gauss-Newton on `½‖h‖²`.
///
/// The step is the minimum-norm least-squares solution of `J Δ = -h` with
/// singular values below `1e-14·σ_max` discarded, so square, overdetermined
/// and rank-deficient systems share one code path. Steps are halved until the
/// Armijo condition holds. Converges when `‖h‖∞ ≤ tol`.
///
/// Fails with [`Error::SingularJacobian`] when it stalls at a point whose
/// Jacobian condition exceeds `max_condition`, and with [`Error::Divergence`]
/// otherwise.
pub fn solve_newton(sys: &HSystemNumeric, seed: &[f64], opts: &NewtonOptions) -> Result<Root> {
    let n = sys.unknowns.len();
    if seed.len() != n {
        return Err(Error::Usage(format!("seed has {} entries, system has {n} unknowns", seed.len())));
    }
    let mut x = seed.to_vec();
    let mut f = sys.residual(&x);
    let mut history = Vec::new();
    let mut last_condition = f64::NAN;
    let mut trail = Vec::with_capacity(opts.max_iter + 1);
    for iter in 0..=opts.max_iter {
        if opts.record_history {
            history.push(x.clone());
        }
        let res = inf_norm(&f);
        if !res.is_finite() {
            break;
        }
        let jac = sys.jacobian(&x);
        if res <= opts.tol {
            let sv = jac.clone().singular_values();
            return Ok(Root { x, iterations: iter, residual: res, condition: condition(&sv), history });
        }
        if iter == opts.max_iter {
            break;
        }
        // Stalled: not even halved over the last 30 steps.
        trail.push(res);
        if iter >= STALL_WINDOW && res > 0.5 * trail[iter - STALL_WINDOW] {
            break;
        }
        let svd = jac.clone().svd(true, true);
        last_condition = condition(&svd.singular_values);
        let cutoff = 1e-14 * svd.singular_values.max();
        let fv = DVector::from_column_slice(&f);
        let step = match svd.solve(&(-&fv), cutoff) {
            Ok(s) => s,
            Err(_) => break,
        };
        let phi = 0.5 * fv.norm_squared();
        let slope = (jac.transpose() * &fv).dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        while t >= 1e-10 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi + t * si).collect();
            let ft = sys.residual(&trial);
            let phi_t = 0.5 * ft.iter().map(|v| v * v).sum::<f64>();
            let enough = if slope < 0.0 { phi_t <= phi + 1e-4 * t * slope } else { phi_t < phi };
            if phi_t.is_finite() && enough {
                x = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || inf_norm(&x) > 1e12 {
            break;
        }
    }
    let residual = inf_norm(&f);
    if last_condition > opts.max_condition {
        return Err(Error::SingularJacobian { condition: last_condition });
    }
    Err(Error::Divergence { iterations: opts.max_iter, residual })
}

/// Seed distribution: magnitudes log-uniform in `[min_magnitude,
/// max_magnitude]` with a random sign; `λ` positive and `m` uniform in
/// `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerRanges {
    pub min_magnitude: f64,
    pub max_magnitude: f64,
}

impl Default for SamplerRanges {
    fn default() -> Self {
        SamplerRanges { min_magnitude: 1e-3, max_magnitude: 10.0 }
    }
}

impl SamplerRanges {
    fn sample(&self, v: Var, rng: &mut ChaCha8Rng) -> f64 {
        if v == Var::M {
            return 1.0 - rng.gen::<f64>();
        }
        let (lo, hi) = (self.min_magnitude.ln(), self.max_magnitude.ln());
        let mag = (lo + (hi - lo) * rng.gen::<f64>()).exp();
        if v == Var::Lambda || rng.gen::<bool>() {
            mag
        } else {
            -mag
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    /// `η` and `w` both constant.
    Trivial,
    /// Exactly one of `η`, `w` constant.
    SemiTrivial,
    NonTrivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub values: Vec<f64>,
    pub kind: RootKind,
    /// Number of starts that converged to this root.
    pub hits: usize,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSet {
    pub unknowns: Vec<String>,
    pub pinned: BTreeMap<String, f64>,
    /// Distinct semi-trivial and non-trivial roots, sorted.
    pub roots: Vec<RootRecord>,
    /// Converged starts that ended on a trivial (constant) solution. These
    /// form a continuum, so only the count is kept.
    pub trivial_hits: usize,
    pub diverged: usize,
    pub singular: usize,
    pub n_starts: usize,
    pub seed: u64,
}

impl BranchSet {
    pub fn non_trivial(&self) -> impl Iterator<Item = &RootRecord> {
        self.roots.iter().filter(|r| r.kind == RootKind::NonTrivial)
    }
}

fn classify(sys: &HSystemNumeric, x: &[f64]) -> RootKind {
    let scale = 1.0 + inf_norm(x);
    let constant = |is: fn(Var) -> bool| {
        sys.unknowns.iter().zip(x).all(|(&v, &val)| !is(v) || val.abs() <= 1e-9 * scale)
            && sys.pinned.iter().all(|(&v, &val)| !is(v) || val == 0.0)
    };
    let eta_const = constant(|v| matches!(v, Var::J(r) if r > 0));
    let w_const = constant(|v| matches!(v, Var::K(r) if r > 0));
    match (eta_const, w_const) {
        (true, true) => RootKind::Trivial,
        (false, false) => RootKind::NonTrivial,
        _ => RootKind::SemiTrivial,
    }
}

/// `λ` and `m` enter only squared; report them positive.
fn normalize(sys: &HSystemNumeric, x: &mut [f64]) {
    for (v, val) in sys.unknowns.iter().zip(x.iter_mut()) {
        if matches!(v, Var::Lambda | Var::M) {
            *val = val.abs();
        }
    }
}

fn close(x: &[f64], y: &[f64]) -> bool {
    let scale = inf_norm(x).max(inf_norm(y));
    x.iter().zip(y).all(|(a, b)| (a - b).abs() <= 1e-6 * scale + 1e-9)
}

/// Runs [`solve_newton`] from `n_starts` seeds drawn from a ChaCha stream per
/// start, so the result depends only on `seed`, not on scheduling.
pub fn multistart(sys: &HSystemNumeric, n_starts: usize, ranges: &SamplerRanges, seed: u64, opts: &NewtonOptions) -> BranchSet {
    let outcomes: Vec<Result<Root>> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x0: Vec<f64> = sys.unknowns.iter().map(|&v| ranges.sample(v, &mut rng)).collect();
            solve_newton(sys, &x0, opts)
        })
        .collect();
    let mut found = Vec::new();
    let (mut trivial_hits, mut diverged, mut singular) = (0, 0, 0);
    for outcome in outcomes {
        match outcome {
            Ok(mut root) => {
                normalize(sys, &mut root.x);
                match classify(sys, &root.x) {
                    RootKind::Trivial => trivial_hits += 1,
                    kind => found.push(RootRecord { values: root.x, kind, hits: 1, residual: root.residual, iterations: root.iterations }),
                }
            }
            Err(Error::SingularJacobian { .. }) => singular += 1,
            Err(_) => diverged += 1,
        }
    }
    found.sort_by(|a, b| {
        a.values.iter().zip(&b.values).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut roots: Vec<RootRecord> = Vec::new();
    for r in found {
        match roots.iter_mut().find(|k| close(&k.values, &r.values)) {
            Some(k) => {
                k.hits += 1;
                if r.residual < k.residual {
                    k.values = r.values;
                    k.residual = r.residual;
                    k.iterations = r.iterations;
                }
            }
            None => roots.push(r),
        }
    }
    BranchSet {
        unknowns: sys.unknowns.iter().map(Var::to_string).collect(),
        pinned: sys.pinned.iter().map(|(v, x)| (v.to_string(), *x)).collect(),
        roots,
        trivial_hits,
        diverged,
        singular,
        n_starts,
        seed,
    }
}

/// Setup of a non-existence sweep on the full `c = 0` system (quartic `η`,
/// quadratic `w`): one coefficient is pinned away from zero and everything
/// else (`λ, m, σ` and the remaining coefficients) is solved for, at every
/// grid point `(a, b, d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceConfig {
    /// `j1`, `j3` or `k1`.
    pub constrained: String,
    /// Values the constrained coefficient is pinned to; each must satisfy
    /// `|t| ≥ delta`.
    pub values: Vec<f64>,
    pub delta: f64,
    #[serde(with = "rational_list")]
    pub grid_a: Vec<BigRational>,
    #[serde(with = "rational_list")]
    pub grid_b: Vec<BigRational>,
    #[serde(with = "rational_list")]
    pub grid_d: Vec<BigRational>,
    pub starts: usize,
    pub seed: u64,
}

mod rational_list {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| q.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| crate::poly::parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}

impl NonexistenceConfig {
    /// 3×3×3 grid containing `(a, b, d) = (1, -1, 1/3)`, `t = 0.1`,
    /// `δ = 1e-3`, 500 starts per grid point.
    pub fn standard(constrained: Var) -> Self {
        let q = |s: &str| crate::poly::parse_rational(s).expect("literal");
        NonexistenceConfig {
            constrained: constrained.to_string(),
            values: vec![0.1],
            delta: 1e-3,
            grid_a: ["-1/2", "1/3", "1"].map(q).to_vec(),
            grid_b: ["-1", "1/6", "1"].map(q).to_vec(),
            grid_d: ["-1/2", "1/3", "2"].map(q).to_vec(),
            starts: 500,
            seed: 7,
        }
    }
}

/// Why a converged root does not count as a periodic traveling wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inadmissible {
    /// `|σ| ≤ 1e-10`: a steady state, not a traveling wave.
    ZeroSpeed,
    /// `λ ≤ 1e-10`: the profile is constant.
    ZeroWaveNumber,
    /// `m` outside `(0, 1]`.
    ModulusOutOfRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRoot {
    #[serde(with = "crate::families::rational_serde")]
    pub a: BigRational,
    #[serde(with = "crate::families::rational_serde")]
    pub b: BigRational,
    #[serde(with = "crate::families::rational_serde")]
    pub d: BigRational,
    pub t: f64,
    pub solution: SolutionParams,
    pub residual: f64,
    pub hits: usize,
    /// Exact-arithmetic refinement kept reducing the residual; `solution`
    /// then holds the refined point.
    pub confirmed: bool,
    /// `None` for an admissible root.
    pub inadmissible: Option<Inadmissible>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceReport {
    pub config: NonexistenceConfig,
    pub unknowns: Vec<String>,
    pub grid_points: usize,
    pub total_starts: usize,
    /// Confirmed roots with `|σ| > 1e-10`, `λ > 1e-10`, `0 < m ≤ 1`.
    pub counterexamples: Vec<SweepRoot>,
    /// Confirmed roots that fail admissibility.
    pub inadmissible: Vec<SweepRoot>,
    /// Points that met `‖h‖∞ ≤ 1e-12` in `f64` but whose exact residual
    /// would not refine further: near-misses, typically where `m`, `λ` or
    /// the top coefficients drift toward zero or `σ` grows large.
    pub unconfirmed: Vec<SweepRoot>,
    /// Largest `|σ|` over the inadmissible roots.
    pub max_abs_sigma_inadmissible: f64,
}

fn admissibility(s: &SolutionParams) -> Option<Inadmissible> {
    if s.sigma.abs() <= 1e-10 {
        Some(Inadmissible::ZeroSpeed)
    } else if s.lambda <= 1e-10 {
        Some(Inadmissible::ZeroWaveNumber)
    } else if !(s.m > 0.0 && s.m <= 1.0 + 1e-12) {
        Some(Inadmissible::ModulusOutOfRange)
    } else {
        None
    }
}

/// Multistart sweep over the grid with one coefficient held at `|t| ≥ δ`.
/// Every converged root is reported. Each is first checked with
/// [`HSystemNumeric::confirm_root`]; confirmed admissible roots are
/// counterexamples to the non-existence claim.
pub fn reproduce_nonexistence(cfg: &NonexistenceConfig) -> Result<NonexistenceReport> {
    let var: Var = cfg.constrained.parse()?;
    if !matches!(var, Var::J(1) | Var::J(3) | Var::K(1)) {
        return Err(Error::Usage(format!("the constrained coefficient must be j1, j3 or k1, got {var}")));
    }
    if let Some(t) = cfg.values.iter().find(|t| t.abs() < cfg.delta || !t.is_finite()) {
        return Err(Error::Usage(format!("pinned value {t} lies inside the exclusion band |t| < {}", cfg.delta)));
    }
    let mut counterexamples = Vec::new();
    let mut inadmissible = Vec::new();
    let mut unconfirmed = Vec::new();
    let mut grid_points = 0;
    let mut unknowns = Vec::new();
    for a in &cfg.grid_a {
        for b in &cfg.grid_b {
            for d in &cfg.grid_d {
                grid_points += 1;
                let k = Constants::numeric(a.clone(), b.clone(), BigRational::zero(), d.clone());
                let sys = build_h_system(4, 2, &k)?;
                for &t in &cfg.values {
                    let num = pin_and_square(&sys, &BTreeMap::from([(var, t)]))?;
                    unknowns = num.unknowns().iter().map(Var::to_string).collect();
                    let set = multistart(&num, cfg.starts, &SamplerRanges::default(), cfg.seed, &NewtonOptions::default());
                    for root in &set.roots {
                        let refined = num.confirm_root(&root.values);
                        let mut x = if refined.confirmed { refined.x } else { root.values.clone() };
                        normalize(&num, &mut x);
                        let solution = num.solution(&x)?;
                        let record = SweepRoot {
                            a: a.clone(),
                            b: b.clone(),
                            d: d.clone(),
                            t,
                            inadmissible: admissibility(&solution),
                            confirmed: refined.confirmed,
                            solution,
                            residual: root.residual,
                            hits: root.hits,
                        };
                        match (record.confirmed, record.inadmissible) {
                            (false, _) => unconfirmed.push(record),
                            (true, None) => counterexamples.push(record),
                            (true, Some(_)) => inadmissible.push(record),
                        }
                    }
                }
            }
        }
    }
    let max_abs_sigma_inadmissible = inadmissible.iter().fold(0.0f64, |acc, r| acc.max(r.solution.sigma.abs()));
    Ok(NonexistenceReport {
        total_starts: grid_points * cfg.values.len() * cfg.starts,
        config: cfg.clone(),
        unknowns,
        grid_points,
        counterexamples,
        inadmissible,
        unconfirmed,
        max_abs_sigma_inadmissible,
    })
}

/// The quadratic system of a parameter set with `m, λ, σ` pinned, as used to
/// rediscover solution (4.1.2).
pub fn quadratic_system(p: &ParameterSet, pins: &BTreeMap<Var, f64>) -> Result<HSystemNumeric> {
    let k = Constants::numeric(p.a.clone(), p.b.clone(), p.c.clone(), p.d.clone());
    pin_and_square(&build_h_system(2, 2, &k)?, pins)
}
