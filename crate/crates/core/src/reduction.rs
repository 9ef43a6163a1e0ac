//! Which ansatz degrees a parameter set admits, and a machine check of the
//! forced-vanishing chains that cut a degree-`n` cn-series down to that shape.
//!
//! The checker works on the exact coefficient system. At every step it looks
//! for an equation `h_{p,q} = 0` of the form `g · G` where `g` is a monomial
//! and `G` cannot vanish (a nonzero constant, or a sum of same-signed terms
//! that are nonnegative for every admissible value with at least one strictly
//! positive). Every ansatz coefficient in `g` then spans one branch in which
//! that coefficient is zero. When no such equation exists it eliminates a
//! coefficient that occurs linearly with a constant multiplier. Branches are
//! explored exhaustively and the chain passes when every feasible branch ends
//! inside the shape predicted by [`classify_ansatz`].

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cn_expr::{build_h_system, Component, Constants, CnExpression, HSystem};
use crate::error::{Error, Result};
use crate::families::ParameterSet;
use crate::poly::{Monomial, RationalPoly, Var};

const MAX_BRANCHES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeKind {
    GenericQuadratic,
    SemiTrivialEtaConstant,
    QuarticEtaQuadraticW,
    TrivialOnly,
}

/// Highest cn powers a non-trivial solution can carry in `η` and `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzShape {
    pub kind: ShapeKind,
    pub max_eta_degree: u32,
    pub max_w_degree: u32,
}

impl AnsatzShape {
    pub fn of(kind: ShapeKind) -> Self {
        let (max_eta_degree, max_w_degree) = match kind {
            ShapeKind::GenericQuadratic => (2, 2),
            ShapeKind::SemiTrivialEtaConstant => (0, 2),
            ShapeKind::QuarticEtaQuadraticW => (4, 2),
            ShapeKind::TrivialOnly => (0, 0),
        };
        AnsatzShape { kind, max_eta_degree, max_w_degree }
    }
}

/// Shape table for the largest admissible ansatz degrees, with exact zero tests.
pub fn classify_ansatz(p: &ParameterSet) -> AnsatzShape {
    let kind = match (p.c.is_zero(), p.a.is_zero() && p.b.is_zero(), p.b.is_zero() && p.d.is_zero()) {
        (false, false, _) => ShapeKind::GenericQuadratic,
        (false, true, _) => ShapeKind::SemiTrivialEtaConstant,
        (true, _, false) => ShapeKind::QuarticEtaQuadraticW,
        (true, _, true) => ShapeKind::TrivialOnly,
    };
    AnsatzShape::of(kind)
}

/// What is assumed about one of the constants `a, b, c, d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSpec {
    /// Exactly zero.
    Zero,
    /// Symbolic and assumed nonzero.
    NonZero,
    /// Symbolic with no assumption.
    Free,
    /// A fixed rational value.
    Value(#[serde(with = "crate::families::rational_serde")] BigRational),
}

impl ConstantSpec {
    fn fixed(&self) -> Option<BigRational> {
        match self {
            ConstantSpec::Zero => Some(BigRational::zero()),
            ConstantSpec::Value(q) => Some(q.clone()),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.fixed().is_some_and(|q| q.is_zero())
    }

    fn is_nonzero(&self) -> bool {
        match self {
            ConstantSpec::NonZero => true,
            ConstantSpec::Value(q) => !q.is_zero(),
            _ => false,
        }
    }
}

/// Assumptions on `a, b, c, d` for a termination check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbcdSpec {
    pub a: ConstantSpec,
    pub b: ConstantSpec,
    pub c: ConstantSpec,
    pub d: ConstantSpec,
}

impl AbcdSpec {
    /// The `c ≠ 0` case with `a, b, d` symbolic.
    pub fn c_nonzero() -> Self {
        AbcdSpec { a: ConstantSpec::Free, b: ConstantSpec::Free, c: ConstantSpec::NonZero, d: ConstantSpec::Free }
    }

    /// The `c = 0` case with `a, b, d` symbolic.
    pub fn c_zero() -> Self {
        AbcdSpec { a: ConstantSpec::Free, b: ConstantSpec::Free, c: ConstantSpec::Zero, d: ConstantSpec::Free }
    }

    pub fn from_parameters(p: &ParameterSet) -> Self {
        AbcdSpec {
            a: ConstantSpec::Value(p.a.clone()),
            b: ConstantSpec::Value(p.b.clone()),
            c: ConstantSpec::Value(p.c.clone()),
            d: ConstantSpec::Value(p.d.clone()),
        }
    }

    fn get(&self, v: Var) -> &ConstantSpec {
        match v {
            Var::A => &self.a,
            Var::B => &self.b,
            Var::C => &self.c,
            Var::D => &self.d,
            _ => unreachable!(),
        }
    }

    fn constants(&self) -> Constants {
        Constants { a: self.a.fixed(), b: self.b.fixed(), c: self.c.fixed(), d: self.d.fixed() }
    }

    /// The predicted shape. Free constants count as possibly
    /// nonzero, so the prediction is the largest shape compatible with the
    /// assumptions. `c` itself must be decided.
    pub fn expected_shape(&self) -> Result<AnsatzShape> {
        let c_zero = match (&self.c, self.c.is_zero()) {
            (ConstantSpec::Free, _) => return Err(Error::Usage("c must be zero, nonzero or a value".into())),
            (_, z) => z,
        };
        let kind = if !c_zero {
            if self.a.is_zero() && self.b.is_zero() {
                ShapeKind::SemiTrivialEtaConstant
            } else {
                ShapeKind::GenericQuadratic
            }
        } else if self.b.is_zero() && self.d.is_zero() {
            ShapeKind::TrivialOnly
        } else {
            ShapeKind::QuarticEtaQuadraticW
        };
        Ok(AnsatzShape::of(kind))
    }

    /// Nonzero for every admissible value (λ, m > 0 and σ ≠ 0 always).
    fn assumed_nonzero(&self, v: Var) -> bool {
        match v {
            Var::Lambda | Var::M | Var::Sigma => true,
            Var::A | Var::B | Var::C | Var::D => self.get(v).is_nonzero(),
            _ => false,
        }
    }
}

/// One coefficient fixed by the chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcedStep {
    /// The coefficient that was fixed, e.g. `k4`.
    pub var: String,
    /// Its value: `0`, or an expression for a linear elimination.
    pub value: String,
    /// The equation that forced it, e.g. `h2,7`.
    pub by: String,
    /// That equation at the moment it was used.
    pub equation: String,
    pub rule: StepRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `g·G = 0` with `G` nonvanishing and exactly one coefficient in `g`.
    Forced,
    /// As above with several coefficients in `g`; one branch per coefficient.
    Branch,
    /// Linear elimination of a coefficient with a constant multiplier.
    Eliminate,
}

/// One fully explored branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchTrace {
    pub steps: Vec<ForcedStep>,
    /// `None` when some equation became a nonvanishing constant, so the branch
    /// has no solution at all.
    pub terminal: Option<(u32, u32)>,
    /// The equation that proved the branch empty, if any.
    pub contradiction: Option<String>,
}

/// The chains for one ansatz degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeRun {
    pub n: u32,
    pub branches: Vec<BranchTrace>,
    /// Maximum terminal degrees over the feasible branches.
    pub terminal: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerminationReport {
    pub spec: AbcdSpec,
    pub expected: AnsatzShape,
    pub runs: Vec<DegreeRun>,
    pub notes: Vec<String>,
}

impl TerminationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone)]
struct State {
    system: HSystem,
    fixed: BTreeMap<Var, RationalPoly>,
    steps: Vec<ForcedStep>,
}

enum Action {
    /// Branch on each listed coefficient being zero.
    Zero { vars: Vec<Var>, by: (usize, usize), equation: String },
    Eliminate { var: Var, value: RationalPoly, by: (usize, usize), equation: String },
    Contradiction { by: (usize, usize), equation: String },
}

/// True when `poly` cannot vanish for any admissible values.
fn nonvanishing(poly: &RationalPoly, spec: &AbcdSpec) -> bool {
    if poly.is_zero() {
        return false;
    }
    let mut sign = None;
    let mut strictly_positive = false;
    for (mono, q) in poly.terms() {
        let s = q.is_positive();
        if *sign.get_or_insert(s) != s {
            return false;
        }
        let mut strict = true;
        for &(v, e) in mono.powers() {
            let positive = matches!(v, Var::Lambda | Var::M);
            if e % 2 == 1 && !positive {
                return false;
            }
            strict &= spec.assumed_nonzero(v);
        }
        strictly_positive |= strict;
    }
    strictly_positive
}

/// If `poly = g·G` with `G` nonvanishing and every non-coefficient variable of
/// `g` assumed nonzero, returns the ansatz coefficients dividing `g`.
fn forcing_split(poly: &RationalPoly, spec: &AbcdSpec) -> Option<Vec<Var>> {
    let g = poly.monomial_content();
    let mut coefficients = Vec::new();
    for &(v, _) in g.powers() {
        match v {
            Var::J(_) | Var::K(_) => coefficients.push(v),
            _ if spec.assumed_nonzero(v) => {}
            _ => return None,
        }
    }
    let rest = poly.div_monomial(&g)?;
    nonvanishing(&rest, spec).then_some(coefficients)
}

/// `poly = α·v + rest` with `v` absent from `rest` and `α` a constant.
fn linear_in(poly: &RationalPoly) -> Option<(Var, RationalPoly)> {
    let mut candidates: Vec<Var> = poly.vars().into_iter().filter(|v| matches!(v, Var::J(_) | Var::K(_))).collect();
    candidates.sort_by(|x, y| y.cmp(x));
    for v in candidates {
        let mut alpha = None;
        let mut occurrences = 0;
        for (mono, q) in poly.terms() {
            if mono.degree_in(v) > 0 {
                occurrences += 1;
                if *mono == Monomial::var(v) {
                    alpha = Some(q.clone());
                }
            }
        }
        if let (1, Some(alpha)) = (occurrences, alpha) {
            let rest = poly - &RationalPoly::term(alpha.clone(), Monomial::var(v));
            return Some((v, rest.scale(&(-BigRational::one() / alpha))));
        }
    }
    None
}

fn label(p: usize, q: usize) -> String {
    format!("h{p},{q}")
}

fn next_action(system: &HSystem, spec: &AbcdSpec) -> Option<Action> {
    let leading = |p: usize| system.equations().into_iter().find(|&(pp, _, _)| pp == p);
    let mut ordered: Vec<(usize, usize, &RationalPoly)> = Vec::new();
    ordered.extend(leading(2));
    ordered.extend(leading(1));
    let mut all = system.equations();
    all.sort_by_key(|&(p, q, _)| (std::cmp::Reverse(p), std::cmp::Reverse(q)));
    ordered.extend(all.iter().copied());
    for &(p, q, poly) in &ordered {
        if let Some(vars) = forcing_split(poly, spec) {
            let equation = poly.to_string();
            return Some(if vars.is_empty() {
                Action::Contradiction { by: (p, q), equation }
            } else {
                Action::Zero { vars, by: (p, q), equation }
            });
        }
    }
    for &(p, q, poly) in &all {
        if let Some((var, value)) = linear_in(poly) {
            return Some(Action::Eliminate { var, value, by: (p, q), equation: poly.to_string() });
        }
    }
    None
}

fn live_degree(n: u32, fixed: &BTreeMap<Var, RationalPoly>, which: Component) -> u32 {
    (0..=n)
        .rev()
        .find(|&r| {
            let v = match which {
                Component::Eta => Var::J(r),
                Component::W => Var::K(r),
            };
            fixed.get(&v).map_or(true, |val| !val.is_zero())
        })
        .unwrap_or(0)
}

fn run_degree(n: u32, spec: &AbcdSpec) -> Result<DegreeRun> {
    let system = build_h_system(n, n, &spec.constants())?;
    let mut stack = vec![State { system, fixed: BTreeMap::new(), steps: Vec::new() }];
    let mut branches = Vec::new();
    while let Some(mut state) = stack.pop() {
        if branches.len() + stack.len() > MAX_BRANCHES {
            return Err(Error::ChainBroken(format!("more than {MAX_BRANCHES} branches at n = {n}")));
        }
        match next_action(&state.system, spec) {
            None => {
                let terminal = (live_degree(n, &state.fixed, Component::Eta), live_degree(n, &state.fixed, Component::W));
                branches.push(BranchTrace { steps: state.steps, terminal: Some(terminal), contradiction: None });
            }
            Some(Action::Contradiction { by, equation }) => {
                branches.push(BranchTrace {
                    steps: state.steps,
                    terminal: None,
                    contradiction: Some(format!("{} = {equation}", label(by.0, by.1))),
                });
            }
            Some(Action::Zero { vars, by, equation }) => {
                let rule = if vars.len() == 1 { StepRule::Forced } else { StepRule::Branch };
                // Pushed in reverse so the first listed coefficient is explored first.
                for &v in vars.iter().rev() {
                    let mut next = state.clone();
                    next.system = next.system.subs(v, &RationalPoly::zero());
                    for val in next.fixed.values_mut() {
                        *val = val.subs(v, &RationalPoly::zero());
                    }
                    next.fixed.insert(v, RationalPoly::zero());
                    next.steps.push(ForcedStep {
                        var: v.to_string(),
                        value: "0".into(),
                        by: label(by.0, by.1),
                        equation: equation.clone(),
                        rule,
                    });
                    stack.push(next);
                }
            }
            Some(Action::Eliminate { var, value, by, equation }) => {
                state.system = state.system.subs(var, &value);
                for val in state.fixed.values_mut() {
                    *val = val.subs(var, &value);
                }
                state.steps.push(ForcedStep {
                    var: var.to_string(),
                    value: value.to_string(),
                    by: label(by.0, by.1),
                    equation,
                    rule: StepRule::Eliminate,
                });
                state.fixed.insert(var, value);
                stack.push(state);
            }
        }
    }
    let terminal = branches
        .iter()
        .filter_map(|b| b.terminal)
        .fold((0, 0), |(e, w), (x, y)| (e.max(x), w.max(y)));
    Ok(DegreeRun { n, branches, terminal })
}

/// Runs the forced-vanishing chains for every degree `3..=n_max` and checks
/// that each one ends inside the predicted shape.
pub fn verify_termination(spec: &AbcdSpec, n_max: u32) -> Result<TerminationReport> {
    if !(3..=8).contains(&n_max) {
        return Err(Error::Usage(format!("n_max must lie in 3..=8, got {n_max}")));
    }
    let expected = spec.expected_shape()?;
    let mut notes = Vec::new();
    if spec.c.is_zero() && spec.b.is_zero() && spec.d.is_zero() {
        notes.push("the c = 0, b = d = 0 case is checked under c = 0; the original proof text states c != 0 there".into());
    }
    let mut runs = Vec::new();
    for n in 3..=n_max {
        let run = run_degree(n, spec)?;
        let (e, w) = run.terminal;
        if e > expected.max_eta_degree || w > expected.max_w_degree {
            return Err(Error::ChainBroken(format!(
                "degree {n} chain stops at ({e}, {w}), outside the expected ({}, {})",
                expected.max_eta_degree, expected.max_w_degree
            )));
        }
        runs.push(run);
    }
    Ok(TerminationReport { spec: spec.clone(), expected, runs, notes })
}

/// Highest cn power of each term of the traveling-wave equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RhoTable {
    pub eta_1: u32,
    pub w_1: u32,
    pub eta_3: u32,
    pub w_3: u32,
    pub eta_w_1: u32,
    pub w_w_1: u32,
}

/// ρ values read off the expanded expressions for `η = Σ_{0}^{n_eta} j_r cn^r`,
/// `w = Σ_{0}^{n_w} k_r cn^r` with `n_eta, n_w ≥ 1`.
pub fn rho_table(n_eta: u32, n_w: u32) -> RhoTable {
    let eta = CnExpression::ansatz(n_eta, Component::Eta);
    let w = CnExpression::ansatz(n_w, Component::W);
    let rho = |e: CnExpression| e.rho().expect("nonzero for positive degrees") as u32;
    let d3 = |e: &CnExpression| e.differentiate().differentiate().differentiate();
    RhoTable {
        eta_1: rho(eta.differentiate()),
        w_1: rho(w.differentiate()),
        eta_3: rho(d3(&eta)),
        w_3: rho(d3(&w)),
        eta_w_1: rho(eta.multiply(&w).differentiate()),
        w_w_1: rho(w.multiply(&w.differentiate())),
    }
}

/// The closed-form ρ table used in the termination proofs.
pub fn rho_closed_form(n_eta: u32, n_w: u32) -> RhoTable {
    RhoTable {
        eta_1: n_eta - 1,
        w_1: n_w - 1,
        eta_3: n_eta + 1,
        w_3: n_w + 1,
        eta_w_1: n_eta + n_w - 1,
        w_w_1: 2 * n_w - 1,
    }
}
