use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use abcd_cnoidal::cn_expr::{build_h_system, Constants};
use abcd_cnoidal::elliptic::{complete_k, Modulus};
use abcd_cnoidal::families::{check_physical_constraint, ParameterSet, SolutionParams};
use abcd_cnoidal::poly::{parse_rational, Var};
use abcd_cnoidal::reduction::{classify_ansatz, verify_termination, AbcdSpec, AnsatzShape, ConstantSpec};
use abcd_cnoidal::residual::{limit_consistency, ode_residual, periodicity_check, LimitKind, PeriodicityReport, ResidualReport};
use abcd_cnoidal::solver::{
    multistart, pin_and_square, reproduce_nonexistence, solve_newton, BranchSet, HSystemNumeric, NewtonOptions,
    NonexistenceConfig, Root, SamplerRanges,
};
use abcd_cnoidal::Error;
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::*;
use crate::output;

/// Outcome of `--check-physical`.
#[derive(Debug, Serialize, Deserialize)]
pub struct PhysicalCheck {
    pub theta: Option<f64>,
    pub warning: Option<String>,
}

fn physical(p: &ParameterSet) -> PhysicalCheck {
    match check_physical_constraint(p) {
        Ok(theta) => PhysicalCheck { theta: Some(theta), warning: None },
        Err(e) => {
            eprintln!("warning: {e}");
            PhysicalCheck { theta: None, warning: Some(e.to_string()) }
        }
    }
}

/// A solution together with the constants it belongs to.
#[derive(Debug, Serialize, Deserialize)]
pub struct FamilyResult {
    pub parameters: ParameterSet,
    pub solution: SolutionParams,
    pub residual: ResidualReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalCheck>,
}

pub fn family(cfg: &RunConfig, args: &FamilyArgs) -> Result<()> {
    let (inputs, m) = args.wave.resolve()?;
    let m = m.ok_or_else(|| Error::Usage("--m is required".into()))?;
    let solution = inputs.build(m)?;
    let parameters = inputs.parameters();
    let residual = ode_residual(&solution, &parameters, args.samples)?;
    let physical = args.check_physical.then(|| physical(&parameters));

    let n = args.points.max(2) * args.periods.max(1) as usize;
    let (start, length) = if m < 1.0 {
        let period = 4.0 * complete_k(Modulus::new(m)?)? / solution.lambda;
        (0.0, period * args.periods.max(1) as f64)
    } else {
        (-10.0 / solution.lambda, 20.0 / solution.lambda)
    };
    let rows = (0..=n)
        .map(|i| {
            let xi = start + length * i as f64 / n as f64;
            solution.profile(xi).map(|(eta, w)| (xi, eta, w))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let title = format!("set {}, m = {m}, λ = {}, σ = {}", set_name(&solution), solution.lambda, solution.sigma);
    let result = FamilyResult { parameters, solution, residual, physical };
    println!("{:?} j = {:?}", result.solution.family, result.solution.j);
    println!("{:?} k = {:?}", result.solution.family, result.solution.k);
    println!("lambda = {}, sigma = {}, m = {}", result.solution.lambda, result.solution.sigma, result.solution.m);
    println!("relative residual {:.3e} over {} samples", result.residual.relative, result.residual.n_samples);
    for p in [output::json(cfg, &result)?, output::csv(cfg, &rows)?, output::svg(cfg, &title, &rows)?] {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn set_name(s: &SolutionParams) -> String {
    serde_json::to_value(s.family).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

/// Reads a solution record and, when present, its constants. Accepts the JSON
/// written by `family` and `solve --seed-from`, or a bare solution.
fn load_solution(path: &Path) -> Result<(SolutionParams, Option<ParameterSet>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let body = value.get("result").unwrap_or(&value);
    if let Some(sol) = body.get("solution") {
        let solution = serde_json::from_value(sol.clone()).context("reading the solution record")?;
        let parameters = match body.get("parameters") {
            Some(p) => Some(serde_json::from_value(p.clone()).context("reading the parameters")?),
            None => None,
        };
        return Ok((solution, parameters));
    }
    Ok((serde_json::from_value(body.clone()).context("reading the solution record")?, None))
}

#[derive(Debug, Serialize)]
pub struct VerifyResult {
    pub parameters: ParameterSet,
    pub solution: SolutionParams,
    pub residual: ResidualReport,
    pub periodicity: Option<PeriodicityReport>,
    pub tol: f64,
    pub passed: bool,
}

/// Residual beyond the tolerance; exits with status 1.
#[derive(Debug)]
pub struct Rejected(pub String);

impl std::fmt::Display for Rejected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Rejected {}

pub fn verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<()> {
    let (solution, stored) = load_solution(&args.input)?;
    let parameters = args.params.resolve(stored.as_ref())?;
    let residual = ode_residual(&solution, &parameters, args.samples)?;
    let periodicity = if solution.m < 1.0 { Some(periodicity_check(&solution)?) } else { None };
    let passed = residual.relative <= args.tol;
    println!(
        "relative residual {:.3e} (|E1| {:.3e}, |E2| {:.3e}, scale {:.3e}) over {} samples",
        residual.relative, residual.max_abs_eq1, residual.max_abs_eq2, residual.scale, residual.n_samples
    );
    if let Some(p) = &periodicity {
        println!("period {:.12}, periodicity defect {:.3e}, half-periodic {}", p.period, p.defect, p.half_periodic);
    }
    let result = VerifyResult { parameters, solution, residual, periodicity, tol: args.tol, passed };
    println!("wrote {}", output::json(cfg, &result)?.display());
    if passed {
        println!("PASS (tolerance {:e})", args.tol);
        Ok(())
    } else {
        Err(Rejected(format!("relative residual {:.3e} exceeds {:e}", result.residual.relative, args.tol)).into())
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyResult {
    pub parameters: ParameterSet,
    pub shape: AnsatzShape,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalCheck>,
}

pub fn classify(cfg: &RunConfig, args: &ClassifyArgs) -> Result<()> {
    let parameters = args.params.resolve(None)?;
    let shape = classify_ansatz(&parameters);
    let physical = args.check_physical.then(|| physical(&parameters));
    println!("{:?} (eta degree <= {}, w degree <= {})", shape.kind, shape.max_eta_degree, shape.max_w_degree);
    println!("wrote {}", output::json(cfg, &ClassifyResult { parameters, shape, physical })?.display());
    Ok(())
}

fn parse_pins(pins: &[String]) -> Result<BTreeMap<Var, f64>> {
    pins.iter()
        .map(|p| {
            let (name, value) = p.split_once('=').ok_or_else(|| Error::Usage(format!("pin {p:?} is not VAR=VALUE")))?;
            let v: Var = name.trim().parse()?;
            let x: f64 = value.trim().parse().map_err(|_| Error::Parse(format!("bad pin value in {p:?}")))?;
            Ok((v, x))
        })
        .collect()
}

fn numeric_system(system: SystemArg, p: &ParameterSet, mut pins: BTreeMap<Var, f64>) -> Result<HSystemNumeric> {
    let k = Constants::numeric(p.a.clone(), p.b.clone(), p.c.clone(), p.d.clone());
    let sys = match system {
        SystemArg::Coeffs1 => build_h_system(2, 2, &k)?,
        SystemArg::Coeffs2 => build_h_system(4, 2, &k)?,
        SystemArg::Coeffs2Reduced => {
            for v in [Var::J(1), Var::J(3), Var::K(1)] {
                pins.entry(v).or_insert(0.0);
            }
            build_h_system(4, 2, &k)?
        }
    };
    Ok(pin_and_square(&sys, &pins)?)
}

#[derive(Debug, Serialize)]
pub struct SeededSolve {
    pub system: SystemArg,
    pub parameters: ParameterSet,
    pub unknowns: Vec<String>,
    pub pinned: BTreeMap<String, f64>,
    /// `1e-12` times the largest term of the system at the seed.
    pub tol: f64,
    pub root: Root,
    pub solution: SolutionParams,
}

#[derive(Debug, Serialize)]
pub struct MultistartResult {
    pub system: SystemArg,
    pub parameters: ParameterSet,
    pub branches: BranchSet,
    /// The non-trivial roots as solution records, in the order of `branches.roots`.
    pub solutions: Vec<SolutionParams>,
}

pub fn solve(cfg: &RunConfig, args: &SolveArgs) -> Result<()> {
    let mut pins = parse_pins(&args.pin)?;
    if let Some(path) = &args.seed_from {
        let (seed, stored) = load_solution(path)?;
        let parameters = args.params.resolve(stored.as_ref())?;
        let system = args.system.unwrap_or(if seed.j[3] != 0.0 || seed.j[4] != 0.0 { SystemArg::Coeffs2 } else { SystemArg::Coeffs1 });
        if pins.is_empty() {
            pins.insert(Var::M, seed.m);
        }
        let sys = numeric_system(system, &parameters, pins)?;
        let x0 = sys.seed_from(&seed);
        let opts = NewtonOptions { tol: NewtonOptions::default().tol * sys.term_scale(&x0).max(1.0), ..Default::default() };
        let root = solve_newton(&sys, &x0, &opts)?;
        let solution = sys.solution(&root.x)?;
        println!(
            "converged in {} iterations, residual {:.3e}, distance to seed {:.3e}",
            root.iterations,
            root.residual,
            solution.coefficient_distance(&seed)
        );
        let result = SeededSolve {
            system,
            parameters,
            unknowns: sys.unknowns().iter().map(Var::to_string).collect(),
            pinned: sys.pinned().iter().map(|(v, x)| (v.to_string(), *x)).collect(),
            tol: opts.tol,
            root,
            solution,
        };
        println!("wrote {}", output::json(cfg, &result)?.display());
        return Ok(());
    }

    let system = args.system.ok_or_else(|| Error::Usage("--system is required without --seed-from".into()))?;
    let parameters = args.params.resolve(None)?;
    let sys = numeric_system(system, &parameters, pins)?;
    let branches = multistart(&sys, args.starts, &SamplerRanges::default(), cfg.rng_seed, &NewtonOptions::default());
    let solutions = branches.non_trivial().map(|r| sys.solution(&r.values)).collect::<Result<Vec<_>, _>>()?;
    println!(
        "{} starts: {} trivial hits, {} diverged, {} singular, {} non-trivial roots",
        branches.n_starts,
        branches.trivial_hits,
        branches.diverged,
        branches.singular,
        solutions.len()
    );
    println!("unknowns: {}", branches.unknowns.join(", "));
    for (r, s) in branches.non_trivial().zip(&solutions) {
        println!("  hits {:4}  residual {:.1e}  j = {:?}  k = {:?}", r.hits, r.residual, s.j, s.k);
    }
    let result = MultistartResult { system, parameters, branches, solutions };
    println!("wrote {}", output::json(cfg, &result)?.display());
    Ok(())
}

fn constant_spec(flag: &str, text: &str) -> Result<ConstantSpec> {
    Ok(match text {
        "free" => ConstantSpec::Free,
        "nonzero" => ConstantSpec::NonZero,
        "zero" => ConstantSpec::Zero,
        _ => ConstantSpec::Value(parse_rational(text).with_context(|| format!("--{flag}"))?),
    })
}

pub fn reduce(cfg: &RunConfig, args: &ReduceArgs) -> Result<()> {
    let mut spec = match args.shape {
        Some(ShapeArg::CNonzero) => AbcdSpec::c_nonzero(),
        Some(ShapeArg::CZero) => AbcdSpec::c_zero(),
        None if args.params.c.is_some() => AbcdSpec::c_nonzero(),
        None => return Err(Error::Usage("give --shape or at least --c".into()).into()),
    };
    for (flag, value, slot) in [
        ("a", &args.params.a, &mut spec.a),
        ("b", &args.params.b, &mut spec.b),
        ("c", &args.params.c, &mut spec.c),
        ("d", &args.params.d, &mut spec.d),
    ] {
        if let Some(text) = value {
            *slot = constant_spec(flag, text)?;
        }
    }
    let report = verify_termination(&spec, args.n_max)?;
    println!(
        "expected shape {:?} (eta <= {}, w <= {})",
        report.expected.kind, report.expected.max_eta_degree, report.expected.max_w_degree
    );
    for run in &report.runs {
        let first: Vec<String> = run.branches[0].steps.iter().take(4).map(|s| format!("{}={} by {}", s.var, s.value, s.by)).collect();
        println!("  n = {}: {} branch(es), ends at {:?}; {} ...", run.n, run.branches.len(), run.terminal, first.join(", "));
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    println!("wrote {}", output::json(cfg, &report)?.display());
    Ok(())
}

pub fn limit(cfg: &RunConfig, args: &LimitArgs) -> Result<()> {
    let w = &args.wave;
    let need = |flag: &str, v: Option<f64>| v.ok_or_else(|| Error::Usage(format!("--{flag} is required")));
    let zero = parse_rational("0")?;
    let (kind, range) = match args.kind {
        LimitArg::CToZero => {
            let mut params = w.params.clone();
            params.c.get_or_insert("0".into());
            let kind = LimitKind::CToZero {
                params: params.resolve(None)?,
                lambda: need("lambda", w.lambda)?,
                sigma: need("sigma", w.sigma)?,
                m: need("m", w.modulus()?)?,
            };
            (kind, (3, 8))
        }
        LimitArg::AToZero => {
            let mut params = w.params.clone();
            params.a.get_or_insert("0".into());
            let mut params = params.resolve(None)?;
            params.a = zero;
            let kind = LimitKind::AToZero {
                params,
                lambda: need("lambda", w.lambda)?,
                sigma: need("sigma", w.sigma)?,
                m: need("m", w.modulus()?)?,
            };
            (kind, (1, 6))
        }
        LimitArg::MToOne => (LimitKind::MToOne { inputs: w.resolve()?.0 }, (1, 6)),
    };
    let table = limit_consistency(&kind, args.from.unwrap_or(range.0)..=args.to.unwrap_or(range.1))?;
    println!("{}: {:>10}  {:>10}", table.kind, "parameter", "error");
    for row in &table.rows {
        println!("{:>14.1e}  {:>10.3e}", row.parameter, row.error);
    }
    println!(
        "order {}, monotone {}, at limit {}",
        table.order.map_or("-".into(), |o| format!("{o:.3}")),
        table.monotone,
        table.at_limit.map_or("-".into(), |e| format!("{e:.3e}"))
    );
    println!("wrote {}", output::json(cfg, &table)?.display());
    Ok(())
}

pub fn nonexistence(cfg: &RunConfig, args: &NonexistenceArgs) -> Result<()> {
    let var = match args.constrained {
        ConstrainedArg::J1 => Var::J(1),
        ConstrainedArg::J3 => Var::J(3),
        ConstrainedArg::K1 => Var::K(1),
    };
    let mut nc = NonexistenceConfig::standard(var);
    let grid = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>();
    if !args.values.is_empty() {
        nc.values = args.values.clone();
    }
    if let Some(delta) = args.delta {
        nc.delta = delta;
    }
    for (given, slot) in [(&args.grid_a, &mut nc.grid_a), (&args.grid_b, &mut nc.grid_b), (&args.grid_d, &mut nc.grid_d)] {
        if !given.is_empty() {
            *slot = grid(given)?;
        }
    }
    nc.starts = args.starts;
    nc.seed = cfg.rng_seed;
    let report = reproduce_nonexistence(&nc)?;
    println!(
        "{} = t with t in {:?}: {} grid points, {} starts, unknowns {}",
        nc.constrained,
        nc.values,
        report.grid_points,
        report.total_starts,
        report.unknowns.join(", ")
    );
    println!(
        "{} admissible roots, {} inadmissible roots (max |sigma| {:.1e}), {} unconfirmed near-misses",
        report.counterexamples.len(),
        report.inadmissible.len(),
        report.max_abs_sigma_inadmissible,
        report.unconfirmed.len()
    );
    for r in &report.counterexamples {
        println!("  root at (a, b, d) = ({}, {}, {}): {:?}", r.a, r.b, r.d, r.solution);
    }
    println!("wrote {}", output::json(cfg, &report)?.display());
    Ok(())
}
