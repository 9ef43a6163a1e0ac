use std::path::PathBuf;

use abcd_cnoidal::families::{figure, FamilyInputs, ParameterSet, Pm, Sign};
use abcd_cnoidal::poly::parse_rational;
use abcd_cnoidal::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "abcd-cnoidal", version, about = "Exact cnoidal traveling waves of the abcd Boussinesq system")]
pub struct Cli {
    /// Rerun a saved configuration: a bare run config or any JSON file this tool wrote.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for output files [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Stem of the output file names [default: derived from the command]
    #[arg(long, global = true, value_name = "STEM")]
    pub name: Option<String>,

    /// Seed for randomized commands [default: 42 for solve, 7 for nonexistence]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Build a closed-form solution; write JSON, CSV and SVG.
    Family(FamilyArgs),
    /// Check the ODE residual of a solution record.
    Verify(VerifyArgs),
    /// Report the ansatz shape allowed for a, b, c, d.
    Classify(ClassifyArgs),
    /// Solve a coefficient system numerically.
    Solve(SolveArgs),
    /// Run the forced-vanishing chains for ansatz degrees 3..=n.
    Reduce(ReduceArgs),
    /// Tabulate convergence toward a limiting family.
    Limit(LimitArgs),
    /// Multistart sweep for solutions with j1, j3 or k1 nonzero when c = 0.
    Nonexistence(NonexistenceArgs),
}

/// The constants `a, b, c, d` as `p/q` or decimal literals.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
}

fn required(flag: &str, value: &Option<String>) -> Result<BigRational, Error> {
    match value {
        Some(s) => parse_rational(s),
        None => Err(Error::Usage(format!("--{flag} is required"))),
    }
}

impl ParamArgs {
    /// All four constants; a missing one is a usage error unless `default`
    /// supplies it.
    pub fn resolve(&self, default: Option<&ParameterSet>) -> Result<ParameterSet, Error> {
        let pick = |flag: &str, v: &Option<String>, fallback: Option<&BigRational>| match (v, fallback) {
            (None, Some(q)) => Ok(q.clone()),
            _ => required(flag, v),
        };
        Ok(ParameterSet::new(
            pick("a", &self.a, default.map(|p| &p.a))?,
            pick("b", &self.b, default.map(|p| &p.b))?,
            pick("c", &self.c, default.map(|p| &p.c))?,
            pick("d", &self.d, default.map(|p| &p.d))?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauArg {
    Plus,
    Minus,
}

impl From<TauArg> for Sign {
    fn from(t: TauArg) -> Sign {
        match t {
            TauArg::Plus => Sign::Plus,
            TauArg::Minus => Sign::Minus,
        }
    }
}

/// A family member: either `--figure` or `--set` with its parameters.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct WaveArgs {
    /// Named figure preset (1a..4b, 5a, 6a, 6b).
    #[arg(long, conflicts_with = "set")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,

    /// Solution family.
    #[arg(long, value_parser = ["4.1.1", "4.1.2", "4.2.1", "4.2.2", "4.3"])]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,

    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,

    /// Elliptic modulus in (0, 1]; overrides the figure's value.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,

    /// Sign branch of set 4.1.2.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<SignArg>,

    /// First sign choice of set 4.1.1 [default: plus]
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau1: Option<TauArg>,

    /// Second sign choice of set 4.1.1 [default: plus]
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau2: Option<TauArg>,
}

fn need(flag: &str, v: Option<f64>) -> Result<f64, Error> {
    v.ok_or_else(|| Error::Usage(format!("--{flag} is required")))
}

impl WaveArgs {
    /// The modulus, checked before anything else so `m = 0` is reported as
    /// such whatever else is missing.
    pub fn modulus(&self) -> Result<Option<f64>, Error> {
        match self.m {
            Some(0.0) => Err(Error::Domain("m = 0 is excluded (the series degenerates to a cosine series)".into())),
            Some(m) if !(m > 0.0 && m <= 1.0) => Err(Error::Domain(format!("m must lie in (0, 1], got {m}"))),
            m => Ok(m),
        }
    }

    /// Family inputs plus the modulus (`None` if neither a figure nor `--m` gave one).
    pub fn resolve(&self) -> Result<(FamilyInputs, Option<f64>), Error> {
        let m = self.modulus()?;
        if let Some(name) = &self.figure {
            let fig = figure(name)?;
            return Ok((fig.inputs, Some(m.unwrap_or(fig.m))));
        }
        let set = self.set.as_deref().ok_or_else(|| Error::Usage("either --set or --figure is required".into()))?;
        let inputs = match set {
            "4.1.1" => FamilyInputs::S411 {
                params: self.params.resolve(None)?,
                tau1: self.tau1.unwrap_or(TauArg::Plus).into(),
                tau2: self.tau2.unwrap_or(TauArg::Plus).into(),
            },
            "4.1.2" => FamilyInputs::S412 {
                params: self.params.resolve(None)?,
                lambda: need("lambda", self.lambda)?,
                sigma: need("sigma", self.sigma)?,
                pm: match self.sign {
                    Some(SignArg::Top) => Pm::Top,
                    Some(SignArg::Bottom) => Pm::Bottom,
                    None => return Err(Error::Usage("--sign top|bottom is required for set 4.1.2".into())),
                },
            },
            "4.2.1" => FamilyInputs::S421 {
                params: self.params.resolve(None)?,
                lambda: need("lambda", self.lambda)?,
                sigma: need("sigma", self.sigma)?,
            },
            "4.2.2" => FamilyInputs::S422 {
                params: self.params.resolve(None)?,
                lambda: need("lambda", self.lambda)?,
                sigma: need("sigma", self.sigma)?,
            },
            "4.3" => FamilyInputs::S43 {
                d: required("d", &self.params.d)?,
                lambda: need("lambda", self.lambda)?,
                sigma: need("sigma", self.sigma)?,
            },
            other => return Err(Error::Usage(format!("unknown set {other}"))),
        };
        Ok((inputs, m))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FamilyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub wave: WaveArgs,

    /// Periods in the CSV and plot (m < 1).
    #[arg(long, default_value_t = 2)]
    pub periods: u32,

    /// Table rows per period.
    #[arg(long, default_value_t = 400)]
    pub points: usize,

    /// Residual samples per period.
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,

    /// Warn if a, b, c, d violate the physical relations.
    #[arg(long)]
    #[serde(default)]
    pub check_physical: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Solution JSON: a `family` or `solve` output, or a bare solution record.
    #[arg(long)]
    pub input: PathBuf,

    /// Constants; override the ones stored in the input.
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    #[arg(long, default_value_t = 1024)]
    pub samples: usize,

    /// Largest accepted relative residual.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    /// Warn if a, b, c, d violate the physical relations.
    #[arg(long)]
    #[serde(default)]
    pub check_physical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemArg {
    /// Quadratic eta and w (8 equations).
    Coeffs1,
    /// Quartic eta, quadratic w.
    Coeffs2,
    /// Quartic eta, quadratic w with j1 = j3 = k1 = 0.
    Coeffs2Reduced,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    /// Coefficient system [default with --seed-from: by the degree of the seed]
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemArg>,

    /// Pinned variables, e.g. m=0.70710678,lambda=1,sigma=1.
    #[arg(long, value_delimiter = ',', value_name = "VAR=VALUE", allow_hyphen_values = true)]
    #[serde(default)]
    pub pin: Vec<String>,

    /// Constants; with --seed-from they default to the ones stored in the seed file.
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    #[arg(long, default_value_t = 2000)]
    pub starts: usize,

    /// Run one Newton solve from this solution JSON instead of a multistart.
    #[arg(long, value_name = "FILE")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_from: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    /// c nonzero, a, b, d symbolic.
    CNonzero,
    /// c = 0, a, b, d symbolic.
    CZero,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReduceArgs {
    /// Preset assumptions on a, b, c, d.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeArg>,

    /// Each constant as a rational value or one of free, nonzero, zero; overrides --shape.
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,

    /// Largest ansatz degree checked (3..=8).
    #[arg(long, default_value_t = 5)]
    pub n_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitArg {
    /// Set 4.1.2 (bottom signs) against 4.2.2 as c -> 0.
    CToZero,
    /// Set 4.2.2 against 4.3 as a -> 0.
    AToZero,
    /// A family at m = 1 - eps against its sech form.
    MToOne,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LimitArgs {
    #[arg(long, value_enum)]
    pub kind: LimitArg,

    #[command(flatten)]
    #[serde(flatten)]
    pub wave: WaveArgs,

    /// Smallest exponent k of the 10^-k steps [default: 3 for c-to-zero, 1 otherwise]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<i32>,

    /// Largest exponent k [default: 8 for c-to-zero, 6 otherwise]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstrainedArg {
    J1,
    J3,
    K1,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct NonexistenceArgs {
    /// Coefficient held away from zero.
    #[arg(long, value_enum)]
    pub constrained: ConstrainedArg,

    /// Values the coefficient is pinned to [default: 0.1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub values: Vec<f64>,

    /// Exclusion band: every pinned value needs |t| >= delta [default: 1e-3]
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,

    /// Grid values of a [default: -1/2,1/3,1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub grid_a: Vec<String>,

    /// Grid values of b [default: -1,1/6,1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub grid_b: Vec<String>,

    /// Grid values of d [default: -1/2,1/3,2]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub grid_d: Vec<String>,

    /// Starts per grid point and pinned value.
    #[arg(long, default_value_t = 500)]
    pub starts: usize,
}

/// Everything needed to repeat a run; echoed into every JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub rng_seed: u64,
    pub out_dir: PathBuf,
    pub stem: String,
}

impl RunConfig {
    pub fn new(command: Command, cli: &Cli) -> Self {
        let rng_seed = cli.seed.unwrap_or(match command {
            Command::Solve(_) => 42,
            Command::Nonexistence(_) => 7,
            _ => 0,
        });
        let stem = cli.name.clone().unwrap_or_else(|| default_stem(&command));
        RunConfig { command, rng_seed, out_dir: cli.out_dir.clone().unwrap_or_else(|| ".".into()), stem }
    }
}

fn default_stem(command: &Command) -> String {
    match command {
        Command::Family(f) => match (&f.wave.figure, &f.wave.set) {
            (Some(name), _) => format!("fig{name}"),
            (None, Some(set)) => format!("family-{set}"),
            _ => "family".into(),
        },
        Command::Verify(_) => "verify".into(),
        Command::Classify(_) => "classify".into(),
        Command::Solve(_) => "solve".into(),
        Command::Reduce(_) => "reduce".into(),
        Command::Limit(_) => "limit".into(),
        Command::Nonexistence(n) => format!("nonexistence-{}", serde_json::to_value(n.constrained).unwrap().as_str().unwrap()),
    }
}
