//! Flag parsing into a validated, canonical [`RunConfig`].

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinmr::analysis::{linspace, Condition, DEFAULT_TOL};
use spinmr::closed_form::GRID_SEED;
use spinmr::format::g17;
use spinmr::{validate_params, Error, MeasurementParams, SpinSystem};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "text",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableSelection {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

impl TableSelection {
    fn name(self) -> &'static str {
        match self {
            TableSelection::One => "1",
            TableSelection::Two => "2",
            TableSelection::Three => "3",
            TableSelection::All => "all",
        }
    }
}

/// γ grid as `start:stop:count` (inclusive, evenly spaced) or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Range { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Range { start, stop, count } => linspace(*start, *stop, *count),
            GridSpec::List(v) => v.clone(),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Range { start, stop, count } => write!(f, "{}:{}:{}", g17(*start), g17(*stop), count),
            GridSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|&x| g17(x)).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| -> Result<f64, String> {
            let x: f64 = t.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("`{t}` is not finite"))
            }
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, count] = parts[..] else {
                return Err("range grid must be start:stop:count".into());
            };
            let count: usize = count.trim().parse().map_err(|_| format!("`{count}` is not a point count"))?;
            if count == 0 {
                return Err("grid needs at least one point".into());
            }
            Ok(GridSpec::Range { start: num(start)?, stop: num(stop)?, count })
        } else {
            let v = s.split(',').map(num).collect::<Result<Vec<f64>, String>>()?;
            Ok(GridSpec::List(v))
        }
    }
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    s.parse::<Condition>().map_err(|e| e.to_string())
}

fn parse_integer_j(s: &str) -> Result<u32, String> {
    s.parse::<u32>()
        .map_err(|_| format!("`{s}` is not a non-negative integer; use --two-j for half-integer spins"))
}

#[derive(Debug, Parser)]
#[command(name = "spinmr", version, about = "Macrorealism tests with biased unsharp spin measurements")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct SpinArg {
    /// Twice the spin quantum number.
    #[arg(long = "two-j", required_unless_present = "j", conflicts_with = "j")]
    two_j: Option<u32>,
    /// Integer spin quantum number (shorthand for --two-j 2j).
    #[arg(long = "j", value_parser = parse_integer_j)]
    j: Option<u32>,
}

impl SpinArg {
    fn two_j(&self) -> u32 {
        self.two_j.or(self.j.map(|j| 2 * j)).expect("clap enforces one of --two-j/--j")
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap on parallel workers.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// K_LGI, K_WLGI and K_NSIT at one (λ, γ).
    #[command(allow_negative_numbers = true)]
    Evaluate {
        #[command(flatten)]
        spin: SpinArg,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Threshold sharpness λ_th at fixed γ.
    #[command(allow_negative_numbers = true)]
    Threshold {
        #[command(flatten)]
        spin: SpinArg,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// lgi, wlgi or nsit; all three when omitted.
        #[arg(long, value_parser = parse_condition)]
        condition: Option<Condition>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// All three functionals over a γ grid at fixed λ.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        spin: SpinArg,
        #[arg(long)]
        lambda: f64,
        /// `start:stop:count` or `g1,g2,...`.
        #[arg(long = "gamma-grid")]
        gamma_grid: GridSpec,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Recompute the reference threshold and magnitude tables.
    Reproduce {
        #[arg(long, value_enum, default_value_t = TableSelection::All)]
        table: TableSelection,
        /// Also rerun the magnitude table at γ = 1/(4j), 1/(2j).
        #[arg(long)]
        exact_gamma: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the closed-form P(Q1+,Q2-) and K_LGI against the simulator.
    ValidateFormulas {
        /// Random (λ, γ) points per spin on the j = 1..5 grid.
        #[arg(long, default_value_t = 20)]
        per_spin: usize,
        #[arg(long, default_value_t = GRID_SEED)]
        seed: u64,
        /// Exit with status 4 if any point mismatches.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Evaluate,
    Threshold,
    Sweep,
    Reproduce,
    ValidateFormulas,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Evaluate => "evaluate",
            CommandKind::Threshold => "threshold",
            CommandKind::Sweep => "sweep",
            CommandKind::Reproduce => "reproduce",
            CommandKind::ValidateFormulas => "validate-formulas",
        }
    }
}

/// Fully resolved invocation. Fields not used by `command` are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub two_j: Option<u32>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub condition: Option<Condition>,
    pub gamma_grid: Option<GridSpec>,
    pub tol: Option<f64>,
    pub table: Option<TableSelection>,
    pub exact_gamma: bool,
    pub per_spin: Option<usize>,
    pub seed: Option<u64>,
    pub strict: bool,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn base(command: CommandKind, out: OutputArgs, default_format: Format) -> Self {
        Self {
            command,
            two_j: None,
            lambda: None,
            gamma: None,
            condition: None,
            gamma_grid: None,
            tol: None,
            table: None,
            exact_gamma: false,
            per_spin: None,
            seed: None,
            strict: false,
            format: out.format.unwrap_or(default_format),
            output: out.output,
            threads: out.threads,
        }
    }

    /// Parses `argv` (program name first) and checks every physical
    /// parameter against the admissible region before anything runs.
    pub fn parse_from<I, T>(argv: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(argv).map_err(CliError::from_clap)?;
        let cfg = match cli.command {
            Cmd::Evaluate { spin, lambda, gamma, out } => RunConfig {
                two_j: Some(spin.two_j()),
                lambda: Some(lambda),
                gamma: Some(gamma),
                ..Self::base(CommandKind::Evaluate, out, Format::Text)
            },
            Cmd::Threshold { spin, gamma, condition, tol, out } => RunConfig {
                two_j: Some(spin.two_j()),
                gamma: Some(gamma),
                condition,
                tol: Some(tol),
                ..Self::base(CommandKind::Threshold, out, Format::Text)
            },
            Cmd::Sweep { spin, lambda, gamma_grid, out } => RunConfig {
                two_j: Some(spin.two_j()),
                lambda: Some(lambda),
                gamma_grid: Some(gamma_grid),
                ..Self::base(CommandKind::Sweep, out, Format::Csv)
            },
            Cmd::Reproduce { table, exact_gamma, out } => RunConfig {
                table: Some(table),
                exact_gamma,
                ..Self::base(CommandKind::Reproduce, out, Format::Text)
            },
            Cmd::ValidateFormulas { per_spin, seed, strict, out } => RunConfig {
                per_spin: Some(per_spin),
                seed: Some(seed),
                strict,
                ..Self::base(CommandKind::ValidateFormulas, out, Format::Text)
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.threads == Some(0) {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        let Some(two_j) = self.two_j else { return Ok(()) };
        let sys = SpinSystem::new(two_j);
        let gamma = self.gamma.unwrap_or(0.0);
        match self.command {
            CommandKind::Evaluate => {
                let params = MeasurementParams::new(self.lambda.unwrap_or(0.0), gamma);
                validate_params(sys, params).into_result()?;
            }
            CommandKind::Threshold => {
                validate_params(sys, MeasurementParams::new(0.0, gamma)).into_result()?;
                let tol = self.tol.unwrap_or(DEFAULT_TOL);
                if !(tol > 0.0 && tol.is_finite()) {
                    return Err(Error::InvalidArgument(format!("--tol {tol} must be positive")).into());
                }
            }
            CommandKind::Sweep => {
                let lambda = self.lambda.unwrap_or(0.0);
                let grid = self.gamma_grid.as_ref().map(GridSpec::values).unwrap_or_default();
                for (index, gamma) in grid.into_iter().enumerate() {
                    if let Some(constraint) =
                        validate_params(sys, MeasurementParams::new(lambda, gamma)).binding
                    {
                        return Err(Error::InvalidGridPoint { index, lambda, gamma, constraint }.into());
                    }
                }
            }
            CommandKind::Reproduce | CommandKind::ValidateFormulas => {}
        }
        Ok(())
    }

    /// Canonical argument vector (without program name). Parsing it yields an
    /// equal config whose canonical form is identical.
    pub fn canonical_args(&self) -> Vec<String> {
        let mut a = vec![self.command.name().to_string()];
        let mut push = |flag: &str, value: String| {
            a.push(format!("--{flag}"));
            a.push(value);
        };
        if let Some(v) = self.two_j {
            push("two-j", v.to_string());
        }
        if let Some(v) = self.lambda {
            push("lambda", g17(v));
        }
        if let Some(v) = self.gamma {
            push("gamma", g17(v));
        }
        if let Some(v) = self.condition {
            push("condition", v.to_string());
        }
        if let Some(v) = &self.gamma_grid {
            push("gamma-grid", v.to_string());
        }
        if let Some(v) = self.tol {
            push("tol", g17(v));
        }
        if let Some(v) = self.table {
            push("table", v.name().into());
        }
        if let Some(v) = self.per_spin {
            push("per-spin", v.to_string());
        }
        if let Some(v) = self.seed {
            push("seed", v.to_string());
        }
        push("format", self.format.name().into());
        if let Some(v) = &self.output {
            push("output", v.display().to_string());
        }
        if let Some(v) = self.threads {
            push("threads", v.to_string());
        }
        if self.exact_gamma {
            a.push("--exact-gamma".into());
        }
        if self.strict {
            a.push("--strict".into());
        }
        a
    }

    pub fn canonical(&self) -> String {
        self.canonical_args().join(" ")
    }
}
