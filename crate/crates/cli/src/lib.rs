//! Command-line harness: loads a channel, runs one experiment and emits a
//! JSON or CSV report.
//!
//! Exit codes: 0 when every check passes, 1 when a scientific check fails,
//! 2 on usage or I/O errors.

pub mod report;

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use lownoise::channel::LowNoiseChannel;
use lownoise::fisher::{
    exact_fisher, leading_fisher_pure, leading_fisher_reduced, leading_from_exact,
};
use lownoise::optimize::{
    enhancement_from, factorized_optimum_nbody, maximize_pure, maximize_reduced,
    verify_no_entanglement_gain,
};
use lownoise::{catalog, load_channel, CatalogName, Error, PureState};

use report::{Check, FisherSection, Metadata, NBodySection, OptimizeSection, RunReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest admissible qubit enhancement ratio.
const RATIO_BOUND: f64 = 1.5;
const RATIO_SLACK: f64 = 1e-9;
const SATURATION_TOL: f64 = 1e-9;
const SPREAD_TOL: f64 = 1e-8;
const DOMINATION_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "lownoise",
    version,
    about = "Fisher information experiments on low-noise quantum channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the Kraus conditions of a channel
    Validate(CommonArgs),
    /// Exact and leading-order Fisher information for one input
    Fisher(CommonArgs),
    /// Optimize inputs with and without an ancilla
    Optimize(CommonArgs),
    /// Factorized N-body optimum and random entangled inputs
    Nbody(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CommonArgs {
    /// Catalog name (identity, depolarizing, amplitude_damping, phase_flip,
    /// `random_lownoise[:seed]`) or path to a channel spec JSON file
    #[arg(long)]
    pub channel: String,
    /// Input ket: comma-separated re:im amplitudes, `maxent`, or `basis:k`.
    /// Kets of dimension d² and `maxent` are fed through the channel with an ancilla
    #[arg(long, default_value = "basis:0")]
    pub input: String,
    /// Noise parameter; repeat for a grid
    #[arg(long = "eps", default_values_t = vec![1e-2, 1e-3, 1e-4])]
    pub eps: Vec<f64>,
    /// Number of sites
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Optimizer starts
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// System dimension for catalog channels
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Truncation order for catalog channels
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// Run even if the channel fails validation
    #[arg(long)]
    pub allow_invalid: bool,
    /// Write the report here instead of stdout
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("bad --input `{0}`: {1}")]
    Input(String, String),
    #[error("report output: {0}")]
    Output(String),
}

impl CliError {
    /// Numerical breakdowns and contract violations surfaced during a run are
    /// scientific failures; everything else is a usage or I/O problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Numerical(_) | Error::Contract(_)) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Largest ε accepted on the command line.
pub const MAX_EPS: f64 = 0.1;

impl CommonArgs {
    pub fn check(&self) -> CliResult<()> {
        let usage = |msg: String| Err(CliError::Core(Error::Usage(msg)));
        if self.eps.is_empty() {
            return usage("at least one --eps value is required".into());
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e <= MAX_EPS)) {
            return usage(format!("--eps values must lie in (0, {MAX_EPS}], got {e}"));
        }
        if !(1..=3).contains(&self.n) {
            return usage(format!("--n must be 1, 2 or 3, got {}", self.n));
        }
        if self.trials == 0 || self.starts == 0 {
            return usage("--trials and --starts must be at least 1".into());
        }
        Ok(())
    }
}

pub fn load(args: &CommonArgs) -> CliResult<LowNoiseChannel> {
    match CatalogName::from_str(&args.channel) {
        Ok(name) => Ok(catalog(&name, args.dim, args.order)?),
        Err(_) if Path::new(&args.channel).exists() => {
            Ok(load_channel(Path::new(&args.channel), true)?)
        }
        Err(e) => Err(e.into()),
    }
}

/// Parses `--input` for a system of dimension `d`.
pub fn parse_input(spec: &str, d: usize) -> CliResult<PureState> {
    let bad = |msg: &str| CliError::Input(spec.to_owned(), msg.to_owned());
    if spec == "maxent" {
        return Ok(PureState::maximally_entangled(d));
    }
    if let Some(k) = spec.strip_prefix("basis:") {
        let k: usize = k
            .parse()
            .map_err(|_| bad("basis index must be a nonnegative integer"))?;
        return PureState::basis(d, k).map_err(|e| bad(&e.to_string()));
    }
    let amplitudes = spec
        .split(',')
        .map(|item| {
            let (re, im) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| bad("amplitudes are written re:im"))?;
            let re: f64 = re
                .trim()
                .parse()
                .map_err(|_| bad("real part is not a number"))?;
            let im: f64 = im
                .trim()
                .parse()
                .map_err(|_| bad("imaginary part is not a number"))?;
            Ok(Complex64::new(re, im))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if amplitudes.len() != d && amplitudes.len() != d * d {
        return Err(bad(&format!(
            "expected {d} or {} amplitudes, found {}",
            d * d,
            amplitudes.len()
        )));
    }
    PureState::normalized(amplitudes).map_err(|e| bad(&e.to_string()))
}

/// Report plus the exit code it implies.
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
}

pub fn run(command: &Command) -> CliResult<Outcome> {
    let start = Instant::now();
    let (name, args) = match command {
        Command::Validate(a) => ("validate", a),
        Command::Fisher(a) => ("fisher", a),
        Command::Optimize(a) => ("optimize", a),
        Command::Nbody(a) => ("nbody", a),
    };
    args.check()?;
    let ch = load(args)?;
    let validation = ch.validate(&args.eps)?;
    let mut report = RunReport::new(name, args.clone(), ch.label(), validation);
    report.checks.push(Check::new(
        "channel_validation",
        report.validation.passed,
        String::new(),
    ));

    if report.validation.passed || args.allow_invalid {
        match command {
            Command::Validate(_) => {}
            Command::Fisher(_) => cmd_fisher(&ch, args, &mut report)?,
            Command::Optimize(_) => cmd_optimize(&ch, args, &mut report)?,
            Command::Nbody(_) => cmd_nbody(&ch, args, &mut report)?,
        }
    }
    report.passed = report.checks.iter().all(|c| c.passed);
    report.metadata = Metadata::now(start.elapsed());
    let exit_code = if report.passed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(Outcome { report, exit_code })
}

pub fn cmd_fisher(
    ch: &LowNoiseChannel,
    args: &CommonArgs,
    report: &mut RunReport,
) -> CliResult<()> {
    let psi = parse_input(&args.input, ch.dim())?;
    let assisted = psi.dim() != ch.dim();
    let effective = if assisted {
        ch.extend_ancilla()?
    } else {
        ch.clone()
    };
    let rho = psi.density();
    let rows = args
        .eps
        .iter()
        .map(|&eps| exact_fisher(&effective, &rho, eps))
        .collect::<Result<Vec<_>, _>>()?;
    let leading = leading_fisher_pure(&effective, &psi)?;
    let system_state = if assisted {
        rho.reduce(&[ch.dim(), ch.dim()], &[0])?
    } else {
        rho.clone()
    };
    let reduced = leading_fisher_reduced(ch, &system_state)?;
    let extrapolated = if args.eps.len() >= 2 {
        Some(leading_from_exact(&effective, &rho, &args.eps)?)
    } else {
        None
    };

    // the O(1) correction to ε·J is linear in ε at small ε
    let smallest = rows.iter().min_by(|a, b| a.eps.total_cmp(&b.eps));
    if let Some(row) = smallest {
        let gap = (row.leading_coefficient - leading).abs();
        let tol = 5.0 * row.eps * (1.0 + leading);
        report.checks.push(Check::new(
            "leading_order_agreement",
            gap <= tol,
            format!(
                "|eps*J - c1| = {gap:.3e} at eps = {:e}, tolerance {tol:.3e}",
                row.eps
            ),
        ));
    }
    report.fisher = Some(FisherSection {
        assisted,
        rows,
        leading_coefficient: leading,
        reduced_state_coefficient: reduced,
        extrapolated,
    });
    Ok(())
}

pub fn cmd_optimize(
    ch: &LowNoiseChannel,
    args: &CommonArgs,
    report: &mut RunReport,
) -> CliResult<()> {
    let pure = maximize_pure(ch, args.starts, args.seed)?;
    let reduced = maximize_reduced(ch, args.starts, args.seed)?;
    let enhancement = enhancement_from(&pure, &reduced);

    report.checks.push(Check::new(
        "reduced_start_agreement",
        reduced.value_spread <= SPREAD_TOL,
        format!(
            "spread {:.3e} over {} converged starts",
            reduced.value_spread, reduced.converged_starts
        ),
    ));
    report.checks.push(Check::new(
        "reduced_dominates_pure",
        reduced.optimum_value >= pure.optimum_value - DOMINATION_TOL,
        String::new(),
    ));
    if let (2, Some(ratio)) = (ch.dim(), enhancement.ratio) {
        report.checks.push(Check::new(
            "qubit_ratio_bound",
            ratio <= RATIO_BOUND + RATIO_SLACK,
            format!("ratio {ratio}"),
        ));
    }
    report.optimization = Some(OptimizeSection {
        pure,
        reduced,
        enhancement,
    });
    Ok(())
}

pub fn cmd_nbody(ch: &LowNoiseChannel, args: &CommonArgs, report: &mut RunReport) -> CliResult<()> {
    let factorized = factorized_optimum_nbody(ch, args.n, args.seed)?;
    let no_gain = verify_no_entanglement_gain(ch, args.n, args.trials, args.seed)?;
    let gap = (factorized.value - factorized.bound).abs();
    report.checks.push(Check::new(
        "factorized_saturation",
        gap <= SATURATION_TOL,
        format!("|value - n*J| = {gap:.3e}"),
    ));
    report.checks.push(Check::new(
        "no_entanglement_gain",
        no_gain.violations == 0,
        format!(
            "{} of {} trials above the bound",
            no_gain.violations, no_gain.trials
        ),
    ));
    report.nbody = Some(NBodySection {
        factorized,
        no_gain,
    });
    Ok(())
}

/// Serializes the report and writes it to `--out` or stdout.
pub fn emit(outcome: &Outcome, args: &CommonArgs) -> CliResult<()> {
    let text = match args.format {
        Format::Json => report::to_json(&outcome.report),
        Format::Csv => report::to_csv(&outcome.report),
    }
    .map_err(CliError::Output)?;
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Validate(a)
            | Command::Fisher(a)
            | Command::Optimize(a)
            | Command::Nbody(a) => a,
        }
    }
}

/// Parses, runs and emits; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let result = run(&cli.command).and_then(|outcome| {
        emit(&outcome, cli.command.args())?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
