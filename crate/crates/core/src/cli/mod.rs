//! The `qubit-relay` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 parameter or domain error,
//! 3 validation failure, 4 optimizer failure.

pub mod format;
pub mod strategy_file;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::ensembles::symmetric_ensemble;
use crate::error::Error;
use crate::fidelity::{
    fidelity_of_strategy, max_fidelity_analytic, optimal_strategy_analytic, retransmission_colatitude,
};
use crate::measurements::{error_probability, min_error_analytic, validate_pom, Assignment};
use crate::optimizer::{optimize_fidelity, OptimizerConfig};
use crate::qubit::{bloch_vector, PureQubit};
use crate::simulator::{simulate_error, simulate_fidelity, SimResult};

use format::g17;
use strategy_file::{FileError, Provenance, StrategyFile, GENERATOR_ANALYTIC, GENERATOR_OPTIMIZER};

#[derive(Debug, Parser)]
#[command(name = "qubit-relay", version, about = "Measure-and-retransmit strategies for symmetric qubit states")]
pub struct Cli {
    /// Read --theta and --alpha in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form minimum error and maximum fidelity, with the optimal strategy.
    Analytic(AnalyticArgs),
    /// Tabulate p_e_min, f_max and chi over theta in [0, pi/2] as CSV.
    Sweep(SweepArgs),
    /// Search numerically for a fidelity-maximizing strategy.
    Optimize(OptimizeArgs),
    /// Monte Carlo estimates of fidelity and error probability for a strategy file.
    Simulate(SimulateArgs),
    /// Check that a strategy file holds a valid POM and normalized states.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    /// Number of POM elements (m > 2 only); defaults to m.
    #[arg(long)]
    pub n_outputs: Option<usize>,
    /// Longitude offset of the POM (m > 2 only).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Write the strategy here.
    #[arg(long)]
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub theta_steps: usize,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = OptimizerConfig::default().n_elements)]
    pub n_elements: usize,
    #[arg(long, default_value_t = OptimizerConfig::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub strategy_file: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub strategy_file: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(Error),
    #[error("{0}")]
    Validation(String),
    #[error("optimizer failed: {0}")]
    Optimizer(Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Domain(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Optimizer(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPom(_) | Error::NotNormalized(_) | Error::LengthMismatch { .. } => {
                CliError::Validation(e.to_string())
            }
            Error::OptimizationFailed | Error::RepairFailed(_) => CliError::Optimizer(e),
            e => CliError::Domain(e),
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn read_strategy(path: &Path) -> Result<StrategyFile, CliError> {
    StrategyFile::read(path).map_err(|e| match e {
        FileError::Io(source) => CliError::Io { path: path.to_path_buf(), source },
        FileError::Parse(p) => CliError::Validation(format!("{}: malformed strategy file: {p}", path.display())),
    })
}

fn write_strategy(path: &Path, f: &StrategyFile) -> Result<(), CliError> {
    std::fs::write(path, f.to_json()).map_err(io_error(path))
}

/// Parses `args` (program name first) and runs the command, writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => match out.write_all(report.as_bytes()) {
            Ok(()) => 0,
            Err(_) => 1,
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let angle = |x: f64| if cli.degrees { x.to_radians() } else { x };
    match &cli.command {
        Command::Analytic(a) => analytic(a.m, angle(a.theta), a.n_outputs, angle(a.alpha), a.output_path.as_deref()),
        Command::Sweep(a) => sweep(a),
        Command::Optimize(a) => optimize(a, angle(a.theta)),
        Command::Simulate(a) => simulate(a),
        Command::Validate(a) => validate(a),
    }
}

fn push_states(r: &mut String, title: &str, states: &[PureQubit]) {
    let _ = writeln!(r, "{title} (bloch x y z):");
    for (k, s) in states.iter().enumerate() {
        let v = bloch_vector(s);
        let _ = writeln!(r, "  {k}: {} {} {}", g17(v.x), g17(v.y), g17(v.z));
    }
}

fn analytic(
    m: usize,
    theta: f64,
    n_outputs: Option<usize>,
    alpha: f64,
    output_path: Option<&Path>,
) -> Result<String, CliError> {
    let e = symmetric_ensemble(m, theta)?;
    let n = n_outputs.unwrap_or(m);
    let s = optimal_strategy_analytic(m, theta, n, alpha)?;
    let chi = retransmission_colatitude(m, theta)?;

    let mut r = String::new();
    let _ = writeln!(r, "m: {m}");
    let _ = writeln!(r, "theta: {}", g17(theta));
    let _ = writeln!(r, "p_e_min: {}", g17(min_error_analytic(m, theta)?));
    let _ = writeln!(r, "f_max: {}", g17(max_fidelity_analytic(m, theta)?));
    let _ = writeln!(r, "{}: {}", if m == 2 { "chi_2" } else { "chi" }, g17(chi));
    let _ = writeln!(r, "fidelity_of_strategy: {}", g17(fidelity_of_strategy(&e, &s)));
    push_states(&mut r, "signal states", e.states());
    let _ = writeln!(r, "pom elements (weight, bloch x y z):");
    for (k, el) in s.pom().elements().iter().enumerate() {
        let (w, v) = el.bloch_parts();
        let _ = writeln!(r, "  {k}: {} {} {} {}", g17(w), g17(v.x / w), g17(v.y / w), g17(v.z / w));
    }
    push_states(&mut r, "retransmission states", s.retransmit());

    if let Some(path) = output_path {
        let parameters = if m == 2 {
            BTreeMap::new()
        } else {
            BTreeMap::from([("n_outputs".to_string(), json!(n)), ("alpha".to_string(), json!(alpha))])
        };
        let f = StrategyFile::new(&e, &s, Provenance::new(GENERATOR_ANALYTIC, parameters));
        write_strategy(path, &f)?;
        let _ = writeln!(r, "wrote: {}", path.display());
    }
    Ok(r)
}

/// The sweep table as CSV text; byte-identical for identical inputs.
pub fn sweep_csv(m: usize, theta_steps: usize) -> Result<String, CliError> {
    if theta_steps < 2 {
        return Err(CliError::Domain(Error::Config("theta_steps must be at least 2")));
    }
    let mut csv = String::from("theta,p_e_min,f_max,chi\n");
    for i in 0..theta_steps {
        let theta = if i + 1 == theta_steps {
            std::f64::consts::FRAC_PI_2
        } else {
            std::f64::consts::FRAC_PI_2 * i as f64 / (theta_steps - 1) as f64
        };
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            g17(theta),
            g17(min_error_analytic(m, theta)?),
            g17(max_fidelity_analytic(m, theta)?),
            g17(retransmission_colatitude(m, theta)?)
        );
    }
    Ok(csv)
}

fn sweep(a: &SweepArgs) -> Result<String, CliError> {
    let csv = sweep_csv(a.m, a.theta_steps)?;
    match &a.output_path {
        Some(path) => {
            std::fs::write(path, &csv).map_err(io_error(path))?;
            Ok(format!("wrote: {} ({} rows)\n", path.display(), a.theta_steps))
        }
        None => Ok(csv),
    }
}

fn optimize(a: &OptimizeArgs, theta: f64) -> Result<String, CliError> {
    let e = symmetric_ensemble(a.m, theta)?;
    let f_max = max_fidelity_analytic(a.m, theta)?;
    let cfg = OptimizerConfig {
        n_elements: a.n_elements,
        restarts: a.restarts,
        seed: a.seed,
        ..OptimizerConfig::default()
    };
    cfg.check().map_err(CliError::Domain)?;
    let res = optimize_fidelity(&e, &cfg)?;

    let mut r = String::new();
    let _ = writeln!(r, "m: {}", a.m);
    let _ = writeln!(r, "theta: {}", g17(theta));
    let _ = writeln!(r, "fidelity: {}", g17(res.fidelity));
    let _ = writeln!(r, "f_max: {}", g17(f_max));
    let _ = writeln!(r, "gap: {}", g17(f_max - res.fidelity));
    let [r0, r1, r2] = res.params.residuals();
    let _ = writeln!(r, "residuals: {} {} {}", g17(r0), g17(r1), g17(r2));
    let (checks, failures) = res.trace.spot_checks();
    let _ = writeln!(r, "spot_checks: {checks} ({failures} failed)");
    let _ = writeln!(r, "best_restart: {} of {}", res.trace.best_restart, cfg.restarts);
    let support = res.params.weight_support(1e-6);
    let _ = writeln!(r, "weight_support: {} of {} elements", support.len(), res.params.n());
    for &k in &support {
        let _ = writeln!(
            r,
            "  {k}: weight {} colatitude {} longitude {}",
            g17(res.params.weights[k]),
            g17(res.params.colatitudes[k]),
            g17(res.params.longitudes[k])
        );
    }

    if let Some(path) = &a.output_path {
        let parameters = BTreeMap::from([
            ("n_elements".to_string(), json!(cfg.n_elements)),
            ("restarts".to_string(), json!(cfg.restarts)),
            ("seed".to_string(), json!(cfg.seed)),
        ]);
        let f = StrategyFile::new(&e, &res.strategy, Provenance::new(GENERATOR_OPTIMIZER, parameters));
        write_strategy(path, &f)?;
        let _ = writeln!(r, "wrote: {}", path.display());
    }
    Ok(r)
}

fn push_estimate(r: &mut String, name: &str, sim: &SimResult, reference: f64, reference_name: &str) {
    let _ = writeln!(r, "{name}: {} +/- {}", g17(sim.estimate), g17(sim.std_error));
    let _ = writeln!(r, "{name}_{reference_name}: {}", g17(reference));
    let _ = writeln!(r, "{name}_z: {}", g17(sim.z_score(reference)));
}

fn simulate(a: &SimulateArgs) -> Result<String, CliError> {
    let file = read_strategy(&a.strategy_file)?;
    let (e, s) = file.load()?;
    let fid = simulate_fidelity(&e, &s, a.trials, a.seed)?;
    let assignment = Assignment::greedy(&e, s.pom());
    let err = simulate_error(&e, s.pom(), &assignment, a.trials, a.seed)?;

    let mut r = String::new();
    let _ = writeln!(r, "m: {}", e.m());
    let _ = writeln!(r, "theta: {}", g17(e.theta()));
    let _ = writeln!(r, "generator: {}", file.provenance.generator);
    let _ = writeln!(r, "trials: {}", a.trials);
    if file.is_analytic() {
        push_estimate(&mut r, "fidelity", &fid, max_fidelity_analytic(e.m(), e.theta())?, "f_max");
    } else {
        push_estimate(&mut r, "fidelity", &fid, fidelity_of_strategy(&e, &s), "exact");
    }
    push_estimate(&mut r, "p_e", &err, error_probability(&e, s.pom(), &assignment)?, "exact");
    let counts: Vec<String> = fid.counts.iter().map(u64::to_string).collect();
    let _ = writeln!(r, "outcome_counts: {}", counts.join(" "));
    Ok(r)
}

fn validate(a: &ValidateArgs) -> Result<String, CliError> {
    let file = read_strategy(&a.strategy_file)?;
    let violations = validate_pom(&file.pom());
    if let Some(v) = violations.first() {
        return Err(CliError::Validation(format!("{}: {v}", a.strategy_file.display())));
    }
    let (e, s) = file.load()?;
    let mut r = String::new();
    let _ = writeln!(r, "valid: {}", a.strategy_file.display());
    let _ = writeln!(r, "m: {}", e.m());
    let _ = writeln!(r, "theta: {}", g17(e.theta()));
    let _ = writeln!(r, "elements: {}", s.pom().len());
    let _ = writeln!(r, "identity_residual: {}", g17(s.pom().identity_residual()));
    let _ = writeln!(r, "fidelity_of_strategy: {}", g17(fidelity_of_strategy(&e, &s)));
    Ok(r)
}
