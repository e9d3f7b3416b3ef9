//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O and other failures, 2 invalid input
//! (flags, config files, noise specs), 3 solver failures.

mod config;
mod output;

pub use config::{parse_trials, Format, MGrid, Mode, RunConfig, Trials};
pub use output::{
    fmt_g, read_csv, write_csv, write_json, CsvRow, DiversityRow, SimulationLine, SimulationReport,
    SummaryRow, TableRow, ThresholdRow,
};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::detectors::DetectorKind;
use crate::distributions::NoiseModel;
use crate::diversity::{
    closed_form_diversity, diversity_report_with, fa_threshold_with, unimodality_certificate,
    DiversityError, Exponent, UnimodalityReport,
};
use crate::numerics::Tolerances;
use crate::simulation::{run_trials, SimConfig, SimulationError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}:{line}:{column}: {message}", path.display())]
    Config {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed output file: {0}")]
    Format(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

impl From<DiversityError> for CliError {
    fn from(e: DiversityError) -> Self {
        match e {
            DiversityError::Numerics { .. } => CliError::Solver(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Simulation(SimulationError::InvalidConfig(_)) => 2,
            CliError::Solver(_) | CliError::Simulation(SimulationError::Thresholds { .. }) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "timing-diversity", version, about = "Diversity gains of detectors for molecular timing channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ML, first-arrival and linear exponents for one noise law and gap.
    Diversity {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo error rates and fitted exponents.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Comma-separated detectors: ml, lin, fa.
        #[arg(long, value_delimiter = ',', default_value = "ml,lin,fa")]
        detectors: Vec<DetectorKind>,
        /// Particle counts, `a..b[:step]`.
        #[arg(long)]
        m: MGrid,
        /// Trials per particle count, e.g. 1e6.
        #[arg(long, default_value = "1e5")]
        trials: Trials,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "TIMING_DIVERSITY_WORKERS")]
        workers: Option<usize>,
        /// Sample-mean thresholds for noise without a finite mean.
        #[arg(long, value_delimiter = ',')]
        lin_threshold: Option<Vec<f64>>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reproduce the four exponent tables; `--out` names a directory.
    Tables {
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// First-arrival thresholds over a grid of particle counts.
    Threshold {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        m: MGrid,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Unimodality certificate of the first-arrival density.
    Unimodal {
        #[arg(long)]
        noise: NoiseModel,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Noise law, e.g. `exp(b=1)`, `ig(mu=1,b=1)`, `levy(mu=0,b=1)`, `uniform(b=1)`.
    #[arg(long)]
    pub noise: NoiseModel,
    /// Binary constellation {0, Δ}.
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    pub delta: Option<f64>,
    /// Explicit constellation, comma-separated and increasing.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Quadrature relative tolerance; root and minimiser tolerances
    /// scale with it (tol/10 and 10·tol).
    #[arg(long)]
    pub tol: Option<f64>,
}

impl SolverArgs {
    fn tolerances(&self) -> Tolerances {
        match self.tol {
            Some(t) => Tolerances {
                quad_rel: t,
                root: t / 10.0,
                min: t * 10.0,
            },
            None => Tolerances::default(),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (directory for `tables`); standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Command {
    /// The run this command describes.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        fn base(mode: Mode, output: OutputArgs) -> RunConfig {
            let mut c = RunConfig::new(mode);
            c.out = output.out;
            c.format = output.format;
            c
        }
        fn channel(c: &mut RunConfig, ch: ChannelArgs) {
            c.noise = Some(ch.noise);
            c.delta = ch.delta;
            c.points = ch.points;
        }
        Ok(match self {
            Command::Diversity { channel: ch, solver, output } => {
                let mut c = base(Mode::Diversity, output);
                channel(&mut c, ch);
                c.tolerances = solver.tolerances();
                c
            }
            Command::Simulate {
                channel: ch,
                detectors,
                m,
                trials,
                seed,
                workers,
                lin_threshold,
                solver,
                output,
            } => {
                let mut c = base(Mode::Simulate, output);
                channel(&mut c, ch);
                c.detectors = detectors;
                c.m = Some(m);
                c.trials = trials;
                c.seed = seed;
                c.workers = workers;
                c.lin_threshold = lin_threshold;
                c.tolerances = solver.tolerances();
                c
            }
            Command::Tables { solver, output } => {
                let mut c = base(Mode::Tables, output);
                c.tolerances = solver.tolerances();
                c
            }
            Command::Threshold { channel: ch, m, solver, output } => {
                let mut c = base(Mode::Threshold, output);
                channel(&mut c, ch);
                c.m = Some(m);
                c.tolerances = solver.tolerances();
                c
            }
            Command::Unimodal { noise, output } => {
                let mut c = base(Mode::Unimodal, output);
                c.noise = Some(noise);
                c
            }
            Command::Run { config } => RunConfig::load(&config)?,
        })
    }
}

/// A rendered output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// File name used when `--out` is a directory.
    pub name: String,
    pub contents: String,
}

/// Result of one run: files to write and the number of failed cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub failures: Vec<String>,
}

fn render<T: CsvRow + serde::Serialize>(rows: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => write_csv(rows),
        Format::Json => Ok(write_json(rows)),
    }
}

fn single(name: &str, contents: String, format: Format) -> Outcome {
    Outcome {
        artifacts: vec![Artifact {
            name: format!("{name}.{}", format.extension()),
            contents,
        }],
        failures: Vec::new(),
    }
}

/// Runs a config and renders its output without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    config
        .tolerances
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match config.mode {
        Mode::Diversity => cmd_diversity(config),
        Mode::Simulate => cmd_simulate(config),
        Mode::Tables => cmd_tables(config),
        Mode::Threshold => cmd_threshold(config),
        Mode::Unimodal => cmd_unimodal(config),
    }
}

fn cmd_diversity(config: &RunConfig) -> Result<Outcome, CliError> {
    let noise = config.noise()?;
    let delta = config.binary_delta()?;
    let r = diversity_report_with(noise, delta, &config.tolerances)?;
    let row = DiversityRow {
        noise: *noise,
        delta,
        d_ml: r.d_ml,
        d_fa: r.d_fa,
        d_lin: r.d_lin,
        s_star: r.s_star,
        alpha: r.alpha,
    };
    Ok(single("diversity", render(&[row], config.format)?, config.format))
}

fn cmd_threshold(config: &RunConfig) -> Result<Outcome, CliError> {
    let noise = config.noise()?;
    let delta = config.binary_delta()?;
    let rows = config
        .m_values()?
        .into_iter()
        .map(|m| fa_threshold_with(noise, delta, m, config.tolerances.root).map(ThresholdRow::from))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(single("threshold", render(&rows, config.format)?, config.format))
}

fn cmd_unimodal(config: &RunConfig) -> Result<Outcome, CliError> {
    let report: UnimodalityReport = unimodality_certificate(config.noise()?);
    Ok(single("unimodal", render(&[report], config.format)?, config.format))
}

/// Noise laws and gaps of the four reproduced tables.
pub fn table_specs() -> Vec<(&'static str, NoiseModel, [f64; 3])> {
    vec![
        ("table1_uniform", NoiseModel::Uniform { b: 1.0 }, [0.25, 0.5, 0.75]),
        ("table2_exponential", NoiseModel::Exponential { b: 1.0 }, [0.5, 1.5, 2.5]),
        ("table3_inverse_gaussian", NoiseModel::InverseGaussian { mu: 1.0, b: 1.0 }, [0.5, 1.0, 1.5]),
        ("table4_levy", NoiseModel::Levy { mu: 0.0, b: 1.0 }, [0.5, 1.0, 1.5]),
    ]
}

fn deviation(numeric: Option<Exponent>, closed: Option<Exponent>) -> Option<f64> {
    match (numeric?, closed?) {
        (Exponent::Finite(a), Exponent::Finite(b)) => Some((a - b).abs()),
        (Exponent::Infinite, Exponent::Infinite) => Some(0.0),
        _ => Some(f64::INFINITY),
    }
}

/// One table row; solver failures are recorded in `status`.
pub fn table_row(noise: &NoiseModel, delta: f64, tol: &Tolerances) -> TableRow {
    let closed = closed_form_diversity(noise, delta).unwrap_or_default();
    let (numeric, status) = match diversity_report_with(noise, delta, tol) {
        Ok(r) => ((Some(r.d_ml), Some(r.d_fa), Some(r.d_lin)), "ok".to_string()),
        Err(e) => ((None, None, None), format!("error: {e}")),
    };
    TableRow {
        delta,
        d_ml: numeric.0,
        d_ml_closed: closed.d_ml,
        d_ml_dev: deviation(numeric.0, closed.d_ml),
        d_fa: numeric.1,
        d_fa_closed: closed.d_fa,
        d_fa_dev: deviation(numeric.1, closed.d_fa),
        d_lin: numeric.2,
        d_lin_closed: closed.d_lin,
        d_lin_dev: deviation(numeric.2, closed.d_lin),
        status,
    }
}

fn cmd_tables(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut artifacts = Vec::new();
    let mut failures = Vec::new();
    for (name, noise, deltas) in table_specs() {
        let rows: Vec<TableRow> = deltas
            .iter()
            .map(|&d| table_row(&noise, d, &config.tolerances))
            .collect();
        for row in rows.iter().filter(|r| r.status != "ok") {
            failures.push(format!("{name} Δ={}: {}", row.delta, row.status));
        }
        artifacts.push(Artifact {
            name: format!("{name}.{}", config.format.extension()),
            contents: render(&rows, config.format)?,
        });
    }
    Ok(Outcome { artifacts, failures })
}

fn cmd_simulate(config: &RunConfig) -> Result<Outcome, CliError> {
    let noise = *config.noise()?;
    let constellation = config.constellation()?;
    let sim = SimConfig {
        noise,
        constellation: constellation.clone(),
        detectors: config.detectors.clone(),
        m_grid: config.m_values()?,
        trials: config.trials.0,
        seed: config.seed,
        workers: config.workers(),
        linear_fallback: config.linear_fallback(),
    };
    let result = run_trials(&sim)?;
    let analytic = match constellation.points() {
        [0.0, d] => Some(diversity_report_with(&noise, *d, &config.tolerances)?),
        _ => None,
    };
    let summary = result
        .fits
        .iter()
        .map(|fit| {
            let mut flags = Vec::new();
            if fit.d_hat.is_none() {
                flags.push("insufficient_errors".to_string());
            }
            if fit.truncated {
                flags.push("truncated".to_string());
            }
            if let (Some(d), Some(se)) = (fit.d_hat, fit.stderr) {
                if d < 2.0 * se {
                    flags.push("no_diversity".to_string());
                }
            }
            SummaryRow {
                detector: fit.detector,
                d_hat: fit.d_hat,
                stderr: fit.stderr,
                d_analytic: analytic.as_ref().map(|r| match fit.detector {
                    DetectorKind::Ml => r.d_ml,
                    DetectorKind::Linear => r.d_lin,
                    DetectorKind::Fa => r.d_fa,
                }),
                flags,
            }
        })
        .collect();
    let report = SimulationReport {
        noise,
        constellation,
        seed: config.seed,
        trials: config.trials.0,
        cells: result.cells,
        summary,
    };
    let contents = match config.format {
        Format::Csv => write_csv(&report.lines())?,
        Format::Json => write_json(&report),
    };
    Ok(single("simulate", contents, config.format))
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes artifacts to `out` (a directory for multi-file outcomes) or to
/// standard output.
pub fn write_outcome(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    let multi = outcome.artifacts.len() > 1;
    match out {
        None if multi => {
            let dir = Path::new(".");
            for a in &outcome.artifacts {
                let path = dir.join(&a.name);
                std::fs::write(&path, &a.contents).map_err(io_error(&path))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in &outcome.artifacts {
                stdout
                    .write_all(a.contents.as_bytes())
                    .map_err(io_error(Path::new("<stdout>")))?;
            }
        }
        Some(dir) if multi => {
            std::fs::create_dir_all(dir).map_err(io_error(dir))?;
            for a in &outcome.artifacts {
                let path = dir.join(&a.name);
                std::fs::write(&path, &a.contents).map_err(io_error(&path))?;
            }
        }
        Some(path) => {
            let contents: String = outcome.artifacts.iter().map(|a| a.contents.as_str()).collect();
            std::fs::write(path, contents).map_err(io_error(path))?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and writes its output.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.render().to_string()))?;
    dispatch(cli.command)
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let config = command.into_config()?;
    let outcome = execute(&config)?;
    write_outcome(&outcome, config.out.as_deref())?;
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Solver(outcome.failures.join("; ")))
    }
}

/// Process entry point.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
