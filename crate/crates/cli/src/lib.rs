//! Command implementations behind the `spinid` binary.

pub mod spec_file;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use spinid_core::estimator::{
    benchmark_spec, default_grid, identify_hamiltonian, run_fig2_experiment, write_estimation_csv,
    write_fig2_csv, Fig2Settings,
};
use spinid_core::identifiability::{
    assess_identifiability, atypicality_probe, expected_status, theorem2_counterexample,
    AtypicalPredicate, Evidence, IdentifiabilityVerdict, SearchBudget, Status,
};
use spinid_core::linsys::{evolve_output, kalman_decompose};
use spinid_core::spin_models::{build_linear_model, quantum_oracle_trace};
use spinid_core::{Error, Family, Measurement};

pub use spec_file::{parse_spec, parse_spec_with, SpecFile};

pub const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  other failure (I/O, invalid model, resource limit)
  2  parse error in a spec file, override or flag value
  3  dimension error
  4  conditioning error
  5  atypical instance

Errors are printed to stderr as one line:
  error kind=<kind> code=<code> message=\"<text>\"";

#[derive(Debug, Parser)]
#[command(name = "spinid", version, about = "Identifiability analysis and Hamiltonian estimation for exchange spin chains", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Model spec file (`key = value` lines).
    #[arg(long, value_name = "PATH")]
    pub spec: PathBuf,
    /// Replace a spec value, e.g. `--override N=60`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Print the resolved spec file and exit.
    #[arg(long)]
    pub dump_spec: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Auto,
    Construction,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide identifiability; writes a counterexample certificate (JSON) when
    /// one is found.
    #[command(after_help = EXIT_CODES)]
    Analyze {
        #[command(flatten)]
        spec: SpecArgs,
        /// Certificate path [default: <spec>.certificate.json].
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Seed of the numeric search.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of search starts.
        #[arg(long, default_value_t = SearchBudget::default().starts)]
        starts: usize,
        /// `auto` runs the full decision flow; `construction` only builds the
        /// explicit counterexample of the field chain measured along X1 and
        /// fails on atypical parameters.
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Estimate the parameters from simulated probe traces; writes CSV.
    #[command(after_help = EXIT_CODES)]
    Identify {
        #[command(flatten)]
        spec: SpecArgs,
        /// CSV path [default: stdout].
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Monte-Carlo repeat index used for the noise stream.
        #[arg(long, default_value_t = 0)]
        repeat: usize,
    },
    /// Mean relative error against data length on the five-qubit benchmark;
    /// writes CSV.
    #[command(name = "reproduce-fig2", after_help = EXIT_CODES)]
    ReproduceFig2 {
        /// Optional spec file; defaults to the benchmark chain.
        #[arg(long, value_name = "PATH")]
        spec: Option<PathBuf>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repeats: Option<usize>,
        /// Data lengths, comma separated [default: 10,20,...,100].
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<usize>>,
    },
    /// Compare the linear model with the density-matrix simulation.
    #[command(name = "oracle-check", after_help = EXIT_CODES)]
    OracleCheck {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 5.0)]
        tmax: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
    },
    /// Frequency of degenerate `Abar` spectra under random parameters.
    #[command(name = "probe-atypical", after_help = EXIT_CODES)]
    ProbeAtypical {
        /// Odd parameter count.
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One of zero_eigenvalue, eigenvalue_pair_sum_zero, multiple_eigenvalues
        /// [default: all].
        #[arg(long)]
        predicate: Option<String>,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            kind: "io",
            code: 1,
            message: format!("{}: {err}", path.display()),
        }
    }

    /// `error kind=... code=... message="..."` on a single line.
    pub fn line(&self) -> String {
        let msg = self
            .message
            .replace('\\', "\\\\")
            .replace('"', "\\\"")
            .replace('\n', " ");
        format!(
            "error kind={} code={} message=\"{msg}\"",
            self.kind, self.code
        )
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::Parse(_) => ("parse", 2),
            Error::Dimension(_) => ("dimension", 3),
            Error::Conditioning { .. } => ("conditioning", 4),
            Error::Atypical(_) => ("atypical", 5),
            Error::InvalidModel(_) => ("invalid_model", 1),
            Error::Resource(_) => ("resource", 1),
        };
        CliError {
            kind,
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn load(path: &Path, overrides: &[String]) -> CliResult<SpecFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_spec_with(&text, overrides)?)
}

fn write_or_print(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn default_certificate_path(spec: &Path) -> PathBuf {
    let stem = spec
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spec".into());
    spec.with_file_name(format!("{stem}.certificate.json"))
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Identifiable => "Identifiable",
        Status::Unidentifiable => "Unidentifiable",
        Status::Inconclusive => "Inconclusive",
    }
}

/// Runs one command, writing human-readable output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let io = |e| CliError::io(Path::new("<stdout>"), e);
    match cli.command {
        Command::Analyze {
            spec,
            out,
            seed,
            starts,
            method,
        } => {
            let file = load(&spec.spec, &spec.overrides)?;
            if spec.dump_spec {
                return write_or_print(None, file.dump().as_bytes(), stdout);
            }
            let h = file.hamiltonian()?;
            let budget = SearchBudget {
                starts,
                seed: seed.unwrap_or(file.seed),
                ..SearchBudget::default()
            };
            let v = match method {
                Method::Auto => assess_identifiability(&h, &budget)?,
                Method::Construction => {
                    if h.family != Family::ExchangeWithField || h.measurement != Measurement::X1 {
                        return Err(Error::InvalidModel(
                            "the construction applies to exchange_with_field measured along X1"
                                .into(),
                        )
                        .into());
                    }
                    let cert = theorem2_counterexample(&h.theta)?;
                    let dim = h.n() + 1;
                    IdentifiabilityVerdict {
                        status: Status::Unidentifiable,
                        magnitude_only: true,
                        evidence: Evidence::Certificate(Box::new(cert)),
                        minimal_dim: kalman_decompose(&build_linear_model(&h)?).minimal_dim,
                        state_dim: dim,
                        expected: expected_status(&h),
                        disagrees_with_expected: expected_status(&h)
                            .is_some_and(|e| e != Status::Unidentifiable),
                    }
                }
            };
            writeln!(stdout, "{}", status_name(v.status)).map_err(io)?;
            writeln!(stdout, "magnitude_only = {}", v.magnitude_only).map_err(io)?;
            writeln!(stdout, "minimal_dim = {} of {}", v.minimal_dim, v.state_dim).map_err(io)?;
            match &v.evidence {
                Evidence::Criterion1 { params } => {
                    let p: Vec<String> = params.iter().map(|i| (i + 1).to_string()).collect();
                    writeln!(stdout, "evidence = criterion1 params {}", p.join(",")).map_err(io)?;
                }
                Evidence::SearchExhausted {
                    budget,
                    best_distance,
                } => {
                    writeln!(
                        stdout,
                        "evidence = search exhausted (starts {}, seed {}, best distance {best_distance:e})",
                        budget.starts, budget.seed
                    )
                    .map_err(io)?;
                }
                Evidence::Certificate(cert) => {
                    let how = if cert.construction.is_some() {
                        "construction"
                    } else {
                        "search"
                    };
                    writeln!(
                        stdout,
                        "evidence = certificate from {how} (markov distance {:e}, magnitude gap {:e})",
                        cert.markov_distance, cert.magnitude_gap
                    )
                    .map_err(io)?;
                    let path = out.unwrap_or_else(|| default_certificate_path(&spec.spec));
                    fs::write(&path, cert.to_json()).map_err(|e| CliError::io(&path, e))?;
                    writeln!(stdout, "certificate = {}", path.display()).map_err(io)?;
                }
            }
            if let Some(expected) = v.expected {
                writeln!(stdout, "expected = {}", status_name(expected)).map_err(io)?;
            }
            if v.disagrees_with_expected {
                writeln!(
                    stdout,
                    "warning = numeric verdict disagrees with the expected one"
                )
                .map_err(io)?;
            }
            Ok(())
        }
        Command::Identify {
            spec,
            out,
            seed,
            repeat,
        } => {
            let mut file = load(&spec.spec, &spec.overrides)?;
            if let Some(s) = seed {
                file.seed = s;
            }
            if spec.dump_spec {
                return write_or_print(None, file.dump().as_bytes(), stdout);
            }
            let h = file.hamiltonian()?;
            let cfg = file.experiment();
            let result = identify_hamiltonian(&h, &cfg, repeat)?;
            let mut buf = Vec::new();
            write_estimation_csv(&mut buf, &result, Some(&h.theta)).map_err(io)?;
            write_or_print(out.as_deref(), &buf, stdout)
        }
        Command::ReproduceFig2 {
            spec,
            overrides,
            out,
            seed,
            repeats,
            grid,
        } => {
            let defaults = Fig2Settings::default();
            let (h, mut settings) = match spec {
                Some(p) => {
                    let file = load(&p, &overrides)?;
                    let settings = Fig2Settings {
                        dt: file.dt,
                        noise_sigma: file.noise_sigma,
                        repeats: file.repeats,
                        seed: file.seed,
                    };
                    (file.hamiltonian()?, settings)
                }
                None => {
                    if !overrides.is_empty() {
                        return Err(Error::Parse("--override needs --spec".into()).into());
                    }
                    (benchmark_spec(), defaults)
                }
            };
            if let Some(s) = seed {
                settings.seed = s;
            }
            if let Some(r) = repeats {
                settings.repeats = r;
            }
            let grid = grid.unwrap_or_else(default_grid);
            let rows = run_fig2_experiment(&h, &grid, &settings)?;
            let mut buf = Vec::new();
            write_fig2_csv(&mut buf, &rows).map_err(io)?;
            write_or_print(out.as_deref(), &buf, stdout)
        }
        Command::OracleCheck { spec, tmax, points } => {
            let file = load(&spec.spec, &spec.overrides)?;
            if spec.dump_spec {
                return write_or_print(None, file.dump().as_bytes(), stdout);
            }
            if !(tmax >= 0.0 && tmax.is_finite()) || points < 2 {
                return Err(Error::Parse(format!(
                    "need tmax >= 0 and points >= 2, got {tmax} and {points}"
                ))
                .into());
            }
            let h = file.hamiltonian()?;
            let times: Vec<f64> = (0..points)
                .map(|k| tmax * k as f64 / (points - 1) as f64)
                .collect();
            let oracle = quantum_oracle_trace(&h, &times)?;
            let linear = evolve_output(&build_linear_model(&h)?, &times);
            let dev = oracle
                .iter()
                .zip(&linear)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            writeln!(stdout, "max_deviation = {dev:e}").map_err(io)?;
            writeln!(stdout, "points = {points}, tmax = {tmax}").map_err(io)?;
            Ok(())
        }
        Command::ProbeAtypical {
            n,
            samples,
            seed,
            predicate,
        } => {
            let preds: Vec<AtypicalPredicate> = match predicate {
                Some(p) => vec![p.parse()?],
                None => AtypicalPredicate::ALL.to_vec(),
            };
            for p in preds {
                let freq = atypicality_probe(p, n, samples, seed)?;
                writeln!(stdout, "{p} = {freq}").map_err(io)?;
            }
            Ok(())
        }
    }
}
