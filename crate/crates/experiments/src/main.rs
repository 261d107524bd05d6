//! `entrot` CLI: experiment runners with JSON configs and CSV/JSON output.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 numerical or solver
//! failure.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use entrot_experiments::config::{ExperimentConfig, ExperimentKind};
use entrot_experiments::error::{Error, Result};
use entrot_experiments::output::{write_csv, write_json, CsvRecord};
use entrot_experiments::runners;

#[derive(Parser)]
#[command(
    name = "entrot",
    version,
    about = "Entropy-regularized optimal transport experiments on Gaussian families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropic cost decomposition over a λ grid for the fixed 2D pair.
    CostCurve(RunArgs),
    /// Density grids of the optimal coupling of N(0,1) and N(5,2).
    CouplingContour(RunArgs),
    /// MDS embedding of the 100 rotated-covariance Gaussians under √C̃_λ.
    MdsEmbed(RunArgs),
    /// Monte Carlo covariance-estimation benchmark (KL prediction error).
    CovBenchmark(RunArgs),
    /// Monte Carlo barycenter benchmark (three inputs per replication).
    BarycenterBenchmark(RunArgs),
    /// Cross-validate the closed forms against the grid-Sinkhorn oracle.
    VerifyOracle(RunArgs),
}

impl Command {
    fn kind(&self) -> Option<ExperimentKind> {
        match self {
            Command::CostCurve(_) => Some(ExperimentKind::CostCurve),
            Command::CouplingContour(_) => Some(ExperimentKind::CouplingContour),
            Command::MdsEmbed(_) => Some(ExperimentKind::MdsEmbed),
            Command::CovBenchmark(_) => Some(ExperimentKind::CovBenchmark),
            Command::BarycenterBenchmark(_) => Some(ExperimentKind::BarycenterBenchmark),
            Command::VerifyOracle(_) => None,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::CostCurve(a)
            | Command::CouplingContour(a)
            | Command::MdsEmbed(a)
            | Command::CovBenchmark(a)
            | Command::BarycenterBenchmark(a)
            | Command::VerifyOracle(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file mirroring the ExperimentConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (overrides the config; stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated λ list (overrides the config).
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Comma-separated dimension list (overrides the config).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Comma-separated sample-size list (overrides the config).
    #[arg(long, value_delimiter = ',')]
    sample_sizes: Option<Vec<usize>>,
    /// Replication count (overrides the config).
    #[arg(long)]
    reps: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// Default ← config file ← CLI flags, in increasing precedence.
fn resolve_config(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let config = ExperimentConfig::from_json(&text)?;
            if config.experiment != kind {
                return Err(Error::Config(format!(
                    "config is for `{}` but the subcommand is `{}`",
                    config.experiment.name(),
                    kind.name()
                )));
            }
            config
        }
        None => ExperimentConfig::default_for(kind),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(lambdas) = &args.lambda {
        config.lambdas = lambdas.clone();
    }
    if let Some(dims) = &args.dims {
        config.dims = dims.clone();
    }
    if let Some(sizes) = &args.sample_sizes {
        config.sample_sizes = sizes.clone();
    }
    if let Some(reps) = args.reps {
        config.replications = reps;
    }
    if let Some(out) = &args.out {
        config.output_path = out.display().to_string();
    }
    config.validate()?;
    Ok(config)
}

fn emit<R: CsvRecord + serde::Serialize>(
    rows: &[R],
    output_path: &str,
    format: OutputFormat,
) -> Result<()> {
    let mut sink: Box<dyn Write> = if output_path.is_empty() {
        Box::new(std::io::stdout().lock())
    } else {
        Box::new(std::fs::File::create(output_path)?)
    };
    match format {
        OutputFormat::Csv => write_csv(rows, &mut sink),
        OutputFormat::Json => write_json(rows, &mut sink),
    }
}

fn run(command: &Command) -> Result<()> {
    let args = command.args();
    match command {
        Command::VerifyOracle(args) => {
            let (rows, pass) = runners::run_verify_oracle()?;
            let out = args
                .out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default();
            emit(&rows, &out, args.format)?;
            for row in &rows {
                eprintln!(
                    "pair ({}, {}) λ={}: cross rel err {:.4e}, total rel err {:.4e}, \
                     entropy-constant gap {:.5}",
                    row.var1,
                    row.var2,
                    row.lambda,
                    row.cross_rel_err,
                    row.total_rel_err,
                    row.entropy_constant_gap
                );
            }
            if !pass {
                return Err(Error::Numerical(entrot::Error::InternalInconsistency(
                    "oracle disagrees with the closed forms beyond 5%".into(),
                )));
            }
            Ok(())
        }
        _ => {
            let kind = command.kind().expect("non-verify commands have a kind");
            let config = resolve_config(kind, args)?;
            match kind {
                ExperimentKind::CostCurve => {
                    let rows = runners::run_cost_curve(&config)?;
                    emit(&rows, &config.output_path, args.format)
                }
                ExperimentKind::CouplingContour => {
                    let rows = runners::run_coupling_contour(&config)?;
                    emit(&rows, &config.output_path, args.format)
                }
                ExperimentKind::MdsEmbed => {
                    let rows = runners::run_mds_embed(&config)?;
                    emit(&rows, &config.output_path, args.format)
                }
                ExperimentKind::CovBenchmark => {
                    let rows = runners::run_cov_benchmark(&config)?;
                    emit(&rows, &config.output_path, args.format)
                }
                ExperimentKind::BarycenterBenchmark => {
                    let rows = runners::run_barycenter_benchmark(&config)?;
                    emit(&rows, &config.output_path, args.format)
                }
            }
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(&cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
