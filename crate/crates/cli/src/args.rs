use std::path::{Path, PathBuf};

use affinity_core::TestDirection;
use affinity_sim::{to_json_string, SpreadReading};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{cmd_affinity, cmd_fit, cmd_simulate, parse_pair, parse_scalar, PairSpec};
use crate::config::RunConfig;
use crate::error::{CliError, EXIT_NUMERIC, EXIT_OK};

#[derive(Debug, Parser)]
#[command(
    name = "affinity",
    version,
    about = "Affinity-based accuracy measures for diagnostic tests"
)]
pub struct Cli {
    /// Log level: -v info, -vv debug.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measures for a parametric or tabulated density pair, printed as JSON.
    Affinity {
        #[command(subcommand)]
        family: Family,
    },
    /// Nonparametric Bayesian fit of a two-arm dataset.
    Fit(FitArgs),
    /// Replicated simulation study for a named scenario.
    Simulate(SimulateArgs),
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Normal arms, each given as `mu,sigma`.
    Binormal {
        #[arg(long, allow_hyphen_values = true)]
        d: String,
        #[arg(long, allow_hyphen_values = true)]
        nd: String,
    },
    /// Beta arms, each given as `a,b`.
    Bibeta {
        #[arg(long)]
        d: String,
        #[arg(long)]
        nd: String,
    },
    /// Exponential arms, each given as a rate.
    Biexponential {
        #[arg(long)]
        d: String,
        #[arg(long)]
        nd: String,
    },
    /// The fixed separated truncated-normal pair.
    Septrap,
    /// Tabulated densities from a CSV with columns y, f_d, f_nd.
    Grid {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReadingArg {
    Sd,
    Variance,
}

/// Flags shared by `fit` and `simulate`; each overrides the config file.
#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Flat TOML file with run settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path stem.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub n_keep: Option<usize>,
    /// Covariate grid size for conditional summaries.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Read the inverse-gamma hyperparameter as a scale rather than a rate.
    #[arg(long)]
    pub ig_literal: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with an outcome column, a 0/1 disease column and an optional covariate.
    pub input: PathBuf,
    #[arg(long)]
    pub y_col: Option<String>,
    #[arg(long)]
    pub d_col: Option<String>,
    #[arg(long)]
    pub x_col: Option<String>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// U1, U2, C1, C2, C3 or SEPTRAP.
    pub scenario: String,
    /// Observations per arm.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Use the full replicate count instead of the reduced default.
    #[arg(long)]
    pub full: bool,
    /// How the written spread parameters are read.
    #[arg(long, value_enum)]
    pub reading: Option<ReadingArg>,
    #[command(flatten)]
    pub common: Common,
}

fn layered(common: &Common, mut flags: RunConfig) -> Result<RunConfig, CliError> {
    flags.seed = common.seed;
    flags.threads = common.threads;
    flags.out = common
        .out
        .as_ref()
        .map(|p| p.to_string_lossy().into_owned());
    flags.burn_in = common.burn_in;
    flags.thin = common.thin;
    flags.n_keep = common.n_keep;
    flags.grid_points = common.grid;
    flags.ig_literal = common.ig_literal.then_some(true);
    let base = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    Ok(base.overlay(&flags))
}

fn set_threads(cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        // a pool already installed by an earlier call in the same process is kept
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::debug!("thread pool: {e}");
        }
    }
    Ok(())
}

fn print_written(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn default_stem(cfg: &RunConfig, fallback: &Path) -> PathBuf {
    cfg.out
        .as_ref()
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.to_path_buf())
}

/// Executes a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Affinity { family } => {
            let spec = match family {
                Family::Binormal { d, nd } => PairSpec::Binormal {
                    d: parse_pair("--d", &d)?,
                    nd: parse_pair("--nd", &nd)?,
                },
                Family::Bibeta { d, nd } => PairSpec::Bibeta {
                    d: parse_pair("--d", &d)?,
                    nd: parse_pair("--nd", &nd)?,
                },
                Family::Biexponential { d, nd } => PairSpec::Biexponential {
                    d: parse_scalar("--d", &d)?,
                    nd: parse_scalar("--nd", &nd)?,
                },
                Family::Septrap => PairSpec::Septrap,
                Family::Grid { file } => PairSpec::Grid(file),
            };
            let report = cmd_affinity(&spec)?;
            print!("{}", to_json_string(&report)?);
            Ok(EXIT_OK)
        }
        Command::Fit(a) => {
            let flags = RunConfig {
                y_col: a.y_col,
                d_col: a.d_col,
                x_col: a.x_col,
                direction: a.direction.map(|d| match d {
                    DirectionArg::Upper => TestDirection::UpperTailed,
                    DirectionArg::Lower => TestDirection::LowerTailed,
                }),
                ..RunConfig::default()
            };
            let cfg = layered(&a.common, flags)?;
            set_threads(&cfg)?;
            let fallback = a.input.with_extension("");
            let stem = default_stem(&cfg, &fallback);
            let (_, written) = cmd_fit(&a.input, &cfg, &stem)?;
            print_written(&written.files);
            Ok(EXIT_OK)
        }
        Command::Simulate(a) => {
            let flags = RunConfig {
                n_per_arm: a.n,
                n_reps: a.reps,
                spread_reading: a.reading.map(|r| match r {
                    ReadingArg::Sd => SpreadReading::StandardDeviation,
                    ReadingArg::Variance => SpreadReading::Variance,
                }),
                ..RunConfig::default()
            };
            let cfg = layered(&a.common, flags)?;
            set_threads(&cfg)?;
            let fallback = PathBuf::from(format!("simulate-{}", a.scenario.to_ascii_uppercase()));
            let stem = default_stem(&cfg, &fallback);
            let (report, written) = cmd_simulate(&a.scenario, &cfg, a.full, &stem)?;
            print_written(&written.files);
            if report.all_succeeded() {
                Ok(EXIT_OK)
            } else {
                eprintln!(
                    "{} replicate(s) failed; see the report",
                    report.failure_count()
                );
                Ok(EXIT_NUMERIC)
            }
        }
    }
}
