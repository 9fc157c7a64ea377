//! Command-line front end: `affinity`, `fit` and `simulate`.

pub mod args;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;

pub use args::{run, Cli};
pub use commands::{
    build_pair, cmd_affinity, cmd_fit, cmd_simulate, parse_pair, FitSummary, MeasureReport,
    PairSpec, SimulateFile,
};
pub use config::{FitSettings, Resolved, RunConfig, SimulateSettings};
pub use data::{parse_dataset, parse_dataset_from_reader, ColumnMap};
pub use error::{CliError, EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
