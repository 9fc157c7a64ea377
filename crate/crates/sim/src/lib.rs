//! Simulation study: scenario registry, ground truth, data generation and a
//! seeded replication driver with JSON/CSV reports.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod output;
pub mod scenario;
pub mod study;
pub mod truth;

pub use error::SimError;
pub use output::{fmt17, to_json_string};
pub use scenario::{
    c3_weights, default_grid, Scenario, ScenarioId, SpreadReading, SubParams, SubSetting,
};
pub use study::{
    generate_dataset, replicate_seeds, run_replicate, run_study, Band, ReplicateEstimate,
    ReplicateFailure, ReplicationPlan, StudyReport, SubSettingReport,
};
pub use truth::{true_measures, TrueMeasures};
