//! Dirichlet process mixture (unconditional) and single-weights dependent DP
//! (B-spline mean regression) density estimation, with posterior summaries of
//! affinity and AUC.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fit;
pub mod prior;
pub mod sampler;
pub mod state;
pub mod summary;

pub use config::McmcConfig;
pub use diagnostics::{joint_distribution_check, prior_state, JointStat};
pub use error::BnpError;
pub use fit::{
    fit_ddp, fit_dpm, posterior_mean_density, PosteriorPredictiveDensity, PredictiveComponent,
    MIN_DDP_OBS, MIN_DPM_OBS,
};
pub use prior::{BaseMeasureHyper, PriorSettings};
pub use sampler::{initial_state, neal8_sweep};
pub use state::{Cluster, DataRows, DpmState};
pub use summary::{
    percentile, posterior_affinity, posterior_affinity_conditional, posterior_auc,
    posterior_quadrature, AccuracySummary, MeasureTag, POSTERIOR_QUADRATURE_POINTS,
};
