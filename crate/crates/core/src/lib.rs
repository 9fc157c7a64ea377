//! Densities, quadrature and accuracy measures (Hellinger affinity, AUC,
//! Youden index, overlap) for diagnostic tests.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the scalar to `f64`.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bspline;
pub mod dataset;
pub mod density;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod transform;

pub use bspline::{BSplineBasis, BSplineError};
pub use dataset::{Dataset, DatasetError, Observation, Provenance};
pub use density::{
    BetaParams, Density, DensityError, ExponentialParams, GridDensity, LogNormalParams,
    MixtureModel, NormalParams, TruncNormalParams,
};
pub use measures::{
    affinity, affinity_bibeta, affinity_biexponential, affinity_binormal, affinity_conditional,
    affinity_curve, affinity_lr_identity_check, affinity_normalized, auc, auc_conditional,
    auc_mixture_normal, ovl, youden, youden_abs, ConditionalTestPair, LrIdentityCheck,
    MeasureError, TestDirection, TestPair, YoudenResult, DEFAULT_YOUDEN_GRID,
};
pub use quadrature::{
    integrate, DomainHints, Feature, Layout, QuadratureError, QuadratureRule, QuadratureSettings,
    QuadratureSpec,
};
pub use rng::RngStream;
pub use scalar::Real;
pub use transform::{rescale_covariate, standardize, AffineMap, Standardization, TransformError};

pub type Density64 = Density<f64>;
pub type NormalParams64 = NormalParams<f64>;
pub type MixtureModel64 = MixtureModel<f64>;
pub type TestPair64 = TestPair<f64>;
pub type QuadratureSpec64 = QuadratureSpec<f64>;
pub type BSplineBasis64 = BSplineBasis<f64>;
pub type AffineMap64 = AffineMap<f64>;
pub type Standardization64 = Standardization<f64>;
