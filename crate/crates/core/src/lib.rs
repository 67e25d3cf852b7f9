//! Isotropic correlation models for the cross-section of equity returns.
//!
//! The crate is organised around the equicorrelation matrix `G_N` (unit
//! diagonal, common off-diagonal `rho`):
//!
//! - [`iso_algebra`]: closed-form spectrum, orthogonal eigenmatrix, inverse
//!   and O(N) products for `G_N`.
//! - [`cross_section`]: equal-weight portfolio variance decomposition, the
//!   effective degrees of freedom `N*`, factor-model predictions and the
//!   systematic/residual risk split.
//! - [`corr_stats`]: pairwise correlation sampling, the Fisher transform and
//!   a Kolmogorov-Smirnov test against a Normal reference.
//! - [`experiment`]: the randomized `N*(N)` experiment, the large-N OLS fit
//!   and the model verdict.
//! - [`allocator`]: closed-form mean-variance and multivariate-Laplace
//!   allocations under isotropic covariance.
//! - [`market_data`]: canonical price/return CSV ingestion and validation.
//! - [`synth`]: seeded synthetic panels used by tests, the CLI and the demo.

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocator;
pub mod corr_stats;
pub mod cross_section;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod iso_algebra;
pub mod market_data;
pub mod panel;
pub mod rng;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use iso_algebra::EquiCorrMatrix;
pub use panel::ReturnsPanel;
