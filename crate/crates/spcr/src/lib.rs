//! Supervised principal component regression with multivariate responses.
//!
//! The pipeline has three steps. Variables are first ranked by their
//! association with the response through a canonical-correlation system that
//! is well defined for both tall and high-dimension/low-sample-size data.
//! The number of principal components to keep is then chosen by maximizing a
//! bias-adjusted kurtosis criterion over projections of the sphered
//! components. Finally the response is regressed on the selected components
//! and predictions are formed from that reduced model.
//!
//! Modules:
//! - [`numerics`]: centering, thin SVD, spectral decompositions, and the
//!   shared rank/sign conventions;
//! - [`ranking`]: canonical-correlation variable ranking, univariate scores,
//!   and block-wise preliminary ranking for very wide data;
//! - [`dimension`]: sphering, projection kurtosis, its optimizer, and the
//!   bias-adjusted component-count selection;
//! - [`pcr`]: model fitting, prediction, the single-component baseline, and
//!   benchmark sweeps over subset sizes;
//! - [`simgen`]: seeded latent-model data generators for the benchmark
//!   experiments.

pub mod dimension;
pub mod error;
pub mod numerics;
pub mod pcr;
pub mod ranking;
pub mod simgen;

pub use error::{Error, Result};
