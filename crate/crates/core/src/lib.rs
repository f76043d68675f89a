//! Demographic shift-share housing-demand shocks and the fixed-effects
//! regressions used to measure their effect on neighborhood outcomes.
//!
//! The crate is organized around the pipeline it implements:
//!
//! - [`model`]: demographic, housing-stock and outcome panels plus input validation
//! - [`bartik`]: county demand shifts per housing type and zip-level shift-share shocks
//! - [`hdfe`]: least squares with absorbed fixed effects and cluster-robust covariance
//! - [`synth`]: synthetic panels with known ground truth, Monte Carlo drivers, demand projections
//! - [`oracle`]: slow dense reference implementations used to cross-check the engine
//! - [`cli`]: CSV schemas, run configuration, report rendering and the command implementations
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/` directory.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bartik;
pub mod cli;
pub mod error;
pub mod frame;
pub mod hdfe;
pub mod model;
pub mod oracle;
pub mod synth;

pub use error::{Error, Result};
pub use frame::{Column, Frame};
