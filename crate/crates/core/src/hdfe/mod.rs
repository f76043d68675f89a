//! Least squares with high-dimensional fixed effects and cluster-robust
//! inference.
//!
//! Fixed effects are absorbed by (alternating) group demeaning, the
//! demeaned system is solved by Householder QR, and standard errors use
//! the clustered sandwich with a small-sample correction that counts the
//! absorbed fixed-effect degrees of freedom.

mod absorb;
mod cluster;
mod factor;
mod fit;
mod ols;
mod split;

pub use absorb::{absorb, absorbed, AbsorbOptions, AbsorbOutcome};
pub use cluster::{cluster_correction, cluster_cov};
pub use factor::Factor;
pub use fit::{
    fit, fit_by_group, FitOptions, GroupOutcome, GroupedFits, RegressionResult, RegressionSpec,
    SingletonPolicy,
};
pub use ols::{ols, OlsFit, RANK_TOL};
pub use split::{median, median_split, MedianSplit};
