//! Synthetic panels with known ground truth.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64`, so a `(config, seed)` pair always produces the
//! same data. Normal draws use `rand_distr::StandardNormal`.
//!
//! The outcome model is
//!
//! ```text
//! growth[z] = fe[c] + beta[c] * shock_annualized[z] + sum_k theta[k] * delta_k[z] + noise_sd * eps[z]
//! ```
//!
//! with `beta[c] = true_beta * multiplier(bucket[c])` when an elasticity
//! interaction is configured and `true_beta` otherwise.

mod dgp;
mod montecarlo;
mod projection;

pub use dgp::{
    generate_panel, lifecycle_preferences, ControlGenerator, DgpConfig, ElasticityInteraction,
    SynthPanel, Truth, BUCKET_COLUMN, ELASTICITY_COLUMN,
};
pub use montecarlo::{
    interaction_study, monte_carlo, standard_spec, BucketEstimate, InteractionStudy, McSummary,
};
pub use projection::{
    aging_scenario, project_demand, DemandProjection, ProjectionScenario, SEVENTY_PLUS,
};
