use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dgp::{generate_panel, DgpConfig, SynthPanel, BUCKET_COLUMN};
use crate::error::{Error, Result};
use crate::hdfe::{fit, fit_by_group, GroupOutcome, RegressionResult, RegressionSpec};

pub const SHOCK_COLUMN: &str = "shock_annualized_pct";
pub const GROWTH_COLUMN: &str = "outcome_growth_pct_per_year";

/// Growth on the annualized shock and every control delta, county fixed
/// effects, clustered by county.
pub fn standard_spec(panel: &SynthPanel) -> RegressionSpec {
    let mut regressors = vec![SHOCK_COLUMN.to_string()];
    regressors.extend(panel.control_vars.iter().map(|c| crate::bartik::control_delta_name(c)));
    RegressionSpec::new(GROWTH_COLUMN, regressors)
        .absorb("county_id")
        .cluster("county_id")
}

fn run_rep(cfg: &DgpConfig, seed: u64) -> Result<RegressionResult> {
    let panel = generate_panel(cfg, seed)?;
    let frame = panel.frame()?;
    fit(&standard_spec(&panel), &frame)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub true_beta: f64,
    pub mean_beta: f64,
    pub sd_beta: f64,
    pub mean_se: f64,
    pub coverage_95: f64,
    pub n_reps: usize,
    pub n_failed: usize,
}

impl McSummary {
    pub fn mean_bias(&self) -> f64 {
        self.mean_beta - self.true_beta
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

/// Repeats generate-and-fit `n_reps` times with seeds `seed + rep` and
/// summarizes the shock coefficient. Reps that fail are counted and left
/// out of the moments.
pub fn monte_carlo(cfg: &DgpConfig, n_reps: usize, seed: u64) -> Result<McSummary> {
    if n_reps < 2 {
        return Err(Error::Config(format!("n_reps = {n_reps} must be >= 2")));
    }
    cfg.validate()?;
    let draws: Vec<Option<(f64, f64)>> = (0..n_reps)
        .into_par_iter()
        .map(|rep| {
            run_rep(cfg, seed.wrapping_add(rep as u64))
                .ok()
                .map(|r| (r.beta[0], r.se[0]))
        })
        .collect();
    let ok: Vec<(f64, f64)> = draws.iter().flatten().copied().collect();
    if ok.is_empty() {
        return Err(Error::EmptyResult("every Monte Carlo rep failed".into()));
    }
    let betas: Vec<f64> = ok.iter().map(|d| d.0).collect();
    let ses: Vec<f64> = ok.iter().map(|d| d.1).collect();
    let covered = ok
        .iter()
        .filter(|(b, s)| (b - 1.96 * s) <= cfg.true_beta && cfg.true_beta <= (b + 1.96 * s))
        .count();
    Ok(McSummary {
        true_beta: cfg.true_beta,
        mean_beta: mean(&betas),
        sd_beta: if ok.len() > 1 { sample_sd(&betas) } else { f64::NAN },
        mean_se: mean(&ses),
        coverage_95: covered as f64 / ok.len() as f64,
        n_reps,
        n_failed: n_reps - ok.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketEstimate {
    pub bucket: usize,
    pub multiplier: f64,
    pub beta: f64,
    pub se: f64,
    pub n_obs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionStudy {
    pub true_beta: f64,
    pub multipliers: Vec<f64>,
    /// Per rep, one estimate per bucket (least elastic first); `None`
    /// when any bucket failed to fit.
    pub reps: Vec<Option<Vec<BucketEstimate>>>,
}

impl InteractionStudy {
    fn succeeded(&self) -> impl Iterator<Item = &Vec<BucketEstimate>> {
        self.reps.iter().flatten()
    }

    pub fn n_failed(&self) -> usize {
        self.reps.iter().filter(|r| r.is_none()).count()
    }

    /// Share of successful reps whose bucket betas strictly decrease.
    pub fn fraction_strictly_decreasing(&self) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for est in self.succeeded() {
            total += 1;
            if est.windows(2).all(|w| w[1].beta < w[0].beta) {
                hit += 1;
            }
        }
        hit as f64 / total as f64
    }

    /// Share of successful reps where the estimate for `bucket` lies
    /// within `k_se` standard errors of `target`.
    pub fn fraction_within(&self, bucket: usize, target: f64, k_se: f64) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for est in self.succeeded() {
            total += 1;
            let e = &est[bucket];
            if (e.beta - target).abs() <= k_se * e.se {
                hit += 1;
            }
        }
        hit as f64 / total as f64
    }

    pub fn mean_beta(&self, bucket: usize) -> f64 {
        let v: Vec<f64> = self.succeeded().map(|e| e[bucket].beta).collect();
        mean(&v)
    }
}

/// Fits the shock coefficient separately within each elasticity bucket
/// for `n_reps` synthetic panels.
pub fn interaction_study(cfg: &DgpConfig, n_reps: usize, seed: u64) -> Result<InteractionStudy> {
    let ei = cfg
        .elasticity_interaction
        .as_ref()
        .ok_or_else(|| Error::Config("interaction study needs an elasticity interaction".into()))?;
    if n_reps < 2 {
        return Err(Error::Config(format!("n_reps = {n_reps} must be >= 2")));
    }
    cfg.validate()?;
    let k = ei.multipliers.len();
    let reps = (0..n_reps)
        .into_par_iter()
        .map(|rep| -> Option<Vec<BucketEstimate>> {
            let panel = generate_panel(cfg, seed.wrapping_add(rep as u64)).ok()?;
            let frame = panel.frame().ok()?;
            let grouped = fit_by_group(&standard_spec(&panel), &frame, BUCKET_COLUMN, 1).ok()?;
            let mut out = Vec::with_capacity(k);
            for (bucket, (_, outcome)) in grouped.groups.iter().enumerate() {
                let GroupOutcome::Fitted(r) = outcome else {
                    return None;
                };
                out.push(BucketEstimate {
                    bucket,
                    multiplier: ei.multipliers[bucket],
                    beta: r.beta[0],
                    se: r.se[0],
                    n_obs: r.n_obs,
                });
            }
            (out.len() == k).then_some(out)
        })
        .collect();
    Ok(InteractionStudy {
        true_beta: cfg.true_beta,
        multipliers: ei.multipliers.clone(),
        reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::ElasticityInteraction;

    fn cfg() -> DgpConfig {
        DgpConfig {
            n_counties: 12,
            zips_per_county: (10, 10),
            ..Default::default()
        }
    }

    #[test]
    fn noiseless_recovery() {
        let mut c = cfg();
        c.noise_sd = 0.0;
        let s = monte_carlo(&c, 4, 1).unwrap();
        assert!(s.mean_bias().abs() <= 1e-8);
        assert!(s.sd_beta <= 1e-8 && s.mean_se <= 1e-8);
        assert_eq!(s.n_failed, 0);
    }

    #[test]
    fn doubling_noise_doubles_se() {
        let mut c = cfg();
        let a = monte_carlo(&c, 20, 3).unwrap();
        c.noise_sd *= 2.0;
        let b = monte_carlo(&c, 20, 3).unwrap();
        let ratio = b.mean_se / a.mean_se;
        assert!((ratio - 2.0).abs() <= 0.3, "ratio {ratio}");
    }

    #[test]
    fn needs_two_reps() {
        assert!(monte_carlo(&cfg(), 1, 0).is_err());
    }

    #[test]
    fn deterministic_summary() {
        let a = monte_carlo(&cfg(), 6, 5).unwrap();
        let b = monte_carlo(&cfg(), 6, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn interaction_requires_mapping() {
        assert!(interaction_study(&cfg(), 3, 0).is_err());
        let mut c = cfg();
        c.elasticity_interaction = Some(ElasticityInteraction::new(vec![1.0, 0.0]));
        let s = interaction_study(&c, 3, 0).unwrap();
        assert_eq!(s.reps.len(), 3);
        assert_eq!(s.n_failed(), 0);
    }
}
