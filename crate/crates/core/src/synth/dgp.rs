use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bartik::{
    build_shock_panel, county_demand_shifts, zip_demand_shock, Interval, ShockPanel, ShockRequest,
};
use crate::error::{Error, Result};
use crate::frame::Column;
use crate::frame::Frame;
use crate::model::{
    AgeCounts, GeoId, OutcomePanel, Period, PopulationPanel, PreferenceMatrix, StockShares,
    N_AGE_GROUPS, N_HOUSING_TYPES,
};

pub const BUCKET_COLUMN: &str = "elasticity_bucket";
pub const ELASTICITY_COLUMN: &str = "supply_elasticity";

/// Preferred bedroom count by age group: small homes when young and old,
/// large in mid-life.
const PREFERRED_BEDROOMS: [f64; N_AGE_GROUPS] = [
    1.4, 1.8, 2.4, 3.1, 3.7, 4.0, 4.0, 3.8, 3.5, 3.0, 2.6, 2.2, 1.9, 1.6,
];

/// Relative size of each age group in a typical county.
const AGE_PROFILE: [f64; N_AGE_GROUPS] = [
    1.0, 1.05, 1.05, 1.0, 1.0, 1.05, 1.05, 1.0, 0.95, 0.85, 0.7, 0.5, 0.35, 0.3,
];

const PREFERENCE_SHARPNESS: f64 = 0.6;

fn softmax(scores: &[f64; N_HOUSING_TYPES]) -> [f64; N_HOUSING_TYPES] {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps = scores.map(|s| (s - max).exp());
    let total: f64 = exps.iter().sum();
    exps.map(|e| e / total)
}

fn preference_row(preferred: f64, noise: [f64; N_HOUSING_TYPES]) -> [f64; N_HOUSING_TYPES] {
    let mut scores = [0.0; N_HOUSING_TYPES];
    for (b, s) in scores.iter_mut().enumerate() {
        let bedrooms = (b + 1) as f64;
        *s = -PREFERENCE_SHARPNESS * (bedrooms - preferred).powi(2) + noise[b];
    }
    softmax(&scores)
}

/// The noise-free life-cycle preference matrix used by the generator.
pub fn lifecycle_preferences() -> PreferenceMatrix {
    let mut rows = [[0.0; N_HOUSING_TYPES]; N_AGE_GROUPS];
    for (a, row) in rows.iter_mut().enumerate() {
        *row = preference_row(PREFERRED_BEDROOMS[a], [0.0; N_HOUSING_TYPES]);
    }
    PreferenceMatrix::from_rows(rows)
}

/// A per-zip control variable with a known effect on outcome growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlGenerator {
    pub name: String,
    pub start_mean: f64,
    pub start_sd: f64,
    /// SD of the idiosyncratic part of the interval change.
    pub delta_sd: f64,
    /// Loading of the change on the annualized shock.
    pub shock_loading: f64,
    /// True coefficient in the outcome equation.
    pub coefficient: f64,
}

impl ControlGenerator {
    pub fn new(name: impl Into<String>, coefficient: f64) -> Self {
        ControlGenerator {
            name: name.into(),
            start_mean: 0.5,
            start_sd: 0.1,
            delta_sd: 0.05,
            shock_loading: 0.0,
            coefficient,
        }
    }
}

/// County supply elasticities and the attenuation of `true_beta` they
/// imply. Counties are ranked by elasticity and split into
/// `multipliers.len()` equal-count buckets, least elastic first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticityInteraction {
    pub multipliers: Vec<f64>,
    /// Elasticity is `median * exp(log_sd * N(0,1))`.
    pub median: f64,
    pub log_sd: f64,
}

impl ElasticityInteraction {
    pub fn new(multipliers: Vec<f64>) -> Self {
        ElasticityInteraction {
            multipliers,
            median: 1.5,
            log_sd: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub n_counties: usize,
    /// Inclusive range of zips per county.
    pub zips_per_county: (usize, usize),
    pub n_states: usize,
    pub interval: (Period, Period),
    /// Percent outcome growth per percent annualized shock.
    pub true_beta: f64,
    pub county_fe_sd: f64,
    pub noise_sd: f64,
    /// Mean persons per age group in a county at the interval start.
    pub population_scale: f64,
    /// Log-SD of county size.
    pub population_dispersion: f64,
    /// Log growth of the oldest minus the youngest age group over the
    /// interval (population aging).
    pub aging_drift: f64,
    /// Log-SD of county-by-age growth.
    pub age_drift_sd: f64,
    /// SD of the noise added to life-cycle preference scores.
    pub preference_noise: f64,
    /// Log-SD of zip stock shares around the county mix.
    pub stock_dispersion: f64,
    pub outcome_var: String,
    pub controls: Vec<ControlGenerator>,
    pub elasticity_interaction: Option<ElasticityInteraction>,
}

impl Default for DgpConfig {
    fn default() -> Self {
        DgpConfig {
            n_counties: 50,
            zips_per_county: (20, 20),
            n_states: 5,
            interval: (2012, 2018),
            true_beta: 6.0,
            county_fe_sd: 2.0,
            noise_sd: 1.0,
            population_scale: 10_000.0,
            population_dispersion: 0.8,
            aging_drift: 0.25,
            age_drift_sd: 0.08,
            preference_noise: 0.3,
            stock_dispersion: 0.6,
            outcome_var: "price_index".into(),
            controls: Vec::new(),
            elasticity_interaction: None,
        }
    }
}

impl DgpConfig {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("county_fe_sd", self.county_fe_sd),
            ("noise_sd", self.noise_sd),
            ("population_dispersion", self.population_dispersion),
            ("age_drift_sd", self.age_drift_sd),
            ("preference_noise", self.preference_noise),
            ("stock_dispersion", self.stock_dispersion),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be >= 0")));
            }
        }
        if !(self.population_scale.is_finite() && self.population_scale > 0.0) {
            return Err(Error::Config(format!(
                "population_scale = {} must be > 0",
                self.population_scale
            )));
        }
        if self.n_counties == 0 || self.n_states == 0 {
            return Err(Error::Config("need at least one county and one state".into()));
        }
        let (lo, hi) = self.zips_per_county;
        if lo == 0 || lo > hi {
            return Err(Error::Config(format!("zips_per_county range ({lo}, {hi}) invalid")));
        }
        Interval::new(self.interval.0, self.interval.1)?;
        if let Some(ei) = &self.elasticity_interaction {
            if ei.multipliers.is_empty() || ei.multipliers.len() > self.n_counties {
                return Err(Error::Config("elasticity buckets must be 1..=n_counties".into()));
            }
            if ei.multipliers.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::Config(
                    "elasticity multipliers must not increase with elasticity".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.interval.0, self.interval.1).expect("validated interval")
    }
}

/// Everything the generator drew.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub true_beta: f64,
    pub interval: Interval,
    pub county_fe: BTreeMap<String, f64>,
    pub county_beta: BTreeMap<String, f64>,
    pub county_elasticity: BTreeMap<String, f64>,
    pub county_bucket: BTreeMap<String, usize>,
    pub control_coefficients: Vec<(String, f64)>,
    pub zip_shock_total: BTreeMap<String, f64>,
    pub zip_shock_annualized: BTreeMap<String, f64>,
    pub zip_noise: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthPanel {
    pub preferences: PreferenceMatrix,
    pub population: PopulationPanel,
    pub stock: StockShares,
    pub outcomes: OutcomePanel,
    pub truth: Truth,
    pub outcome_var: String,
    pub control_vars: Vec<String>,
}

impl SynthPanel {
    pub fn shock_request(&self) -> ShockRequest {
        ShockRequest::new(self.truth.interval, self.outcome_var.clone())
            .with_controls(self.control_vars.clone())
    }

    pub fn shock_panel(&self) -> Result<ShockPanel> {
        build_shock_panel(
            &self.preferences,
            &self.population,
            &self.stock,
            &self.outcomes,
            &self.shock_request(),
        )
    }

    /// Shock panel as a frame, plus the county elasticity and its bucket
    /// label when the configuration has an interaction.
    pub fn frame(&self) -> Result<Frame> {
        let panel = self.shock_panel()?;
        let mut f = panel.to_frame();
        if !self.truth.county_bucket.is_empty() {
            let counties = f.categorical("county_id")?;
            let bucket: Vec<String> = counties
                .iter()
                .map(|c| format!("b{:02}", self.truth.county_bucket[c]))
                .collect();
            let elasticity: Vec<f64> =
                counties.iter().map(|c| self.truth.county_elasticity[c]).collect();
            f.insert(BUCKET_COLUMN, Column::Categorical(bucket))?;
            f.insert(ELASTICITY_COLUMN, Column::Numeric(elasticity))?;
        }
        Ok(f)
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn normals<const N: usize>(rng: &mut ChaCha8Rng) -> [f64; N] {
    let mut out = [0.0; N];
    for v in out.iter_mut() {
        *v = normal(rng);
    }
    out
}

/// Draws one synthetic panel. Identical `(cfg, seed)` give identical
/// output.
pub fn generate_panel(cfg: &DgpConfig, seed: u64) -> Result<SynthPanel> {
    cfg.validate()?;
    let interval = cfg.interval();
    let years = interval.years();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut pref_rows = [[0.0; N_HOUSING_TYPES]; N_AGE_GROUPS];
    for (a, row) in pref_rows.iter_mut().enumerate() {
        let noise = normals::<N_HOUSING_TYPES>(&mut rng).map(|z| cfg.preference_noise * z);
        *row = preference_row(PREFERRED_BEDROOMS[a], noise);
    }
    let preferences = PreferenceMatrix::from_rows(pref_rows);

    let county_ids: Vec<String> = (0..cfg.n_counties).map(|i| format!("c{:04}", i + 1)).collect();
    let mut population = PopulationPanel::new();
    let mut stock = StockShares::new();
    let mut variables = vec![cfg.outcome_var.clone()];
    variables.extend(cfg.controls.iter().map(|c| c.name.clone()));
    let mut outcomes = OutcomePanel::new(variables);
    let mut truth = Truth {
        true_beta: cfg.true_beta,
        interval,
        county_fe: BTreeMap::new(),
        county_beta: BTreeMap::new(),
        county_elasticity: BTreeMap::new(),
        county_bucket: BTreeMap::new(),
        control_coefficients: cfg
            .controls
            .iter()
            .map(|c| (c.name.clone(), c.coefficient))
            .collect(),
        zip_shock_total: BTreeMap::new(),
        zip_shock_annualized: BTreeMap::new(),
        zip_noise: BTreeMap::new(),
    };

    // county-level draws first, so zip counts do not shift the stream
    struct CountyDraw {
        state: String,
        prev: AgeCounts,
        now: AgeCounts,
        base_mix: [f64; N_HOUSING_TYPES],
        fe: f64,
        elasticity: f64,
        n_zips: usize,
    }
    let mut draws = Vec::with_capacity(cfg.n_counties);
    for (i, county) in county_ids.iter().enumerate() {
        let size = cfg.population_scale * (cfg.population_dispersion * normal(&mut rng)).exp();
        let level_noise = normals::<N_AGE_GROUPS>(&mut rng);
        let drift_noise = normals::<N_AGE_GROUPS>(&mut rng);
        let mut prev = [0.0; N_AGE_GROUPS];
        let mut now = [0.0; N_AGE_GROUPS];
        for a in 0..N_AGE_GROUPS {
            prev[a] = size * AGE_PROFILE[a] * (0.1 * level_noise[a]).exp();
            let trend = cfg.aging_drift * (a as f64 - 6.5) / 13.0;
            now[a] = prev[a] * (trend + cfg.age_drift_sd * drift_noise[a]).exp();
        }
        let base_mix = normals::<N_HOUSING_TYPES>(&mut rng).map(|z| 0.5 * z);
        let fe = cfg.county_fe_sd * normal(&mut rng);
        let elasticity = match &cfg.elasticity_interaction {
            Some(ei) => ei.median * (ei.log_sd * normal(&mut rng)).exp(),
            None => f64::NAN,
        };
        let (lo, hi) = cfg.zips_per_county;
        let n_zips = if lo == hi { lo } else { rng.random_range(lo..=hi) };
        if !(size > 0.0) {
            return Err(Error::Domain(format!("county {county} drew zero population")));
        }
        draws.push(CountyDraw {
            state: format!("s{:02}", i % cfg.n_states + 1),
            prev,
            now,
            base_mix,
            fe,
            elasticity,
            n_zips,
        });
    }

    let multiplier_of: Vec<f64> = match &cfg.elasticity_interaction {
        Some(ei) => {
            let mut order: Vec<usize> = (0..cfg.n_counties).collect();
            order.sort_by(|&a, &b| draws[a].elasticity.total_cmp(&draws[b].elasticity).then(a.cmp(&b)));
            let k = ei.multipliers.len();
            let mut mult = vec![0.0; cfg.n_counties];
            for (rank, &c) in order.iter().enumerate() {
                let bucket = rank * k / cfg.n_counties;
                mult[c] = ei.multipliers[bucket];
                truth.county_bucket.insert(county_ids[c].clone(), bucket);
                truth
                    .county_elasticity
                    .insert(county_ids[c].clone(), draws[c].elasticity);
            }
            mult
        }
        None => vec![1.0; cfg.n_counties],
    };

    let mut zip_counter = 0usize;
    for (i, (county, draw)) in county_ids.iter().zip(&draws).enumerate() {
        population.insert_counts(county, &draw.state, interval.start(), &draw.prev)?;
        population.insert_counts(county, &draw.state, interval.end(), &draw.now)?;
        let shifts = county_demand_shifts(&preferences, county, &draw.now, &draw.prev)?;
        let beta = cfg.true_beta * multiplier_of[i];
        truth.county_fe.insert(county.clone(), draw.fe);
        truth.county_beta.insert(county.clone(), beta);

        for _ in 0..draw.n_zips {
            zip_counter += 1;
            let zip = format!("z{zip_counter:06}");
            let noise = normals::<N_HOUSING_TYPES>(&mut rng);
            let mut scores = [0.0; N_HOUSING_TYPES];
            for b in 0..N_HOUSING_TYPES {
                scores[b] = draw.base_mix[b] + cfg.stock_dispersion * noise[b];
            }
            let shares = softmax(&scores);
            stock.insert_row(&zip, county, &shares)?;
            let shock = zip_demand_shock(&shifts, &shares)?;
            let shock_ann = shock / years;

            let mut start_vals = Vec::with_capacity(cfg.controls.len() + 1);
            let mut end_vals = Vec::with_capacity(cfg.controls.len() + 1);
            let mut growth = draw.fe + beta * shock_ann;
            let mut control_levels = Vec::with_capacity(cfg.controls.len());
            for c in &cfg.controls {
                let level = c.start_mean + c.start_sd * normal(&mut rng);
                let delta = c.delta_sd * normal(&mut rng) + c.shock_loading * shock_ann;
                growth += c.coefficient * delta;
                control_levels.push((level, level + delta));
            }
            let price_start = 100.0 * (0.2 * normal(&mut rng)).exp();
            let eps = normal(&mut rng);
            growth += cfg.noise_sd * eps;
            if !(growth > -100.0) {
                return Err(Error::Domain(format!(
                    "zip {zip} drew annual growth {growth}% <= -100%"
                )));
            }
            let price_end = price_start * (1.0 + growth / 100.0).powf(years);
            start_vals.push(Some(price_start));
            end_vals.push(Some(price_end));
            for (a, b) in control_levels {
                start_vals.push(Some(a));
                end_vals.push(Some(b));
            }
            let geo = GeoId {
                zip: zip.clone(),
                county: county.clone(),
                state: draw.state.clone(),
            };
            outcomes.insert(&geo, interval.start(), start_vals)?;
            outcomes.insert(&geo, interval.end(), end_vals)?;
            truth.zip_shock_total.insert(zip.clone(), shock);
            truth.zip_shock_annualized.insert(zip.clone(), shock_ann);
            truth.zip_noise.insert(zip, eps);
        }
    }

    Ok(SynthPanel {
        preferences,
        population,
        stock,
        outcomes,
        truth,
        outcome_var: cfg.outcome_var.clone(),
        control_vars: cfg.controls.iter().map(|c| c.name.clone()).collect(),
    })
}
