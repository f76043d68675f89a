//! Shift-share demand shocks.
//!
//! A county's demand shift for housing type `b` is the percent growth of
//! the population that base-year preferences would place in type `b`:
//!
//! ```text
//! d[b] = 100 * (sum_a pref[a][b] * pop_now[a] / sum_a pref[a][b] * pop_prev[a] - 1)
//! ```
//!
//! A zip's shock is the stock-share weighted average of its county's
//! shifts, `D = sum_b stock[b] * d[b]`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Column, Frame};
use crate::model::{
    annualized_growth, AgeCounts, GeoId, HousingType, OutcomePanel, Period, PopulationPanel,
    PreferenceMatrix, StockShares, N_HOUSING_TYPES, SHARE_SUM_TOL,
};

/// Percent change in implied demand per housing type for one county.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandShiftVector(pub [f64; N_HOUSING_TYPES]);

impl DemandShiftVector {
    pub fn get(&self, housing: HousingType) -> f64 {
        self.0[housing.offset()]
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A `(start, end)` pair of periods with `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    start: Period,
    end: Period,
}

impl Interval {
    pub fn new(start: Period, end: Period) -> Result<Self> {
        if start >= end {
            return Err(Error::Domain(format!(
                "interval start {start} must precede end {end}"
            )));
        }
        Ok(Interval { start, end })
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn end(&self) -> Period {
        self.end
    }

    pub fn years(&self) -> f64 {
        (self.end - self.start) as f64
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

fn implied_demand(pref: &PreferenceMatrix, counts: &AgeCounts, housing: HousingType) -> f64 {
    pref.rows()
        .iter()
        .zip(counts.iter())
        .map(|(row, &n)| row[housing.offset()] * n)
        .sum()
}

/// Percent growth of type-`housing` implied demand in `county` between
/// `pop_prev` and `pop_now`.
pub fn county_demand_shift(
    pref: &PreferenceMatrix,
    county: &str,
    pop_now: &AgeCounts,
    pop_prev: &AgeCounts,
    housing: HousingType,
) -> Result<f64> {
    let denom = implied_demand(pref, pop_prev, housing);
    if !(denom > 0.0) {
        return Err(Error::DegenerateDemand {
            county: county.to_string(),
            housing_type: housing.label().to_string(),
        });
    }
    let numer = implied_demand(pref, pop_now, housing);
    Ok(100.0 * (numer - denom) / denom)
}

pub fn county_demand_shifts(
    pref: &PreferenceMatrix,
    county: &str,
    pop_now: &AgeCounts,
    pop_prev: &AgeCounts,
) -> Result<DemandShiftVector> {
    let mut out = [0.0; N_HOUSING_TYPES];
    for ht in HousingType::ALL {
        out[ht.offset()] = county_demand_shift(pref, county, pop_now, pop_prev, ht)?;
    }
    Ok(DemandShiftVector(out))
}

/// Stock-share weighted average of the county shifts.
pub fn zip_demand_shock(shifts: &DemandShiftVector, shares: &[f64; N_HOUSING_TYPES]) -> Result<f64> {
    if shares.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::Invariant(format!(
            "stock shares {shares:?} must be finite and >= 0"
        )));
    }
    let sum: f64 = shares.iter().sum();
    if (sum - 1.0).abs() > SHARE_SUM_TOL {
        return Err(Error::Invariant(format!("stock shares sum to {sum}, not 1")));
    }
    Ok(shares.iter().zip(shifts.0.iter()).map(|(s, d)| s * d).sum())
}

/// Why a zip was left out of a shock panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    NoPopulation,
    DegenerateDemand,
    InvalidShares,
    NotInOutcomes,
    CountyMismatch,
    MissingOutcome,
    NonpositiveLevel,
}

impl Exclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Exclusion::NoPopulation => "no_population",
            Exclusion::DegenerateDemand => "degenerate_demand",
            Exclusion::InvalidShares => "invalid_shares",
            Exclusion::NotInOutcomes => "not_in_outcomes",
            Exclusion::CountyMismatch => "county_mismatch",
            Exclusion::MissingOutcome => "missing_outcome",
            Exclusion::NonpositiveLevel => "nonpositive_level",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub n_stock_zips: usize,
    pub n_retained: usize,
    pub excluded: Vec<(String, Exclusion)>,
}

impl CoverageReport {
    pub fn counts(&self) -> BTreeMap<Exclusion, usize> {
        let mut out = BTreeMap::new();
        for (_, why) in &self.excluded {
            *out.entry(*why).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockRow {
    pub geo: GeoId,
    pub period_start: Period,
    pub period_end: Period,
    pub shock_total_pct: f64,
    pub shock_annualized_pct: f64,
    pub outcome_growth_pct_per_year: f64,
    /// Change in each control variable over the interval; `None` if
    /// either endpoint is missing.
    pub controls: Vec<Option<f64>>,
}

/// One row per retained zip for a single interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockPanel {
    pub control_names: Vec<String>,
    pub rows: Vec<ShockRow>,
    pub coverage: CoverageReport,
}

/// Column name of the change in control `var` in shock panels.
pub fn control_delta_name(var: &str) -> String {
    format!("d_{var}")
}

impl ShockPanel {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Regression-ready table with the shock-panel column names.
    pub fn to_frame(&self) -> Frame {
        let n = self.rows.len();
        let mut f = Frame::new(n);
        let cat = |get: fn(&ShockRow) -> &str| {
            Column::Categorical(self.rows.iter().map(|r| get(r).to_string()).collect())
        };
        let num = |get: &dyn Fn(&ShockRow) -> f64| Column::Numeric(self.rows.iter().map(get).collect());
        let cols = [
            ("zip_id", cat(|r| &r.geo.zip)),
            ("county_id", cat(|r| &r.geo.county)),
            ("state_id", cat(|r| &r.geo.state)),
            ("period_start", num(&|r| r.period_start as f64)),
            ("period_end", num(&|r| r.period_end as f64)),
            ("shock_total_pct", num(&|r| r.shock_total_pct)),
            ("shock_annualized_pct", num(&|r| r.shock_annualized_pct)),
            ("outcome_growth_pct_per_year", num(&|r| r.outcome_growth_pct_per_year)),
        ];
        for (name, col) in cols {
            f.insert(name, col).expect("row counts agree");
        }
        for (k, name) in self.control_names.iter().enumerate() {
            let col = self
                .rows
                .iter()
                .map(|r| r.controls[k].unwrap_or(f64::NAN))
                .collect();
            f.insert(name.clone(), Column::Numeric(col)).expect("row counts agree");
        }
        f
    }

    pub fn shock_by_zip(&self) -> BTreeMap<&str, f64> {
        self.rows
            .iter()
            .map(|r| (r.geo.zip.as_str(), r.shock_total_pct))
            .collect()
    }
}

/// What to build: interval, the outcome level variable, and the control
/// variables whose changes are carried along.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockRequest {
    pub interval: Interval,
    pub outcome_var: String,
    pub controls: Vec<String>,
}

impl ShockRequest {
    pub fn new(interval: Interval, outcome_var: impl Into<String>) -> Self {
        ShockRequest {
            interval,
            outcome_var: outcome_var.into(),
            controls: Vec::new(),
        }
    }

    pub fn with_controls(mut self, controls: Vec<String>) -> Self {
        self.controls = controls;
        self
    }
}

/// Builds the zip-level shock panel for one interval.
///
/// Zips whose shock or outcome growth cannot be computed are excluded
/// and listed in the coverage report. The only hard error is an empty
/// result (or an unknown outcome/control variable).
pub fn build_shock_panel(
    pref: &PreferenceMatrix,
    pop: &PopulationPanel,
    stock: &StockShares,
    outcomes: &OutcomePanel,
    request: &ShockRequest,
) -> Result<ShockPanel> {
    let interval = request.interval;
    let outcome_idx = outcomes.variable_index(&request.outcome_var).ok_or_else(|| {
        Error::Schema(format!("outcome variable {} not in outcomes", request.outcome_var))
    })?;
    let control_idx = request
        .controls
        .iter()
        .map(|c| {
            outcomes
                .variable_index(c)
                .ok_or_else(|| Error::Schema(format!("control variable {c} not in outcomes")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut shifts: BTreeMap<&str, Result<DemandShiftVector, Exclusion>> = BTreeMap::new();
    let mut coverage = CoverageReport {
        n_stock_zips: stock.len(),
        ..Default::default()
    };
    let mut rows = Vec::new();

    for (zip, zs) in stock.zips() {
        let county_shift = shifts.entry(zs.county.as_str()).or_insert_with(|| {
            let (Some(now), Some(prev)) = (
                pop.counts(&zs.county, interval.end()),
                pop.counts(&zs.county, interval.start()),
            ) else {
                return Err(Exclusion::NoPopulation);
            };
            county_demand_shifts(pref, &zs.county, &now, &prev)
                .map_err(|_| Exclusion::DegenerateDemand)
        });
        let row = (|| {
            let d = (*county_shift)?;
            let shock = zip_demand_shock(&d, &zs.shares).map_err(|_| Exclusion::InvalidShares)?;
            let zo = outcomes.get(zip).ok_or(Exclusion::NotInOutcomes)?;
            if zo.county != zs.county {
                return Err(Exclusion::CountyMismatch);
            }
            let (Some(start), Some(end)) = (
                outcomes.value(zip, interval.start(), outcome_idx),
                outcomes.value(zip, interval.end(), outcome_idx),
            ) else {
                return Err(Exclusion::MissingOutcome);
            };
            let growth = annualized_growth(start, end, interval.years())
                .map_err(|_| Exclusion::NonpositiveLevel)?;
            let controls = control_idx
                .iter()
                .map(|&k| {
                    let a = outcomes.value(zip, interval.start(), k)?;
                    let b = outcomes.value(zip, interval.end(), k)?;
                    Some(b - a)
                })
                .collect();
            Ok(ShockRow {
                geo: GeoId {
                    zip: zip.clone(),
                    county: zs.county.clone(),
                    state: zo.state.clone(),
                },
                period_start: interval.start(),
                period_end: interval.end(),
                shock_total_pct: shock,
                shock_annualized_pct: shock / interval.years(),
                outcome_growth_pct_per_year: growth,
                controls,
            })
        })();
        match row {
            Ok(r) => rows.push(r),
            Err(why) => coverage.excluded.push((zip.clone(), why)),
        }
    }
    coverage.n_retained = rows.len();
    if rows.is_empty() {
        return Err(Error::EmptyResult(format!(
            "no zip has both a shock and outcome growth for {interval}"
        )));
    }
    Ok(ShockPanel {
        control_names: request.controls.iter().map(|c| control_delta_name(c)).collect(),
        rows,
        coverage,
    })
}
