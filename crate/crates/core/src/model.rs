//! Domain types for demographic, housing-stock and outcome panels.
//!
//! Loaded panels are stored as given; invariant checks live in
//! [`validate_inputs`] so that a broken input can be reported in full
//! rather than rejected at the first problem.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_AGE_GROUPS: usize = 14;
pub const N_HOUSING_TYPES: usize = 5;

/// Tolerance on row sums of share vectors.
pub const SHARE_SUM_TOL: f64 = 1e-9;

/// Census period, in calendar years.
pub type Period = i32;

/// Five-year census age bin, 1 = 20–24 through 13 = 80–84, 14 = 85+.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgeGroup(u8);

impl AgeGroup {
    pub fn new(index: u8) -> Result<Self> {
        if (1..=N_AGE_GROUPS as u8).contains(&index) {
            Ok(AgeGroup(index))
        } else {
            Err(Error::Domain(format!(
                "age group {index} outside 1..={N_AGE_GROUPS}"
            )))
        }
    }

    pub fn from_offset(offset: usize) -> Self {
        assert!(offset < N_AGE_GROUPS, "age offset {offset} out of range");
        AgeGroup(offset as u8 + 1)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based position in per-age arrays.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = AgeGroup> {
        (1..=N_AGE_GROUPS as u8).map(AgeGroup)
    }

    /// Youngest age in the bin.
    pub fn lower_age(self) -> u32 {
        15 + 5 * self.0 as u32
    }

    pub fn label(self) -> String {
        if self.0 as usize == N_AGE_GROUPS {
            "85+".to_string()
        } else {
            let lo = self.lower_age();
            format!("{}-{}", lo, lo + 4)
        }
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Bedroom count of a home; `FivePlus` is a single open-ended bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HousingType {
    One,
    Two,
    Three,
    Four,
    FivePlus,
}

impl HousingType {
    pub const ALL: [HousingType; N_HOUSING_TYPES] = [
        HousingType::One,
        HousingType::Two,
        HousingType::Three,
        HousingType::Four,
        HousingType::FivePlus,
    ];

    /// Integer code used in CSV files (5 = "5+").
    pub fn code(self) -> u8 {
        self.offset() as u8 + 1
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1..=5 => Ok(Self::ALL[code as usize - 1]),
            _ => Err(Error::Domain(format!("housing type {code} outside 1..=5"))),
        }
    }

    pub fn offset(self) -> usize {
        match self {
            HousingType::One => 0,
            HousingType::Two => 1,
            HousingType::Three => 2,
            HousingType::Four => 3,
            HousingType::FivePlus => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HousingType::One => "1BR",
            HousingType::Two => "2BR",
            HousingType::Three => "3BR",
            HousingType::Four => "4BR",
            HousingType::FivePlus => "5+BR",
        }
    }
}

impl fmt::Display for HousingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Geographic identity of a zip code. Identifiers are opaque strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeoId {
    pub zip: String,
    pub county: String,
    pub state: String,
}

/// Per-age-group counts for one county in one period.
pub type AgeCounts = [f64; N_AGE_GROUPS];

/// Base-year share of each age group living in each housing type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceMatrix {
    shares: [[f64; N_HOUSING_TYPES]; N_AGE_GROUPS],
}

impl PreferenceMatrix {
    /// Stores the rows as given; see [`PreferenceMatrix::violations`].
    pub fn from_rows(shares: [[f64; N_HOUSING_TYPES]; N_AGE_GROUPS]) -> Self {
        PreferenceMatrix { shares }
    }

    /// Like [`PreferenceMatrix::from_rows`] but rejects invalid rows.
    pub fn new(shares: [[f64; N_HOUSING_TYPES]; N_AGE_GROUPS]) -> Result<Self> {
        let m = Self::from_rows(shares);
        match m.violations().first() {
            None => Ok(m),
            Some(v) => Err(Error::Invariant(v.to_string())),
        }
    }

    pub fn share(&self, age: AgeGroup, housing: HousingType) -> f64 {
        self.shares[age.offset()][housing.offset()]
    }

    pub fn row(&self, age: AgeGroup) -> &[f64; N_HOUSING_TYPES] {
        &self.shares[age.offset()]
    }

    pub fn rows(&self) -> &[[f64; N_HOUSING_TYPES]; N_AGE_GROUPS] {
        &self.shares
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for age in AgeGroup::all() {
            let row = self.row(age);
            for ht in HousingType::ALL {
                let v = row[ht.offset()];
                if !v.is_finite() || v < 0.0 {
                    out.push(Violation::new(
                        format!("preferences[age={}, type={}]", age.index(), ht.code()),
                        format!("share {v} must be finite and >= 0"),
                    ));
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SHARE_SUM_TOL {
                out.push(Violation::new(
                    format!("preferences[age={}]", age.index()),
                    format!("row sum {sum} ≠ 1"),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountyPopulation {
    pub state: String,
    pub periods: BTreeMap<Period, AgeCounts>,
}

/// County population by period and age group.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PopulationPanel {
    counties: BTreeMap<String, CountyPopulation>,
    conflicts: Vec<Violation>,
}

impl PopulationPanel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one count. Duplicate (county, period, age) keys are a
    /// schema error; a county reported under two states is kept as a
    /// violation for [`validate_inputs`].
    pub fn insert(
        &mut self,
        county: &str,
        state: &str,
        period: Period,
        age: AgeGroup,
        count: f64,
    ) -> Result<()> {
        let entry = self
            .counties
            .entry(county.to_string())
            .or_insert_with(|| CountyPopulation {
                state: state.to_string(),
                periods: BTreeMap::new(),
            });
        if entry.state != state {
            self.conflicts.push(Violation::new(
                format!("population[county={county}]"),
                format!("county mapped to states {} and {state}", entry.state),
            ));
        }
        let counts = entry
            .periods
            .entry(period)
            .or_insert([f64::NAN; N_AGE_GROUPS]);
        let slot = &mut counts[age.offset()];
        if !slot.is_nan() {
            return Err(Error::Schema(format!(
                "duplicate population row for county {county}, period {period}, age group {}",
                age.index()
            )));
        }
        *slot = count;
        Ok(())
    }

    /// Inserts a full age vector for one county-period.
    pub fn insert_counts(
        &mut self,
        county: &str,
        state: &str,
        period: Period,
        counts: &AgeCounts,
    ) -> Result<()> {
        for age in AgeGroup::all() {
            self.insert(county, state, period, age, counts[age.offset()])?;
        }
        Ok(())
    }

    /// Counts for a county-period; age groups never reported read as 0.
    pub fn counts(&self, county: &str, period: Period) -> Option<AgeCounts> {
        let c = self.counties.get(county)?.periods.get(&period)?;
        let mut out = *c;
        for v in out.iter_mut() {
            if v.is_nan() {
                *v = 0.0;
            }
        }
        Some(out)
    }

    pub fn state_of(&self, county: &str) -> Option<&str> {
        self.counties.get(county).map(|c| c.state.as_str())
    }

    pub fn counties(&self) -> impl Iterator<Item = (&String, &CountyPopulation)> {
        self.counties.iter()
    }

    pub fn n_counties(&self) -> usize {
        self.counties.len()
    }

    /// Returns a copy with every count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in out.counties.values_mut() {
            for counts in c.periods.values_mut() {
                for v in counts.iter_mut() {
                    if !v.is_nan() {
                        *v *= factor;
                    }
                }
            }
        }
        out
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.conflicts.clone();
        for (county, cp) in &self.counties {
            for (period, counts) in &cp.periods {
                let mut any_positive = false;
                for age in AgeGroup::all() {
                    let v = counts[age.offset()];
                    if v.is_nan() {
                        continue;
                    }
                    if !v.is_finite() || v < 0.0 {
                        out.push(Violation::new(
                            format!(
                                "population[county={county}, period={period}, age={}]",
                                age.index()
                            ),
                            format!("count {v} must be finite and >= 0"),
                        ));
                    } else if v > 0.0 {
                        any_positive = true;
                    }
                }
                if !any_positive {
                    out.push(Violation::new(
                        format!("population[county={county}, period={period}]"),
                        "no age group has a positive count".to_string(),
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipStock {
    pub county: String,
    pub shares: [f64; N_HOUSING_TYPES],
}

/// Per-zip distribution of the housing stock over bedroom types.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StockShares {
    zips: BTreeMap<String, ZipStock>,
    conflicts: Vec<Violation>,
    seen: BTreeSet<(String, u8)>,
}

impl StockShares {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one share. Types never reported for a zip read as 0.
    pub fn insert(&mut self, zip: &str, county: &str, housing: HousingType, share: f64) -> Result<()> {
        if !self.seen.insert((zip.to_string(), housing.code())) {
            return Err(Error::Schema(format!(
                "duplicate stock row for zip {zip}, housing type {}",
                housing.code()
            )));
        }
        let entry = self.zips.entry(zip.to_string()).or_insert_with(|| ZipStock {
            county: county.to_string(),
            shares: [0.0; N_HOUSING_TYPES],
        });
        if entry.county != county {
            self.conflicts.push(Violation::new(
                format!("stock[zip={zip}]"),
                format!("zip mapped to counties {} and {county}", entry.county),
            ));
        }
        entry.shares[housing.offset()] = share;
        Ok(())
    }

    pub fn insert_row(&mut self, zip: &str, county: &str, shares: &[f64; N_HOUSING_TYPES]) -> Result<()> {
        for ht in HousingType::ALL {
            self.insert(zip, county, ht, shares[ht.offset()])?;
        }
        Ok(())
    }

    pub fn get(&self, zip: &str) -> Option<&ZipStock> {
        self.zips.get(zip)
    }

    pub fn zips(&self) -> impl Iterator<Item = (&String, &ZipStock)> {
        self.zips.iter()
    }

    pub fn len(&self) -> usize {
        self.zips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zips.is_empty()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.conflicts.clone();
        for (zip, zs) in &self.zips {
            for ht in HousingType::ALL {
                let v = zs.shares[ht.offset()];
                if !v.is_finite() || v < 0.0 {
                    out.push(Violation::new(
                        format!("stock[zip={zip}, type={}]", ht.code()),
                        format!("share {v} must be finite and >= 0"),
                    ));
                }
            }
            let sum: f64 = zs.shares.iter().sum();
            if (sum - 1.0).abs() > SHARE_SUM_TOL {
                out.push(Violation::new(
                    format!("stock[zip={zip}]"),
                    format!("row sum {sum} ≠ 1"),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipOutcomes {
    pub county: String,
    pub state: String,
    /// One value per panel variable; `None` is missing.
    pub periods: BTreeMap<Period, Vec<Option<f64>>>,
}

/// Zip-level outcome index levels and control variables by period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomePanel {
    variables: Vec<String>,
    zips: BTreeMap<String, ZipOutcomes>,
    conflicts: Vec<Violation>,
}

impl OutcomePanel {
    pub fn new(variables: Vec<String>) -> Self {
        OutcomePanel {
            variables,
            zips: BTreeMap::new(),
            conflicts: Vec::new(),
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn insert(
        &mut self,
        geo: &GeoId,
        period: Period,
        values: Vec<Option<f64>>,
    ) -> Result<()> {
        if values.len() != self.variables.len() {
            return Err(Error::Schema(format!(
                "outcome row for zip {} has {} values, expected {}",
                geo.zip,
                values.len(),
                self.variables.len()
            )));
        }
        let entry = self
            .zips
            .entry(geo.zip.clone())
            .or_insert_with(|| ZipOutcomes {
                county: geo.county.clone(),
                state: geo.state.clone(),
                periods: BTreeMap::new(),
            });
        if entry.county != geo.county || entry.state != geo.state {
            self.conflicts.push(Violation::new(
                format!("outcomes[zip={}]", geo.zip),
                format!(
                    "zip mapped to ({}, {}) and ({}, {})",
                    entry.county, entry.state, geo.county, geo.state
                ),
            ));
        }
        if entry.periods.insert(period, values).is_some() {
            return Err(Error::Schema(format!(
                "duplicate outcome row for zip {}, period {period}",
                geo.zip
            )));
        }
        Ok(())
    }

    pub fn get(&self, zip: &str) -> Option<&ZipOutcomes> {
        self.zips.get(zip)
    }

    pub fn value(&self, zip: &str, period: Period, var: usize) -> Option<f64> {
        self.zips
            .get(zip)?
            .periods
            .get(&period)?
            .get(var)
            .copied()
            .flatten()
    }

    pub fn zips(&self) -> impl Iterator<Item = (&String, &ZipOutcomes)> {
        self.zips.iter()
    }

    pub fn len(&self) -> usize {
        self.zips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zips.is_empty()
    }

    /// Violations among the named level variables, which must be
    /// strictly positive wherever present.
    pub fn violations(&self, level_vars: &[&str]) -> Vec<Violation> {
        let mut out = self.conflicts.clone();
        for name in level_vars {
            let Some(k) = self.variable_index(name) else {
                out.push(Violation::new(
                    "outcomes".to_string(),
                    format!("level variable {name} not present"),
                ));
                continue;
            };
            for (zip, zo) in &self.zips {
                for (period, vals) in &zo.periods {
                    if let Some(v) = vals[k] {
                        if !(v.is_finite() && v > 0.0) {
                            out.push(Violation::new(
                                format!("outcomes[zip={zip}, period={period}, var={name}]"),
                                format!("index level {v} must be > 0"),
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

/// One invariant violation (or warning) with its location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl Violation {
    pub fn new(location: String, message: String) -> Self {
        Violation { location, message }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    /// Inputs pass iff there are no violations; warnings do not count.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every invariant of the four input panels.
///
/// `level_vars` names the outcome columns used for growth computation;
/// those must be strictly positive. Zips present in only one of
/// `stock`/`outcomes`, and stock counties with no population rows, are
/// reported as warnings.
pub fn validate_inputs(
    pref: &PreferenceMatrix,
    pop: &PopulationPanel,
    stock: &StockShares,
    outcomes: &OutcomePanel,
    level_vars: &[&str],
) -> ValidationReport {
    let mut report = ValidationReport::default();
    report.violations.extend(pref.violations());
    report.violations.extend(pop.violations());
    report.violations.extend(stock.violations());
    report.violations.extend(outcomes.violations(level_vars));

    for (zip, zs) in stock.zips() {
        match outcomes.get(zip) {
            None => report.warnings.push(Violation::new(
                format!("stock[zip={zip}]"),
                "zip absent from outcomes".to_string(),
            )),
            Some(zo) if zo.county != zs.county => report.violations.push(Violation::new(
                format!("zip={zip}"),
                format!(
                    "stock places zip in county {}, outcomes in county {}",
                    zs.county, zo.county
                ),
            )),
            Some(_) => {}
        }
    }
    for (zip, zo) in outcomes.zips() {
        if stock.get(zip).is_none() {
            report.warnings.push(Violation::new(
                format!("outcomes[zip={zip}]"),
                "zip absent from stock".to_string(),
            ));
        }
        if let Some(state) = pop.state_of(&zo.county) {
            if state != zo.state {
                report.violations.push(Violation::new(
                    format!("zip={zip}"),
                    format!(
                        "county {} is in state {state} in population, {} in outcomes",
                        zo.county, zo.state
                    ),
                ));
            }
        }
    }
    let stock_counties: BTreeSet<&str> = stock.zips().map(|(_, zs)| zs.county.as_str()).collect();
    for county in stock_counties {
        if pop.state_of(county).is_none() {
            report.warnings.push(Violation::new(
                format!("county={county}"),
                "county in stock has no population rows".to_string(),
            ));
        }
    }
    report
}

/// Compound annual growth in percent: `100 * ((end/start)^(1/years) - 1)`.
pub fn annualized_growth(start_level: f64, end_level: f64, years: f64) -> Result<f64> {
    if !(start_level.is_finite() && start_level > 0.0) {
        return Err(Error::Domain(format!("start level {start_level} must be > 0")));
    }
    if !(end_level.is_finite() && end_level > 0.0) {
        return Err(Error::Domain(format!("end level {end_level} must be > 0")));
    }
    if !(years.is_finite() && years > 0.0) {
        return Err(Error::Domain(format!("interval length {years} must be > 0")));
    }
    Ok(100.0 * ((end_level / start_level).powf(1.0 / years) - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_pref() -> PreferenceMatrix {
        PreferenceMatrix::new([[0.2; N_HOUSING_TYPES]; N_AGE_GROUPS]).unwrap()
    }

    #[test]
    fn age_group_bounds_and_labels() {
        assert!(AgeGroup::new(0).is_err());
        assert!(AgeGroup::new(15).is_err());
        assert_eq!(AgeGroup::new(1).unwrap().label(), "20-24");
        assert_eq!(AgeGroup::new(13).unwrap().label(), "80-84");
        assert_eq!(AgeGroup::new(14).unwrap().label(), "85+");
        assert_eq!(AgeGroup::all().count(), 14);
    }

    #[test]
    fn housing_type_codes() {
        for (i, ht) in HousingType::ALL.iter().enumerate() {
            assert_eq!(ht.code() as usize, i + 1);
            assert_eq!(HousingType::from_code(ht.code()).unwrap(), *ht);
        }
        assert!(HousingType::from_code(6).is_err());
        assert!(HousingType::from_code(0).is_err());
    }

    #[test]
    fn growth_examples() {
        assert_eq!(annualized_growth(100.0, 100.0, 6.0).unwrap(), 0.0);
        assert!((annualized_growth(100.0, 200.0, 1.0).unwrap() - 100.0).abs() < 1e-12);
        // 1.04^6 = 1.265319018496
        let g = annualized_growth(100.0, 126.53, 6.0).unwrap();
        assert!((g - 4.0).abs() < 1e-3, "{g}");
        let exact = annualized_growth(100.0, 126.5319018496, 6.0).unwrap();
        assert!((exact - 4.0).abs() < 1e-9, "{exact}");
    }

    #[test]
    fn growth_rejects_nonpositive_inputs() {
        assert!(matches!(annualized_growth(0.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(annualized_growth(1.0, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(annualized_growth(1.0, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn preference_row_sum_violation() {
        let mut rows = [[0.2; N_HOUSING_TYPES]; N_AGE_GROUPS];
        rows[3] = [0.2, 0.2, 0.2, 0.2, 0.18];
        let pref = PreferenceMatrix::from_rows(rows);
        let v = pref.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].location, "preferences[age=4]");
        assert!(v[0].message.starts_with("row sum 0.98"), "{}", v[0].message);
        assert!(PreferenceMatrix::new(rows).is_err());
    }

    #[test]
    fn preference_accepts_zero_and_one_entries() {
        let mut rows = [[0.0; N_HOUSING_TYPES]; N_AGE_GROUPS];
        for (a, row) in rows.iter_mut().enumerate() {
            row[a % N_HOUSING_TYPES] = 1.0;
        }
        assert!(PreferenceMatrix::new(rows).is_ok());
    }

    #[test]
    fn negative_count_reported_with_location() {
        let mut pop = PopulationPanel::new();
        let mut counts = [10.0; N_AGE_GROUPS];
        counts[2] = -5.0;
        pop.insert_counts("c1", "s1", 2012, &counts).unwrap();
        let v = pop.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].location, "population[county=c1, period=2012, age=3]");
    }

    #[test]
    fn all_zero_county_period_is_a_violation() {
        let mut pop = PopulationPanel::new();
        pop.insert_counts("c1", "s1", 2012, &[0.0; N_AGE_GROUPS]).unwrap();
        assert_eq!(pop.violations().len(), 1);
    }

    #[test]
    fn duplicate_rows_are_schema_errors() {
        let mut pop = PopulationPanel::new();
        let a = AgeGroup::new(1).unwrap();
        pop.insert("c", "s", 2000, a, 1.0).unwrap();
        assert!(matches!(pop.insert("c", "s", 2000, a, 1.0), Err(Error::Schema(_))));

        let mut stock = StockShares::new();
        stock.insert("z", "c", HousingType::One, 1.0).unwrap();
        assert!(matches!(
            stock.insert("z", "c", HousingType::One, 1.0),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn geo_conflicts_are_violations() {
        let mut stock = StockShares::new();
        stock.insert("z", "c1", HousingType::One, 0.5).unwrap();
        stock.insert("z", "c2", HousingType::Two, 0.5).unwrap();
        assert_eq!(stock.violations().len(), 1);
    }

    fn consistent_fixture() -> (PreferenceMatrix, PopulationPanel, StockShares, OutcomePanel) {
        let pref = uniform_pref();
        let mut pop = PopulationPanel::new();
        pop.insert_counts("c1", "s1", 2012, &[100.0; N_AGE_GROUPS]).unwrap();
        pop.insert_counts("c1", "s1", 2018, &[110.0; N_AGE_GROUPS]).unwrap();
        let mut stock = StockShares::new();
        stock.insert_row("z1", "c1", &[0.2; N_HOUSING_TYPES]).unwrap();
        let mut out = OutcomePanel::new(vec!["price".into()]);
        let geo = GeoId {
            zip: "z1".into(),
            county: "c1".into(),
            state: "s1".into(),
        };
        out.insert(&geo, 2012, vec![Some(100.0)]).unwrap();
        out.insert(&geo, 2018, vec![Some(120.0)]).unwrap();
        (pref, pop, stock, out)
    }

    #[test]
    fn consistent_inputs_pass_and_validation_is_idempotent() {
        let (pref, pop, stock, out) = consistent_fixture();
        let r1 = validate_inputs(&pref, &pop, &stock, &out, &["price"]);
        let r2 = validate_inputs(&pref, &pop, &stock, &out, &["price"]);
        assert!(r1.passed());
        assert!(r1.warnings.is_empty());
        assert_eq!(r1, r2);
    }

    #[test]
    fn unmatched_zips_are_warnings_only() {
        let (pref, pop, mut stock, out) = consistent_fixture();
        stock.insert_row("z2", "c1", &[0.2; N_HOUSING_TYPES]).unwrap();
        let r = validate_inputs(&pref, &pop, &stock, &out, &["price"]);
        assert!(r.passed());
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.warnings[0].location, "stock[zip=z2]");
    }

    #[test]
    fn nonpositive_level_is_a_violation() {
        let (pref, pop, stock, mut out) = consistent_fixture();
        let geo = GeoId {
            zip: "z1".into(),
            county: "c1".into(),
            state: "s1".into(),
        };
        out.insert(&geo, 2020, vec![Some(0.0)]).unwrap();
        let r = validate_inputs(&pref, &pop, &stock, &out, &["price"]);
        assert_eq!(r.violations.len(), 1);
    }
}
