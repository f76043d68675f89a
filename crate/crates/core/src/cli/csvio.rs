//! CSV schemas. Comma separated, UTF-8, header row required, `.`
//! decimal, empty field = missing. Floats are written in their shortest
//! round-trip form so that reading and re-writing a file reproduces it
//! byte for byte.

use std::io::Write;
use std::path::Path;

use crate::bartik::{CoverageReport, ShockPanel, ShockRow};
use crate::error::{Error, Result};
use crate::hdfe::{GroupOutcome, GroupedFits};
use crate::model::{
    AgeCounts, AgeGroup, GeoId, HousingType, OutcomePanel, Period, PopulationPanel,
    PreferenceMatrix, StockShares, ValidationReport, N_AGE_GROUPS, N_HOUSING_TYPES,
};
use crate::synth::{DemandProjection, McSummary};

use super::binscatter::{Bin, BinnedScatter};

pub const POPULATION_HEADER: [&str; 5] = ["county_id", "state_id", "period", "age_group", "count"];
pub const PREFERENCES_HEADER: [&str; 3] = ["age_group", "housing_type", "share"];
pub const STOCK_HEADER: [&str; 4] = ["zip_id", "county_id", "housing_type", "share"];
pub const OUTCOMES_PREFIX: [&str; 4] = ["zip_id", "county_id", "state_id", "period"];
pub const SHOCKS_PREFIX: [&str; 8] = [
    "zip_id",
    "county_id",
    "state_id",
    "period_start",
    "period_end",
    "shock_total_pct",
    "shock_annualized_pct",
    "outcome_growth_pct_per_year",
];
pub const BINSCATTER_HEADER: [&str; 4] = ["bin_index", "mean_x", "mean_y", "count"];
pub const MC_SUMMARY_HEADER: [&str; 7] = [
    "true_beta",
    "mean_beta",
    "sd_beta",
    "mean_se",
    "coverage_95",
    "n_reps",
    "n_failed",
];
pub const SCENARIO_HEADER: [&str; 3] = ["period", "age_group", "share"];
pub const PROJECTION_HEADER: [&str; 4] = ["period", "housing_type", "demand_share", "index"];
pub const REPORT_HEADER: [&str; 3] = ["severity", "location", "message"];
pub const COVERAGE_HEADER: [&str; 2] = ["zip_id", "reason"];
pub const GROUPS_HEADER: [&str; 9] = [
    "group", "status", "n_rows", "n_obs", "n_clusters", "beta", "se", "t_stat", "p_value",
];

/// Shortest round-trip text for a float; `NaN` is the empty field.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

/// Writes `bytes` to `path` via a temporary file in the same directory
/// and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

struct Table {
    path: String,
    header: Vec<String>,
    records: Vec<csv::StringRecord>,
}

impl Table {
    fn field<'a>(&self, rec: &'a csv::StringRecord, line: usize, col: usize) -> &'a str {
        let _ = (line, &self.path);
        rec.get(col).unwrap_or("")
    }

    fn err(&self, line: usize, msg: impl std::fmt::Display) -> Error {
        Error::Csv {
            path: self.path.clone().into(),
            message: format!("line {line}: {msg}"),
        }
    }

    fn rows(&self) -> impl Iterator<Item = (usize, &csv::StringRecord)> {
        self.records.iter().enumerate().map(|(i, r)| (i + 2, r))
    }

    fn req_str<'a>(&self, rec: &'a csv::StringRecord, line: usize, col: usize) -> Result<&'a str> {
        let s = self.field(rec, line, col);
        if s.is_empty() {
            return Err(self.err(line, format!("{} is required", self.header[col])));
        }
        Ok(s)
    }

    fn opt_f64(&self, rec: &csv::StringRecord, line: usize, col: usize) -> Result<Option<f64>> {
        let s = self.field(rec, line, col);
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<f64>()
            .map(Some)
            .map_err(|_| self.err(line, format!("{} = {s:?} is not a number", self.header[col])))
    }

    fn req_f64(&self, rec: &csv::StringRecord, line: usize, col: usize) -> Result<f64> {
        self.opt_f64(rec, line, col)?
            .ok_or_else(|| self.err(line, format!("{} is required", self.header[col])))
    }

    fn req_int<T: std::str::FromStr>(&self, rec: &csv::StringRecord, line: usize, col: usize) -> Result<T> {
        let s = self.req_str(rec, line, col)?;
        s.parse::<T>()
            .map_err(|_| self.err(line, format!("{} = {s:?} is not an integer", self.header[col])))
    }
}

fn read_table(path: &Path) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.into(),
        message: e.to_string(),
    };
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let records = rdr.records().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_err)?;
    Ok(Table {
        path: path.display().to_string(),
        header,
        records,
    })
}

fn expect_header(t: &Table, expected: &[&str], exact: bool) -> Result<()> {
    let ok = if exact {
        t.header == expected
    } else {
        t.header.len() >= expected.len() && t.header[..expected.len()] == *expected
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Schema(format!(
            "{}: header {:?} does not match schema {:?}{}",
            t.path,
            t.header,
            expected,
            if exact { "" } else { " + variables" }
        )))
    }
}

fn age(t: &Table, rec: &csv::StringRecord, line: usize, col: usize) -> Result<AgeGroup> {
    AgeGroup::new(t.req_int(rec, line, col)?).map_err(|e| t.err(line, e))
}

fn housing(t: &Table, rec: &csv::StringRecord, line: usize, col: usize) -> Result<HousingType> {
    HousingType::from_code(t.req_int(rec, line, col)?).map_err(|e| t.err(line, e))
}

fn to_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let werr = |e: csv::Error| Error::Schema(format!("csv encoding: {e}"));
    w.write_record(header).map_err(werr)?;
    for r in rows {
        w.write_record(&r).map_err(werr)?;
    }
    w.into_inner().map_err(|e| Error::Schema(format!("csv encoding: {e}")))
}

pub fn read_population(path: &Path) -> Result<PopulationPanel> {
    let t = read_table(path)?;
    expect_header(&t, &POPULATION_HEADER, true)?;
    let mut pop = PopulationPanel::new();
    for (line, rec) in t.rows() {
        let county = t.req_str(rec, line, 0)?;
        let state = t.req_str(rec, line, 1)?;
        let period: Period = t.req_int(rec, line, 2)?;
        let a = age(&t, rec, line, 3)?;
        let count = t.req_f64(rec, line, 4)?;
        pop.insert(county, state, period, a, count)?;
    }
    Ok(pop)
}

pub fn population_bytes(pop: &PopulationPanel) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (county, cp) in pop.counties() {
        for (period, counts) in &cp.periods {
            for a in AgeGroup::all() {
                let v = counts[a.offset()];
                if v.is_nan() {
                    continue;
                }
                rows.push(vec![
                    county.clone(),
                    cp.state.clone(),
                    period.to_string(),
                    a.index().to_string(),
                    fmt_f64(v),
                ]);
            }
        }
    }
    to_bytes(&POPULATION_HEADER, rows)
}

pub fn read_preferences(path: &Path) -> Result<PreferenceMatrix> {
    let t = read_table(path)?;
    expect_header(&t, &PREFERENCES_HEADER, true)?;
    let mut rows = [[0.0; N_HOUSING_TYPES]; N_AGE_GROUPS];
    let mut seen = [[false; N_HOUSING_TYPES]; N_AGE_GROUPS];
    for (line, rec) in t.rows() {
        let a = age(&t, rec, line, 0)?;
        let h = housing(&t, rec, line, 1)?;
        if std::mem::replace(&mut seen[a.offset()][h.offset()], true) {
            return Err(Error::Schema(format!(
                "{}: duplicate preference row for age group {}, housing type {}",
                t.path,
                a.index(),
                h.code()
            )));
        }
        rows[a.offset()][h.offset()] = t.req_f64(rec, line, 2)?;
    }
    Ok(PreferenceMatrix::from_rows(rows))
}

pub fn preferences_bytes(pref: &PreferenceMatrix) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for a in AgeGroup::all() {
        for h in HousingType::ALL {
            rows.push(vec![
                a.index().to_string(),
                h.code().to_string(),
                fmt_f64(pref.share(a, h)),
            ]);
        }
    }
    to_bytes(&PREFERENCES_HEADER, rows)
}

pub fn read_stock(path: &Path) -> Result<StockShares> {
    let t = read_table(path)?;
    expect_header(&t, &STOCK_HEADER, true)?;
    let mut stock = StockShares::new();
    for (line, rec) in t.rows() {
        let zip = t.req_str(rec, line, 0)?;
        let county = t.req_str(rec, line, 1)?;
        let h = housing(&t, rec, line, 2)?;
        let share = t.req_f64(rec, line, 3)?;
        stock.insert(zip, county, h, share)?;
    }
    Ok(stock)
}

pub fn stock_bytes(stock: &StockShares) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (zip, zs) in stock.zips() {
        for h in HousingType::ALL {
            rows.push(vec![
                zip.clone(),
                zs.county.clone(),
                h.code().to_string(),
                fmt_f64(zs.shares[h.offset()]),
            ]);
        }
    }
    to_bytes(&STOCK_HEADER, rows)
}

pub fn read_outcomes(path: &Path) -> Result<OutcomePanel> {
    let t = read_table(path)?;
    expect_header(&t, &OUTCOMES_PREFIX, false)?;
    let vars: Vec<String> = t.header[OUTCOMES_PREFIX.len()..].to_vec();
    let mut panel = OutcomePanel::new(vars.clone());
    for (line, rec) in t.rows() {
        let geo = GeoId {
            zip: t.req_str(rec, line, 0)?.to_string(),
            county: t.req_str(rec, line, 1)?.to_string(),
            state: t.req_str(rec, line, 2)?.to_string(),
        };
        let period: Period = t.req_int(rec, line, 3)?;
        let values = (0..vars.len())
            .map(|k| t.opt_f64(rec, line, OUTCOMES_PREFIX.len() + k))
            .collect::<Result<Vec<_>>>()?;
        panel.insert(&geo, period, values)?;
    }
    Ok(panel)
}

pub fn outcomes_bytes(out: &OutcomePanel) -> Result<Vec<u8>> {
    let mut header: Vec<&str> = OUTCOMES_PREFIX.to_vec();
    header.extend(out.variables().iter().map(String::as_str));
    let mut rows = Vec::new();
    for (zip, zo) in out.zips() {
        for (period, vals) in &zo.periods {
            let mut r = vec![zip.clone(), zo.county.clone(), zo.state.clone(), period.to_string()];
            r.extend(vals.iter().map(|v| fmt_opt(*v)));
            rows.push(r);
        }
    }
    to_bytes(&header, rows)
}

pub fn read_shocks(path: &Path) -> Result<ShockPanel> {
    let t = read_table(path)?;
    expect_header(&t, &SHOCKS_PREFIX, false)?;
    let control_names: Vec<String> = t.header[SHOCKS_PREFIX.len()..].to_vec();
    let mut rows = Vec::with_capacity(t.records.len());
    for (line, rec) in t.rows() {
        rows.push(ShockRow {
            geo: GeoId {
                zip: t.req_str(rec, line, 0)?.to_string(),
                county: t.req_str(rec, line, 1)?.to_string(),
                state: t.req_str(rec, line, 2)?.to_string(),
            },
            period_start: t.req_int(rec, line, 3)?,
            period_end: t.req_int(rec, line, 4)?,
            shock_total_pct: t.req_f64(rec, line, 5)?,
            shock_annualized_pct: t.req_f64(rec, line, 6)?,
            outcome_growth_pct_per_year: t.req_f64(rec, line, 7)?,
            controls: (0..control_names.len())
                .map(|k| t.opt_f64(rec, line, SHOCKS_PREFIX.len() + k))
                .collect::<Result<Vec<_>>>()?,
        });
    }
    Ok(ShockPanel {
        coverage: CoverageReport {
            n_stock_zips: rows.len(),
            n_retained: rows.len(),
            excluded: Vec::new(),
        },
        control_names,
        rows,
    })
}

pub fn shocks_bytes(panel: &ShockPanel) -> Result<Vec<u8>> {
    let mut header: Vec<&str> = SHOCKS_PREFIX.to_vec();
    header.extend(panel.control_names.iter().map(String::as_str));
    let rows = panel.rows.iter().map(|r| {
        let mut v = vec![
            r.geo.zip.clone(),
            r.geo.county.clone(),
            r.geo.state.clone(),
            r.period_start.to_string(),
            r.period_end.to_string(),
            fmt_f64(r.shock_total_pct),
            fmt_f64(r.shock_annualized_pct),
            fmt_f64(r.outcome_growth_pct_per_year),
        ];
        v.extend(r.controls.iter().map(|c| fmt_opt(*c)));
        v
    });
    to_bytes(&header, rows)
}

pub fn coverage_bytes(cov: &CoverageReport) -> Result<Vec<u8>> {
    let rows = cov
        .excluded
        .iter()
        .map(|(zip, why)| vec![zip.clone(), why.as_str().to_string()]);
    to_bytes(&COVERAGE_HEADER, rows)
}

pub fn report_bytes(report: &ValidationReport) -> Result<Vec<u8>> {
    let rows = report
        .violations
        .iter()
        .map(|v| ("violation", v))
        .chain(report.warnings.iter().map(|w| ("warning", w)))
        .map(|(sev, v)| vec![sev.to_string(), v.location.clone(), v.message.clone()]);
    to_bytes(&REPORT_HEADER, rows)
}

pub fn read_binscatter(path: &Path) -> Result<Vec<Bin>> {
    let t = read_table(path)?;
    expect_header(&t, &BINSCATTER_HEADER, true)?;
    t.rows()
        .map(|(line, rec)| {
            Ok(Bin {
                index: t.req_int(rec, line, 0)?,
                mean_x: t.req_f64(rec, line, 1)?,
                mean_y: t.req_f64(rec, line, 2)?,
                count: t.req_int(rec, line, 3)?,
            })
        })
        .collect()
}

pub fn binscatter_bytes(bins: &[Bin]) -> Result<Vec<u8>> {
    let rows = bins.iter().map(|b| {
        vec![
            b.index.to_string(),
            fmt_f64(b.mean_x),
            fmt_f64(b.mean_y),
            b.count.to_string(),
        ]
    });
    to_bytes(&BINSCATTER_HEADER, rows)
}

pub fn binned_scatter_bytes(s: &BinnedScatter) -> Result<Vec<u8>> {
    binscatter_bytes(&s.bins)
}

pub fn read_mc_summary(path: &Path) -> Result<McSummary> {
    let t = read_table(path)?;
    expect_header(&t, &MC_SUMMARY_HEADER, true)?;
    let mut it = t.rows();
    let (line, rec) = it
        .next()
        .ok_or_else(|| Error::Schema(format!("{}: no summary row", t.path)))?;
    if it.next().is_some() {
        return Err(Error::Schema(format!("{}: more than one summary row", t.path)));
    }
    let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
    Ok(McSummary {
        true_beta: t.req_f64(rec, line, 0)?,
        mean_beta: nan(t.opt_f64(rec, line, 1)?),
        sd_beta: nan(t.opt_f64(rec, line, 2)?),
        mean_se: nan(t.opt_f64(rec, line, 3)?),
        coverage_95: nan(t.opt_f64(rec, line, 4)?),
        n_reps: t.req_int(rec, line, 5)?,
        n_failed: t.req_int(rec, line, 6)?,
    })
}

pub fn mc_summary_bytes(s: &McSummary) -> Result<Vec<u8>> {
    to_bytes(
        &MC_SUMMARY_HEADER,
        [vec![
            fmt_f64(s.true_beta),
            fmt_f64(s.mean_beta),
            fmt_f64(s.sd_beta),
            fmt_f64(s.mean_se),
            fmt_f64(s.coverage_95),
            s.n_reps.to_string(),
            s.n_failed.to_string(),
        ]],
    )
}

/// Reads a projection scenario: age-group shares (or counts, which are
/// normalized) per period.
pub fn read_scenario(path: &Path) -> Result<(Vec<Period>, Vec<AgeCounts>)> {
    let t = read_table(path)?;
    expect_header(&t, &SCENARIO_HEADER, true)?;
    let mut by_period: std::collections::BTreeMap<Period, AgeCounts> = Default::default();
    for (line, rec) in t.rows() {
        let period: Period = t.req_int(rec, line, 0)?;
        let a = age(&t, rec, line, 1)?;
        let share = t.req_f64(rec, line, 2)?;
        let row = by_period.entry(period).or_insert([f64::NAN; N_AGE_GROUPS]);
        if !row[a.offset()].is_nan() {
            return Err(Error::Schema(format!(
                "{}: duplicate scenario row for period {period}, age group {}",
                t.path,
                a.index()
            )));
        }
        row[a.offset()] = share;
    }
    let periods = by_period.keys().copied().collect();
    let rows = by_period
        .into_values()
        .map(|r| r.map(|v| if v.is_nan() { 0.0 } else { v }))
        .collect();
    Ok((periods, rows))
}

pub fn scenario_bytes(periods: &[Period], shares: &[AgeCounts]) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (p, row) in periods.iter().zip(shares) {
        for a in AgeGroup::all() {
            rows.push(vec![p.to_string(), a.index().to_string(), fmt_f64(row[a.offset()])]);
        }
    }
    to_bytes(&SCENARIO_HEADER, rows)
}

pub fn projection_bytes(p: &DemandProjection) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (k, period) in p.periods.iter().enumerate() {
        for h in HousingType::ALL {
            rows.push(vec![
                period.to_string(),
                h.code().to_string(),
                fmt_f64(p.demand_share[k][h.offset()]),
                fmt_f64(p.index[k][h.offset()]),
            ]);
        }
    }
    to_bytes(&PROJECTION_HEADER, rows)
}

pub fn read_projection(path: &Path) -> Result<DemandProjection> {
    let t = read_table(path)?;
    expect_header(&t, &PROJECTION_HEADER, true)?;
    let mut periods: Vec<Period> = Vec::new();
    let mut demand_share: Vec<[f64; N_HOUSING_TYPES]> = Vec::new();
    let mut index: Vec<[f64; N_HOUSING_TYPES]> = Vec::new();
    for (line, rec) in t.rows() {
        let period: Period = t.req_int(rec, line, 0)?;
        let h = housing(&t, rec, line, 1)?;
        if periods.last() != Some(&period) {
            if periods.last().is_some_and(|p| *p > period) {
                return Err(t.err(line, "periods must be in increasing order"));
            }
            periods.push(period);
            demand_share.push([f64::NAN; N_HOUSING_TYPES]);
            index.push([f64::NAN; N_HOUSING_TYPES]);
        }
        let k = periods.len() - 1;
        demand_share[k][h.offset()] = t.req_f64(rec, line, 2)?;
        index[k][h.offset()] = t.req_f64(rec, line, 3)?;
    }
    Ok(DemandProjection {
        periods,
        demand_share,
        index,
    })
}

/// One row per group with the coefficient on `regressor`.
pub fn groups_bytes(g: &GroupedFits, regressor: &str) -> Result<Vec<u8>> {
    let rows = g.groups.iter().map(|(name, outcome)| match outcome {
        GroupOutcome::Fitted(r) => {
            let i = r.index_of(regressor).unwrap_or(0);
            vec![
                name.clone(),
                "fitted".into(),
                (r.n_obs + r.n_deleted_missing + r.n_dropped_singletons).to_string(),
                r.n_obs.to_string(),
                r.n_clusters.to_string(),
                fmt_f64(r.beta[i]),
                fmt_f64(r.se[i]),
                fmt_f64(r.t_stat[i]),
                fmt_f64(r.p_value[i]),
            ]
        }
        GroupOutcome::Skipped { n_rows } => {
            let mut v = vec![name.clone(), "skipped".into(), n_rows.to_string()];
            v.extend(std::iter::repeat_n(String::new(), 6));
            v
        }
        GroupOutcome::Failed { n_rows, .. } => {
            let mut v = vec![name.clone(), "failed".into(), n_rows.to_string()];
            v.extend(std::iter::repeat_n(String::new(), 6));
            v
        }
    });
    to_bytes(&GROUPS_HEADER, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, 1.0 / 3.0, 6.251, -1e-9, 1e21, 123456789.125, 5e-324] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            assert!(!s.contains('e'));
        }
        assert_eq!(fmt_f64(f64::NAN), "");
        assert_eq!(fmt_f64(3.0), "3");
    }

    #[test]
    fn header_mismatch_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pref.csv");
        std::fs::write(&p, "age,housing_type,share\n1,1,1\n").unwrap();
        assert!(matches!(read_preferences(&p), Err(Error::Schema(_))));
    }

    #[test]
    fn bad_number_is_csv_error_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pref.csv");
        std::fs::write(&p, "age_group,housing_type,share\n1,1,abc\n").unwrap();
        match read_preferences(&p) {
            Err(Error::Csv { message, .. }) => assert!(message.starts_with("line 2"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_population(Path::new("/nonexistent/population.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn atomic_write_creates_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.csv");
        write_atomic(&p, b"a\n1\n").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"a\n1\n");
    }
}
