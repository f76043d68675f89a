use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{absorb, cluster_cov, ols, AbsorbOptions, Factor};
use crate::error::{Error, Result};
use crate::frame::Frame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingletonPolicy {
    #[default]
    Keep,
    /// Iteratively drop rows that are alone in some fixed-effect group.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitOptions {
    pub absorb: AbsorbOptions,
    pub singletons: SingletonPolicy,
    /// Optional column of positive per-row weights.
    pub weight: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    pub outcome: String,
    pub regressors: Vec<String>,
    /// Absorbed fixed-effect dimensions. Empty means a plain intercept.
    pub fe_dimensions: Vec<String>,
    pub cluster_dimension: String,
    pub options: FitOptions,
}

impl RegressionSpec {
    pub fn new(outcome: impl Into<String>, regressors: Vec<String>) -> Self {
        RegressionSpec {
            outcome: outcome.into(),
            regressors,
            fe_dimensions: Vec::new(),
            cluster_dimension: String::new(),
            options: FitOptions::default(),
        }
    }

    pub fn absorb(mut self, fe: impl Into<String>) -> Self {
        self.fe_dimensions.push(fe.into());
        self
    }

    pub fn cluster(mut self, dim: impl Into<String>) -> Self {
        self.cluster_dimension = dim.into();
        self
    }

    pub fn with_options(mut self, options: FitOptions) -> Self {
        self.options = options;
        self
    }

    fn check(&self, data: &Frame) -> Result<()> {
        if self.regressors.is_empty() {
            return Err(Error::Config("at least one regressor is required".into()));
        }
        if self.cluster_dimension.is_empty() {
            return Err(Error::Config("a cluster dimension is required".into()));
        }
        let mut names = vec![&self.outcome, &self.cluster_dimension];
        names.extend(&self.regressors);
        names.extend(&self.fe_dimensions);
        names.extend(&self.options.weight);
        for n in names {
            if !data.has(n) {
                return Err(Error::Schema(format!("column {n} not found")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub outcome: String,
    pub regressors: Vec<String>,
    pub fe_dimensions: Vec<String>,
    pub cluster_dimension: String,
    pub beta: Vec<f64>,
    pub vcov: Vec<Vec<f64>>,
    pub se: Vec<f64>,
    pub t_stat: Vec<f64>,
    pub p_value: Vec<f64>,
    pub n_obs: usize,
    pub n_clusters: usize,
    pub n_dropped_singletons: usize,
    pub n_deleted_missing: usize,
    /// Absorbed fixed-effect degrees of freedom counted in `K`.
    pub k_absorbed: usize,
    pub r2_overall: f64,
    pub r2_within: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl RegressionResult {
    pub fn index_of(&self, regressor: &str) -> Option<usize> {
        self.regressors.iter().position(|r| r == regressor)
    }

    /// `(beta, se, p)` for one regressor.
    pub fn coef(&self, regressor: &str) -> Option<(f64, f64, f64)> {
        let i = self.index_of(regressor)?;
        Some((self.beta[i], self.se[i], self.p_value[i]))
    }
}

fn sum_sq(v: &[f64], w: Option<&[f64]>) -> f64 {
    match w {
        Some(w) => v.iter().zip(w).map(|(x, wi)| wi * x * x).sum(),
        None => v.iter().map(|x| x * x).sum(),
    }
}

fn drop_singletons(ids: &[Vec<String>], keep: &mut [bool]) -> usize {
    let mut dropped = 0;
    loop {
        let mut changed = false;
        for dim in ids {
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for (i, id) in dim.iter().enumerate() {
                if keep[i] {
                    *counts.entry(id.as_str()).or_insert(0) += 1;
                }
            }
            for (i, id) in dim.iter().enumerate() {
                if keep[i] && counts[id.as_str()] == 1 {
                    keep[i] = false;
                    dropped += 1;
                    changed = true;
                }
            }
        }
        if !changed {
            return dropped;
        }
    }
}

fn r2(ssr: f64, sst: f64) -> f64 {
    if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Fits `outcome ~ regressors | fixed effects` with cluster-robust
/// standard errors.
///
/// Rows with a missing outcome, regressor or weight are deleted
/// listwise. `K` for the small-sample correction counts the regressors
/// plus the absorbed groups of every dimension, less one shared
/// intercept per extra dimension. p-values use a t distribution with
/// `G - 1` degrees of freedom.
pub fn fit(spec: &RegressionSpec, data: &Frame) -> Result<RegressionResult> {
    spec.check(data)?;
    let n_all = data.n_rows();
    let y_all = data.numeric(&spec.outcome)?;
    let x_all = spec
        .regressors
        .iter()
        .map(|r| data.numeric(r))
        .collect::<Result<Vec<_>>>()?;
    let w_all = spec.options.weight.as_deref().map(|w| data.numeric(w)).transpose()?;

    let mut keep: Vec<bool> = (0..n_all)
        .map(|i| {
            y_all[i].is_finite()
                && x_all.iter().all(|c| c[i].is_finite())
                && w_all.is_none_or(|w| w[i].is_finite())
        })
        .collect();
    let n_deleted_missing = keep.iter().filter(|k| !**k).count();

    let fe_ids = spec
        .fe_dimensions
        .iter()
        .map(|d| data.categorical(d))
        .collect::<Result<Vec<_>>>()?;
    let cluster_ids = data.categorical(&spec.cluster_dimension)?;
    for i in (0..n_all).filter(|&i| keep[i]) {
        if cluster_ids[i].is_empty() {
            return Err(Error::Schema(format!(
                "row {i} has no {} cluster id",
                spec.cluster_dimension
            )));
        }
        if let Some(d) = fe_ids.iter().position(|ids| ids[i].is_empty()) {
            return Err(Error::Schema(format!(
                "row {i} has no {} id",
                spec.fe_dimensions[d]
            )));
        }
        if let Some(w) = w_all {
            if !(w[i] > 0.0) {
                return Err(Error::Domain(format!("row {i} has nonpositive weight {}", w[i])));
            }
        }
    }

    let n_dropped_singletons = match spec.options.singletons {
        SingletonPolicy::Keep => 0,
        SingletonPolicy::Drop => drop_singletons(&fe_ids, &mut keep),
    };
    let rows: Vec<usize> = (0..n_all).filter(|&i| keep[i]).collect();
    let n = rows.len();
    if n == 0 {
        return Err(Error::InsufficientData("no complete rows".into()));
    }

    let pick = |v: &[f64]| rows.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let pick_ids = |v: &[String]| rows.iter().map(|&i| v[i].clone()).collect::<Vec<String>>();
    let factors: Vec<Factor> = if fe_ids.is_empty() {
        vec![Factor::constant(n)]
    } else {
        fe_ids.iter().map(|ids| Factor::new(&pick_ids(ids))).collect()
    };
    let clusters = Factor::new(&pick_ids(&cluster_ids));
    let k_absorbed =
        factors.iter().map(Factor::n_levels).sum::<usize>() - (factors.len() - 1);
    let p = spec.regressors.len();
    if n <= p + k_absorbed {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {p} regressors and {k_absorbed} absorbed effects"
        )));
    }

    let y_raw = pick(y_all);
    let w = w_all.map(pick);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p + 1);
    cols.push(y_raw.clone());
    cols.extend(x_all.iter().map(|c| pick(c)));
    let outcome = absorb(&mut cols, &factors, w.as_deref(), &spec.options.absorb);

    if let Some(w) = &w {
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        for c in cols.iter_mut() {
            for (v, s) in c.iter_mut().zip(&sw) {
                *v *= s;
            }
        }
    }
    let y_dm = &cols[0];
    let x_dm = &cols[1..];
    let fit = ols(y_dm, x_dm).map_err(|e| match e {
        Error::Collinear { index, .. } => Error::Collinear {
            index,
            name: spec.regressors[index].clone(),
        },
        other => other,
    })?;
    let vcov = cluster_cov(x_dm, &fit.residuals, &clusters, k_absorbed)?;

    let g = clusters.n_levels();
    let tdist = StudentsT::new(0.0, 1.0, (g - 1) as f64)
        .map_err(|e| Error::Domain(format!("t distribution: {e}")))?;
    let se: Vec<f64> = (0..p).map(|j| vcov[(j, j)].max(0.0).sqrt()).collect();
    let t_stat: Vec<f64> = fit.beta.iter().zip(&se).map(|(b, s)| b / s).collect();
    let p_value = t_stat
        .iter()
        .map(|t| if t.is_nan() { f64::NAN } else { 2.0 * tdist.sf(t.abs()) })
        .collect();

    // weighted residuals already carry sqrt(w)
    let ssr: f64 = fit.residuals.iter().map(|e| e * e).sum();
    let sst_within: f64 = y_dm.iter().map(|v| v * v).sum();
    let (wsum, wy) = match &w {
        Some(w) => (w.iter().sum::<f64>(), w.iter().zip(&y_raw).map(|(a, b)| a * b).sum::<f64>()),
        None => (n as f64, y_raw.iter().sum::<f64>()),
    };
    let ybar = wy / wsum;
    let centered: Vec<f64> = y_raw.iter().map(|v| v - ybar).collect();
    let sst = sum_sq(&centered, w.as_deref());

    Ok(RegressionResult {
        outcome: spec.outcome.clone(),
        regressors: spec.regressors.clone(),
        fe_dimensions: spec.fe_dimensions.clone(),
        cluster_dimension: spec.cluster_dimension.clone(),
        beta: fit.beta,
        vcov: (0..p).map(|i| (0..p).map(|j| vcov[(i, j)]).collect()).collect(),
        se,
        t_stat,
        p_value,
        n_obs: n,
        n_clusters: g,
        n_dropped_singletons,
        n_deleted_missing,
        k_absorbed,
        r2_overall: r2(ssr, sst),
        r2_within: r2(ssr, sst_within),
        converged: outcome.converged,
        iterations: outcome.iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GroupOutcome {
    Fitted(Box<RegressionResult>),
    Skipped { n_rows: usize },
    Failed { n_rows: usize, error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedFits {
    pub group_dimension: String,
    pub min_group_size: usize,
    pub groups: BTreeMap<String, GroupOutcome>,
}

impl GroupedFits {
    pub fn fitted(&self) -> impl Iterator<Item = (&str, &RegressionResult)> {
        self.groups.iter().filter_map(|(g, o)| match o {
            GroupOutcome::Fitted(r) => Some((g.as_str(), r.as_ref())),
            _ => None,
        })
    }

    pub fn skipped(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().filter_map(|(g, o)| match o {
            GroupOutcome::Skipped { .. } => Some(g.as_str()),
            _ => None,
        })
    }
}

/// Fits `spec` separately within each level of `group_dimension`.
///
/// Groups with fewer than `min_group_size` rows are skipped; a failing
/// fit is recorded for its group and does not stop the others.
pub fn fit_by_group(
    spec: &RegressionSpec,
    data: &Frame,
    group_dimension: &str,
    min_group_size: usize,
) -> Result<GroupedFits> {
    let labels = data.categorical(group_dimension)?;
    let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, g) in labels.into_iter().enumerate() {
        members.entry(g).or_default().push(i);
    }
    let results: Vec<(String, GroupOutcome)> = members
        .into_par_iter()
        .map(|(g, rows)| {
            let n_rows = rows.len();
            let outcome = if n_rows < min_group_size {
                GroupOutcome::Skipped { n_rows }
            } else {
                match fit(spec, &data.take(&rows)) {
                    Ok(r) => GroupOutcome::Fitted(Box::new(r)),
                    Err(e) => GroupOutcome::Failed {
                        n_rows,
                        error: e.to_string(),
                    },
                }
            };
            (g, outcome)
        })
        .collect();
    Ok(GroupedFits {
        group_dimension: group_dimension.to_string(),
        min_group_size,
        groups: results.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless_frame() -> Frame {
        let n = 40;
        let county: Vec<String> = (0..n).map(|i| format!("c{}", i % 5)).collect();
        let shock: Vec<f64> = (0..n).map(|i| ((i * 17) % 11) as f64 * 0.3 - 1.0).collect();
        let y: Vec<f64> = (0..n).map(|i| 2.0 * shock[i] + 10.0 * (i % 5) as f64 - 3.0).collect();
        Frame::new(n)
            .with_numeric("y", y)
            .unwrap()
            .with_numeric("shock", shock)
            .unwrap()
            .with_categorical("county", county)
            .unwrap()
    }

    fn spec() -> RegressionSpec {
        RegressionSpec::new("y", vec!["shock".into()])
            .absorb("county")
            .cluster("county")
    }

    #[test]
    fn noiseless_recovery() {
        let r = fit(&spec(), &noiseless_frame()).unwrap();
        assert!((r.beta[0] - 2.0).abs() < 1e-9);
        assert!((r.r2_overall - 1.0).abs() < 1e-9);
        assert_eq!(r.n_obs, 40);
        assert_eq!(r.n_clusters, 5);
        assert_eq!(r.k_absorbed, 5);
        assert!(r.converged);
    }

    #[test]
    fn missing_values_deleted_listwise() {
        let mut f = noiseless_frame();
        let mut y = f.numeric("y").unwrap().to_vec();
        y[3] = f64::NAN;
        y[7] = f64::NAN;
        f.insert("y", crate::Column::Numeric(y)).unwrap();
        let r = fit(&spec(), &f).unwrap();
        assert_eq!(r.n_deleted_missing, 2);
        assert_eq!(r.n_obs, 38);
    }

    #[test]
    fn missing_cluster_id_is_an_error() {
        let f = noiseless_frame();
        let mut c = f.categorical("county").unwrap();
        c[0] = String::new();
        let f = f.with_categorical("cl", c).unwrap();
        let s = RegressionSpec::new("y", vec!["shock".into()])
            .absorb("county")
            .cluster("cl");
        assert!(matches!(fit(&s, &f), Err(Error::Schema(_))));
    }

    #[test]
    fn collinear_regressor_is_named() {
        let f = noiseless_frame();
        let county_const: Vec<f64> = (0..40).map(|i| (i % 5) as f64).collect();
        let f = f.with_numeric("cc", county_const).unwrap();
        let s = RegressionSpec::new("y", vec!["shock".into(), "cc".into()])
            .absorb("county")
            .cluster("county");
        match fit(&s, &f) {
            Err(Error::Collinear { index, name }) => {
                assert_eq!(index, 1);
                assert_eq!(name, "cc");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singleton_policy() {
        let f = noiseless_frame();
        let mut c = f.categorical("county").unwrap();
        c[0] = "lonely".into();
        let f = f.with_categorical("county", c).unwrap();
        let kept = fit(&spec(), &f).unwrap();
        assert_eq!(kept.n_dropped_singletons, 0);
        assert_eq!(kept.n_obs, 40);
        assert_eq!(kept.k_absorbed, 6);
        let mut s = spec();
        s.options.singletons = SingletonPolicy::Drop;
        let dropped = fit(&s, &f).unwrap();
        assert_eq!(dropped.n_dropped_singletons, 1);
        assert_eq!(dropped.n_obs, 39);
        assert_eq!(dropped.k_absorbed, 5);
        assert!((kept.beta[0] - dropped.beta[0]).abs() < 1e-12);
    }

    #[test]
    fn unknown_column_is_schema_error() {
        let s = RegressionSpec::new("nope", vec!["shock".into()]).cluster("county");
        assert!(matches!(fit(&s, &noiseless_frame()), Err(Error::Schema(_))));
    }

    #[test]
    fn integer_weights_match_duplicated_rows() {
        let n = 30;
        let county: Vec<String> = (0..n).map(|i| format!("c{}", i % 3)).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.77).sin()).collect();
        let y: Vec<f64> = (0..n).map(|i| x[i] * 1.5 + ((i * 31) % 7) as f64 * 0.1).collect();
        let w: Vec<f64> = (0..n).map(|i| (1 + i % 3) as f64).collect();
        let weighted = Frame::new(n)
            .with_numeric("y", y.clone())
            .unwrap()
            .with_numeric("x", x.clone())
            .unwrap()
            .with_numeric("w", w.clone())
            .unwrap()
            .with_categorical("county", county.clone())
            .unwrap();
        let mut rows = Vec::new();
        for (i, &wi) in w.iter().enumerate() {
            rows.extend(std::iter::repeat_n(i, wi as usize));
        }
        let dup = weighted.take(&rows);
        let mut s = RegressionSpec::new("y", vec!["x".into()]).absorb("county").cluster("county");
        let b_dup = fit(&s, &dup).unwrap().beta[0];
        s.options.weight = Some("w".into());
        let b_w = fit(&s, &weighted).unwrap().beta[0];
        assert!((b_dup - b_w).abs() < 1e-12, "{b_dup} vs {b_w}");
    }

    #[test]
    fn grouped_fit_skips_small_groups() {
        let base = noiseless_frame();
        let state: Vec<String> = (0..40).map(|i| if i < 30 { "big" } else { "small" }.to_string()).collect();
        let f = base.with_categorical("state", state).unwrap();
        let g = fit_by_group(&spec(), &f, "state", 20).unwrap();
        assert_eq!(g.skipped().collect::<Vec<_>>(), vec!["small"]);
        assert_eq!(g.fitted().count(), 1);
    }
}
