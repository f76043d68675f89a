//! Slow, transparent reference implementations for cross-checking the
//! engine: dummy-variable regression, an explicitly looped sandwich
//! covariance and a term-by-term shift-share evaluation.
//!
//! Nothing here shares code with [`crate::hdfe`] or [`crate::bartik`].
//! The routines are small-instance only and are never used on
//! production paths.

// Index loops mirror the textbook formulas term by term.
#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{AgeCounts, PreferenceMatrix, StockShares, N_AGE_GROUPS, N_HOUSING_TYPES};

pub const MAX_ROWS: usize = 5_000;
pub const MAX_DUMMIES: usize = 200;
pub const MAX_ZIPS: usize = 50;

/// Regressors, an intercept, and one 0/1 column per fixed-effect level
/// with the first (sorted) level of each dimension dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDesign {
    /// Row-major `n x k`.
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// The first `n_regressors` columns are the regressors.
    pub n_regressors: usize,
}

impl DenseDesign {
    pub fn build(regressors: &[Vec<f64>], fe_ids: &[Vec<String>]) -> Result<Self> {
        let n = regressors.first().map_or(0, Vec::len);
        if n > MAX_ROWS {
            return Err(Error::OracleGuard(format!("{n} rows > {MAX_ROWS}")));
        }
        let mut labels: Vec<String> = (0..regressors.len()).map(|j| format!("x{j}")).collect();
        labels.push("intercept".into());
        let mut dummy_levels: Vec<(usize, String)> = Vec::new();
        for (d, ids) in fe_ids.iter().enumerate() {
            if ids.len() != n {
                return Err(Error::Domain("fixed-effect ids differ in length".into()));
            }
            let levels: BTreeSet<&String> = ids.iter().collect();
            for level in levels.into_iter().skip(1) {
                dummy_levels.push((d, level.clone()));
                labels.push(format!("fe{d}={level}"));
            }
        }
        if dummy_levels.len() > MAX_DUMMIES {
            return Err(Error::OracleGuard(format!(
                "{} dummy columns > {MAX_DUMMIES}",
                dummy_levels.len()
            )));
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(labels.len());
            for r in regressors {
                row.push(r[i]);
            }
            row.push(1.0);
            for (d, level) in &dummy_levels {
                row.push(if fe_ids[*d][i] == *level { 1.0 } else { 0.0 });
            }
            rows.push(row);
        }
        if rows.first().is_some_and(|r| r.len() >= n) || n == 0 {
            return Err(Error::OracleGuard("design has no fewer rows than columns".into()));
        }
        Ok(DenseDesign {
            rows,
            labels,
            n_regressors: regressors.len(),
        })
    }

    pub fn n_cols(&self) -> usize {
        self.labels.len()
    }
}

/// Gauss-Jordan inverse with partial pivoting. Reports the column of the
/// first negligible pivot as collinear.
fn invert(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let k = a.len();
    let scale = (0..k).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..k {
        let mut piv = col;
        for r in col + 1..k {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Collinear {
                index: col,
                name: format!("dense column {col}"),
            });
        }
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..k {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * k {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[k..].to_vec()).collect())
}

fn cross_product(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = rows[0].len();
    let mut out = vec![vec![0.0; k]; k];
    for row in rows {
        for a in 0..k {
            for b in 0..k {
                out[a][b] += row[a] * row[b];
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOls {
    /// Coefficients on the regressors only.
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
    pub design: DenseDesign,
}

/// Dummy-variable least squares solved from the full normal equations.
pub fn dense_fe_ols(y: &[f64], regressors: &[Vec<f64>], fe_ids: &[Vec<String>]) -> Result<DenseOls> {
    let design = DenseDesign::build(regressors, fe_ids)?;
    if design.rows.len() != y.len() {
        return Err(Error::Domain("outcome and design differ in length".into()));
    }
    let k = design.n_cols();
    let xtx = cross_product(&design.rows);
    let mut xty = vec![0.0; k];
    for (row, &yi) in design.rows.iter().zip(y) {
        for a in 0..k {
            xty[a] += row[a] * yi;
        }
    }
    let inv = invert(&xtx)?;
    let coef: Vec<f64> = (0..k)
        .map(|a| (0..k).map(|b| inv[a][b] * xty[b]).sum())
        .collect();
    let residuals = design
        .rows
        .iter()
        .zip(y)
        .map(|(row, &yi)| yi - row.iter().zip(&coef).map(|(x, c)| x * c).sum::<f64>())
        .collect();
    Ok(DenseOls {
        beta: coef[..design.n_regressors].to_vec(),
        residuals,
        design,
    })
}

/// Clustered sandwich over the full dense design, with the same
/// `G/(G-1) * (N-1)/(N-K)` correction, `K` = all design columns.
/// Returns the regressor block.
pub fn dense_cluster_cov(
    residuals: &[f64],
    design: &DenseDesign,
    cluster_ids: &[String],
) -> Result<Vec<Vec<f64>>> {
    let n = design.rows.len();
    let k = design.n_cols();
    if residuals.len() != n || cluster_ids.len() != n {
        return Err(Error::Domain("residuals, design and clusters differ in length".into()));
    }
    let groups: BTreeSet<&String> = cluster_ids.iter().collect();
    let g = groups.len();
    if g < 2 {
        return Err(Error::InsufficientClusters(g));
    }
    let bread = invert(&cross_product(&design.rows))?;

    let mut meat = vec![vec![0.0; k]; k];
    for label in &groups {
        let mut score = vec![0.0; k];
        for i in 0..n {
            if cluster_ids[i] == **label {
                for a in 0..k {
                    score[a] += design.rows[i][a] * residuals[i];
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                meat[a][b] += score[a] * score[b];
            }
        }
    }

    let c = (g as f64 / (g as f64 - 1.0)) * ((n as f64 - 1.0) / (n as f64 - k as f64));
    let p = design.n_regressors;
    let mut out = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..p {
            let mut s = 0.0;
            for i in 0..k {
                for j in 0..k {
                    s += bread[a][i] * meat[i][j] * bread[j][b];
                }
            }
            out[a][b] = c * s;
        }
    }
    Ok(out)
}

/// Interval-total shock per zip, evaluated with explicit nested loops.
pub fn brute_bartik(
    pref: &PreferenceMatrix,
    pop_now: &BTreeMap<String, AgeCounts>,
    pop_prev: &BTreeMap<String, AgeCounts>,
    stock: &StockShares,
) -> Result<BTreeMap<String, f64>> {
    if stock.len() > MAX_ZIPS {
        return Err(Error::OracleGuard(format!("{} zips > {MAX_ZIPS}", stock.len())));
    }
    let prefs = pref.rows();
    let mut out = BTreeMap::new();
    for (zip, zs) in stock.zips() {
        let (Some(now), Some(prev)) = (pop_now.get(&zs.county), pop_prev.get(&zs.county)) else {
            return Err(Error::Domain(format!("no population for county {}", zs.county)));
        };
        let mut shock = 0.0;
        for b in 0..N_HOUSING_TYPES {
            let mut numer = 0.0;
            let mut denom = 0.0;
            for a in 0..N_AGE_GROUPS {
                numer += prefs[a][b] * now[a];
                denom += prefs[a][b] * prev[a];
            }
            if denom == 0.0 {
                return Err(Error::DegenerateDemand {
                    county: zs.county.clone(),
                    housing_type: format!("{}", b + 1),
                });
            }
            let shift = 100.0 * (numer / denom - 1.0);
            shock += zs.shares[b] * shift;
        }
        out.insert(zip.clone(), shock);
    }
    Ok(out)
}
