//! Binned scatter of residualized y against residualized x.
//!
//! Both variables are residualized on the controls and absorbed fixed
//! effects, their sample means are added back, rows are sorted by x and
//! cut into consecutive bins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::hdfe::{absorb, ols, AbsorbOptions, Factor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinRule {
    /// This many bins of (near) equal count; the first `n % k` bins get
    /// one extra row.
    Count(usize),
    /// Bins of this many rows; the last may be smaller.
    Size(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub index: usize,
    pub mean_x: f64,
    pub mean_y: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedScatter {
    pub rule: BinRule,
    pub bins: Vec<Bin>,
    pub n_obs: usize,
    /// OLS slope of the residualized y on the residualized x.
    pub slope: f64,
}

/// Residualized `x` and `y` (sample means added back) over the rows where
/// every input is present.
pub fn residualize(
    data: &Frame,
    x: &str,
    y: &str,
    controls: &[String],
    fe: &[String],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let xs = data.numeric(x)?;
    let ys = data.numeric(y)?;
    let cs = controls
        .iter()
        .map(|c| data.numeric(c))
        .collect::<Result<Vec<_>>>()?;
    let fe_ids = fe
        .iter()
        .map(|d| data.categorical(d))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<usize> = (0..data.n_rows())
        .filter(|&i| {
            xs[i].is_finite()
                && ys[i].is_finite()
                && cs.iter().all(|c| c[i].is_finite())
                && fe_ids.iter().all(|ids| !ids[i].is_empty())
        })
        .collect();
    let n = rows.len();
    if n == 0 {
        return Err(Error::InsufficientData("no complete rows to bin".into()));
    }
    let pick = |v: &[f64]| rows.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let factors: Vec<Factor> = if fe_ids.is_empty() {
        vec![Factor::constant(n)]
    } else {
        fe_ids
            .iter()
            .map(|ids| Factor::new(&rows.iter().map(|&i| ids[i].as_str()).collect::<Vec<_>>()))
            .collect()
    };
    let mut cols = vec![pick(xs), pick(ys)];
    cols.extend(cs.iter().map(|c| pick(c)));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&cols[0]), mean(&cols[1]));
    let outcome = absorb(&mut cols, &factors, None, &AbsorbOptions::default());
    if !outcome.converged {
        return Err(Error::NotConverged {
            iterations: outcome.iterations,
        });
    }
    let ctl = cols.split_off(2);
    let mut yr = cols.pop().expect("y column");
    let mut xr = cols.pop().expect("x column");
    if !ctl.is_empty() {
        xr = ols(&xr, &ctl)?.residuals;
        yr = ols(&yr, &ctl)?.residuals;
    }
    xr.iter_mut().for_each(|v| *v += mx);
    yr.iter_mut().for_each(|v| *v += my);
    Ok((xr, yr))
}

fn bin_sizes(n: usize, rule: BinRule) -> Result<Vec<usize>> {
    match rule {
        BinRule::Count(k) => {
            if k == 0 || k > n {
                return Err(Error::Config(format!("{k} bins requested for {n} rows")));
            }
            let (q, r) = (n / k, n % k);
            Ok((0..k).map(|b| q + usize::from(b < r)).collect())
        }
        BinRule::Size(s) => {
            if s == 0 || s > n {
                return Err(Error::Config(format!("bin size {s} for {n} rows")));
            }
            let mut sizes = vec![s; n / s];
            if !n.is_multiple_of(s) {
                sizes.push(n % s);
            }
            Ok(sizes)
        }
    }
}

/// Bins already-residualized points. Rows are ordered by x; ties keep
/// their input order.
pub fn bin_points(x: &[f64], y: &[f64], rule: BinRule) -> Result<Vec<Bin>> {
    if x.len() != y.len() {
        return Err(Error::Invariant("x and y lengths differ".into()));
    }
    let sizes = bin_sizes(x.len(), rule)?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut bins = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for (index, size) in sizes.into_iter().enumerate() {
        let members = &order[at..at + size];
        at += size;
        let m = size as f64;
        bins.push(Bin {
            index,
            mean_x: members.iter().map(|&i| x[i]).sum::<f64>() / m,
            mean_y: members.iter().map(|&i| y[i]).sum::<f64>() / m,
            count: size,
        });
    }
    Ok(bins)
}

/// Slope of the simple regression of `y` on `x` with an intercept.
pub fn ols_slope(x: &[f64], y: &[f64], w: Option<&[f64]>) -> f64 {
    let wt = |i: usize| w.map_or(1.0, |w| w[i]);
    let sw: f64 = (0..x.len()).map(wt).sum();
    let mx = (0..x.len()).map(|i| wt(i) * x[i]).sum::<f64>() / sw;
    let my = (0..x.len()).map(|i| wt(i) * y[i]).sum::<f64>() / sw;
    let sxy: f64 = (0..x.len()).map(|i| wt(i) * (x[i] - mx) * (y[i] - my)).sum();
    let sxx: f64 = (0..x.len()).map(|i| wt(i) * (x[i] - mx).powi(2)).sum();
    sxy / sxx
}

/// Count-weighted slope through the bin means.
pub fn bin_slope(bins: &[Bin]) -> f64 {
    let x: Vec<f64> = bins.iter().map(|b| b.mean_x).collect();
    let y: Vec<f64> = bins.iter().map(|b| b.mean_y).collect();
    let w: Vec<f64> = bins.iter().map(|b| b.count as f64).collect();
    ols_slope(&x, &y, Some(&w))
}

pub fn binned_scatter(
    data: &Frame,
    x: &str,
    y: &str,
    controls: &[String],
    fe: &[String],
    rule: BinRule,
) -> Result<BinnedScatter> {
    let (xr, yr) = residualize(data, x, y, controls, fe)?;
    let bins = bin_points(&xr, &yr, rule)?;
    Ok(BinnedScatter {
        rule,
        n_obs: xr.len(),
        slope: ols_slope(&xr, &yr, None),
        bins,
    })
}
