#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use demoshock::bartik::{CoverageReport, Interval, ShockPanel, ShockRow};
use demoshock::hdfe::{absorbed, fit, AbsorbOptions, Factor, RegressionResult, RegressionSpec};
use demoshock::model::{
    AgeCounts, GeoId, OutcomePanel, PopulationPanel, PreferenceMatrix, StockShares,
    N_AGE_GROUPS, N_HOUSING_TYPES,
};
use demoshock::oracle::{dense_cluster_cov, dense_fe_ols};
use demoshock::synth::{generate_panel, ControlGenerator, DgpConfig, SynthPanel};
use demoshock::Frame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// One random fixed-effects regression problem.
pub struct FeInstance {
    pub frame: Frame,
    pub spec: RegressionSpec,
    pub n_groups: usize,
}

pub fn fe_instance(rng: &mut ChaCha8Rng) -> FeInstance {
    let n = rng.random_range(200..=1000);
    let g = rng.random_range(5..=50);
    let p = rng.random_range(1..=5);
    let groups: Vec<usize> = (0..n)
        .map(|i| if i < 2 * g { i % g } else { rng.random_range(0..g) })
        .collect();
    let group_fe: Vec<f64> = (0..g).map(|_| 3.0 * normal(rng)).collect();
    let group_shock: Vec<f64> = (0..g).map(|_| normal(rng)).collect();
    let mut frame = Frame::new(n);
    let mut names = Vec::new();
    let mut y: Vec<f64> = groups.iter().map(|&c| group_fe[c]).collect();
    for j in 0..p {
        let x: Vec<f64> = groups
            .iter()
            .map(|&c| 0.7 * group_fe[c] + normal(rng) * (1.0 + 0.3 * j as f64))
            .collect();
        let beta = (j as f64 + 1.0) * if j % 2 == 0 { 1.0 } else { -0.5 };
        for i in 0..n {
            y[i] += beta * x[i];
        }
        let name = format!("x{j}");
        frame = frame.with_numeric(name.clone(), x).unwrap();
        names.push(name);
    }
    for i in 0..n {
        y[i] += group_shock[groups[i]] + normal(rng) * (0.5 + (i % 3) as f64);
    }
    let ids: Vec<String> = groups.iter().map(|c| format!("g{c:02}")).collect();
    frame = frame
        .with_numeric("y", y)
        .unwrap()
        .with_categorical("county", ids)
        .unwrap();
    FeInstance {
        frame,
        spec: RegressionSpec::new("y", names).absorb("county").cluster("county"),
        n_groups: g,
    }
}

/// Worst relative error of the engine's beta and clustered SE against
/// the dense oracle.
pub fn oracle_gap(inst: &FeInstance) -> (f64, f64) {
    let r = fit(&inst.spec, &inst.frame).unwrap();
    let y = inst.frame.numeric("y").unwrap();
    let xs: Vec<Vec<f64>> = inst
        .spec
        .regressors
        .iter()
        .map(|n| inst.frame.numeric(n).unwrap().to_vec())
        .collect();
    let ids = inst.frame.categorical("county").unwrap();
    let dense = dense_fe_ols(y, &xs, std::slice::from_ref(&ids)).unwrap();
    let cov = dense_cluster_cov(&dense.residuals, &dense.design, &ids).unwrap();
    let mut beta_gap: f64 = 0.0;
    let mut se_gap: f64 = 0.0;
    for (j, row) in cov.iter().enumerate().take(xs.len()) {
        beta_gap = beta_gap.max(rel_err(r.beta[j], dense.beta[j]));
        se_gap = se_gap.max(rel_err(r.se[j], row[j].sqrt()));
    }
    (beta_gap, se_gap)
}

/// Small random shift-share inputs: 1-5 counties, at most 50 zips.
pub struct BartikInstance {
    pub pref: PreferenceMatrix,
    pub pop: PopulationPanel,
    pub stock: StockShares,
    pub outcomes: OutcomePanel,
    pub interval: Interval,
    pub now: BTreeMap<String, AgeCounts>,
    pub prev: BTreeMap<String, AgeCounts>,
}

pub fn random_simplex(rng: &mut ChaCha8Rng, zero_prob: f64) -> [f64; N_HOUSING_TYPES] {
    loop {
        let mut s = [0.0; N_HOUSING_TYPES];
        for v in s.iter_mut() {
            if !rng.random_bool(zero_prob) {
                *v = rng.random_range(0.01..1.0);
            }
        }
        let total: f64 = s.iter().sum();
        if total > 0.0 {
            // renormalize, then put the rounding residue on the largest share
            let mut out = s.map(|v| v / total);
            let k = (0..N_HOUSING_TYPES)
                .max_by(|&a, &b| out[a].total_cmp(&out[b]))
                .unwrap();
            out[k] = 1.0 - (0..N_HOUSING_TYPES).filter(|&b| b != k).map(|b| out[b]).sum::<f64>();
            return out;
        }
    }
}

pub fn bartik_instance(rng: &mut ChaCha8Rng) -> BartikInstance {
    let mut rows = [[0.0; N_HOUSING_TYPES]; N_AGE_GROUPS];
    for r in rows.iter_mut() {
        *r = random_simplex(rng, 0.0);
    }
    let pref = PreferenceMatrix::from_rows(rows);
    let interval = Interval::new(2012, 2018).unwrap();
    let n_counties = rng.random_range(1..=5);
    let mut pop = PopulationPanel::new();
    let mut stock = StockShares::new();
    let mut outcomes = OutcomePanel::new(vec!["price_index".into()]);
    let (mut now, mut prev) = (BTreeMap::new(), BTreeMap::new());
    for c in 0..n_counties {
        let county = format!("c{c}");
        let state = format!("s{}", c % 2);
        let p0: AgeCounts = std::array::from_fn(|_| rng.random_range(100.0..10_000.0));
        let p1: AgeCounts = p0.map(|v| v * rng.random_range(0.7..1.4));
        pop.insert_counts(&county, &state, 2012, &p0).unwrap();
        pop.insert_counts(&county, &state, 2018, &p1).unwrap();
        prev.insert(county.clone(), p0);
        now.insert(county.clone(), p1);
        for z in 0..rng.random_range(1..=10) {
            let zip = format!("z{c}{z:02}");
            stock.insert_row(&zip, &county, &random_simplex(rng, 0.3)).unwrap();
            let geo = GeoId {
                zip,
                county: county.clone(),
                state: state.clone(),
            };
            outcomes.insert(&geo, 2012, vec![Some(100.0)]).unwrap();
            outcomes
                .insert(&geo, 2018, vec![Some(rng.random_range(80.0..160.0))])
                .unwrap();
        }
    }
    BartikInstance {
        pref,
        pop,
        stock,
        outcomes,
        interval,
        now,
        prev,
    }
}

pub fn read_expected(path: &Path) -> BTreeMap<String, Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            let key = r[0].to_string();
            let vals = r.iter().skip(1).map(|v| v.parse().unwrap()).collect();
            (key, vals)
        })
        .collect()
}

pub const FULL_ROWS: usize = 14_653;
pub const FULL_COUNTIES: usize = 600;

fn demean(cols: &[Vec<f64>], f: &Factor) -> Vec<Vec<f64>> {
    absorbed(cols, std::slice::from_ref(f), None, &AbsorbOptions::default()).0
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_projection(v: &mut [f64], on: &[f64]) {
    let k = dot(v, on) / dot(on, on);
    for (vi, oi) in v.iter_mut().zip(on) {
        *vi -= k * oi;
    }
}

fn bisect(mut lo: f64, mut hi: f64, target: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// A deterministic 14,653-zip, 600-county shock panel calibrated so that
/// growth on the annualized shock gives 6.251 (0.646) with R-squared
/// 0.709 without controls and 5.675 (0.627) with the one control.
///
/// The control is `lambda * x + mu * v` and the outcome
/// `a * x + g * control + sigma * e + s_fe * fe`, with `v` and `e` made
/// orthogonal to the within-county shock, so both point estimates are
/// exact and `mu`, `sigma`, `s_fe` are solved for the two SEs and the
/// R-squared.
pub fn golden_panel() -> ShockPanel {
    const A: f64 = 5.675;
    const LAMBDA: f64 = 0.5;
    const G: f64 = (6.251 - 5.675) / LAMBDA;
    let n = FULL_ROWS;
    let mut r = rng(2012);
    let county: Vec<usize> = (0..n).map(|i| i % FULL_COUNTIES).collect();
    let level: Vec<f64> = (0..FULL_COUNTIES).map(|_| 0.1 * normal(&mut r)).collect();
    let fe: Vec<f64> = (0..FULL_COUNTIES).map(|_| normal(&mut r)).collect();
    let x: Vec<f64> = county.iter().map(|&c| 0.4 + level[c] + 0.3 * normal(&mut r)).collect();
    let v0: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
    let e0: Vec<f64> = (0..n).map(|_| normal(&mut r)).collect();
    let ids: Vec<String> = county.iter().map(|c| format!("c{:04}", c + 1)).collect();
    let factor = Factor::new(&ids);
    let d = demean(&[x.clone(), v0, e0], &factor);
    let xd = &d[0];
    let mut v = d[1].clone();
    remove_projection(&mut v, xd);
    let mut e = d[2].clone();
    remove_projection(&mut e, xd);
    remove_projection(&mut e, &v);

    let frame_for = |mu: f64, sigma: f64, s_fe: f64| -> Frame {
        let c: Vec<f64> = (0..n).map(|i| LAMBDA * x[i] + mu * v[i]).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 2.0 + A * x[i] + G * c[i] + sigma * e[i] + s_fe * fe[county[i]])
            .collect();
        Frame::new(n)
            .with_numeric("x", x.clone())
            .unwrap()
            .with_numeric("c", c)
            .unwrap()
            .with_numeric("y", y)
            .unwrap()
            .with_categorical("county_id", ids.clone())
            .unwrap()
    };
    let fit_cols = |f: &Frame, controls: bool| -> RegressionResult {
        let mut regs = vec!["x".to_string()];
        if controls {
            regs.push("c".into());
        }
        fit(&RegressionSpec::new("y", regs).absorb("county_id").cluster("county_id"), f).unwrap()
    };
    // se with controls is linear in sigma for fixed mu
    let sigma_for = |mu: f64| 0.627 / fit_cols(&frame_for(mu, 1.0, 0.0), true).se[0];
    let se1 = |mu: f64| fit_cols(&frame_for(mu, sigma_for(mu), 0.0), false).se[0];
    let mut hi = 1.0;
    while se1(hi) < 0.646 {
        hi *= 2.0;
    }
    let mu = bisect(0.0, hi, 0.646, se1);
    let sigma = sigma_for(mu);
    let r2 = |s: f64| fit_cols(&frame_for(mu, sigma, s), false).r2_overall;
    let mut hi = 1.0;
    while r2(hi) < 0.709 {
        hi *= 2.0;
    }
    let s_fe = bisect(0.0, hi, 0.709, r2);

    let f = frame_for(mu, sigma, s_fe);
    let c = f.numeric("c").unwrap();
    let y = f.numeric("y").unwrap();
    let rows = (0..n)
        .map(|i| ShockRow {
            geo: GeoId {
                zip: format!("z{:05}", i + 1),
                county: ids[i].clone(),
                state: format!("s{:02}", county[i] % 50 + 1),
            },
            period_start: 2012,
            period_end: 2018,
            shock_total_pct: 6.0 * x[i],
            shock_annualized_pct: x[i],
            outcome_growth_pct_per_year: y[i],
            controls: vec![Some(c[i])],
        })
        .collect::<Vec<_>>();
    ShockPanel {
        control_names: vec!["d_white_share".into()],
        coverage: CoverageReport {
            n_stock_zips: n,
            n_retained: n,
            excluded: Vec::new(),
        },
        rows,
    }
}

/// Synthetic inputs at full scale: 600 counties, 14,653 zips and 15
/// control variables.
pub fn full_scale_panel(seed: u64) -> SynthPanel {
    let cfg = DgpConfig {
        n_counties: 600,
        zips_per_county: (25, 25),
        controls: (0..15)
            .map(|k| ControlGenerator::new(format!("ctl{k:02}"), 0.1 * k as f64))
            .collect(),
        ..DgpConfig::default()
    };
    let mut p = generate_panel(&cfg, seed).unwrap();
    let mut stock = StockShares::new();
    for (zip, zs) in p.stock.zips().take(FULL_ROWS) {
        stock.insert_row(zip, &zs.county, &zs.shares).unwrap();
    }
    p.stock = stock;
    p
}
