//! Run configuration. Settings come from an optional `key = value` file
//! and from command-line flags; flags win. Keys accept `-` or `_`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hdfe::SingletonPolicy;
use crate::model::Period;

use super::binscatter::BinRule;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub population: Option<PathBuf>,
    pub preferences: Option<PathBuf>,
    pub stock: Option<PathBuf>,
    pub outcomes: Option<PathBuf>,
    pub shocks: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub start: Option<Period>,
    pub end: Option<Period>,
    /// Outcome variable whose growth is the dependent variable.
    pub outcome: String,
    /// Control variables. For `shock` these name outcome variables; for
    /// the estimation commands they name shock-file columns, with `v`
    /// resolving to `d_v` when only the latter exists. `None` means all.
    pub controls: Option<Vec<String>>,
    pub regressor: String,
    pub fe: Vec<String>,
    pub cluster: String,
    pub weight: Option<String>,
    pub tol: f64,
    pub max_iter: usize,
    pub singletons: SingletonPolicy,
    pub x: Option<String>,
    pub y: Option<String>,
    pub bins: Option<usize>,
    pub bin_size: Option<usize>,
    pub split_var: Option<String>,
    pub group: String,
    pub min_group_size: usize,
    pub reps: usize,
    pub seed: u64,
    pub n_counties: usize,
    pub zips_per_county: usize,
    pub true_beta: f64,
    pub noise_sd: f64,
    pub county_fe_sd: f64,
    pub title: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            population: None,
            preferences: None,
            stock: None,
            outcomes: None,
            shocks: None,
            scenario: None,
            out_dir: PathBuf::from("."),
            start: None,
            end: None,
            outcome: "price_index".into(),
            controls: None,
            regressor: "shock_annualized_pct".into(),
            fe: vec!["county_id".into()],
            cluster: "county_id".into(),
            weight: None,
            tol: 1e-10,
            max_iter: 10_000,
            singletons: SingletonPolicy::Keep,
            x: None,
            y: None,
            bins: None,
            bin_size: None,
            split_var: None,
            group: "state_id".into(),
            min_group_size: 150,
            reps: 500,
            seed: 0,
            n_counties: 50,
            zips_per_county: 20,
            true_beta: 6.0,
            noise_sd: 1.0,
            county_fe_sd: 2.0,
            title: None,
        }
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key} = {v:?} is not valid")))
}

fn nonempty(v: &str) -> Option<String> {
    let v = v.trim();
    (!v.is_empty()).then(|| v.to_string())
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "population" => self.population = nonempty(v).map(PathBuf::from),
            "preferences" => self.preferences = nonempty(v).map(PathBuf::from),
            "stock" => self.stock = nonempty(v).map(PathBuf::from),
            "outcomes" => self.outcomes = nonempty(v).map(PathBuf::from),
            "shocks" => self.shocks = nonempty(v).map(PathBuf::from),
            "scenario" => self.scenario = nonempty(v).map(PathBuf::from),
            "out_dir" => self.out_dir = PathBuf::from(v),
            "start" => self.start = Some(parse(&key, v)?),
            "end" => self.end = Some(parse(&key, v)?),
            "outcome" => self.outcome = v.to_string(),
            "controls" => self.controls = Some(list(v)),
            "regressor" => self.regressor = v.to_string(),
            "fe" => self.fe = list(v),
            "cluster" => self.cluster = v.to_string(),
            "weight" => self.weight = nonempty(v),
            "tol" => self.tol = parse(&key, v)?,
            "max_iter" => self.max_iter = parse(&key, v)?,
            "singletons" => {
                self.singletons = match v {
                    "keep" => SingletonPolicy::Keep,
                    "drop" => SingletonPolicy::Drop,
                    _ => return Err(Error::Config(format!("singletons = {v:?}: use keep or drop"))),
                }
            }
            "x" => self.x = nonempty(v),
            "y" => self.y = nonempty(v),
            "bins" => self.bins = Some(parse(&key, v)?),
            "bin_size" => self.bin_size = Some(parse(&key, v)?),
            "split_var" => self.split_var = nonempty(v),
            "group" => self.group = v.to_string(),
            "min_group_size" => self.min_group_size = parse(&key, v)?,
            "reps" => self.reps = parse(&key, v)?,
            "seed" => self.seed = parse(&key, v)?,
            "n_counties" => self.n_counties = parse(&key, v)?,
            "zips_per_county" => self.zips_per_county = parse(&key, v)?,
            "true_beta" => self.true_beta = parse(&key, v)?,
            "noise_sd" => self.noise_sd = parse(&key, v)?,
            "county_fe_sd" => self.county_fe_sd = parse(&key, v)?,
            "title" => self.title = nonempty(v),
            _ => return Err(Error::Config(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Applies the file (if any) and then the flag pairs.
    pub fn resolve(file: Option<&Path>, flags: &[(String, String)]) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            for (key, value) in parse_pairs(&text)? {
                cfg.set(&key, &value)?;
            }
        }
        for (key, value) in flags {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn require<'a, T>(&self, v: &'a Option<T>, key: &str) -> Result<&'a T> {
        v.as_ref()
            .ok_or_else(|| Error::Config(format!("missing required setting {key}")))
    }

    pub fn bin_rule(&self) -> Result<BinRule> {
        match (self.bins, self.bin_size) {
            (Some(_), Some(_)) => Err(Error::Config("set bins or bin-size, not both".into())),
            (None, Some(s)) => Ok(BinRule::Size(s)),
            (Some(k), None) => Ok(BinRule::Count(k)),
            (None, None) => Ok(BinRule::Count(20)),
        }
    }
}

/// `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
