//! One function per subcommand. Each reads its inputs from the
//! configuration, writes its outputs atomically under `out_dir`, and
//! reports the files it wrote.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bartik::{build_shock_panel, control_delta_name, Interval, ShockPanel, ShockRequest};
use crate::error::{Error, ExitKind, Result};
use crate::frame::{Column, Frame};
use crate::hdfe::{
    fit, fit_by_group, median_split, AbsorbOptions, FitOptions, RegressionResult, RegressionSpec,
};
use crate::model::validate_inputs;
use crate::synth::{generate_panel, monte_carlo, project_demand, ControlGenerator, DgpConfig,
    ProjectionScenario};

use super::binscatter::binned_scatter;
use super::config::RunConfig;
use super::csvio;
use super::table::RegressionTable;

pub const GROWTH_COLUMN: &str = "outcome_growth_pct_per_year";

#[derive(Debug, Clone, PartialEq)]
pub struct CommandReport {
    pub exit: ExitKind,
    pub written: Vec<PathBuf>,
    /// Human-readable summary for stdout.
    pub summary: String,
}

impl CommandReport {
    fn ok(written: Vec<PathBuf>, summary: String) -> Self {
        CommandReport {
            exit: ExitKind::Success,
            written,
            summary,
        }
    }
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}

fn write(path: &Path, bytes: &[u8], written: &mut Vec<PathBuf>) -> Result<()> {
    csvio::write_atomic(path, bytes)?;
    written.push(path.to_path_buf());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T, written: &mut Vec<PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invariant(format!("json encoding: {e}")))?;
    text.push('\n');
    write(path, text.as_bytes(), written)
}

fn path_of<'a>(v: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    v.as_deref()
        .ok_or_else(|| Error::Config(format!("missing required setting {key}")))
}

fn interval(cfg: &RunConfig) -> Result<Interval> {
    let start = *cfg.require(&cfg.start, "start")?;
    let end = *cfg.require(&cfg.end, "end")?;
    Interval::new(start, end)
}

/// Checks every input invariant; exit 1 with a report when any fails.
pub fn cmd_validate(cfg: &RunConfig) -> Result<CommandReport> {
    let pref = csvio::read_preferences(path_of(&cfg.preferences, "preferences")?)?;
    let pop = csvio::read_population(path_of(&cfg.population, "population")?)?;
    let stock = csvio::read_stock(path_of(&cfg.stock, "stock")?)?;
    let outcomes = csvio::read_outcomes(path_of(&cfg.outcomes, "outcomes")?)?;
    let mut level_vars = vec![cfg.outcome.as_str()];
    if let Some(c) = &cfg.controls {
        level_vars.extend(c.iter().map(String::as_str));
    }
    let report = validate_inputs(&pref, &pop, &stock, &outcomes, &level_vars);
    let mut written = Vec::new();
    write(
        &out_path(cfg, "validation_report.csv"),
        &csvio::report_bytes(&report)?,
        &mut written,
    )?;
    let summary = format!(
        "{} violation(s), {} warning(s)",
        report.violations.len(),
        report.warnings.len()
    );
    Ok(CommandReport {
        exit: if report.passed() {
            ExitKind::Success
        } else {
            ExitKind::Failure
        },
        written,
        summary,
    })
}

/// Builds the zip shock panel for one interval.
pub fn cmd_shock(cfg: &RunConfig) -> Result<CommandReport> {
    let iv = interval(cfg)?;
    let pref = csvio::read_preferences(path_of(&cfg.preferences, "preferences")?)?;
    let pop = csvio::read_population(path_of(&cfg.population, "population")?)?;
    let stock = csvio::read_stock(path_of(&cfg.stock, "stock")?)?;
    let outcomes = csvio::read_outcomes(path_of(&cfg.outcomes, "outcomes")?)?;
    let controls = cfg.controls.clone().unwrap_or_default();
    let mut level_vars = vec![cfg.outcome.as_str()];
    level_vars.extend(controls.iter().map(String::as_str));
    let report = validate_inputs(&pref, &pop, &stock, &outcomes, &level_vars);
    let mut written = Vec::new();
    if !report.passed() {
        write(
            &out_path(cfg, "validation_report.csv"),
            &csvio::report_bytes(&report)?,
            &mut written,
        )?;
        return Err(Error::ValidationFailed(report.violations.len()));
    }
    let request = ShockRequest::new(iv, cfg.outcome.clone()).with_controls(controls);
    let panel = build_shock_panel(&pref, &pop, &stock, &outcomes, &request)?;
    write(&out_path(cfg, "shocks.csv"), &csvio::shocks_bytes(&panel)?, &mut written)?;
    write(
        &out_path(cfg, "coverage.csv"),
        &csvio::coverage_bytes(&panel.coverage)?,
        &mut written,
    )?;
    let cov = &panel.coverage;
    let mut summary = format!(
        "{} of {} stock zips retained for {iv}",
        cov.n_retained, cov.n_stock_zips
    );
    for (why, n) in cov.counts() {
        summary.push_str(&format!("\n  excluded {n}: {}", why.as_str()));
    }
    Ok(CommandReport::ok(written, summary))
}

fn load_shocks(cfg: &RunConfig) -> Result<(ShockPanel, Frame)> {
    let panel = csvio::read_shocks(path_of(&cfg.shocks, "shocks")?)?;
    if panel.is_empty() {
        return Err(Error::EmptyResult("shock file has no rows".into()));
    }
    let frame = panel.to_frame();
    Ok((panel, frame))
}

/// Control columns for estimation: every control column of the shock
/// file by default; a name `v` resolves to `d_v` when only that exists.
pub fn resolve_controls(cfg: &RunConfig, frame: &Frame, panel: &ShockPanel) -> Result<Vec<String>> {
    match &cfg.controls {
        None => Ok(panel.control_names.clone()),
        Some(list) => list
            .iter()
            .map(|c| {
                if frame.has(c) {
                    Ok(c.clone())
                } else if frame.has(&control_delta_name(c)) {
                    Ok(control_delta_name(c))
                } else {
                    Err(Error::Schema(format!("control column {c} not found")))
                }
            })
            .collect(),
    }
}

fn spec(cfg: &RunConfig, regressors: Vec<String>) -> RegressionSpec {
    let mut s = RegressionSpec::new(GROWTH_COLUMN, regressors)
        .cluster(cfg.cluster.clone())
        .with_options(FitOptions {
            absorb: AbsorbOptions {
                tol: cfg.tol,
                max_iter: cfg.max_iter,
            },
            singletons: cfg.singletons,
            weight: cfg.weight.clone(),
        });
    s.fe_dimensions = cfg.fe.clone();
    s
}

fn interval_title(cfg: &RunConfig, panel: &ShockPanel) -> Option<String> {
    cfg.title.clone().or_else(|| {
        let r = &panel.rows[0];
        Some(format!("{}-{}", r.period_start, r.period_end))
    })
}

fn exit_for(results: &[&RegressionResult]) -> ExitKind {
    if results.iter().all(|r| r.converged) {
        ExitKind::Success
    } else {
        ExitKind::Numerical
    }
}

/// Growth on the shock, without and with controls.
pub fn cmd_regress(cfg: &RunConfig) -> Result<CommandReport> {
    let (panel, frame) = load_shocks(cfg)?;
    let controls = resolve_controls(cfg, &frame, &panel)?;
    let title = interval_title(cfg, &panel);
    let mut table = RegressionTable::new(vec![cfg.regressor.clone()]);
    let base = fit(&spec(cfg, vec![cfg.regressor.clone()]), &frame)?;
    table.push(title.clone(), base.clone(), false);
    let mut results = vec![base];
    if !controls.is_empty() {
        let mut regs = vec![cfg.regressor.clone()];
        regs.extend(controls);
        let full = fit(&spec(cfg, regs), &frame)?;
        table.push(title, full.clone(), true);
        results.push(full);
    }
    let rendered = table.render();
    let mut written = Vec::new();
    write(&out_path(cfg, "regression_table.txt"), rendered.as_bytes(), &mut written)?;
    write_json(&out_path(cfg, "regression_results.json"), &results, &mut written)?;
    Ok(CommandReport {
        exit: exit_for(&results.iter().collect::<Vec<_>>()),
        written,
        summary: rendered,
    })
}

/// Binned scatter of residualized growth against the residualized shock.
pub fn cmd_binscatter(cfg: &RunConfig) -> Result<CommandReport> {
    let (panel, frame) = load_shocks(cfg)?;
    let controls = resolve_controls(cfg, &frame, &panel)?;
    let x = cfg.x.clone().unwrap_or_else(|| cfg.regressor.clone());
    let y = cfg.y.clone().unwrap_or_else(|| GROWTH_COLUMN.to_string());
    let s = binned_scatter(&frame, &x, &y, &controls, &cfg.fe, cfg.bin_rule()?)?;
    let mut written = Vec::new();
    write(
        &out_path(cfg, "binscatter.csv"),
        &csvio::binned_scatter_bytes(&s)?,
        &mut written,
    )?;
    let summary = format!(
        "{} bins over {} rows; residualized slope {}",
        s.bins.len(),
        s.n_obs,
        s.slope
    );
    Ok(CommandReport::ok(written, summary))
}

/// Adds the split variable to the shock frame: a shock-file column if
/// present, otherwise its outcome level at the start of the interval.
fn attach_split_variable(cfg: &RunConfig, panel: &ShockPanel, frame: &mut Frame, var: &str) -> Result<()> {
    if frame.has(var) {
        return Ok(());
    }
    let Some(path) = cfg.outcomes.as_deref() else {
        return Err(Error::Schema(format!(
            "split variable {var} is not a shock column and no outcomes file was given"
        )));
    };
    let outcomes = csvio::read_outcomes(path)?;
    let k = outcomes
        .variable_index(var)
        .ok_or_else(|| Error::Schema(format!("split variable {var} not found")))?;
    let values = panel
        .rows
        .iter()
        .map(|r| outcomes.value(&r.geo.zip, r.period_start, k).unwrap_or(f64::NAN))
        .collect();
    frame.insert(var, Column::Numeric(values))
}

/// Shock coefficient in zips below vs at-or-above the median of a
/// variable.
pub fn cmd_split(cfg: &RunConfig) -> Result<CommandReport> {
    let var = cfg.require(&cfg.split_var, "split-var")?.clone();
    let (panel, mut frame) = load_shocks(cfg)?;
    attach_split_variable(cfg, &panel, &mut frame, &var)?;
    let controls = resolve_controls(cfg, &frame, &panel)?;
    let split = median_split(&frame, &var)?;
    let mut regs = vec![cfg.regressor.clone()];
    regs.extend(controls.iter().cloned());
    let s = spec(cfg, regs);
    let below = fit(&s, &split.below)?;
    let above = fit(&s, &split.above)?;
    let mut table = RegressionTable::new(vec![cfg.regressor.clone()]);
    table.push(Some(format!("{var} < median")), below.clone(), !controls.is_empty());
    table.push(Some(format!("{var} >= median")), above.clone(), !controls.is_empty());
    let mut rendered = table.render();
    rendered.push_str(&format!(
        "Median {var} = {}; {} row(s) with missing {var} excluded.\n",
        split.median, split.n_missing
    ));
    let mut written = Vec::new();
    write(&out_path(cfg, "split_table.txt"), rendered.as_bytes(), &mut written)?;
    #[derive(Serialize)]
    struct SplitRecord<'a> {
        variable: &'a str,
        median: f64,
        n_missing: usize,
        below: &'a RegressionResult,
        above: &'a RegressionResult,
    }
    write_json(
        &out_path(cfg, "split_results.json"),
        &SplitRecord {
            variable: &var,
            median: split.median,
            n_missing: split.n_missing,
            below: &below,
            above: &above,
        },
        &mut written,
    )?;
    Ok(CommandReport {
        exit: exit_for(&[&below, &above]),
        written,
        summary: rendered,
    })
}

/// The shock coefficient separately within each level of `group`.
pub fn cmd_groups(cfg: &RunConfig) -> Result<CommandReport> {
    let (panel, frame) = load_shocks(cfg)?;
    let controls = resolve_controls(cfg, &frame, &panel)?;
    let mut regs = vec![cfg.regressor.clone()];
    regs.extend(controls);
    let grouped = fit_by_group(&spec(cfg, regs), &frame, &cfg.group, cfg.min_group_size)?;
    let mut written = Vec::new();
    write(
        &out_path(cfg, "group_coefficients.csv"),
        &csvio::groups_bytes(&grouped, &cfg.regressor)?,
        &mut written,
    )?;
    write_json(&out_path(cfg, "group_results.json"), &grouped, &mut written)?;
    let summary = format!(
        "{} group(s) fitted, {} skipped below {} rows",
        grouped.fitted().count(),
        grouped.skipped().count(),
        cfg.min_group_size
    );
    Ok(CommandReport::ok(written, summary))
}

/// Synthetic-data configuration implied by the run settings.
pub fn dgp_config(cfg: &RunConfig) -> DgpConfig {
    let mut d = DgpConfig {
        n_counties: cfg.n_counties,
        zips_per_county: (cfg.zips_per_county, cfg.zips_per_county),
        true_beta: cfg.true_beta,
        noise_sd: cfg.noise_sd,
        county_fe_sd: cfg.county_fe_sd,
        outcome_var: cfg.outcome.clone(),
        ..DgpConfig::default()
    };
    if let (Some(s), Some(e)) = (cfg.start, cfg.end) {
        d.interval = (s, e);
    }
    if let Some(c) = &cfg.controls {
        d.controls = c.iter().map(|name| ControlGenerator::new(name.clone(), 1.0)).collect();
    }
    d
}

pub fn cmd_montecarlo(cfg: &RunConfig) -> Result<CommandReport> {
    let s = monte_carlo(&dgp_config(cfg), cfg.reps, cfg.seed)?;
    let mut written = Vec::new();
    write(
        &out_path(cfg, "mc_summary.csv"),
        &csvio::mc_summary_bytes(&s)?,
        &mut written,
    )?;
    let summary = format!(
        "beta {}: mean {} (bias {}), sd {}, mean se {}, coverage {} over {} reps ({} failed)",
        s.true_beta,
        s.mean_beta,
        s.mean_bias(),
        s.sd_beta,
        s.mean_se,
        s.coverage_95,
        s.n_reps,
        s.n_failed
    );
    Ok(CommandReport::ok(written, summary))
}

/// Writes a synthetic set of the four input files plus the truth.
pub fn cmd_generate(cfg: &RunConfig) -> Result<CommandReport> {
    let p = generate_panel(&dgp_config(cfg), cfg.seed)?;
    let mut written = Vec::new();
    write(&out_path(cfg, "population.csv"), &csvio::population_bytes(&p.population)?, &mut written)?;
    write(&out_path(cfg, "preferences.csv"), &csvio::preferences_bytes(&p.preferences)?, &mut written)?;
    write(&out_path(cfg, "stock.csv"), &csvio::stock_bytes(&p.stock)?, &mut written)?;
    write(&out_path(cfg, "outcomes.csv"), &csvio::outcomes_bytes(&p.outcomes)?, &mut written)?;
    write_json(&out_path(cfg, "truth.json"), &p.truth, &mut written)?;
    let summary = format!(
        "{} counties, {} zips, interval {}",
        p.population.n_counties(),
        p.stock.len(),
        p.truth.interval
    );
    Ok(CommandReport::ok(written, summary))
}

/// Implied demand per housing type along an age-composition scenario.
pub fn cmd_project(cfg: &RunConfig) -> Result<CommandReport> {
    let pref = csvio::read_preferences(path_of(&cfg.preferences, "preferences")?)?;
    let (periods, rows) = csvio::read_scenario(path_of(&cfg.scenario, "scenario")?)?;
    let scn = ProjectionScenario::from_counts(pref, periods, &rows)?;
    let proj = project_demand(&scn)?;
    let mut written = Vec::new();
    write(
        &out_path(cfg, "projection.csv"),
        &csvio::projection_bytes(&proj)?,
        &mut written,
    )?;
    let last = proj.index.last().expect("nonempty projection");
    let summary = format!(
        "{} periods; final index {}",
        proj.periods.len(),
        last.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(" ")
    );
    Ok(CommandReport::ok(written, summary))
}
