//! Command-line surface: CSV schemas, run configuration, table and
//! binned-scatter rendering, and one function per subcommand.
//!
//! Exit codes: 0 success, 1 validation or statistical failure, 2 I/O or
//! schema error, 3 numerical failure. Errors are also written to stderr
//! as a one-line JSON record.

pub mod binscatter;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, ExitKind, Result};

pub use binscatter::{binned_scatter, Bin, BinRule, BinnedScatter};
pub use commands::CommandReport;
pub use config::RunConfig;
pub use table::RegressionTable;

#[derive(Debug, Parser)]
#[command(name = "demoshock", version, about = "Demographic housing-demand shocks and their effect on zip-level outcomes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the four input files and write a violation report.
    Validate(Settings),
    /// Build zip shocks and outcome growth for one interval.
    Shock(Settings),
    /// Regress outcome growth on the shock, without and with controls.
    Regress(Settings),
    /// Binned scatter of residualized growth against the shock.
    Binscatter(Settings),
    /// Compare the shock coefficient below and above a median.
    Split(Settings),
    /// Fit the shock coefficient within each group (e.g. state).
    Groups(Settings),
    /// Monte Carlo study on synthetic panels.
    Montecarlo(Settings),
    /// Write a synthetic set of input files.
    Generate(Settings),
    /// Project demand per housing type along an age scenario.
    Project(Settings),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    /// `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Any setting as KEY=VALUE (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub population: Option<String>,
    #[arg(long)]
    pub preferences: Option<String>,
    #[arg(long)]
    pub stock: Option<String>,
    #[arg(long)]
    pub outcomes: Option<String>,
    #[arg(long)]
    pub shocks: Option<String>,
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub out_dir: Option<String>,
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub end: Option<String>,
    #[arg(long)]
    pub outcome: Option<String>,
    /// Comma-separated control variables.
    #[arg(long)]
    pub controls: Option<String>,
    #[arg(long)]
    pub fe: Option<String>,
    #[arg(long)]
    pub cluster: Option<String>,
    #[arg(long)]
    pub weight: Option<String>,
    #[arg(long)]
    pub bins: Option<String>,
    #[arg(long)]
    pub bin_size: Option<String>,
    #[arg(long)]
    pub split_var: Option<String>,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub reps: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
}

impl Settings {
    fn pairs(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        let named = [
            ("population", &self.population),
            ("preferences", &self.preferences),
            ("stock", &self.stock),
            ("outcomes", &self.outcomes),
            ("shocks", &self.shocks),
            ("scenario", &self.scenario),
            ("out_dir", &self.out_dir),
            ("start", &self.start),
            ("end", &self.end),
            ("outcome", &self.outcome),
            ("controls", &self.controls),
            ("fe", &self.fe),
            ("cluster", &self.cluster),
            ("weight", &self.weight),
            ("bins", &self.bins),
            ("bin_size", &self.bin_size),
            ("split_var", &self.split_var),
            ("group", &self.group),
            ("reps", &self.reps),
            ("seed", &self.seed),
        ];
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set {kv:?}: expected KEY=VALUE")))?;
            out.push((k.to_string(), v.to_string()));
        }
        for (k, v) in named {
            if let Some(v) = v {
                out.push((k.to_string(), v.clone()));
            }
        }
        Ok(out)
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        RunConfig::resolve(self.config.as_deref(), &self.pairs()?)
    }
}

pub fn dispatch(command: &Command) -> Result<CommandReport> {
    use commands::*;
    let (settings, f): (&Settings, fn(&RunConfig) -> Result<CommandReport>) = match command {
        Command::Validate(s) => (s, cmd_validate),
        Command::Shock(s) => (s, cmd_shock),
        Command::Regress(s) => (s, cmd_regress),
        Command::Binscatter(s) => (s, cmd_binscatter),
        Command::Split(s) => (s, cmd_split),
        Command::Groups(s) => (s, cmd_groups),
        Command::Montecarlo(s) => (s, cmd_montecarlo),
        Command::Generate(s) => (s, cmd_generate),
        Command::Project(s) => (s, cmd_project),
    };
    f(&settings.resolve()?)
}

/// One-line JSON error record.
pub fn error_record(e: &Error) -> String {
    serde_json::json!({
        "error": e.tag(),
        "exit_code": e.exit_kind() as i32,
        "message": e.to_string(),
    })
    .to_string()
}

/// Parses `args`, runs the command, prints its summary and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitKind::Io as i32 } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            println!("{}", report.summary.trim_end());
            for p in &report.written {
                println!("wrote {}", p.display());
            }
            if report.exit == ExitKind::Numerical {
                eprintln!("warning: fixed-effect absorption did not converge");
            }
            report.exit as i32
        }
        Err(e) => {
            eprintln!("{}", error_record(&e));
            e.exit_kind() as i32
        }
    }
}
