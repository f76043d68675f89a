//! The shock coefficient fitted separately within each state. Small
//! states are skipped.

use demoshock::hdfe::{fit_by_group, GroupOutcome};
use demoshock::synth::{generate_panel, standard_spec, DgpConfig};

fn main() -> demoshock::Result<()> {
    let cfg = DgpConfig {
        n_counties: 90,
        n_states: 7,
        zips_per_county: (5, 25),
        ..DgpConfig::default()
    };
    let panel = generate_panel(&cfg, 3)?;
    let frame = panel.frame()?;
    let grouped = fit_by_group(&standard_spec(&panel), &frame, "state_id", 200)?;
    println!("state   rows    beta      se   clusters");
    for (state, outcome) in &grouped.groups {
        match outcome {
            GroupOutcome::Fitted(r) => println!(
                "{state:5} {:6} {:7.3} {:7.3} {:6}",
                r.n_obs, r.beta[0], r.se[0], r.n_clusters
            ),
            GroupOutcome::Skipped { n_rows } => println!("{state:5} {n_rows:6}   skipped (< {} rows)", grouped.min_group_size),
            GroupOutcome::Failed { n_rows, error } => println!("{state:5} {n_rows:6}   failed: {error}"),
        }
    }
    Ok(())
}
