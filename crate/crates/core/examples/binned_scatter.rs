//! Residualized binned scatter of price growth against the shock.

use demoshock::cli::binscatter::{bin_slope, binned_scatter, BinRule};
use demoshock::synth::{generate_panel, DgpConfig};

fn main() -> demoshock::Result<()> {
    let panel = generate_panel(&DgpConfig::default(), 8)?;
    let frame = panel.frame()?;
    let s = binned_scatter(
        &frame,
        "shock_annualized_pct",
        "outcome_growth_pct_per_year",
        &[],
        &["county_id".to_string()],
        BinRule::Count(20),
    )?;
    println!("bin   mean shock  mean growth  count");
    for b in &s.bins {
        println!("{:3} {:12.4} {:12.4} {:6}", b.index, b.mean_x, b.mean_y, b.count);
    }
    println!("\nslope on residualized data {:.4}", s.slope);
    println!("count-weighted slope through bin means {:.4}", bin_slope(&s.bins));
    Ok(())
}
