//! Shock coefficients in zips below and at-or-above the median of a
//! start-of-period zip characteristic.

use demoshock::hdfe::{fit, median_split};
use demoshock::synth::{generate_panel, standard_spec, ControlGenerator, DgpConfig};
use demoshock::Column;

fn main() -> demoshock::Result<()> {
    let cfg = DgpConfig {
        n_counties: 80,
        controls: vec![ControlGenerator::new("income", 0.5)],
        ..DgpConfig::default()
    };
    let panel = generate_panel(&cfg, 11)?;
    let mut frame = panel.frame()?;
    let k = panel.outcomes.variable_index("income").expect("income");
    let zips = frame.categorical("zip_id")?;
    let start = cfg.interval.0;
    let income: Vec<f64> = zips
        .iter()
        .map(|z| panel.outcomes.value(z, start, k).unwrap_or(f64::NAN))
        .collect();
    frame.insert("income_start", Column::Numeric(income))?;

    let split = median_split(&frame, "income_start")?;
    let spec = standard_spec(&panel);
    let below = fit(&spec, &split.below)?;
    let above = fit(&spec, &split.above)?;
    println!("median start income {:.4}", split.median);
    println!("below median: beta {:.3} ({:.3}), n = {}", below.beta[0], below.se[0], below.n_obs);
    println!("at or above:  beta {:.3} ({:.3}), n = {}", above.beta[0], above.se[0], above.n_obs);
    Ok(())
}
