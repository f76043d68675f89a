//! Price growth on the annualized demand shock with county fixed effects
//! and county-clustered errors, with and without controls.

use demoshock::bartik::control_delta_name;
use demoshock::cli::RegressionTable;
use demoshock::hdfe::{fit, RegressionSpec};
use demoshock::synth::{generate_panel, ControlGenerator, DgpConfig};

fn main() -> demoshock::Result<()> {
    let cfg = DgpConfig {
        n_counties: 120,
        zips_per_county: (10, 30),
        controls: vec![
            ControlGenerator::new("white_share", -2.0),
            ControlGenerator {
                shock_loading: 0.01,
                ..ControlGenerator::new("college_share", 4.0)
            },
        ],
        ..DgpConfig::default()
    };
    let panel = generate_panel(&cfg, 2018)?;
    let frame = panel.frame()?;
    let shock = "shock_annualized_pct".to_string();
    let growth = "outcome_growth_pct_per_year";

    let base = RegressionSpec::new(growth, vec![shock.clone()])
        .absorb("county_id")
        .cluster("county_id");
    let mut regressors = vec![shock.clone()];
    regressors.extend(panel.control_vars.iter().map(|c| control_delta_name(c)));
    let full = RegressionSpec::new(growth, regressors)
        .absorb("county_id")
        .cluster("county_id");

    let mut table = RegressionTable::new(vec![shock]);
    table.push(Some("2012-2018".into()), fit(&base, &frame)?, false);
    let with_controls = fit(&full, &frame)?;
    table.push(Some("2012-2018".into()), with_controls.clone(), true);
    print!("{}", table.render());

    println!("\ntrue shock coefficient {}", cfg.true_beta);
    for (name, coef) in &panel.truth.control_coefficients {
        let (b, se, _) = with_controls.coef(&control_delta_name(name)).expect("control fitted");
        println!("{name}: true {coef}, estimated {b:.3} ({se:.3})");
    }
    Ok(())
}
