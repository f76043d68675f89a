//! County demand shifts and zip-level shocks for a small three-county
//! input set.

use std::path::Path;

use demoshock::bartik::{build_shock_panel, county_demand_shifts, Interval, ShockRequest};
use demoshock::cli::csvio;
use demoshock::model::HousingType;

fn main() -> demoshock::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/three_county");
    let pref = csvio::read_preferences(&dir.join("preferences.csv"))?;
    let pop = csvio::read_population(&dir.join("population.csv"))?;
    let stock = csvio::read_stock(&dir.join("stock.csv"))?;
    let outcomes = csvio::read_outcomes(&dir.join("outcomes.csv"))?;
    let interval = Interval::new(2012, 2018)?;

    println!("county demand shifts, % over {interval}");
    print!("{:8}", "county");
    for h in HousingType::ALL {
        print!("{:>9}", h.label());
    }
    println!();
    for (county, _) in pop.counties() {
        let now = pop.counts(county, interval.end()).expect("end period");
        let prev = pop.counts(county, interval.start()).expect("start period");
        let d = county_demand_shifts(&pref, county, &now, &prev)?;
        print!("{county:8}");
        for h in HousingType::ALL {
            print!("{:>9.3}", d.get(h));
        }
        println!();
    }

    let request = ShockRequest::new(interval, "price_index").with_controls(vec!["white_share".into()]);
    let panel = build_shock_panel(&pref, &pop, &stock, &outcomes, &request)?;
    println!("\nzip  county  shock total %  shock/yr %  price growth %/yr");
    for r in &panel.rows {
        println!(
            "{:4} {:7} {:>13.4} {:>11.4} {:>18.3}",
            r.geo.zip, r.geo.county, r.shock_total_pct, r.shock_annualized_pct, r.outcome_growth_pct_per_year
        );
    }
    println!("\n{} of {} zips retained", panel.coverage.n_retained, panel.coverage.n_stock_zips);
    Ok(())
}
