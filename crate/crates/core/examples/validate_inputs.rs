//! Input validation: every violation is reported with its location.

use demoshock::model::{
    validate_inputs, GeoId, OutcomePanel, PopulationPanel, PreferenceMatrix, StockShares,
    N_AGE_GROUPS, N_HOUSING_TYPES,
};

fn main() -> demoshock::Result<()> {
    let mut rows = [[0.2; N_HOUSING_TYPES]; N_AGE_GROUPS];
    rows[4] = [0.5, 0.5, 0.1, 0.0, 0.0];
    let pref = PreferenceMatrix::from_rows(rows);

    let mut pop = PopulationPanel::new();
    pop.insert_counts("c1", "s1", 2012, &[100.0; N_AGE_GROUPS])?;
    let mut now = [110.0; N_AGE_GROUPS];
    now[3] = -4.0;
    pop.insert_counts("c1", "s1", 2018, &now)?;

    let mut stock = StockShares::new();
    stock.insert_row("z1", "c1", &[0.3, 0.3, 0.3, 0.3, 0.0])?;
    stock.insert_row("z2", "c9", &[0.2; 5])?;

    let mut outcomes = OutcomePanel::new(vec!["price_index".into()]);
    let geo = GeoId {
        zip: "z1".into(),
        county: "c1".into(),
        state: "s1".into(),
    };
    outcomes.insert(&geo, 2012, vec![Some(100.0)])?;
    outcomes.insert(&geo, 2018, vec![Some(0.0)])?;

    let report = validate_inputs(&pref, &pop, &stock, &outcomes, &["price_index"]);
    println!("passed: {}", report.passed());
    for v in &report.violations {
        println!("violation  {}: {}", v.location, v.message);
    }
    for w in &report.warnings {
        println!("warning    {}: {}", w.location, w.message);
    }
    Ok(())
}
