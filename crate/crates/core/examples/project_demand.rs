//! Implied demand by housing type as the 70+ share of adults rises from
//! 15% to 20%, with preferences held at their base-year values.

use demoshock::model::{HousingType, N_AGE_GROUPS};
use demoshock::synth::{aging_scenario, lifecycle_preferences, project_demand};

fn main() -> demoshock::Result<()> {
    let base = [1.0; N_AGE_GROUPS];
    let scenario = aging_scenario(lifecycle_preferences(), &base, 2020, 10, 0.15, 0.20)?;
    let p = project_demand(&scenario)?;
    print!("period");
    for h in HousingType::ALL {
        print!("{:>8}", h.label());
    }
    println!("  1-2BR vs 3+BR");
    use HousingType::*;
    let rel = p.relative_index(&[One, Two], &[Three, Four, FivePlus]);
    for (k, period) in p.periods.iter().enumerate() {
        print!("{period:6}");
        for v in p.index[k] {
            print!("{v:8.2}");
        }
        println!("{:15.2}", rel[k]);
    }
    Ok(())
}
