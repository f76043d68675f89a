mod common;

use common::{bartik_instance, fe_instance, rng};
use demoshock::bartik::{build_shock_panel, county_demand_shifts, ShockRequest};
use demoshock::cli::binscatter::{bin_points, bin_slope, ols_slope, BinRule};
use demoshock::hdfe::{absorbed, fit, AbsorbOptions, Factor};
use proptest::prelude::*;

const CASES: u32 = 1000;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: CASES,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn bartik_shocks_ignore_population_scale(seed in any::<u64>(), log_c in -6.0f64..6.0) {
        let inst = bartik_instance(&mut rng(seed));
        let req = ShockRequest::new(inst.interval, "price_index");
        let base = build_shock_panel(&inst.pref, &inst.pop, &inst.stock, &inst.outcomes, &req).unwrap();
        let scaled_pop = inst.pop.scaled(log_c.exp());
        let scaled = build_shock_panel(&inst.pref, &scaled_pop, &inst.stock, &inst.outcomes, &req).unwrap();
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            prop_assert!((a.shock_total_pct - b.shock_total_pct).abs() <= 1e-10 * a.shock_total_pct.abs().max(1.0));
        }
    }

    #[test]
    fn zip_shock_lies_within_its_county_shifts(seed in any::<u64>()) {
        let inst = bartik_instance(&mut rng(seed));
        let req = ShockRequest::new(inst.interval, "price_index");
        let panel = build_shock_panel(&inst.pref, &inst.pop, &inst.stock, &inst.outcomes, &req).unwrap();
        for row in &panel.rows {
            let county = &row.geo.county;
            let d = county_demand_shifts(&inst.pref, county, &inst.now[county], &inst.prev[county]).unwrap();
            let shares = inst.stock.get(&row.geo.zip).unwrap().shares;
            let held: Vec<f64> = (0..5).filter(|&b| shares[b] > 0.0).map(|b| d.0[b]).collect();
            let lo = held.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = held.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-12 * hi.abs().max(lo.abs()).max(1.0);
            prop_assert!(row.shock_total_pct >= lo - slack && row.shock_total_pct <= hi + slack);
        }
    }

    #[test]
    fn absorbing_twice_changes_nothing(
        seed in any::<u64>(),
        n in 20usize..300,
        g1 in 2usize..20,
        g2 in 1usize..6,
    ) {
        let mut r = rng(seed);
        let cols: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| common::normal(&mut r) * 10.0).collect()).collect();
        let a: Vec<String> = (0..n).map(|i| format!("a{}", (i * 31 + seed as usize % 7) % g1)).collect();
        let b: Vec<String> = (0..n).map(|i| format!("b{}", (i * 17) % g2)).collect();
        let factors = if g2 == 1 { vec![Factor::new(&a)] } else { vec![Factor::new(&a), Factor::new(&b)] };
        let opts = AbsorbOptions::default();
        let (once, o1) = absorbed(&cols, &factors, None, &opts);
        let (twice, _) = absorbed(&once, &factors, None, &opts);
        prop_assert!(o1.converged);
        for (c1, c2) in once.iter().zip(&twice) {
            for (x, y) in c1.iter().zip(c2) {
                prop_assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn row_order_does_not_matter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = fe_instance(&mut r);
        let n = inst.frame.n_rows();
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rand::Rng::random_range(&mut r, 0..=i);
            order.swap(i, j);
        }
        let a = fit(&inst.spec, &inst.frame).unwrap();
        let b = fit(&inst.spec, &inst.frame.take(&order)).unwrap();
        for j in 0..a.beta.len() {
            prop_assert!(common::rel_err(b.beta[j], a.beta[j]) <= 1e-9);
            prop_assert!(common::rel_err(b.se[j], a.se[j]) <= 1e-9);
        }
    }

    #[test]
    fn affine_outcome_scales_beta_and_se(seed in any::<u64>(), scale in -50.0f64..50.0, shift in -1e3f64..1e3) {
        prop_assume!(scale.abs() > 1e-3);
        let inst = fe_instance(&mut rng(seed));
        let y: Vec<f64> = inst.frame.numeric("y").unwrap().iter().map(|v| scale * v + shift).collect();
        let frame = inst.frame.clone().with_numeric("y", y).unwrap();
        let a = fit(&inst.spec, &inst.frame).unwrap();
        let b = fit(&inst.spec, &frame).unwrap();
        for j in 0..a.beta.len() {
            prop_assert!(common::rel_err(b.beta[j], scale * a.beta[j]) <= 1e-8);
            prop_assert!(common::rel_err(b.se[j], scale.abs() * a.se[j]) <= 1e-8);
        }
        prop_assert!((a.r2_within - b.r2_within).abs() <= 1e-8);
    }

    #[test]
    fn one_point_per_bin_keeps_the_regression_slope(seed in any::<u64>(), n in 3usize..200) {
        let mut r = rng(seed);
        let x: Vec<f64> = (0..n).map(|_| common::normal(&mut r)).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + common::normal(&mut r)).collect();
        let bins = bin_points(&x, &y, BinRule::Count(n)).unwrap();
        let want = ols_slope(&x, &y, None);
        prop_assert!((bin_slope(&bins) - want).abs() <= 1e-6 * want.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(config())]

    // The count-weighted slope through bin means equals the OLS slope
    // only when every bin holds one point (or x is linear in y within
    // bins). Points (0,0), (1,1), (2,0), (3,3) in two bins give 0.5
    // against an OLS slope of 0.8.
    #[test]
    #[ignore = "false in general: binning discards within-bin covariance (counterexample in comment)"]
    fn binned_weighted_slope_equals_regression_slope(seed in any::<u64>(), n in 40usize..400, k in 2usize..20) {
        let mut r = rng(seed);
        let x: Vec<f64> = (0..n).map(|_| common::normal(&mut r)).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + common::normal(&mut r)).collect();
        let bins = bin_points(&x, &y, BinRule::Count(k)).unwrap();
        let want = ols_slope(&x, &y, None);
        prop_assert!((bin_slope(&bins) - want).abs() <= 1e-6 * want.abs().max(1.0));
    }
}

#[test]
fn binned_slope_counterexample() {
    let x = [0.0, 1.0, 2.0, 3.0];
    let y = [0.0, 1.0, 0.0, 3.0];
    let bins = bin_points(&x, &y, BinRule::Count(2)).unwrap();
    assert!((bin_slope(&bins) - 0.5).abs() < 1e-12);
    assert!((ols_slope(&x, &y, None) - 0.8).abs() < 1e-12);
}
