use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AgeCounts, HousingType, Period, PreferenceMatrix, N_AGE_GROUPS, N_HOUSING_TYPES,
    SHARE_SUM_TOL,
};

/// Age groups 11..=14 (70-74 through 85+), as zero-based offsets.
pub const SEVENTY_PLUS: std::ops::Range<usize> = 10..14;

/// Base-year preferences held fixed while the age composition moves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionScenario {
    pub preferences: PreferenceMatrix,
    pub periods: Vec<Period>,
    /// Age shares per period; each row sums to 1.
    pub age_shares: Vec<AgeCounts>,
}

impl ProjectionScenario {
    pub fn new(
        preferences: PreferenceMatrix,
        periods: Vec<Period>,
        age_shares: Vec<AgeCounts>,
    ) -> Result<Self> {
        let s = ProjectionScenario {
            preferences,
            periods,
            age_shares,
        };
        s.validate()?;
        Ok(s)
    }

    /// Normalizes per-period counts to shares.
    pub fn from_counts(
        preferences: PreferenceMatrix,
        periods: Vec<Period>,
        counts: &[AgeCounts],
    ) -> Result<Self> {
        let shares = counts
            .iter()
            .map(|c| {
                let total: f64 = c.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::Domain("period with no population".into()));
                }
                Ok(c.map(|v| v / total))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(preferences, periods, shares)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.preferences.violations().first() {
            return Err(Error::Invariant(v.to_string()));
        }
        if self.periods.is_empty() || self.periods.len() != self.age_shares.len() {
            return Err(Error::Config(format!(
                "{} periods but {} age-share rows",
                self.periods.len(),
                self.age_shares.len()
            )));
        }
        if self.periods.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("periods must be strictly increasing".into()));
        }
        for (period, row) in self.periods.iter().zip(&self.age_shares) {
            if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Invariant(format!("period {period}: negative age share")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SHARE_SUM_TOL {
                return Err(Error::Invariant(format!(
                    "period {period}: age shares sum to {sum}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProjection {
    pub periods: Vec<Period>,
    /// Implied demand per type, `sum_a pref[a][b] * share[a]`; sums to 1.
    pub demand_share: Vec<[f64; N_HOUSING_TYPES]>,
    /// Demand relative to the first period, first period = 100.
    pub index: Vec<[f64; N_HOUSING_TYPES]>,
}

impl DemandProjection {
    /// Index of the combined demand of `numer` relative to that of
    /// `denom`, first period = 100.
    pub fn relative_index(&self, numer: &[HousingType], denom: &[HousingType]) -> Vec<f64> {
        let ratio = |row: &[f64; N_HOUSING_TYPES]| {
            let n: f64 = numer.iter().map(|h| row[h.offset()]).sum();
            let d: f64 = denom.iter().map(|h| row[h.offset()]).sum();
            n / d
        };
        let base = ratio(&self.demand_share[0]);
        self.demand_share.iter().map(|r| 100.0 * ratio(r) / base).collect()
    }
}

/// Implied demand per housing type for each period of the scenario.
pub fn project_demand(scn: &ProjectionScenario) -> Result<DemandProjection> {
    scn.validate()?;
    let prefs = scn.preferences.rows();
    let demand_share: Vec<[f64; N_HOUSING_TYPES]> = scn
        .age_shares
        .iter()
        .map(|shares| {
            let mut d = [0.0; N_HOUSING_TYPES];
            for (row, s) in prefs.iter().zip(shares) {
                for b in 0..N_HOUSING_TYPES {
                    d[b] += row[b] * s;
                }
            }
            d
        })
        .collect();
    let base = demand_share[0];
    if let Some(b) = base.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::Domain(format!(
            "base-period demand for {} is zero",
            HousingType::ALL[b]
        )));
    }
    let index = demand_share
        .iter()
        .map(|d| {
            let mut idx = [0.0; N_HOUSING_TYPES];
            for b in 0..N_HOUSING_TYPES {
                idx[b] = if d[b] == base[b] { 100.0 } else { 100.0 * d[b] / base[b] };
            }
            idx
        })
        .collect();
    Ok(DemandProjection {
        periods: scn.periods.clone(),
        demand_share,
        index,
    })
}

/// An adult age profile whose 70+ share moves linearly from `from` to
/// `to` over `steps` annual steps starting at `start`. Proportions
/// within the 70+ and under-70 groups stay fixed.
pub fn aging_scenario(
    preferences: PreferenceMatrix,
    base_shares: &AgeCounts,
    start: Period,
    steps: usize,
    from: f64,
    to: f64,
) -> Result<ProjectionScenario> {
    if !(0.0..1.0).contains(&from) || !(0.0..1.0).contains(&to) || steps == 0 {
        return Err(Error::Config("70+ shares must lie in [0, 1) and steps >= 1".into()));
    }
    let old: f64 = base_shares[SEVENTY_PLUS].iter().sum();
    let young: f64 = base_shares.iter().sum::<f64>() - old;
    if !(old > 0.0 && young > 0.0) {
        return Err(Error::Domain("base profile needs both 70+ and under-70 mass".into()));
    }
    let mut periods = Vec::with_capacity(steps + 1);
    let mut shares = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let target = from + (to - from) * k as f64 / steps as f64;
        let mut row = [0.0; N_AGE_GROUPS];
        for (a, v) in row.iter_mut().enumerate() {
            *v = if SEVENTY_PLUS.contains(&a) {
                base_shares[a] / old * target
            } else {
                base_shares[a] / young * (1.0 - target)
            };
        }
        periods.push(start + k as Period);
        shares.push(row);
    }
    ProjectionScenario::new(preferences, periods, shares)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::lifecycle_preferences;

    const SMALL: [HousingType; 2] = [HousingType::One, HousingType::Two];
    const LARGE: [HousingType; 2] = [HousingType::Four, HousingType::FivePlus];

    #[test]
    fn constant_composition_is_flat() {
        let row = [1.0 / 14.0; N_AGE_GROUPS];
        let mut row = row;
        row[13] = 1.0 - row[..13].iter().sum::<f64>();
        let scn = ProjectionScenario::new(lifecycle_preferences(), vec![2000, 2001, 2002], vec![row; 3])
            .unwrap();
        let p = project_demand(&scn).unwrap();
        for idx in &p.index {
            assert_eq!(idx, &[100.0; N_HOUSING_TYPES]);
        }
        for d in &p.demand_share {
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_toward_small_home_ages_raises_small_indices() {
        let pref = lifecycle_preferences();
        // move mass from mid-life (prefers large) to 20-24 (prefers small)
        let mut counts = Vec::new();
        for k in 0..5 {
            let mut c = [100.0; N_AGE_GROUPS];
            c[0] += 10.0 * k as f64;
            c[6] -= 10.0 * k as f64;
            counts.push(c);
        }
        let scn = ProjectionScenario::from_counts(pref, (2000..2005).collect(), &counts).unwrap();
        let p = project_demand(&scn).unwrap();
        for w in p.index.windows(2) {
            for small in SMALL {
                for large in LARGE {
                    assert!(
                        w[1][small.offset()] / w[1][large.offset()]
                            > w[0][small.offset()] / w[0][large.offset()]
                    );
                }
            }
        }
    }

    #[test]
    fn indices_ignore_population_scale() {
        let pref = lifecycle_preferences();
        let c1 = [[120.0; N_AGE_GROUPS], {
            let mut c = [120.0; N_AGE_GROUPS];
            c[12] = 300.0;
            c
        }];
        let c2 = c1.map(|r| r.map(|v| v * 37.5));
        let a = project_demand(&ProjectionScenario::from_counts(pref.clone(), vec![1, 2], &c1).unwrap()).unwrap();
        let b = project_demand(&ProjectionScenario::from_counts(pref, vec![1, 2], &c2).unwrap()).unwrap();
        for (x, y) in a.index.iter().flatten().zip(b.index.iter().flatten()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn aging_path_hits_endpoints() {
        let base = [1.0 / 14.0; N_AGE_GROUPS];
        let scn = aging_scenario(lifecycle_preferences(), &base, 2020, 10, 0.15, 0.20).unwrap();
        assert_eq!(scn.periods.len(), 11);
        let s70 = |r: &AgeCounts| r[SEVENTY_PLUS].iter().sum::<f64>();
        assert!((s70(&scn.age_shares[0]) - 0.15).abs() < 1e-12);
        assert!((s70(&scn.age_shares[10]) - 0.20).abs() < 1e-12);
    }

    #[test]
    fn invalid_scenarios_rejected() {
        let pref = lifecycle_preferences();
        assert!(ProjectionScenario::new(pref.clone(), vec![1], vec![[0.5; N_AGE_GROUPS]]).is_err());
        assert!(ProjectionScenario::new(pref.clone(), vec![], vec![]).is_err());
        let row = {
            let mut r = [0.0; N_AGE_GROUPS];
            r[0] = 1.0;
            r
        };
        assert!(ProjectionScenario::new(pref, vec![2, 1], vec![row, row]).is_err());
    }
}
