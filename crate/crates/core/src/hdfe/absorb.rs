use rayon::prelude::*;

use super::Factor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorbOptions {
    /// Stop once a full sweep moves no entry by more than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AbsorbOptions {
    fn default() -> Self {
        AbsorbOptions {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbsorbOutcome {
    /// Sweeps used by the slowest column.
    pub iterations: usize,
    pub converged: bool,
}

struct Levels<'a> {
    factor: &'a Factor,
    weight_sums: Vec<f64>,
}

fn levels<'a>(factor: &'a Factor, weights: Option<&[f64]>) -> Levels<'a> {
    let mut weight_sums = vec![0.0; factor.n_levels()];
    for (i, &c) in factor.codes().iter().enumerate() {
        weight_sums[c] += weights.map_or(1.0, |w| w[i]);
    }
    Levels {
        factor,
        weight_sums,
    }
}

fn demean_once(col: &mut [f64], lv: &Levels<'_>, weights: Option<&[f64]>, sums: &mut [f64]) {
    sums.iter_mut().for_each(|s| *s = 0.0);
    let codes = lv.factor.codes();
    match weights {
        Some(w) => {
            for ((x, &c), wi) in col.iter().zip(codes).zip(w) {
                sums[c] += wi * x;
            }
        }
        None => {
            for (x, &c) in col.iter().zip(codes) {
                sums[c] += x;
            }
        }
    }
    for (s, &ws) in sums.iter_mut().zip(&lv.weight_sums) {
        *s /= ws;
    }
    for (x, &c) in col.iter_mut().zip(codes) {
        *x -= sums[c];
    }
}

/// Demeans every column in place by the (weighted) group means of each
/// factor.
///
/// With one factor this is the exact within transformation in a single
/// pass. With several, the factors are swept in order until a sweep
/// changes no entry by more than `opts.tol`, or `opts.max_iter` sweeps
/// have run; `converged` reports which.
pub fn absorb(
    columns: &mut [Vec<f64>],
    factors: &[Factor],
    weights: Option<&[f64]>,
    opts: &AbsorbOptions,
) -> AbsorbOutcome {
    if factors.is_empty() {
        return AbsorbOutcome {
            iterations: 0,
            converged: true,
        };
    }
    let lvs: Vec<Levels<'_>> = factors.iter().map(|f| levels(f, weights)).collect();
    let max_levels = factors.iter().map(Factor::n_levels).max().unwrap_or(0);

    if lvs.len() == 1 {
        columns.par_iter_mut().for_each(|col| {
            let mut sums = vec![0.0; max_levels];
            demean_once(col, &lvs[0], weights, &mut sums);
        });
        return AbsorbOutcome {
            iterations: 1,
            converged: true,
        };
    }

    let per_column: Vec<(usize, bool)> = columns
        .par_iter_mut()
        .map(|col| {
            let mut sums = vec![0.0; max_levels];
            let mut before = col.clone();
            for it in 1..=opts.max_iter {
                before.copy_from_slice(col);
                for lv in &lvs {
                    demean_once(col, lv, weights, &mut sums);
                }
                let change = col
                    .iter()
                    .zip(&before)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if change < opts.tol {
                    return (it, true);
                }
            }
            (opts.max_iter, false)
        })
        .collect();

    AbsorbOutcome {
        iterations: per_column.iter().map(|p| p.0).max().unwrap_or(0),
        converged: per_column.iter().all(|p| p.1),
    }
}

/// Non-mutating form of [`absorb`].
pub fn absorbed(
    columns: &[Vec<f64>],
    factors: &[Factor],
    weights: Option<&[f64]>,
    opts: &AbsorbOptions,
) -> (Vec<Vec<f64>>, AbsorbOutcome) {
    let mut out = columns.to_vec();
    let outcome = absorb(&mut out, factors, weights, opts);
    (out, outcome)
}
