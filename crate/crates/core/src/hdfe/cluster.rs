use nalgebra::DMatrix;

use super::ols::design;
use super::Factor;
use crate::error::{Error, Result};

/// Small-sample factor `G/(G-1) * (N-1)/(N-K)`.
pub fn cluster_correction(n_clusters: usize, n_obs: usize, k: usize) -> f64 {
    let g = n_clusters as f64;
    let n = n_obs as f64;
    (g / (g - 1.0)) * ((n - 1.0) / (n - k as f64))
}

/// Cluster-robust sandwich covariance of the coefficients of a
/// regression of residuals `e` on the (already demeaned) columns `x`.
///
/// `K` in the correction factor is `x.len() + k_absorbed`.
pub fn cluster_cov(
    x: &[Vec<f64>],
    residuals: &[f64],
    clusters: &Factor,
    k_absorbed: usize,
) -> Result<DMatrix<f64>> {
    let n = residuals.len();
    let p = x.len();
    if clusters.len() != n || x.iter().any(|c| c.len() != n) {
        return Err(Error::Domain("cluster ids, residuals and columns differ in length".into()));
    }
    let g = clusters.n_levels();
    if g < 2 {
        return Err(Error::InsufficientClusters(g));
    }
    let k = p + k_absorbed;
    if n <= k {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {k} parameters"
        )));
    }

    let m = design(x, n);
    let xtx = m.tr_mul(&m);
    let bread = xtx
        .cholesky()
        .ok_or(Error::Collinear {
            index: p.saturating_sub(1),
            name: "design".into(),
        })?
        .inverse();

    let mut scores = DMatrix::<f64>::zeros(g, p);
    for (i, (&c, &e)) in clusters.codes().iter().zip(residuals).enumerate() {
        for j in 0..p {
            scores[(c, j)] += x[j][i] * e;
        }
    }
    let meat = scores.tr_mul(&scores);
    let mut v = &bread * meat * &bread * cluster_correction(g, n, k);
    // exact symmetry
    for i in 0..p {
        for j in 0..i {
            let s = 0.5 * (v[(i, j)] + v[(j, i)]);
            v[(i, j)] = s;
            v[(j, i)] = s;
        }
    }
    Ok(v)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn col(n: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
        (0..n).map(f).collect()
    }

    #[test]
    fn zero_residuals_give_zero_matrix() {
        let n = 12;
        let x = vec![col(n, |i| i as f64 - 5.5), col(n, |i| ((i * 7) % 5) as f64)];
        let ids: Vec<String> = (0..n).map(|i| format!("g{}", i % 3)).collect();
        let v = cluster_cov(&x, &vec![0.0; n], &Factor::new(&ids), 0).unwrap();
        assert!(v.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn singleton_clusters_reduce_to_hc1() {
        let n = 15;
        let x = vec![col(n, |i| (i as f64 * 0.9).sin()), col(n, |i| (i as f64).sqrt())];
        let e = col(n, |i| ((i * 13) % 7) as f64 - 3.0);
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let k_abs = 2;
        let v = cluster_cov(&x, &e, &Factor::new(&ids), k_abs).unwrap();

        let m = design(&x, n);
        let bread = m.tr_mul(&m).try_inverse().unwrap();
        let mut meat = DMatrix::zeros(2, 2);
        for i in 0..n {
            for a in 0..2 {
                for b in 0..2 {
                    meat[(a, b)] += x[a][i] * x[b][i] * e[i] * e[i];
                }
            }
        }
        let k = 2 + k_abs;
        let hc1 = &bread * meat * &bread * (n as f64 / (n - k) as f64);
        for (a, b) in v.iter().zip(hc1.iter()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn one_cluster_is_an_error() {
        let x = vec![vec![1.0, 2.0, 3.0]];
        let f = Factor::new(&["a", "a", "a"]);
        assert!(matches!(
            cluster_cov(&x, &[0.1, 0.2, 0.3], &f, 0),
            Err(Error::InsufficientClusters(1))
        ));
    }

    #[test]
    fn correction_factor() {
        assert_eq!(cluster_correction(2, 10, 1), 2.0);
        assert!((cluster_correction(10, 10, 3) - 10.0 / 7.0).abs() < 1e-15);
    }
}
