use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A column is rank deficient when its Householder pivot is below this
/// fraction of its own norm.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `(X'X)^{-1}`, from the triangular factor.
    pub xtx_inv: DMatrix<f64>,
}

pub(crate) fn design(x: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, x.len(), |i, j| x[j][i])
}

/// Least squares of `y` on the columns of `x` (no intercept added) via
/// Householder QR.
///
/// A column that is (numerically) a combination of earlier columns is
/// reported as [`Error::Collinear`] with its index; nothing is pivoted
/// away.
pub fn ols(y: &[f64], x: &[Vec<f64>]) -> Result<OlsFit> {
    let n = y.len();
    let p = x.len();
    if p == 0 {
        return Err(Error::Domain("regression needs at least one column".into()));
    }
    if let Some(bad) = x.iter().position(|c| c.len() != n) {
        return Err(Error::Domain(format!(
            "column {bad} has {} rows, outcome has {n}",
            x[bad].len()
        )));
    }
    if n < p {
        return Err(Error::InsufficientData(format!("{n} rows for {p} columns")));
    }

    let m = design(x, n);
    let norms: Vec<f64> = x.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let qr = m.clone().qr();
    let r = qr.r();
    for (j, &norm) in norms.iter().enumerate() {
        if !(norm > 0.0) || r[(j, j)].abs() <= RANK_TOL * norm {
            return Err(Error::Collinear {
                index: j,
                name: format!("column {j}"),
            });
        }
    }

    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let beta = r
        .solve_upper_triangular(&qty.rows(0, p).into_owned())
        .ok_or(Error::Collinear {
            index: p - 1,
            name: format!("column {}", p - 1),
        })?;
    let fitted = &m * &beta;
    let residuals = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .expect("nonsingular triangular factor");
    let xtx_inv = &r_inv * r_inv.transpose();

    Ok(OlsFit {
        beta: beta.iter().copied().collect(),
        residuals,
        xtx_inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit() {
        let x: Vec<f64> = (1..=20).map(|i| i as f64 * 0.37).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let fit = ols(&y, &[x]).unwrap();
        assert!((fit.beta[0] - 3.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn duplicate_column_is_named() {
        let a: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..10).map(|i| (i as f64).cos()).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        match ols(&y, &[a.clone(), b, a]) {
            Err(Error::Collinear { index, .. }) => assert_eq!(index, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_column_is_collinear() {
        let y = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            ols(&y, &[vec![0.0; 3]]),
            Err(Error::Collinear { index: 0, .. })
        ));
    }

    #[test]
    fn shape_errors() {
        assert!(ols(&[1.0, 2.0], &[]).is_err());
        assert!(ols(&[1.0, 2.0], &[vec![1.0]]).is_err());
        assert!(matches!(
            ols(&[1.0], &[vec![1.0], vec![2.0]]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn residuals_orthogonal_to_columns() {
        let a: Vec<f64> = (0..30).map(|i| (i as f64 * 0.3).sin()).collect();
        let b: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).cos() + 0.1 * i as f64).collect();
        let y: Vec<f64> = (0..30).map(|i| ((i * i) % 13) as f64).collect();
        let fit = ols(&y, &[a.clone(), b.clone()]).unwrap();
        for c in [a, b] {
            let dot: f64 = c.iter().zip(&fit.residuals).map(|(u, v)| u * v).sum();
            assert!(dot.abs() < 1e-10);
        }
    }
}
