use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::{from_columns, least_squares};
use crate::error::{Error, Result};

/// Ordinary least-squares estimates. When an intercept is requested its
/// coefficient is the last entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub coefficients: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub r_squared: f64,
    /// Root mean squared error, `sqrt(SSR / (n - p))`.
    pub rmse: f64,
    pub residuals: Vec<f64>,
    pub n_obs: usize,
}

impl OlsResult {
    /// t-ratio of coefficient `i`.
    pub fn t_stat(&self, i: usize) -> f64 {
        self.coefficients[i] / self.stderrs[i]
    }
}

/// Regress `y` on the given regressors, plus a constant if `intercept`.
///
/// R² is centered when an intercept is present and uncentered otherwise.
pub fn ols(y: &[f64], regressors: &[Vec<f64>], intercept: bool) -> Result<OlsResult> {
    let n = y.len();
    if let Some(bad) = regressors.iter().find(|r| r.len() != n) {
        return Err(Error::Length {
            len: bad.len(),
            required: n,
        });
    }
    let mut columns: Vec<Vec<f64>> = regressors.to_vec();
    if intercept {
        columns.push(vec![1.0; n]);
    }
    let p = columns.len();
    if n <= p {
        return Err(Error::Length {
            len: n,
            required: p + 1,
        });
    }
    let x = from_columns(n, &columns);
    let ys = DMatrix::from_column_slice(n, 1, y);
    let fit = least_squares(&x, &ys)?;

    let residuals: Vec<f64> = fit.residuals.column(0).iter().copied().collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = ssr / (n - p) as f64;
    let stderrs = fit.xtx_inv_diag.iter().map(|d| (sigma2 * d).sqrt()).collect();
    let tss: f64 = if intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    let r_squared = if tss > 0.0 { (1.0 - ssr / tss).clamp(0.0, 1.0) } else { 0.0 };

    Ok(OlsResult {
        coefficients: fit.coef.column(0).iter().copied().collect(),
        stderrs,
        r_squared,
        rmse: sigma2.sqrt(),
        residuals,
        n_obs: n,
    })
}
