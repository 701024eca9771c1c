//! Vector autoregression estimation and lag-order selection.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::linalg::{from_columns, least_squares, ln_det_spd};
use crate::error::{Error, Result};

/// Per-equation goodness of fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationFit {
    pub r_squared: f64,
    pub rmse: f64,
}

/// Estimated VAR(p). `coefficients[j][i][m]` is the effect of variable `m`
/// at lag `j + 1` on equation `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarModel {
    pub k: usize,
    pub lag: usize,
    pub n_obs: usize,
    pub coefficients: Vec<Vec<Vec<f64>>>,
    pub intercept: Option<Vec<f64>>,
    /// Maximum-likelihood residual covariance, `E'E / T`.
    pub residual_cov: Vec<Vec<f64>>,
    pub equations: Vec<EquationFit>,
    #[serde(skip)]
    pub residuals: Vec<Vec<f64>>,
}

fn check_data(data: &[Vec<f64>]) -> Result<usize> {
    let k = data.len();
    if k == 0 {
        return Err(Error::Spec("VAR needs at least one variable".into()));
    }
    let n = data[0].len();
    if let Some(bad) = data.iter().find(|c| c.len() != n) {
        return Err(Error::Length {
            len: bad.len(),
            required: n,
        });
    }
    if data.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("data contains non-finite values".into()));
    }
    Ok(n)
}

/// Fits a VAR(`lag`) on rows `first..n`; `first >= lag`.
fn fit_on_sample(data: &[Vec<f64>], lag: usize, intercept: bool, first: usize) -> Result<VarModel> {
    let k = data.len();
    let n = data[0].len();
    let t_obs = n - first;
    let n_params = k * lag + usize::from(intercept);
    if t_obs <= n_params {
        return Err(Error::Length {
            len: n,
            required: first + n_params + 1,
        });
    }
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n_params);
    for j in 1..=lag {
        for series in data {
            columns.push((first..n).map(|t| series[t - j]).collect());
        }
    }
    if intercept {
        columns.push(vec![1.0; t_obs]);
    }
    let x = from_columns(t_obs, &columns);
    let y = DMatrix::from_fn(t_obs, k, |r, i| data[i][first + r]);
    let fit = least_squares(&x, &y)?;

    let coefficients = (0..lag)
        .map(|j| {
            (0..k)
                .map(|i| (0..k).map(|m| fit.coef[(j * k + m, i)]).collect())
                .collect()
        })
        .collect();
    let intercept_vec = intercept.then(|| (0..k).map(|i| fit.coef[(k * lag, i)]).collect());

    let e = &fit.residuals;
    let cov = (e.transpose() * e) / t_obs as f64;
    let residual_cov = (0..k).map(|i| (0..k).map(|m| cov[(i, m)]).collect()).collect();
    let equations = (0..k)
        .map(|i| {
            let ssr: f64 = e.column(i).iter().map(|v| v * v).sum();
            let yi = y.column(i);
            let tss: f64 = if intercept {
                let mean = yi.mean();
                yi.iter().map(|v| (v - mean) * (v - mean)).sum()
            } else {
                yi.iter().map(|v| v * v).sum()
            };
            EquationFit {
                r_squared: if tss > 0.0 { (1.0 - ssr / tss).clamp(0.0, 1.0) } else { 0.0 },
                rmse: (ssr / (t_obs - n_params) as f64).sqrt(),
            }
        })
        .collect();
    Ok(VarModel {
        k,
        lag,
        n_obs: t_obs,
        coefficients,
        intercept: intercept_vec,
        residual_cov,
        equations,
        residuals: (0..k).map(|i| e.column(i).iter().copied().collect()).collect(),
    })
}

/// Equation-by-equation least squares. `data` holds one series per variable.
pub fn var_fit(data: &[Vec<f64>], lag: usize, intercept: bool) -> Result<VarModel> {
    let n = check_data(data)?;
    if n <= data.len() * lag + 1 {
        return Err(Error::Length {
            len: n,
            required: data.len() * lag + 2,
        });
    }
    fit_on_sample(data, lag, intercept, lag)
}

impl VarModel {
    pub fn residual_cov_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.k, |i, j| self.residual_cov[i][j])
    }

    /// Gaussian log-likelihood at the ML covariance.
    pub fn log_likelihood(&self) -> Result<f64> {
        let ln_det = ln_det_spd(&self.residual_cov_matrix(), "residual covariance")?;
        let t = self.n_obs as f64;
        Ok(-0.5 * t * (self.k as f64 * (1.0 + (2.0 * PI).ln()) + ln_det))
    }
}

/// One row of the lag-selection table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagCriteria {
    pub lag: usize,
    pub log_likelihood: f64,
    /// Likelihood-ratio statistic against `lag - 1`; absent for lag 0.
    pub lr: Option<f64>,
    pub fpe: f64,
    pub aic: f64,
    pub hqic: f64,
    pub sbic: f64,
}

/// Lag chosen by each criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarredLags {
    pub lr: usize,
    pub fpe: usize,
    pub aic: usize,
    pub hqic: usize,
    pub sbic: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelectionTable {
    pub k: usize,
    pub max_lag: usize,
    /// Common estimation sample size.
    pub n_obs: usize,
    /// Significance of each sequential likelihood-ratio step.
    pub lr_level: f64,
    pub rows: Vec<LagCriteria>,
    pub starred: StarredLags,
}

fn argmin_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Fits VAR(0..=max_lag) with an intercept on the common sample
/// `max_lag..n` and tabulates LR, FPE, AIC, HQIC and SBIC.
///
/// With `T` observations, `k` variables and `t_p = k (k p + 1)` parameters:
/// `AIC = -2 LL/T + 2 t_p/T`, `HQIC = -2 LL/T + 2 ln(ln T) t_p/T`,
/// `SBIC = -2 LL/T + ln(T) t_p/T`, `FPE = |Σ| ((T + kp + 1)/(T - kp - 1))^k`.
/// The LR lag is the largest `p` whose step test rejects at 5% against
/// `χ²(k²)`, scanning down from `max_lag`; information criteria pick the
/// smallest lag attaining the minimum.
pub fn lag_select(data: &[Vec<f64>], max_lag: usize) -> Result<LagSelectionTable> {
    let n = check_data(data)?;
    let k = data.len();
    if n <= max_lag + k * max_lag + 1 {
        return Err(Error::Length {
            len: n,
            required: max_lag + k * max_lag + 2,
        });
    }
    let t = (n - max_lag) as f64;
    let kf = k as f64;
    let mut rows: Vec<LagCriteria> = Vec::with_capacity(max_lag + 1);
    for p in 0..=max_lag {
        let model = fit_on_sample(data, p, true, max_lag)?;
        let ll = model.log_likelihood()?;
        let ln_det = ln_det_spd(&model.residual_cov_matrix(), "residual covariance")?;
        let n_params = (k * (k * p + 1)) as f64;
        let dfc = (k * p + 1) as f64;
        let base = -2.0 * ll / t;
        rows.push(LagCriteria {
            lag: p,
            log_likelihood: ll,
            lr: rows.last().map(|prev: &LagCriteria| 2.0 * (ll - prev.log_likelihood)),
            fpe: ln_det.exp() * ((t + dfc) / (t - dfc)).powf(kf),
            aic: base + 2.0 * n_params / t,
            hqic: base + 2.0 * t.ln().ln() * n_params / t,
            sbic: base + t.ln() * n_params / t,
        });
    }

    let lr_level = 0.05;
    let chi2 = ChiSquared::new((k * k) as f64)
        .map_err(|e| Error::Spec(format!("chi-squared distribution: {e}")))?;
    let lr_crit = chi2.inverse_cdf(1.0 - lr_level);
    let lr_lag = rows
        .iter()
        .rev()
        .find(|r| r.lr.is_some_and(|lr| lr > lr_crit))
        .map(|r| r.lag)
        .unwrap_or(0);

    let starred = StarredLags {
        lr: lr_lag,
        fpe: argmin_first(rows.iter().map(|r| r.fpe)),
        aic: argmin_first(rows.iter().map(|r| r.aic)),
        hqic: argmin_first(rows.iter().map(|r| r.hqic)),
        sbic: argmin_first(rows.iter().map(|r| r.sbic)),
    };
    Ok(LagSelectionTable {
        k,
        max_lag,
        n_obs: n - max_lag,
        lr_level,
        rows,
        starred,
    })
}
