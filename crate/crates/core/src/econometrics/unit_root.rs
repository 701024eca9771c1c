//! Augmented Dickey-Fuller, DF-GLS and Engle-Granger residual tests.

use serde::{Deserialize, Serialize};

use super::critical::{
    adf_critical_values, dfgls_critical_values, engle_granger_critical_values, CriticalValues,
    Significance,
};
use super::ols::{ols, OlsResult};
use super::TrendSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitRootTest {
    Adf,
    Dfgls,
}

/// Which embedded table produced the critical values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalSource {
    Fuller,
    ElliottRothenbergStock,
    MackinnonCointegration,
}

/// Test statistic for one augmentation lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagStatistic {
    pub lag: usize,
    pub statistic: f64,
    /// Rows in the test regression.
    pub n_obs: usize,
    pub critical_values: CriticalValues,
    pub reject_at: std::collections::BTreeMap<Significance, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootReport {
    pub test: UnitRootTest,
    pub trend: TrendSpec,
    pub critical_source: CriticalSource,
    pub per_lag: Vec<LagStatistic>,
    /// Lag whose decision is summarised in `critical_values` / `reject_at`.
    pub reported_lag: usize,
    pub critical_values: CriticalValues,
    pub reject_at: std::collections::BTreeMap<Significance, bool>,
}

impl UnitRootReport {
    fn new(
        test: UnitRootTest,
        trend: TrendSpec,
        critical_source: CriticalSource,
        per_lag: Vec<LagStatistic>,
    ) -> Self {
        let last = per_lag.last().expect("at least lag 0 is always computed").clone();
        Self {
            test,
            trend,
            critical_source,
            reported_lag: last.lag,
            critical_values: last.critical_values,
            reject_at: last.reject_at,
            per_lag,
        }
    }

    pub fn at_lag(&self, lag: usize) -> Option<&LagStatistic> {
        self.per_lag.iter().find(|l| l.lag == lag)
    }

    /// Statistic at the reported lag.
    pub fn statistic(&self) -> f64 {
        self.at_lag(self.reported_lag).map(|l| l.statistic).unwrap_or(f64::NAN)
    }

    pub fn rejects(&self, level: Significance) -> bool {
        self.reject_at.get(&level).copied().unwrap_or(false)
    }

    /// Re-targets the summary fields at another computed lag.
    pub fn with_reported_lag(mut self, lag: usize) -> Result<Self> {
        let row = self
            .at_lag(lag)
            .ok_or_else(|| Error::Spec(format!("lag {lag} was not computed")))?
            .clone();
        self.reported_lag = lag;
        self.critical_values = row.critical_values;
        self.reject_at = row.reject_at;
        Ok(self)
    }
}

fn decisions(statistic: f64, cv: &CriticalValues) -> std::collections::BTreeMap<Significance, bool> {
    cv.iter().map(|(&s, &c)| (s, statistic < c)).collect()
}

/// t-ratio on `s_{t-1}` in the regression of `Δs_t` on `s_{t-1}`, `lag`
/// lagged differences and the deterministic terms of `trend`.
fn df_regression(s: &[f64], lag: usize, trend: TrendSpec) -> Result<(f64, usize)> {
    let n = s.len();
    let diff: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    // diff[t-1] = s[t] - s[t-1]; rows are t = lag+1 ..= n-1
    let rows: Vec<usize> = (lag + 1..n).collect();
    let n_obs = rows.len();
    let n_params = 1 + lag + trend.n_terms();
    if n_obs <= n_params {
        return Err(Error::Length {
            len: n,
            required: n_params + lag + 2,
        });
    }
    let y: Vec<f64> = rows.iter().map(|&t| diff[t - 1]).collect();
    let mut regressors = Vec::with_capacity(1 + lag + 1);
    regressors.push(rows.iter().map(|&t| s[t - 1]).collect::<Vec<f64>>());
    for j in 1..=lag {
        regressors.push(rows.iter().map(|&t| diff[t - 1 - j]).collect());
    }
    if trend == TrendSpec::ConstantTrend {
        regressors.push(rows.iter().map(|&t| t as f64).collect());
    }
    let fit = ols(&y, &regressors, trend.has_constant())?;
    Ok((fit.t_stat(0), n_obs))
}

fn check_lengths(s: &[f64], max_lag: usize, trend: TrendSpec) -> Result<()> {
    let required = max_lag + 3 + trend.n_terms();
    if s.len() < required {
        return Err(Error::Length {
            len: s.len(),
            required,
        });
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("series contains non-finite values".into()));
    }
    Ok(())
}

fn run_lags(
    s: &[f64],
    max_lag: usize,
    trend: TrendSpec,
    cv: impl Fn(usize) -> CriticalValues,
) -> Result<Vec<LagStatistic>> {
    (0..=max_lag)
        .map(|lag| {
            let (statistic, n_obs) = df_regression(s, lag, trend)?;
            let critical_values = cv(n_obs);
            Ok(LagStatistic {
                lag,
                statistic,
                n_obs,
                reject_at: decisions(statistic, &critical_values),
                critical_values,
            })
        })
        .collect()
}

/// Augmented Dickey-Fuller test at every lag `0..=max_lag`.
pub fn adf_test(s: &[f64], max_lag: usize, trend: TrendSpec) -> Result<UnitRootReport> {
    check_lengths(s, max_lag, trend)?;
    let per_lag = run_lags(s, max_lag, trend, |n| adf_critical_values(trend, n))?;
    Ok(UnitRootReport::new(UnitRootTest::Adf, trend, CriticalSource::Fuller, per_lag))
}

/// Local-to-unity parameter for GLS detrending.
pub fn dfgls_cbar(trend: TrendSpec) -> Result<f64> {
    match trend {
        TrendSpec::Constant => Ok(-7.0),
        TrendSpec::ConstantTrend => Ok(-13.5),
        TrendSpec::None => Err(Error::Spec("DF-GLS needs a constant or a trend".into())),
    }
}

/// GLS-demeaned (or detrended) copy of `s`.
pub fn gls_detrend(s: &[f64], trend: TrendSpec) -> Result<Vec<f64>> {
    let cbar = dfgls_cbar(trend)?;
    let n = s.len();
    let alpha = 1.0 + cbar / n as f64;
    let quasi = |x: &[f64]| -> Vec<f64> {
        std::iter::once(x[0])
            .chain(x.windows(2).map(|w| w[1] - alpha * w[0]))
            .collect()
    };
    let mut z: Vec<Vec<f64>> = vec![vec![1.0; n]];
    if trend == TrendSpec::ConstantTrend {
        z.push((1..=n).map(|t| t as f64).collect());
    }
    let zq: Vec<Vec<f64>> = z.iter().map(|c| quasi(c)).collect();
    let beta = ols(&quasi(s), &zq, false)?.coefficients;
    Ok((0..n)
        .map(|t| s[t] - z.iter().zip(&beta).map(|(c, b)| c[t] * b).sum::<f64>())
        .collect())
}

/// DF-GLS test: GLS-detrend, then the no-deterministic ADF regression.
pub fn dfgls_test(s: &[f64], max_lag: usize, trend: TrendSpec) -> Result<UnitRootReport> {
    dfgls_cbar(trend)?;
    check_lengths(s, max_lag, trend)?;
    let detrended = gls_detrend(s, trend)?;
    let per_lag = run_lags(&detrended, max_lag, TrendSpec::None, |n| {
        dfgls_critical_values(trend, n)
    })?;
    let source = match trend {
        TrendSpec::ConstantTrend => CriticalSource::ElliottRothenbergStock,
        _ => CriticalSource::Fuller,
    };
    Ok(UnitRootReport::new(UnitRootTest::Dfgls, trend, source, per_lag))
}

/// Unit-root test of an already-formed residual (no estimated
/// cointegrating vector): ADF with no deterministic terms.
pub fn eg_residual_test(residual: &[f64], max_lag: usize) -> Result<UnitRootReport> {
    adf_test(residual, max_lag, TrendSpec::None)
}

/// Two-step Engle-Granger: regress `y` on `x` with a constant, then test the
/// residuals with cointegration critical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngleGranger {
    pub regression: OlsResult,
    pub report: UnitRootReport,
}

pub fn engle_granger(y: &[f64], x: &[f64], max_lag: usize) -> Result<EngleGranger> {
    if y.len() != x.len() {
        return Err(Error::Length {
            len: x.len(),
            required: y.len(),
        });
    }
    let regression = ols(y, &[x.to_vec()], true)?;
    let e = &regression.residuals;
    check_lengths(e, max_lag, TrendSpec::None)?;
    let per_lag = run_lags(e, max_lag, TrendSpec::None, engle_granger_critical_values)?;
    let report = UnitRootReport::new(
        UnitRootTest::Adf,
        TrendSpec::None,
        CriticalSource::MackinnonCointegration,
        per_lag,
    );
    Ok(EngleGranger { regression, report })
}
