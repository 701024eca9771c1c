//! The linear link between demographic (or GDP) growth and index returns:
//! `R_p(t) = v1 * x(t) + v2`, its fitting, and the long-run GDP trend.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::{align, ma, MonthStamp, MonthlySeries, SmoothSpec};

/// Quarterly log growth is multiplied by this to express it per year.
pub const GDP_ANNUALIZATION: f64 = 4.0;
/// Trailing window, in months, applied to the monthly-expanded GDP growth.
pub const GDP_SMOOTHING_MONTHS: usize = 6;
pub const GDP_V1: f64 = 0.62;
pub const GDP_V2: f64 = -0.0094;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    #[default]
    Ols,
    Grid,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitMethod::Ols => f.pad("ols"),
            FitMethod::Grid => f.pad("grid"),
        }
    }
}

/// Fitted coefficients plus residual statistics over the fit window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub v1: f64,
    pub v2: f64,
    pub residual_mean: f64,
    pub residual_std: f64,
    pub n_obs: usize,
    pub fit_window: (MonthStamp, MonthStamp),
    pub method: FitMethod,
}

impl ModelFit {
    /// Root mean square of the residuals.
    pub fn rms(&self) -> f64 {
        (self.residual_std * self.residual_std + self.residual_mean * self.residual_mean).sqrt()
    }
}

/// Rectangular `(v1, v2)` lattice searched by the grid fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub v1_min: f64,
    pub v1_max: f64,
    pub v1_step: f64,
    pub v2_min: f64,
    pub v2_max: f64,
    pub v2_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            v1_min: 0.0,
            v1_max: 400.0,
            v1_step: 5.0,
            v2_min: -0.5,
            v2_max: 0.5,
            v2_step: 0.005,
        }
    }
}

fn axis(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) {
        return Err(Error::Spec(format!(
            "grid axis {min}..{max} step {step} is empty"
        )));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

impl GridSpec {
    pub fn v1_values(&self) -> Result<Vec<f64>> {
        axis(self.v1_min, self.v1_max, self.v1_step)
    }

    pub fn v2_values(&self) -> Result<Vec<f64>> {
        axis(self.v2_min, self.v2_max, self.v2_step)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn sum_sq_residual(y: &[f64], x: &[f64], v1: f64, v2: f64) -> f64 {
    y.iter()
        .zip(x)
        .map(|(y, x)| {
            let e = y - (v1 * x + v2);
            e * e
        })
        .sum()
}

/// Fit with the default lattice when `method` is [`FitMethod::Grid`].
pub fn fit_linear(
    observed: &MonthlySeries,
    predictor: &MonthlySeries,
    method: FitMethod,
) -> Result<ModelFit> {
    match method {
        FitMethod::Ols => fit_ols(observed, predictor),
        FitMethod::Grid => fit_grid(observed, predictor, &GridSpec::default()),
    }
}

fn prepare(observed: &MonthlySeries, predictor: &MonthlySeries) -> Result<(MonthlySeries, MonthlySeries)> {
    let (y, x) = align(observed, predictor)?;
    if y.len() < 3 {
        return Err(Error::Length {
            len: y.len(),
            required: 3,
        });
    }
    let (_, sd) = mean_std(x.values());
    if !(sd > 0.0) {
        return Err(Error::Singular("predictor has zero variance over the fit window".into()));
    }
    Ok((y, x))
}

fn finish(y: &MonthlySeries, x: &MonthlySeries, v1: f64, v2: f64, method: FitMethod) -> ModelFit {
    let residuals: Vec<f64> = y
        .values()
        .iter()
        .zip(x.values())
        .map(|(y, x)| y - (v1 * x + v2))
        .collect();
    let (residual_mean, residual_std) = mean_std(&residuals);
    ModelFit {
        v1,
        v2,
        residual_mean,
        residual_std,
        n_obs: y.len(),
        fit_window: (y.start(), y.end()),
        method,
    }
}

fn fit_ols(observed: &MonthlySeries, predictor: &MonthlySeries) -> Result<ModelFit> {
    let (y, x) = prepare(observed, predictor)?;
    let n = y.len() as f64;
    let mx = x.values().iter().sum::<f64>() / n;
    let my = y.values().iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, yi) in x.values().iter().zip(y.values()) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    let v1 = sxy / sxx;
    let v2 = my - v1 * mx;
    Ok(finish(&y, &x, v1, v2, FitMethod::Ols))
}

/// Exhaustive lattice search for the `(v1, v2)` pair with the smallest RMS
/// residual. Ties keep the first pair in `(v1, v2)` ascending order.
pub fn fit_grid(observed: &MonthlySeries, predictor: &MonthlySeries, grid: &GridSpec) -> Result<ModelFit> {
    let (y, x) = prepare(observed, predictor)?;
    let v2s = grid.v2_values()?;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for v1 in grid.v1_values()? {
        for &v2 in &v2s {
            let ss = sum_sq_residual(y.values(), x.values(), v1, v2);
            if ss < best.0 {
                best = (ss, v1, v2);
            }
        }
    }
    Ok(finish(&y, &x, best.1, best.2, FitMethod::Grid))
}

/// `v1 * x + v2` elementwise: the predicted return `R_p(t)`.
pub fn predict_returns(predictor: &MonthlySeries, v1: f64, v2: f64) -> MonthlySeries {
    predictor.map(|x| v1 * x + v2)
}

/// `observed - predicted` over their common months.
pub fn residual_series(observed: &MonthlySeries, predicted: &MonthlySeries) -> Result<MonthlySeries> {
    let (o, p) = align(observed, predicted)?;
    let values = o.values().iter().zip(p.values()).map(|(a, b)| a - b).collect();
    MonthlySeries::new(o.start(), values)
}

/// Calendar quarter, ordered `(year, quarter)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarterStamp {
    year: i32,
    quarter: u32,
}

impl QuarterStamp {
    pub fn new(year: i32, quarter: u32) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::Domain(format!("quarter {quarter} is not in 1..=4")));
        }
        Ok(Self { year, quarter })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn quarter(&self) -> u32 {
        self.quarter
    }

    pub fn next(&self) -> Self {
        if self.quarter == 4 {
            Self {
                year: self.year + 1,
                quarter: 1,
            }
        } else {
            Self {
                year: self.year,
                quarter: self.quarter + 1,
            }
        }
    }

    pub fn add_quarters(&self, n: usize) -> Self {
        let ord = self.year as i64 * 4 + self.quarter as i64 - 1 + n as i64;
        Self {
            year: ord.div_euclid(4) as i32,
            quarter: ord.rem_euclid(4) as u32 + 1,
        }
    }

    pub fn first_month(&self) -> MonthStamp {
        MonthStamp::new(self.year, (self.quarter - 1) * 3 + 1).expect("quarter month is valid")
    }
}

impl fmt::Display for QuarterStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-Q{}", self.year, self.quarter)
    }
}

impl FromStr for QuarterStamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("'{s}' is not a YYYY-Qn quarter"));
        let (y, q) = s.split_once("-Q").ok_or_else(bad)?;
        if y.len() != 4 || q.len() != 1 {
            return Err(bad());
        }
        QuarterStamp::new(y.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?)
    }
}

impl Serialize for QuarterStamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuarterStamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Real GDP per capita, one value per consecutive quarter.
#[derive(Debug, Clone, PartialEq)]
pub struct GdpSeries {
    start: QuarterStamp,
    gdp_pc: Vec<f64>,
}

impl GdpSeries {
    pub fn new(start: QuarterStamp, gdp_pc: Vec<f64>) -> Result<Self> {
        if gdp_pc.is_empty() {
            return Err(Error::Length { len: 0, required: 1 });
        }
        if let Some(i) = gdp_pc.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!(
                "GDP per capita {} in {} is not positive",
                gdp_pc[i],
                start.add_quarters(i)
            )));
        }
        Ok(Self { start, gdp_pc })
    }

    pub fn start(&self) -> QuarterStamp {
        self.start
    }

    pub fn quarters(&self) -> impl Iterator<Item = QuarterStamp> + '_ {
        (0..self.gdp_pc.len()).map(move |i| self.start.add_quarters(i))
    }

    pub fn gdp_pc(&self) -> &[f64] {
        &self.gdp_pc
    }

    pub fn len(&self) -> usize {
        self.gdp_pc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gdp_pc.is_empty()
    }
}

/// Annualised quarter-over-quarter log growth, held constant over each
/// quarter's three months.
pub fn monthly_gdp_growth(g: &GdpSeries) -> Result<MonthlySeries> {
    if g.len() < 2 {
        return Err(Error::Length {
            len: g.len(),
            required: 2,
        });
    }
    let mut values = Vec::with_capacity(3 * (g.len() - 1));
    for w in g.gdp_pc.windows(2) {
        let rate = GDP_ANNUALIZATION * (w[1] / w[0]).ln();
        values.extend([rate; 3]);
    }
    MonthlySeries::new(g.start.next().first_month(), values)
}

/// Predicted returns from GDP per capita: expand annualised growth to
/// months, take a trailing MA(6), then apply `v1 * x + v2`.
pub fn predict_from_gdp(g: &GdpSeries, v1: f64, v2: f64) -> Result<MonthlySeries> {
    if g.len() < 3 {
        return Err(Error::Length {
            len: g.len(),
            required: 3,
        });
    }
    let growth = monthly_gdp_growth(g)?;
    let smoothed = ma(&growth, SmoothSpec::trailing(GDP_SMOOTHING_MONTHS)?)?;
    Ok(predict_returns(&smoothed, v1, v2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendParams {
    /// Annual increment of real GDP per capita.
    pub g0: f64,
}

impl TrendParams {
    pub fn new(g0: f64) -> Result<Self> {
        if !(g0 > 0.0) {
            return Err(Error::Domain(format!("trend increment {g0} must be positive")));
        }
        Ok(Self { g0 })
    }
}

/// Long-run growth rate of GDP per capita, `G0 / GDPpc`.
pub fn trend_growth_rate(gdp_pc: f64, p: &TrendParams) -> Result<f64> {
    if !(gdp_pc > 0.0) {
        return Err(Error::Domain(format!("GDP per capita {gdp_pc} must be positive")));
    }
    Ok(p.g0 / gdp_pc)
}
