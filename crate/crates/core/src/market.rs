//! Index-level transforms: monthly levels, returns, volatility and the
//! observed return series `R_o(t)`.

use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{running_sum, MonthStamp, MonthlySeries};

/// Daily closing levels, trading days only.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    days: Vec<(NaiveDate, f64)>,
}

impl DailySeries {
    pub fn new(days: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::Length { len: 0, required: 1 });
        }
        for (i, &(date, close)) in days.iter().enumerate() {
            if !(close > 0.0) || !close.is_finite() {
                return Err(Error::Domain(format!("close {close} on {date} is not positive")));
            }
            if i > 0 && days[i - 1].0 >= date {
                return Err(Error::Domain(format!(
                    "dates not strictly increasing at {date}"
                )));
            }
        }
        Ok(Self { days })
    }

    pub fn days(&self) -> &[(NaiveDate, f64)] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    /// Copy with every close multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.days.iter().map(|&(d, c)| (d, c * factor)).collect())
    }
}

fn month_of(date: NaiveDate) -> MonthStamp {
    MonthStamp::new(date.year(), date.month()).expect("chrono month is 1..=12")
}

type MonthGroups<'a> = (MonthStamp, Vec<&'a [(NaiveDate, f64)]>);

/// Daily closes grouped by calendar month, one slice per month of the span.
fn by_month(d: &DailySeries) -> Result<MonthGroups<'_>> {
    let first = month_of(d.days[0].0);
    let last = month_of(d.days[d.days.len() - 1].0);
    let n_months = first.months_until(last) as usize + 1;
    let mut groups = Vec::with_capacity(n_months);
    let mut i = 0;
    for k in 0..n_months {
        let month = first.add_months(k as i64);
        let lo = i;
        while i < d.days.len() && month_of(d.days[i].0) == month {
            i += 1;
        }
        if lo == i {
            return Err(Error::Gap(month));
        }
        groups.push(&d.days[lo..i]);
    }
    Ok((first, groups))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    /// Last close of the month.
    #[default]
    Close,
    /// Arithmetic mean of the month's closes.
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnMode {
    #[default]
    Simple,
    Log,
}

impl fmt::Display for ReturnMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReturnMode::Simple => f.pad("simple"),
            ReturnMode::Log => f.pad("log"),
        }
    }
}

impl ReturnMode {
    fn apply(self, from: f64, to: f64) -> f64 {
        match self {
            ReturnMode::Simple => to / from - 1.0,
            ReturnMode::Log => (to / from).ln(),
        }
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

pub fn monthly_levels(d: &DailySeries, kind: LevelKind) -> Result<MonthlySeries> {
    let (start, groups) = by_month(d)?;
    let values = groups
        .iter()
        .map(|g| match kind {
            LevelKind::Close => g[g.len() - 1].1,
            LevelKind::Mean => mean(g.iter().map(|&(_, c)| c)),
        })
        .collect();
    MonthlySeries::new(start, values)
}

fn check_positive(m: &MonthlySeries) -> Result<()> {
    if let Some((month, value)) = m.iter().find(|&(_, v)| !(v > 0.0)) {
        return Err(Error::NonPositive { month, value });
    }
    Ok(())
}

fn lagged_returns(m: &MonthlySeries, lag: usize, mode: ReturnMode) -> Result<MonthlySeries> {
    if m.len() <= lag {
        return Err(Error::Length {
            len: m.len(),
            required: lag + 1,
        });
    }
    check_positive(m)?;
    let p = m.values();
    let values = (lag..p.len()).map(|t| mode.apply(p[t - lag], p[t])).collect();
    MonthlySeries::new(m.start().add_months(lag as i64), values)
}

/// One-month returns of a level series.
pub fn monthly_returns(m: &MonthlySeries, mode: ReturnMode) -> Result<MonthlySeries> {
    lagged_returns(m, 1, mode)
}

/// Point-to-point twelve-month return, stepped monthly.
pub fn annual_return(m: &MonthlySeries, mode: ReturnMode) -> Result<MonthlySeries> {
    lagged_returns(m, 12, mode)
}

/// Sum of the previous twelve monthly returns: the observed series `R_o(t)`.
pub fn rolling_annual_return(m: &MonthlySeries, mode: ReturnMode) -> Result<MonthlySeries> {
    if m.len() < 13 {
        return Err(Error::Length {
            len: m.len(),
            required: 13,
        });
    }
    running_sum(&monthly_returns(m, mode)?, 12)
}

/// `(mean - close) / mean` per month.
pub fn mean_close_divergence(d: &DailySeries) -> Result<MonthlySeries> {
    let (start, groups) = by_month(d)?;
    let values = groups
        .iter()
        .map(|g| {
            let mu = mean(g.iter().map(|&(_, c)| c));
            (mu - g[g.len() - 1].1) / mu
        })
        .collect();
    MonthlySeries::new(start, values)
}

/// Population standard deviation of the month's closes over their mean.
pub fn monthly_volatility(d: &DailySeries) -> Result<MonthlySeries> {
    let (start, groups) = by_month(d)?;
    let mut values = Vec::with_capacity(groups.len());
    for (k, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(Error::DegenerateMonth {
                month: start.add_months(k as i64),
                days: g.len(),
            });
        }
        let mu = mean(g.iter().map(|&(_, c)| c));
        let var = mean(g.iter().map(|&(_, c)| (c - mu) * (c - mu)));
        values.push(var.sqrt() / mu);
    }
    MonthlySeries::new(start, values)
}

/// Additive running total of returns from the first month.
pub fn cumulative_return(r: &MonthlySeries) -> MonthlySeries {
    let mut acc = 0.0;
    let values = r
        .values()
        .iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect();
    MonthlySeries::new(r.start(), values).expect("input is non-empty")
}
