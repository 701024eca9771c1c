//! Calendar-indexed monthly series and the window primitives built on them.
//!
//! A [`MonthlySeries`] is a start month plus one value per consecutive month.
//! Every window operation shortens its input instead of padding it, so a
//! result never carries values that were not computed from real data.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A calendar month. Ordering is `(year, month)` lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthStamp {
    year: i32,
    month: u32,
}

impl MonthStamp {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Domain(format!("month {month} is not in 1..=12")));
        }
        Ok(Self { year, month })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u32 {
        self.month
    }

    /// Months since year 0, January.
    pub fn ordinal(&self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(12) as i32;
        let month = ordinal.rem_euclid(12) as u32 + 1;
        Self { year, month }
    }

    pub fn add_months(&self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(&self, other: MonthStamp) -> i64 {
        other.ordinal() - self.ordinal()
    }
}

impl fmt::Display for MonthStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthStamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("'{s}' is not a YYYY-MM month"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        MonthStamp::new(year, month)
    }
}

impl Serialize for MonthStamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthStamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Gap-free run of monthly values starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct MonthlySeries {
    start: MonthStamp,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSeries {
    start: MonthStamp,
    values: Vec<f64>,
}

impl TryFrom<RawSeries> for MonthlySeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        MonthlySeries::new(raw.start, raw.values)
    }
}

impl MonthlySeries {
    pub fn new(start: MonthStamp, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Length { len: 0, required: 1 });
        }
        Ok(Self { start, values })
    }

    pub fn start(&self) -> MonthStamp {
        self.start
    }

    /// Last covered month (inclusive).
    pub fn end(&self) -> MonthStamp {
        self.start.add_months(self.values.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn month_at(&self, index: usize) -> MonthStamp {
        self.start.add_months(index as i64)
    }

    pub fn get(&self, month: MonthStamp) -> Option<f64> {
        let offset = self.start.months_until(month);
        if offset < 0 {
            return None;
        }
        self.values.get(offset as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonthStamp, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.month_at(i), v))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> MonthlySeries {
        MonthlySeries {
            start: self.start,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Same values, re-stamped `months` later (negative moves earlier).
    pub fn shifted(&self, months: i64) -> MonthlySeries {
        MonthlySeries {
            start: self.start.add_months(months),
            values: self.values.clone(),
        }
    }

    /// Sub-series covering `from..=to`, clipped to the available range.
    pub fn window(&self, from: MonthStamp, to: MonthStamp) -> Result<MonthlySeries> {
        let lo = from.max(self.start);
        let hi = to.min(self.end());
        if lo > hi {
            return Err(Error::Alignment {
                a_start: self.start,
                a_end: self.end(),
                b_start: from,
                b_end: to,
            });
        }
        let i0 = self.start.months_until(lo) as usize;
        let i1 = self.start.months_until(hi) as usize;
        Ok(MonthlySeries {
            start: lo,
            values: self.values[i0..=i1].to_vec(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    /// Value at month t summarises months t-window+1..=t.
    #[default]
    Trailing,
    /// Value at month t summarises the symmetric window around t.
    Centered,
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alignment::Trailing => f.pad("trailing"),
            Alignment::Centered => f.pad("centered"),
        }
    }
}

/// Moving-average window description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSmooth")]
pub struct SmoothSpec {
    window: usize,
    alignment: Alignment,
}

#[derive(Deserialize)]
struct RawSmooth {
    window: usize,
    #[serde(default)]
    alignment: Alignment,
}

impl TryFrom<RawSmooth> for SmoothSpec {
    type Error = Error;

    fn try_from(raw: RawSmooth) -> Result<Self> {
        SmoothSpec::new(raw.window, raw.alignment)
    }
}

impl SmoothSpec {
    pub fn new(window: usize, alignment: Alignment) -> Result<Self> {
        if window == 0 {
            return Err(Error::Spec("smoothing window must be at least 1".into()));
        }
        if alignment == Alignment::Centered && window.is_multiple_of(2) {
            return Err(Error::Spec(format!(
                "centered smoothing needs an odd window, got {window}"
            )));
        }
        Ok(Self { window, alignment })
    }

    pub fn trailing(window: usize) -> Result<Self> {
        Self::new(window, Alignment::Trailing)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn alignment(&self) -> Alignment {
        self.alignment
    }
}

fn require_len(s: &MonthlySeries, required: usize) -> Result<()> {
    if s.len() < required {
        return Err(Error::Length {
            len: s.len(),
            required,
        });
    }
    Ok(())
}

/// Sliding-window sums. Each window is summed from scratch so rounding error
/// does not accumulate along the series.
fn window_sums(values: &[f64], window: usize) -> Vec<f64> {
    values.windows(window).map(|w| w.iter().sum()).collect()
}

/// Moving average. Trailing results are stamped at the last month of each
/// window, centered results at the middle month.
pub fn ma(s: &MonthlySeries, spec: SmoothSpec) -> Result<MonthlySeries> {
    require_len(s, spec.window)?;
    let w = spec.window;
    let values = window_sums(&s.values, w)
        .into_iter()
        .map(|sum| sum / w as f64)
        .collect();
    let offset = match spec.alignment {
        Alignment::Trailing => w - 1,
        Alignment::Centered => (w - 1) / 2,
    };
    MonthlySeries::new(s.start.add_months(offset as i64), values)
}

/// Month-over-month log change, `ln(s_t / s_{t-1})`.
pub fn dln(s: &MonthlySeries) -> Result<MonthlySeries> {
    require_len(s, 2)?;
    if let Some((month, value)) = s.iter().find(|&(_, v)| !(v > 0.0)) {
        return Err(Error::NonPositive { month, value });
    }
    let values = s.values.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    MonthlySeries::new(s.start.add_months(1), values)
}

/// Trailing sum over `window` months.
pub fn running_sum(s: &MonthlySeries, window: usize) -> Result<MonthlySeries> {
    if window == 0 {
        return Err(Error::Spec("running-sum window must be at least 1".into()));
    }
    require_len(s, window)?;
    MonthlySeries::new(
        s.start.add_months(window as i64 - 1),
        window_sums(&s.values, window),
    )
}

/// Restricts both series to their common months.
pub fn align(a: &MonthlySeries, b: &MonthlySeries) -> Result<(MonthlySeries, MonthlySeries)> {
    let lo = a.start.max(b.start);
    let hi = a.end().min(b.end());
    if lo > hi {
        return Err(Error::Alignment {
            a_start: a.start,
            a_end: a.end(),
            b_start: b.start,
            b_end: b.end(),
        });
    }
    Ok((a.window(lo, hi)?, b.window(lo, hi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::Lcg;
    use proptest::prelude::*;

    fn m(y: i32, mo: u32) -> MonthStamp {
        MonthStamp::new(y, mo).unwrap()
    }

    fn series(start: MonthStamp, values: &[f64]) -> MonthlySeries {
        MonthlySeries::new(start, values.to_vec()).unwrap()
    }

    #[test]
    fn month_stamp_arithmetic() {
        assert_eq!(m(1999, 12).add_months(1), m(2000, 1));
        assert_eq!(m(2000, 1).add_months(-1), m(1999, 12));
        assert_eq!(m(1990, 1).months_until(m(1991, 3)), 14);
        assert_eq!("1995-06".parse::<MonthStamp>().unwrap(), m(1995, 6));
        assert_eq!(m(7, 3).to_string(), "0007-03");
        assert!("1995-13".parse::<MonthStamp>().is_err());
        assert!("1995-6".parse::<MonthStamp>().is_err());
        assert!(MonthStamp::new(2000, 0).is_err());
        assert!(m(1999, 12) < m(2000, 1));
    }

    #[test]
    fn centered_requires_odd_window() {
        assert!(SmoothSpec::new(4, Alignment::Centered).is_err());
        assert!(SmoothSpec::new(5, Alignment::Centered).is_ok());
        assert!(SmoothSpec::new(0, Alignment::Trailing).is_err());
    }

    #[test]
    fn ma_of_constant_is_constant() {
        let s = series(m(2000, 1), &[3.5; 20]);
        for spec in [
            SmoothSpec::trailing(4).unwrap(),
            SmoothSpec::new(5, Alignment::Centered).unwrap(),
        ] {
            let out = ma(&s, spec).unwrap();
            assert!(out.values().iter().all(|&v| (v - 3.5).abs() < 1e-15));
        }
    }

    #[test]
    fn ma_trailing_window_two() {
        let s = series(m(2000, 1), &[1.0, 2.0, 3.0, 4.0]);
        let out = ma(&s, SmoothSpec::trailing(2).unwrap()).unwrap();
        assert_eq!(out.values(), &[1.5, 2.5, 3.5]);
        assert_eq!(out.start(), m(2000, 2));
    }

    #[test]
    fn ma_centered_stamps_middle_month() {
        let s = series(m(2000, 1), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let out = ma(&s, SmoothSpec::new(3, Alignment::Centered).unwrap()).unwrap();
        assert_eq!(out.values(), &[2.0, 3.0, 4.0]);
        assert_eq!(out.start(), m(2000, 2));
    }

    #[test]
    fn ma_rejects_short_series() {
        let s = series(m(2000, 1), &[1.0, 2.0]);
        assert!(matches!(
            ma(&s, SmoothSpec::trailing(3).unwrap()),
            Err(Error::Length { len: 2, required: 3 })
        ));
    }

    #[test]
    fn ma_matches_loop_oracle() {
        let mut rng = Lcg::new(11);
        let values: Vec<f64> = (0..200).map(|_| rng.uniform() * 10.0 - 5.0).collect();
        let s = series(m(1980, 1), &values);
        let out = ma(&s, SmoothSpec::trailing(12).unwrap()).unwrap();
        assert_eq!(out.len(), 189);
        for (i, &v) in out.values().iter().enumerate() {
            let t = i + 11;
            let mut acc = 0.0;
            for j in (t + 1 - 12)..=t {
                acc += values[j];
            }
            assert!((v - acc / 12.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn dln_examples() {
        let flat = series(m(2000, 1), &[5.0; 6]);
        assert!(dln(&flat).unwrap().values().iter().all(|&v| v == 0.0));

        let e = series(m(2000, 1), &[1.0, std::f64::consts::E]);
        assert!((dln(&e).unwrap().values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dln_names_offending_month() {
        let s = series(m(2000, 1), &[1.0, 2.0, 0.0, 3.0]);
        match dln(&s) {
            Err(Error::NonPositive { month, value }) => {
                assert_eq!(month, m(2000, 3));
                assert_eq!(value, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dln_matches_loop_oracle() {
        let mut rng = Lcg::new(3);
        let values: Vec<f64> = (0..120).map(|_| 0.1 + rng.uniform() * 100.0).collect();
        let out = dln(&series(m(1990, 1), &values)).unwrap();
        for i in 1..values.len() {
            assert!((out.values()[i - 1] - (values[i] / values[i - 1]).ln()).abs() <= 1e-14);
        }
    }

    #[test]
    fn running_sum_examples() {
        let zeros = series(m(2000, 1), &[0.0; 30]);
        assert!(running_sum(&zeros, 12).unwrap().values().iter().all(|&v| v == 0.0));
        let ones = series(m(2000, 1), &[1.0; 30]);
        let out = running_sum(&ones, 12).unwrap();
        assert_eq!(out.len(), 19);
        assert!(out.values().iter().all(|&v| v == 12.0));
        assert_eq!(out.start(), m(2000, 12));
        assert!(running_sum(&ones, 31).is_err());
    }

    #[test]
    fn running_sum_matches_loop_oracle() {
        let mut rng = Lcg::new(99);
        let values: Vec<f64> = (0..150).map(|_| rng.uniform() - 0.5).collect();
        let out = running_sum(&series(m(1985, 1), &values), 12).unwrap();
        for (i, &v) in out.values().iter().enumerate() {
            let mut acc = 0.0;
            for x in &values[i..i + 12] {
                acc += x;
            }
            assert!((v - acc).abs() <= 1e-12);
        }
    }

    #[test]
    fn align_examples() {
        let a = series(m(1990, 1), &vec![1.0; 72]);
        let b = series(m(1993, 1), &vec![2.0; 84]);
        let (x, y) = align(&a, &b).unwrap();
        assert_eq!((x.start(), x.end()), (m(1993, 1), m(1995, 12)));
        assert_eq!((y.start(), y.end()), (m(1993, 1), m(1995, 12)));

        let (x, y) = align(&a, &a).unwrap();
        assert_eq!(x, a);
        assert_eq!(y, a);

        let c = series(m(2001, 1), &[1.0; 3]);
        assert!(matches!(align(&a, &c), Err(Error::Alignment { .. })));
    }

    #[test]
    fn series_json_rejects_empty() {
        assert!(serde_json::from_str::<MonthlySeries>(r#"{"start":"2000-01","values":[]}"#).is_err());
        let s: MonthlySeries =
            serde_json::from_str(r#"{"start":"2000-01","values":[1.0]}"#).unwrap();
        assert_eq!(s.start(), m(2000, 1));
    }

    fn arb_series(min_len: usize) -> impl Strategy<Value = MonthlySeries> {
        (1950i32..2030, 1u32..=12, prop::collection::vec(0.01f64..1000.0, min_len..80))
            .prop_map(|(y, mo, v)| MonthlySeries::new(MonthStamp::new(y, mo).unwrap(), v).unwrap())
    }

    proptest! {
        #[test]
        fn ma_window_one_is_identity(s in arb_series(1)) {
            prop_assert_eq!(ma(&s, SmoothSpec::trailing(1).unwrap()).unwrap(), s);
        }

        #[test]
        fn ma12_is_scaled_running_sum(s in arb_series(12)) {
            let a = ma(&s, SmoothSpec::trailing(12).unwrap()).unwrap();
            let b = running_sum(&s, 12).unwrap();
            prop_assert_eq!(a.start(), b.start());
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y / 12.0).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }

        #[test]
        fn dln_telescopes(s in arb_series(2), w in 1usize..12) {
            let d = dln(&s).unwrap();
            prop_assume!(d.len() >= w);
            let sums = running_sum(&d, w).unwrap();
            for (month, v) in sums.iter() {
                let t = s.get(month).unwrap();
                let t0 = s.get(month.add_months(-(w as i64))).unwrap();
                prop_assert!((v - (t / t0).ln()).abs() <= 1e-12);
            }
        }

        #[test]
        fn align_shares_coverage(a in arb_series(1), b in arb_series(1)) {
            if let Ok((x, y)) = align(&a, &b) {
                prop_assert_eq!(x.start(), y.start());
                prop_assert_eq!(x.len(), y.len());
            }
        }
    }
}
