//! Predictor construction from single-year-of-age population estimates.
//!
//! A cohort proxy takes the series for some anchor age, optionally averages
//! it with its four neighbouring ages, optionally smooths it over months, and
//! then re-stamps it by the age gap to nine years so that it lines up with
//! the months whose nine-year-old population it stands in for.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{dln, ma, MonthStamp, MonthlySeries, SmoothSpec};

/// The age whose population drives the model.
pub const TARGET_AGE: usize = 9;

/// Monthly counts by single year of age.
#[derive(Debug, Clone, PartialEq)]
pub struct AgePyramid {
    start: MonthStamp,
    max_age: usize,
    counts: Vec<Vec<f64>>,
    interpolated: Vec<bool>,
}

impl AgePyramid {
    pub fn new(start: MonthStamp, counts: Vec<Vec<f64>>) -> Result<Self> {
        let interpolated = vec![false; counts.len()];
        Self::with_interpolation(start, counts, interpolated)
    }

    /// Like [`AgePyramid::new`], recording which months were filled in by
    /// interpolation rather than read from the source.
    pub fn with_interpolation(
        start: MonthStamp,
        counts: Vec<Vec<f64>>,
        interpolated: Vec<bool>,
    ) -> Result<Self> {
        let first = counts
            .first()
            .ok_or(Error::Length { len: 0, required: 1 })?;
        if first.is_empty() {
            return Err(Error::Validation("pyramid has no ages".into()));
        }
        let width = first.len();
        if interpolated.len() != counts.len() {
            return Err(Error::Validation("interpolation flags do not match months".into()));
        }
        for (k, row) in counts.iter().enumerate() {
            let month = start.add_months(k as i64);
            if row.len() != width {
                return Err(Error::Validation(format!(
                    "{month} has {} ages, expected {width}",
                    row.len()
                )));
            }
            if let Some(age) = row.iter().position(|&c| !(c >= 0.0) || !c.is_finite()) {
                return Err(Error::Validation(format!(
                    "{month} age {age}: count {} is negative or not finite",
                    row[age]
                )));
            }
        }
        Ok(Self {
            start,
            max_age: width - 1,
            counts,
            interpolated,
        })
    }

    pub fn start(&self) -> MonthStamp {
        self.start
    }

    pub fn end(&self) -> MonthStamp {
        self.start.add_months(self.counts.len() as i64 - 1)
    }

    pub fn max_age(&self) -> usize {
        self.max_age
    }

    pub fn n_months(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<f64>] {
        &self.counts
    }

    pub fn interpolated(&self) -> &[bool] {
        &self.interpolated
    }

    /// Copy with every count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let counts = self
            .counts
            .iter()
            .map(|row| row.iter().map(|c| c * factor).collect())
            .collect();
        Self::with_interpolation(self.start, counts, self.interpolated.clone())
    }

    /// Raw series for a single age.
    pub fn age_series(&self, age: usize) -> Result<MonthlySeries> {
        if age > self.max_age {
            return Err(Error::AgeRange {
                age,
                min: 0,
                max: self.max_age,
            });
        }
        MonthlySeries::new(self.start, self.counts.iter().map(|row| row[age]).collect())
    }
}

/// Mean of the counts at ages `center-2..=center+2`, per month.
pub fn five_age_average(p: &AgePyramid, center: usize) -> Result<MonthlySeries> {
    if center < 2 || center + 2 > p.max_age {
        return Err(Error::AgeRange {
            age: center,
            min: 2,
            max: p.max_age.saturating_sub(2),
        });
    }
    let values = p
        .counts
        .iter()
        .map(|row| row[center - 2..=center + 2].iter().sum::<f64>() / 5.0)
        .collect();
    MonthlySeries::new(p.start, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeAveraging {
    FiveAge,
    None,
}

/// How a predictor series is built from a pyramid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProxySpec {
    pub anchor_age: usize,
    pub age_averaging: AgeAveraging,
    pub month_smoothing: Option<SmoothSpec>,
}

impl ProxySpec {
    /// Months by which the anchor-age series is re-stamped.
    pub fn shift_months(&self) -> i64 {
        (TARGET_AGE as i64 - self.anchor_age as i64) * 12
    }

    pub fn validate(&self, max_age: usize) -> Result<()> {
        match self.age_averaging {
            AgeAveraging::FiveAge if self.anchor_age < 2 || self.anchor_age + 2 > max_age => {
                Err(Error::AgeRange {
                    age: self.anchor_age,
                    min: 2,
                    max: max_age.saturating_sub(2),
                })
            }
            AgeAveraging::None if self.anchor_age > max_age => Err(Error::AgeRange {
                age: self.anchor_age,
                min: 0,
                max: max_age,
            }),
            _ => Ok(()),
        }
    }
}

/// Builds the anchor-age series and aligns it with the months it proxies.
pub fn cohort_proxy(p: &AgePyramid, spec: &ProxySpec) -> Result<MonthlySeries> {
    spec.validate(p.max_age)?;
    let base = match spec.age_averaging {
        AgeAveraging::FiveAge => five_age_average(p, spec.anchor_age)?,
        AgeAveraging::None => p.age_series(spec.anchor_age)?,
    };
    let smoothed = match spec.month_smoothing {
        Some(smooth) => ma(&base, smooth)?,
        None => base,
    };
    Ok(smoothed.shifted(spec.shift_months()))
}

/// `d ln N(t)` of a proxy series. The fitted slope absorbs any scale, so no
/// annualisation is applied.
pub fn predictor_dln(proxy: &MonthlySeries) -> Result<MonthlySeries> {
    dln(proxy)
}

/// Named predictor constructions with their reference coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProxyPreset {
    PostcensalN9,
    IntercensalN9,
    N7Forecast,
    N17Backcast,
    N3Forecast,
}

impl ProxyPreset {
    pub const ALL: [ProxyPreset; 5] = [
        ProxyPreset::PostcensalN9,
        ProxyPreset::IntercensalN9,
        ProxyPreset::N7Forecast,
        ProxyPreset::N17Backcast,
        ProxyPreset::N3Forecast,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProxyPreset::PostcensalN9 => "postcensal-n9",
            ProxyPreset::IntercensalN9 => "intercensal-n9",
            ProxyPreset::N7Forecast => "n7-forecast",
            ProxyPreset::N17Backcast => "n17-backcast",
            ProxyPreset::N3Forecast => "n3-forecast",
        }
    }

    pub fn spec(&self) -> ProxySpec {
        match self {
            ProxyPreset::PostcensalN9 | ProxyPreset::IntercensalN9 => ProxySpec {
                anchor_age: 9,
                age_averaging: AgeAveraging::FiveAge,
                month_smoothing: None,
            },
            ProxyPreset::N7Forecast => ProxySpec {
                anchor_age: 7,
                age_averaging: AgeAveraging::FiveAge,
                month_smoothing: None,
            },
            // Averaging across the 14-17 / 18-24 census group boundary
            // degrades the fit, so the raw age is smoothed over months instead.
            ProxyPreset::N17Backcast => ProxySpec {
                anchor_age: 17,
                age_averaging: AgeAveraging::None,
                month_smoothing: Some(SmoothSpec::trailing(4).expect("valid window")),
            },
            ProxyPreset::N3Forecast => ProxySpec {
                anchor_age: 3,
                age_averaging: AgeAveraging::None,
                month_smoothing: None,
            },
        }
    }

    /// Smoothing applied to the predicted return series rather than to the
    /// population input.
    pub fn prediction_smoothing(&self) -> Option<SmoothSpec> {
        match self {
            ProxyPreset::N3Forecast => Some(SmoothSpec::trailing(6).expect("valid window")),
            _ => None,
        }
    }

    /// Published `(v1, v2)` for this construction.
    pub fn reference_coefficients(&self) -> (f64, f64) {
        match self {
            ProxyPreset::PostcensalN9 => (170.0, -0.04),
            ProxyPreset::IntercensalN9 => (165.0, -0.055),
            ProxyPreset::N7Forecast => (165.0, -0.06),
            ProxyPreset::N17Backcast => (35.0, 0.089),
            ProxyPreset::N3Forecast => (160.0, -0.23),
        }
    }
}

impl fmt::Display for ProxyPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ProxyPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProxyPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown proxy preset '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::Lcg;
    use proptest::prelude::*;

    fn start() -> MonthStamp {
        MonthStamp::new(1990, 4).unwrap()
    }

    fn random_pyramid(seed: u64, months: usize, max_age: usize) -> AgePyramid {
        let mut rng = Lcg::new(seed);
        let counts = (0..months)
            .map(|_| (0..=max_age).map(|_| 3.5e6 + 4e5 * rng.uniform()).collect())
            .collect();
        AgePyramid::new(start(), counts).unwrap()
    }

    #[test]
    fn pyramid_validation() {
        assert!(AgePyramid::new(start(), vec![]).is_err());
        assert!(AgePyramid::new(start(), vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(AgePyramid::new(start(), vec![vec![1.0, -2.0]]).is_err());
        let p = AgePyramid::new(start(), vec![vec![1.0, 2.0, 3.0]; 2]).unwrap();
        assert_eq!(p.max_age(), 2);
        assert_eq!(p.n_months(), 2);
    }

    #[test]
    fn five_age_examples() {
        let uniform = AgePyramid::new(start(), vec![vec![4.0; 20]; 6]).unwrap();
        let s = five_age_average(&uniform, 9).unwrap();
        assert!(s.values().iter().all(|&v| v == 4.0));

        let mut row = vec![0.0; 15];
        row[7..=11].copy_from_slice(&[5.0, 6.0, 7.0, 8.0, 9.0]);
        let p = AgePyramid::new(start(), vec![row]).unwrap();
        assert_eq!(five_age_average(&p, 9).unwrap().values(), &[7.0]);

        assert!(matches!(five_age_average(&p, 1), Err(Error::AgeRange { .. })));
        assert!(matches!(five_age_average(&p, 13), Err(Error::AgeRange { .. })));
        assert!(five_age_average(&p, 12).is_ok());
    }

    #[test]
    fn five_age_matches_oracle() {
        let p = random_pyramid(4, 30, 20);
        let s = five_age_average(&p, 9).unwrap();
        for (k, row) in p.counts().iter().enumerate() {
            let mut acc = 0.0;
            for age in 7..=11 {
                acc += row[age];
            }
            assert!((s.values()[k] - acc / 5.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn anchor_nine_is_five_age_average() {
        let p = random_pyramid(1, 24, 20);
        let proxy = cohort_proxy(&p, &ProxyPreset::PostcensalN9.spec()).unwrap();
        assert_eq!(proxy, five_age_average(&p, 9).unwrap());
    }

    #[test]
    fn anchor_seven_is_stamped_two_years_later() {
        let p = random_pyramid(2, 24, 20);
        let proxy = cohort_proxy(&p, &ProxyPreset::N7Forecast.spec()).unwrap();
        let base = five_age_average(&p, 7).unwrap();
        assert_eq!(proxy.values(), base.values());
        assert_eq!(proxy.start(), start().add_months(24));
    }

    #[test]
    fn seventeen_backcast_is_raw_ma4_moved_back_eight_years() {
        let p = random_pyramid(3, 40, 30);
        let proxy = cohort_proxy(&p, &ProxyPreset::N17Backcast.spec()).unwrap();
        let raw = p.age_series(17).unwrap();
        let smoothed = ma(&raw, SmoothSpec::trailing(4).unwrap()).unwrap();
        assert_eq!(proxy.values(), smoothed.values());
        assert_eq!(proxy.start(), smoothed.start().add_months(-96));
        assert_eq!(ProxyPreset::N3Forecast.spec().shift_months(), 72);
    }

    #[test]
    fn smoothing_longer_than_series_fails() {
        let p = random_pyramid(3, 3, 30);
        assert!(matches!(
            cohort_proxy(&p, &ProxyPreset::N17Backcast.spec()),
            Err(Error::Length { .. })
        ));
    }

    #[test]
    fn invalid_anchor_rejected() {
        let p = random_pyramid(3, 5, 10);
        let spec = ProxySpec {
            anchor_age: 9,
            age_averaging: AgeAveraging::FiveAge,
            month_smoothing: None,
        };
        assert!(cohort_proxy(&p, &spec).is_err());
    }

    #[test]
    fn predictor_examples() {
        let flat = MonthlySeries::new(start(), vec![2.0; 5]).unwrap();
        assert!(predictor_dln(&flat).unwrap().values().iter().all(|&v| v == 0.0));
        let doubling = MonthlySeries::new(start(), vec![1.0, 2.0]).unwrap();
        assert!((predictor_dln(&doubling).unwrap().values()[0] - std::f64::consts::LN_2).abs() < 1e-15);
        let zero = MonthlySeries::new(start(), vec![1.0, 0.0]).unwrap();
        assert!(predictor_dln(&zero).is_err());

        let mut rng = Lcg::new(12);
        let v: Vec<f64> = (0..30).map(|_| 1.0 + rng.uniform()).collect();
        let d = predictor_dln(&MonthlySeries::new(start(), v.clone()).unwrap()).unwrap();
        for t in 1..v.len() {
            assert!((d.values()[t - 1] - (v[t] / v[t - 1]).ln()).abs() <= 1e-14);
        }
    }

    #[test]
    fn presets_round_trip_names() {
        for p in ProxyPreset::ALL {
            assert_eq!(p.name().parse::<ProxyPreset>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.name()));
        }
        assert!("n9".parse::<ProxyPreset>().is_err());
    }

    proptest! {
        #[test]
        fn five_age_permutation_invariant(seed in 0u64..500, rot in 1usize..5) {
            let p = random_pyramid(seed, 4, 15);
            let permuted: Vec<Vec<f64>> = p.counts().iter().map(|row| {
                let mut r = row.clone();
                r[7..=11].rotate_left(rot);
                r
            }).collect();
            let q = AgePyramid::new(p.start(), permuted).unwrap();
            let (a, b) = (five_age_average(&p, 9).unwrap(), five_age_average(&q, 9).unwrap());
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs());
            }
        }

        #[test]
        fn shift_preserves_values(seed in 0u64..500, anchor in 2usize..=18) {
            let p = random_pyramid(seed, 12, 20);
            let spec = ProxySpec { anchor_age: anchor, age_averaging: AgeAveraging::FiveAge, month_smoothing: None };
            let proxy = cohort_proxy(&p, &spec).unwrap();
            let base = five_age_average(&p, anchor).unwrap();
            let shift = (9 - anchor as i64) * 12;
            for (month, v) in proxy.iter() {
                prop_assert_eq!(v, base.get(month.add_months(-shift)).unwrap());
            }
        }

        #[test]
        fn predictor_scale_invariant(seed in 0u64..500, k in 0.001f64..1000.0) {
            let p = random_pyramid(seed, 10, 20);
            let spec = ProxyPreset::PostcensalN9.spec();
            let a = predictor_dln(&cohort_proxy(&p, &spec).unwrap()).unwrap();
            let b = predictor_dln(&cohort_proxy(&p.scaled(k).unwrap(), &spec).unwrap()).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
