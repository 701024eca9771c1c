//! A self-consistent set of the three input files, generated from a seed.
//!
//! Births follow two slow cycles with a little noise; the single-year-of-age
//! counts are twelve-month birth cohorts. Monthly index returns are one
//! twelfth of `170 dlnN9 - 0.04` (five-age average around age 9) plus AR(0.3)
//! noise, so the observed twelve-month running sum tracks the cohort model
//! with a residual standard deviation near 0.08. Daily closes bridge the
//! month-end levels over weekdays. Real GDP per capita grows about 2% a year
//! with a business cycle.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::csv_io::{write_gdp_table, write_population, write_sp500, GdpRow, GdpTable};
use crate::demography::{cohort_proxy, predictor_dln, AgePyramid, ProxyPreset};
use crate::error::Result;
use crate::linkage::QuarterStamp;
use crate::market::DailySeries;
use crate::series::MonthStamp;

pub const DEMO_V1: f64 = 170.0;
pub const DEMO_V2: f64 = -0.04;
const DEMO_MAX_AGE: usize = 20;
const MONTHLY_NOISE: f64 = 0.023;

pub struct DemoDatasets {
    pub daily: DailySeries,
    pub population: AgePyramid,
    pub gdp: GdpTable,
}

impl DemoDatasets {
    /// Population 1960-01..2010-12, closes 1970..2010, GDP 1960Q1..2010Q4.
    pub fn generate(seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = move || -> f64 { rng.sample(StandardNormal) };

        let pop_start = MonthStamp::new(1960, 1)?;
        let pop_months = 51 * 12;
        // births needed back to the oldest cohort's first birth month
        let lookback = 12 * DEMO_MAX_AGE + 11;
        let births: Vec<f64> = (0..lookback + pop_months)
            .map(|i| {
                let years = (i as f64 - lookback as f64) / 12.0;
                let cycle = 1.0 + 0.06 * (2.0 * PI * years / 28.0).sin() + 0.03 * (2.0 * PI * years / 11.5).cos();
                3.5e5 * cycle * (1.0 + 0.002 * z())
            })
            .collect();
        let counts: Vec<Vec<f64>> = (0..pop_months)
            .map(|t| {
                (0..=DEMO_MAX_AGE)
                    .map(|a| (0..12).map(|j| births[lookback + t - 12 * a - j]).sum())
                    .collect()
            })
            .collect();
        let population = AgePyramid::new(pop_start, counts)?;

        let x = predictor_dln(&cohort_proxy(&population, &ProxyPreset::PostcensalN9.spec())?)?;
        let idx_start = MonthStamp::new(1970, 1)?;
        let idx_end = MonthStamp::new(2010, 12)?;
        let mut level = 100.0;
        let mut noise = 0.0;
        let mut month_end = Vec::new();
        let mut m = idx_start;
        while m <= idx_end {
            noise = 0.3 * noise + MONTHLY_NOISE * z();
            let model = DEMO_V1 * x.get(m).expect("predictor covers the index span") + DEMO_V2;
            level *= 1.0 + model / 12.0 + noise;
            month_end.push((m, level));
            m = m.add_months(1);
        }

        let mut days = Vec::new();
        let mut prev = 100.0;
        for (m, close) in month_end {
            let weekdays = weekdays_of(m);
            let d = weekdays.len() as f64;
            for (i, date) in weekdays.iter().enumerate() {
                let w = (i + 1) as f64 / d;
                let v = if i + 1 == weekdays.len() {
                    close
                } else {
                    prev * (close / prev).powf(w) * (1.0 + 0.012 * z())
                };
                days.push((*date, v));
            }
            prev = close;
        }
        let daily = DailySeries::new(days)?;

        let q0 = QuarterStamp::new(1960, 1)?;
        let mut gdp_pc = 18_000.0;
        let mut persons = 1.8e8;
        let rows = (0..51 * 4)
            .map(|i| {
                let years = i as f64 / 4.0;
                let growth = 0.02 + 0.025 * (2.0 * PI * years / 7.0).sin() + 0.01 * z();
                gdp_pc *= (growth / 4.0).exp();
                persons *= 1.0025;
                GdpRow {
                    quarter: q0.add_quarters(i),
                    real_gdp: gdp_pc * persons,
                    population: persons,
                }
            })
            .collect();
        Ok(Self {
            daily,
            population,
            gdp: GdpTable { rows },
        })
    }

    /// Writes `sp500.csv`, `population.csv` and `gdp.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<[PathBuf; 3]> {
        let paths = [dir.join("sp500.csv"), dir.join("population.csv"), dir.join("gdp.csv")];
        write_sp500(&self.daily, BufWriter::new(File::create(&paths[0])?))?;
        write_population(&self.population, BufWriter::new(File::create(&paths[1])?))?;
        write_gdp_table(&self.gdp, BufWriter::new(File::create(&paths[2])?))?;
        Ok(paths)
    }
}

fn weekdays_of(m: MonthStamp) -> Vec<NaiveDate> {
    let first = NaiveDate::from_ymd_opt(m.year(), m.month(), 1).expect("valid month");
    first
        .iter_days()
        .take_while(|d| d.month() == m.month())
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::{fit_linear, FitMethod};
    use crate::market::{monthly_levels, rolling_annual_return, LevelKind, ReturnMode};

    #[test]
    fn demo_recovers_its_coefficients() {
        let demo = DemoDatasets::generate(1).unwrap();
        let levels = monthly_levels(&demo.daily, LevelKind::Close).unwrap();
        let observed = rolling_annual_return(&levels, ReturnMode::Simple).unwrap();
        let x = predictor_dln(&cohort_proxy(&demo.population, &ProxyPreset::PostcensalN9.spec()).unwrap()).unwrap();
        let fit = fit_linear(&observed, &x, FitMethod::Ols).unwrap();
        assert!((fit.v1 - DEMO_V1).abs() < 40.0, "{fit:?}");
        assert!((fit.v2 - DEMO_V2).abs() < 0.03, "{fit:?}");
        assert!(fit.residual_std > 0.04 && fit.residual_std < 0.15, "{fit:?}");
    }

    #[test]
    fn demo_is_seed_deterministic() {
        let a = DemoDatasets::generate(3).unwrap();
        let b = DemoDatasets::generate(3).unwrap();
        assert_eq!(a.daily, b.daily);
        assert_eq!(a.population, b.population);
        assert_eq!(a.gdp, b.gdp);
    }
}
