//! Embedded critical-value tables.
//!
//! Dickey-Fuller tables are the finite-sample values of Fuller (1976) as
//! reprinted in Hamilton (1994), Table B.6. DF-GLS with a linear trend uses
//! Elliott, Rothenberg and Stock (1996), Table 1; with a constant only the
//! statistic has the no-constant Dickey-Fuller distribution. The two-step
//! Engle-Granger test uses the MacKinnon (1991) response surface for two
//! variables with a constant. Johansen trace values are the 5% points of
//! Osterwald-Lenum (1992).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TrendSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "1%")]
    One,
    #[serde(rename = "5%")]
    Five,
    #[serde(rename = "10%")]
    Ten,
}

impl Significance {
    pub const ALL: [Significance; 3] = [Significance::One, Significance::Five, Significance::Ten];

    fn index(self) -> usize {
        match self {
            Significance::One => 0,
            Significance::Five => 1,
            Significance::Ten => 2,
        }
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Significance::One => f.pad("1%"),
            Significance::Five => f.pad("5%"),
            Significance::Ten => f.pad("10%"),
        }
    }
}

pub type CriticalValues = BTreeMap<Significance, f64>;

/// Sample sizes of the Fuller table; the last column is the asymptotic value.
const FULLER_N: [f64; 5] = [25.0, 50.0, 100.0, 250.0, 500.0];

/// Rows: 1%, 5%, 10%. Columns: `FULLER_N` then infinity.
const FULLER_NONE: [[f64; 6]; 3] = [
    [-2.66, -2.62, -2.60, -2.58, -2.58, -2.58],
    [-1.95, -1.95, -1.95, -1.95, -1.95, -1.95],
    [-1.60, -1.61, -1.61, -1.62, -1.62, -1.62],
];
const FULLER_CONSTANT: [[f64; 6]; 3] = [
    [-3.75, -3.58, -3.51, -3.46, -3.44, -3.43],
    [-3.00, -2.93, -2.89, -2.88, -2.87, -2.86],
    [-2.63, -2.60, -2.58, -2.57, -2.57, -2.57],
];
const FULLER_TREND: [[f64; 6]; 3] = [
    [-4.38, -4.15, -4.04, -3.99, -3.98, -3.96],
    [-3.60, -3.50, -3.45, -3.43, -3.42, -3.41],
    [-3.24, -3.18, -3.15, -3.13, -3.13, -3.12],
];

const ERS_N: [f64; 3] = [50.0, 100.0, 200.0];
const ERS_TREND: [[f64; 4]; 3] = [
    [-3.77, -3.58, -3.46, -3.48],
    [-3.19, -3.03, -2.93, -2.89],
    [-2.89, -2.74, -2.64, -2.57],
];

/// MacKinnon (1991), two variables, constant: `b_inf + b1 / n + b2 / n^2`.
const MACKINNON_EG2: [[f64; 3]; 3] = [
    [-3.9001, -10.534, -30.03],
    [-3.3377, -5.967, -8.98],
    [-3.0462, -4.069, -5.73],
];

/// Linear interpolation in `n` between tabulated sizes and in `1/n` beyond
/// the largest finite size; clamped below the smallest.
fn interpolate(sizes: &[f64], values: &[f64], n: f64) -> f64 {
    debug_assert_eq!(values.len(), sizes.len() + 1);
    if n <= sizes[0] {
        return values[0];
    }
    for i in 1..sizes.len() {
        if n <= sizes[i] {
            let w = (n - sizes[i - 1]) / (sizes[i] - sizes[i - 1]);
            return values[i - 1] + w * (values[i] - values[i - 1]);
        }
    }
    let last = sizes[sizes.len() - 1];
    let w = 1.0 - last / n;
    values[sizes.len() - 1] + w * (values[sizes.len()] - values[sizes.len() - 1])
}

fn table(sizes: &[f64], rows: &[&[f64]; 3], n: usize) -> CriticalValues {
    Significance::ALL
        .iter()
        .map(|&s| (s, interpolate(sizes, rows[s.index()], n as f64)))
        .collect()
}

/// Dickey-Fuller critical values for `n` regression observations.
pub fn adf_critical_values(trend: TrendSpec, n: usize) -> CriticalValues {
    let rows = match trend {
        TrendSpec::None => &FULLER_NONE,
        TrendSpec::Constant => &FULLER_CONSTANT,
        TrendSpec::ConstantTrend => &FULLER_TREND,
    };
    table(&FULLER_N, &[&rows[0], &rows[1], &rows[2]], n)
}

/// DF-GLS critical values for `n` regression observations.
pub fn dfgls_critical_values(trend: TrendSpec, n: usize) -> CriticalValues {
    match trend {
        TrendSpec::ConstantTrend => {
            table(&ERS_N, &[&ERS_TREND[0], &ERS_TREND[1], &ERS_TREND[2]], n)
        }
        _ => adf_critical_values(TrendSpec::None, n),
    }
}

/// Critical values for the ADF test on residuals of an estimated
/// two-variable cointegrating regression with a constant.
pub fn engle_granger_critical_values(n: usize) -> CriticalValues {
    let n = n as f64;
    Significance::ALL
        .iter()
        .map(|&s| {
            let b = MACKINNON_EG2[s.index()];
            (s, b[0] + b[1] / n + b[2] / (n * n))
        })
        .collect()
}

/// Johansen trend treatments, matching the three deterministic cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JohansenTrend {
    /// No deterministic terms.
    None,
    /// Constant restricted to the cointegration space.
    Rconstant,
    /// Unrestricted constant.
    Constant,
}

impl fmt::Display for JohansenTrend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JohansenTrend::None => f.pad("none"),
            JohansenTrend::Rconstant => f.pad("rconstant"),
            JohansenTrend::Constant => f.pad("constant"),
        }
    }
}

/// 5% trace critical values indexed by `k - r - 1` for `k - r` = 1..=5.
const TRACE_5PCT_NONE: [f64; 5] = [3.84, 12.53, 24.31, 39.89, 59.46];
const TRACE_5PCT_RCONSTANT: [f64; 5] = [9.24, 19.96, 34.91, 53.12, 76.07];
const TRACE_5PCT_CONSTANT: [f64; 5] = [3.76, 15.41, 29.68, 47.21, 68.52];

/// Largest system dimension with tabulated trace critical values.
pub const MAX_JOHANSEN_DIM: usize = 5;

/// 5% trace critical value for the hypothesis of at most `rank` relations
/// among `k` variables.
pub fn trace_critical_5pct(trend: JohansenTrend, k: usize, rank: usize) -> f64 {
    assert!(rank < k && k <= MAX_JOHANSEN_DIM, "no tabulated value for k={k}, r={rank}");
    let row = match trend {
        JohansenTrend::None => &TRACE_5PCT_NONE,
        JohansenTrend::Rconstant => &TRACE_5PCT_RCONSTANT,
        JohansenTrend::Constant => &TRACE_5PCT_CONSTANT,
    };
    row[k - rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_one_percent_at_207_observations() {
        // Lag 0 on 207 monthly readings leaves 206 regression rows.
        let cv = adf_critical_values(TrendSpec::Constant, 206);
        assert!((cv[&Significance::One] - (-3.47)).abs() < 0.005);
        // three augmentation lags; still rounds to the same two decimals
        let cv = adf_critical_values(TrendSpec::Constant, 203);
        assert!((cv[&Significance::One] - (-3.47)).abs() < 0.01);
    }

    #[test]
    fn interpolation_hits_table_nodes() {
        let cv = adf_critical_values(TrendSpec::Constant, 100);
        assert_eq!(cv[&Significance::Five], -2.89);
        let cv = adf_critical_values(TrendSpec::ConstantTrend, 10);
        assert_eq!(cv[&Significance::One], -4.38);
        let far = adf_critical_values(TrendSpec::Constant, 1_000_000);
        assert!((far[&Significance::One] + 3.43).abs() < 1e-4);
    }

    #[test]
    fn dfgls_trend_values() {
        let cv = dfgls_critical_values(TrendSpec::ConstantTrend, 200);
        assert_eq!(cv[&Significance::One], -3.46);
        let asymptotic = dfgls_critical_values(TrendSpec::ConstantTrend, 10_000_000);
        assert!((asymptotic[&Significance::One] + 3.48).abs() < 1e-4);
        let cv = dfgls_critical_values(TrendSpec::Constant, 206);
        assert!((cv[&Significance::Five] + 1.95).abs() < 1e-12);
    }

    #[test]
    fn ordering_of_levels() {
        for trend in [TrendSpec::None, TrendSpec::Constant, TrendSpec::ConstantTrend] {
            for n in [20, 60, 206, 800] {
                let cv = adf_critical_values(trend, n);
                assert!(cv[&Significance::One] < cv[&Significance::Five]);
                assert!(cv[&Significance::Five] < cv[&Significance::Ten]);
            }
        }
        let eg = engle_granger_critical_values(200);
        assert!(eg[&Significance::One] < eg[&Significance::Five]);
    }

    #[test]
    fn trace_table_lookup() {
        assert_eq!(trace_critical_5pct(JohansenTrend::None, 2, 1), 3.84);
        assert_eq!(trace_critical_5pct(JohansenTrend::Constant, 2, 1), 3.76);
        assert_eq!(trace_critical_5pct(JohansenTrend::Rconstant, 2, 0), 19.96);
    }

    #[test]
    fn significance_serializes_as_percent() {
        let cv = adf_critical_values(TrendSpec::Constant, 100);
        let s = serde_json::to_string(&cv).unwrap();
        assert!(s.starts_with("{\"1%\":"));
    }
}
