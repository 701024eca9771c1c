//! Demographic model of stock-index returns.
//!
//! The observed twelve-month return of an index is linked to the monthly log
//! change of a single-year-of-age population through `R_p = v1 * dlnN + v2`.
//! The crate builds both sides of that link from raw data files, fits the
//! coefficients, offers a GDP-per-capita substitute predictor, and ships the
//! unit-root, cointegration and VAR tests used to validate the relation.
//!
//! Modules, bottom-up:
//!
//! - [`series`]: monthly series, moving averages, log differences, alignment
//! - [`market`]: daily closes to monthly returns and volatility
//! - [`demography`]: age pyramids and cohort proxy predictors
//! - [`linkage`]: coefficient fitting, prediction, GDP variant, trend
//! - [`econometrics`]: OLS, ADF, DF-GLS, Engle-Granger, VAR, Johansen
//! - [`ingest`]: CSV loaders and the seeded synthetic-data generator
//! - [`cli`]: the pipeline behind the `demolink` binary

// `!(x > 0.0)` is used on purpose so NaN fails validation; index loops
// mirror the matrix algebra they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod demography;
pub mod econometrics;
pub mod error;
pub mod ingest;
pub mod linkage;
pub mod market;
pub mod series;

#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
pub use series::{MonthStamp, MonthlySeries, SmoothSpec};
