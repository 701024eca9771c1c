//! Dataset loading and synthetic data generation.
//!
//! Three CSV schemas are understood (comma separated, UTF-8, header row
//! required, `.` as the decimal separator):
//!
//! | kind             | header                          | key format   |
//! |------------------|---------------------------------|--------------|
//! | `sp500_daily`    | `date,close`                    | `YYYY-MM-DD` |
//! | `population_sya` | `month,age,population`          | `YYYY-MM`    |
//! | `gdp_quarterly`  | `quarter,real_gdp,population`   | `YYYY-Qn`    |

use std::fmt;
use std::fs::File;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::demography::AgePyramid;
use crate::error::Result;
use crate::linkage::GdpSeries;
use crate::market::DailySeries;

mod csv_io;
mod demo;
mod synthetic;

pub use csv_io::{
    read_gdp_table, read_population, read_sp500, write_gdp_table, write_population, write_sp500,
    GdpRow, GdpTable,
};
pub use demo::{DemoDatasets, DEMO_V1, DEMO_V2};
pub use synthetic::{generate, SyntheticKind, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Sp500Daily,
    PopulationSya,
    GdpQuarterly,
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetKind::Sp500Daily => f.pad("sp500_daily"),
            DatasetKind::PopulationSya => f.pad("population_sya"),
            DatasetKind::GdpQuarterly => f.pad("gdp_quarterly"),
        }
    }
}

/// A data file together with its schema and vintage label. The label is
/// carried into every report built from the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub path: PathBuf,
    pub kind: DatasetKind,
    #[serde(default)]
    pub vintage_label: String,
}

impl DatasetManifest {
    pub fn new(path: impl Into<PathBuf>, kind: DatasetKind, vintage_label: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            kind,
            vintage_label: vintage_label.into(),
        }
    }

    fn expect_kind(&self, kind: DatasetKind) -> Result<()> {
        if self.kind != kind {
            return Err(crate::Error::Config(format!(
                "{} is declared as {}, expected {kind}",
                self.path.display(),
                self.kind
            )));
        }
        Ok(())
    }
}

pub fn load_sp500(manifest: &DatasetManifest) -> Result<DailySeries> {
    manifest.expect_kind(DatasetKind::Sp500Daily)?;
    read_sp500(File::open(&manifest.path)?)
}

pub fn load_population(manifest: &DatasetManifest) -> Result<AgePyramid> {
    manifest.expect_kind(DatasetKind::PopulationSya)?;
    read_population(File::open(&manifest.path)?)
}

pub fn load_gdp(manifest: &DatasetManifest) -> Result<GdpSeries> {
    manifest.expect_kind(DatasetKind::GdpQuarterly)?;
    read_gdp_table(File::open(&manifest.path)?)?.per_capita()
}
