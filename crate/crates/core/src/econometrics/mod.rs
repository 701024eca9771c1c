//! Statistical tests for the return linkage: least squares, unit-root tests,
//! vector autoregressions and the Johansen rank test. Everything is computed
//! in-crate on top of dense linear algebra; critical values come from
//! embedded tables (see [`critical`]).

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod critical;
pub mod johansen;
mod linalg;
pub mod ols;
pub mod unit_root;
pub mod var;

pub use critical::{CriticalValues, JohansenTrend, Significance};
pub use johansen::{johansen, JohansenReport};
pub use ols::{ols, OlsResult};
pub use unit_root::{
    adf_test, dfgls_test, eg_residual_test, engle_granger, EngleGranger, UnitRootReport,
    UnitRootTest,
};
pub use var::{lag_select, var_fit, LagSelectionTable, VarModel};

/// Deterministic terms in a unit-root regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendSpec {
    None,
    #[default]
    Constant,
    ConstantTrend,
}

impl TrendSpec {
    pub fn has_constant(&self) -> bool {
        !matches!(self, TrendSpec::None)
    }

    /// Number of deterministic regressors.
    pub fn n_terms(&self) -> usize {
        match self {
            TrendSpec::None => 0,
            TrendSpec::Constant => 1,
            TrendSpec::ConstantTrend => 2,
        }
    }
}

impl fmt::Display for TrendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrendSpec::None => f.pad("none"),
            TrendSpec::Constant => f.pad("constant"),
            TrendSpec::ConstantTrend => f.pad("constant_trend"),
        }
    }
}
