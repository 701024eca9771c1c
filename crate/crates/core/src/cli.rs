//! The pipeline behind the `demolink` binary.
//!
//! A run is described by a [`RunConfig`], read from `--config` (JSON) and then
//! overridden by command-line flags. Relative dataset paths are resolved
//! against the directory holding the config file. Series are written as
//! `month,value` CSV; structured results as a JSON [`RunReport`] that embeds
//! the resolved config, so every report can be re-run from its own contents.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::demography::{cohort_proxy, predictor_dln, ProxyPreset, ProxySpec};
use crate::econometrics::{
    adf_test, dfgls_test, eg_residual_test, engle_granger, johansen, lag_select, var_fit,
    JohansenReport, JohansenTrend, LagSelectionTable, OlsResult, Significance, TrendSpec,
    UnitRootReport, UnitRootTest, VarModel,
};
use crate::error::{Error, Result};
use crate::ingest::{self, DatasetManifest, SyntheticKind, SyntheticSpec};
use crate::linkage::{
    fit_linear, monthly_gdp_growth, predict_returns, residual_series, FitMethod, ModelFit,
    GDP_ANNUALIZATION, GDP_SMOOTHING_MONTHS, GDP_V1, GDP_V2,
};
use crate::market::{
    cumulative_return, mean_close_divergence, monthly_levels, monthly_returns,
    monthly_volatility, rolling_annual_return, annual_return, DailySeries, LevelKind, ReturnMode,
};
use crate::series::{align, ma, MonthStamp, MonthlySeries, SmoothSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// How the observed twelve-month return is built from monthly returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ObservedConstruction {
    /// Sum of the last twelve monthly returns.
    #[default]
    RunningSum,
    /// Trailing mean of the last twelve monthly returns (the sum over 12).
    MovingAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PredictorSource {
    #[default]
    Population,
    Gdp,
}

/// Inclusive month range, written `YYYY-MM..YYYY-MM` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthRange {
    pub from: MonthStamp,
    pub to: MonthStamp,
}

impl FromStr for MonthRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| Error::Config(format!("month range '{s}' must look like 1991-01..2001-12")))?;
        let range = MonthRange {
            from: a.trim().parse()?,
            to: b.trim().parse()?,
        };
        if range.from > range.to {
            return Err(Error::Config(format!("month range '{s}' is empty")));
        }
        Ok(range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub v1: f64,
    pub v2: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Datasets {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sp500: Option<DatasetManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub population: Option<DatasetManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gdp: Option<DatasetManifest>,
}

/// Parameters of the econometric battery. Defaults follow the published
/// specification: ADF with a constant up to lag 3, DF-GLS up to lag 4,
/// residual test up to lag 3, lag selection up to 4, VAR(3), Johansen with
/// lag 3 and no deterministic terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestParams {
    pub adf_max_lag: usize,
    pub dfgls_max_lag: usize,
    pub unit_root_trend: TrendSpec,
    pub residual_max_lag: usize,
    pub lag_select_max: usize,
    pub var_lag: usize,
    pub johansen_lag: usize,
    pub johansen_trend: JohansenTrend,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            adf_max_lag: 3,
            dfgls_max_lag: 4,
            unit_root_trend: TrendSpec::Constant,
            residual_max_lag: 3,
            lag_select_max: 4,
            var_lag: 3,
            johansen_lag: 3,
            johansen_trend: JohansenTrend::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub datasets: Datasets,
    pub predictor_source: PredictorSource,
    pub preset: ProxyPreset,
    /// Explicit proxy construction; when absent the preset's is used.
    pub proxy: Option<ProxySpec>,
    /// Smoothing applied to the predicted series. When `proxy` is absent this
    /// is filled from the preset.
    pub prediction_smoothing: Option<SmoothSpec>,
    pub return_mode: ReturnMode,
    pub level_kind: LevelKind,
    pub observed: ObservedConstruction,
    pub fit_window: Option<MonthRange>,
    pub fit_method: FitMethod,
    /// Fixed coefficients for `predict`; fitted when absent.
    pub coefficients: Option<Coefficients>,
    pub tests: TestParams,
    pub synthetic: Option<SyntheticSpec>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            datasets: Datasets::default(),
            predictor_source: PredictorSource::Population,
            preset: ProxyPreset::PostcensalN9,
            proxy: None,
            prediction_smoothing: None,
            return_mode: ReturnMode::Simple,
            level_kind: LevelKind::Close,
            observed: ObservedConstruction::RunningSum,
            fit_window: None,
            fit_method: FitMethod::Ols,
            coefficients: None,
            tests: TestParams::default(),
            synthetic: None,
            format: None,
            seed: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fills the proxy construction from the preset when it is not explicit.
    fn resolve_proxy(&mut self) {
        if self.proxy.is_none() {
            self.proxy = Some(self.preset.spec());
            if self.prediction_smoothing.is_none() {
                self.prediction_smoothing = self.preset.prediction_smoothing();
            }
        }
    }

    fn proxy_spec(&self) -> ProxySpec {
        self.proxy.unwrap_or_else(|| self.preset.spec())
    }
}

/// Where each reported number came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// Dataset kind → vintage label, for every configured dataset.
    pub vintages: BTreeMap<String, String>,
    pub return_mode: ReturnMode,
    pub observed: String,
    pub predictor: String,
    pub smoothing: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gdp_annualization: Option<String>,
}

fn describe_smoothing(s: SmoothSpec) -> String {
    format!("MA({}) {}", s.window(), s.alignment())
}

impl Provenance {
    fn of(cfg: &RunConfig) -> Self {
        let mut vintages = BTreeMap::new();
        for m in [&cfg.datasets.sp500, &cfg.datasets.population, &cfg.datasets.gdp]
            .into_iter()
            .flatten()
        {
            vintages.insert(m.kind.to_string(), m.vintage_label.clone());
        }
        let observed = match cfg.observed {
            ObservedConstruction::RunningSum => "running sum of 12 monthly returns",
            ObservedConstruction::MovingAverage => "trailing MA(12) of monthly returns",
        };
        let mut smoothing = Vec::new();
        if cfg.observed == ObservedConstruction::MovingAverage {
            smoothing.push(format!("observed: {}", describe_smoothing(twelve_month())));
        }
        let (predictor, gdp_annualization) = match cfg.predictor_source {
            PredictorSource::Population => {
                let spec = cfg.proxy_spec();
                if let Some(s) = spec.month_smoothing {
                    smoothing.push(format!("proxy: {}", describe_smoothing(s)));
                }
                if let Some(s) = cfg.prediction_smoothing {
                    smoothing.push(format!("prediction: {}", describe_smoothing(s)));
                }
                let averaging = match spec.age_averaging {
                    crate::demography::AgeAveraging::FiveAge => "five-age average",
                    crate::demography::AgeAveraging::None => "single age",
                };
                (
                    format!(
                        "dln of age-{} population ({averaging}), shifted {} months",
                        spec.anchor_age,
                        spec.shift_months()
                    ),
                    None,
                )
            }
            PredictorSource::Gdp => {
                let s = SmoothSpec::trailing(GDP_SMOOTHING_MONTHS).expect("valid window");
                smoothing.push(format!("gdp growth: {}", describe_smoothing(s)));
                (
                    "annualised growth of real GDP per capita".to_string(),
                    Some(format!(
                        "{GDP_ANNUALIZATION} x quarterly log growth, constant within the quarter"
                    )),
                )
            }
        };
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            vintages,
            return_mode: cfg.return_mode,
            observed: observed.to_string(),
            predictor,
            smoothing,
            gdp_annualization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub mean: f64,
    pub std: f64,
    pub rms: f64,
    pub n_obs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedUnitRoot {
    pub series: String,
    pub report: UnitRootReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CointegrationMode {
    /// Regress observed on predicted, then test the regression residual.
    TwoStep,
    /// Test `observed - predicted` directly with Dickey-Fuller values.
    Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CointegrationSection {
    pub mode: CointegrationMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regression: Option<OlsResult>,
    pub report: UnitRootReport,
}

/// Structured output of every non-series command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<ModelFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<ResidualStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unit_root: Vec<NamedUnitRoot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cointegration: Option<CointegrationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lag_selection: Option<LagSelectionTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<VarModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub johansen: Option<JohansenReport>,
}

impl RunReport {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            config: cfg.clone(),
            provenance: Provenance::of(cfg),
            fit: None,
            residual: None,
            unit_root: Vec::new(),
            cointegration: None,
            lag_selection: None,
            var: None,
            johansen: None,
        }
    }
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_from_str<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "demolink", version, about = "Demographic model of stock-index returns")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Daily closes, `date,close`.
    #[arg(long, global = true)]
    pub sp500: Option<PathBuf>,
    /// Single-year-of-age counts, `month,age,population`.
    #[arg(long, global = true)]
    pub population: Option<PathBuf>,
    /// Quarterly GDP, `quarter,real_gdp,population`.
    #[arg(long, global = true)]
    pub gdp: Option<PathBuf>,
    /// postcensal-n9, intercensal-n9, n7-forecast, n17-backcast or n3-forecast.
    #[arg(long, global = true, value_parser = parse_from_str::<ProxyPreset>)]
    pub preset: Option<ProxyPreset>,
    #[arg(long, global = true, value_enum)]
    pub source: Option<PredictorSource>,
    /// simple or log.
    #[arg(long, global = true, value_parser = parse_enum::<ReturnMode>)]
    pub return_mode: Option<ReturnMode>,
    #[arg(long, global = true, value_enum)]
    pub observed: Option<ObservedConstruction>,
    /// Fit window, e.g. 1991-01..2001-12.
    #[arg(long, global = true, value_parser = parse_from_str::<MonthRange>)]
    pub window: Option<MonthRange>,
    /// ols or grid.
    #[arg(long, global = true, value_parser = parse_enum::<FitMethod>)]
    pub method: Option<FitMethod>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReturnsSeries {
    Observed,
    Annual,
    Monthly,
    Cumulative,
    Volatility,
    Divergence,
    Levels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProxySeries {
    Predictor,
    Proxy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelSeries {
    Predicted,
    Observed,
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Adf,
    Dfgls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SyntheticArg {
    RandomWalk,
    Ar1,
    WhiteNoise,
    CointegratedPair,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Observed return, annual return, cumulative return or volatility.
    Returns {
        #[arg(long, value_enum, default_value = "observed")]
        series: ReturnsSeries,
    },
    /// Cohort predictor built from the population file.
    Proxy {
        #[arg(long, value_enum, default_value = "predictor")]
        series: ProxySeries,
    },
    /// Fit `v1`, `v2` over the fit window.
    Fit,
    /// Predicted returns from given, reference or fitted coefficients.
    Predict {
        #[arg(long, requires = "v2", allow_hyphen_values = true)]
        v1: Option<f64>,
        #[arg(long, requires = "v1", allow_hyphen_values = true)]
        v2: Option<f64>,
        /// Use the preset's published coefficients.
        #[arg(long, conflicts_with_all = ["v1", "v2"])]
        reference: bool,
        #[arg(long, value_enum, default_value = "predicted")]
        series: ModelSeries,
    },
    /// ADF or DF-GLS on the observed, predicted or residual series.
    UnitRoot {
        #[arg(long = "test", value_enum, default_value = "adf")]
        test: TestKind,
        #[arg(long, value_enum, default_value = "observed")]
        series: ModelSeries,
        #[arg(long)]
        max_lag: Option<usize>,
        /// none, constant or constant_trend.
        #[arg(long, value_parser = parse_enum::<TrendSpec>)]
        trend: Option<TrendSpec>,
    },
    /// Engle-Granger test of observed against predicted returns.
    Cointegrate {
        #[arg(long)]
        max_lag: Option<usize>,
        /// Skip the regression and test `observed - predicted` directly.
        #[arg(long)]
        residual_only: bool,
    },
    /// Johansen trace test on the (observed, predicted) pair.
    Johansen {
        #[arg(long)]
        lag: Option<usize>,
        /// none, rconstant or constant.
        #[arg(long, value_parser = parse_enum::<JohansenTrend>)]
        trend: Option<JohansenTrend>,
    },
    /// VAR lag-order selection on the (observed, predicted) pair.
    LagSelect {
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Seeded synthetic series.
    Synthetic {
        #[arg(long, value_enum)]
        kind: Option<SyntheticArg>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        noise_sigma: Option<f64>,
    },
    /// Full pipeline: fit, residual statistics and the whole test battery.
    Report,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Returns { .. } => "returns",
            Command::Proxy { .. } => "proxy",
            Command::Fit => "fit",
            Command::Predict { .. } => "predict",
            Command::UnitRoot { .. } => "unit-root",
            Command::Cointegrate { .. } => "cointegrate",
            Command::Johansen { .. } => "johansen",
            Command::LagSelect { .. } => "lag-select",
            Command::Synthetic { .. } => "synthetic",
            Command::Report => "report",
        }
    }

    fn default_format(&self) -> OutputFormat {
        match self {
            Command::Returns { .. }
            | Command::Proxy { .. }
            | Command::Predict { .. }
            | Command::Synthetic { .. } => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

struct Context {
    cfg: RunConfig,
}

fn manifest_override(slot: &mut Option<DatasetManifest>, path: &Option<PathBuf>, kind: ingest::DatasetKind) {
    if let Some(path) = path {
        let label = slot.take().map(|m| m.vintage_label).unwrap_or_default();
        *slot = Some(DatasetManifest::new(path.clone(), kind, label));
    }
}

fn resolve(cli: &Cli) -> Result<Context> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let mut cfg = RunConfig::from_json(&text)?;
            let base = path.parent().unwrap_or(Path::new(""));
            for m in [&mut cfg.datasets.sp500, &mut cfg.datasets.population, &mut cfg.datasets.gdp]
                .into_iter()
                .flatten()
            {
                if m.path.is_relative() {
                    m.path = base.join(&m.path);
                }
            }
            cfg
        }
        None => RunConfig::default(),
    };
    use ingest::DatasetKind as K;
    manifest_override(&mut cfg.datasets.sp500, &cli.sp500, K::Sp500Daily);
    manifest_override(&mut cfg.datasets.population, &cli.population, K::PopulationSya);
    manifest_override(&mut cfg.datasets.gdp, &cli.gdp, K::GdpQuarterly);
    if let Some(p) = cli.preset {
        if cfg.preset != p {
            cfg.proxy = None;
            cfg.prediction_smoothing = None;
        }
        cfg.preset = p;
    }
    if let Some(s) = cli.source {
        cfg.predictor_source = s;
    }
    if let Some(m) = cli.return_mode {
        cfg.return_mode = m;
    }
    if let Some(o) = cli.observed {
        cfg.observed = o;
    }
    if let Some(w) = cli.window {
        cfg.fit_window = Some(w);
    }
    if let Some(m) = cli.method {
        cfg.fit_method = m;
    }
    if let Some(f) = cli.format {
        cfg.format = Some(f);
    }
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(w) = cfg.fit_window {
        if w.from > w.to {
            return Err(Error::Config("fit window is empty".into()));
        }
    }
    cfg.resolve_proxy();
    cfg.proxy_spec().validate(100)?;
    apply_command_flags(&mut cfg, &cli.command)?;
    Ok(Context { cfg })
}

fn apply_command_flags(cfg: &mut RunConfig, command: &Command) -> Result<()> {
    match command {
        Command::Predict { v1: Some(v1), v2: Some(v2), .. } => {
            cfg.coefficients = Some(Coefficients { v1: *v1, v2: *v2 });
        }
        Command::Predict { reference: true, .. } => {
            let (v1, v2) = match cfg.predictor_source {
                PredictorSource::Population => cfg.preset.reference_coefficients(),
                PredictorSource::Gdp => (GDP_V1, GDP_V2),
            };
            cfg.coefficients = Some(Coefficients { v1, v2 });
        }
        Command::UnitRoot { test, max_lag, trend, .. } => {
            if let Some(l) = max_lag {
                match test {
                    TestKind::Adf => cfg.tests.adf_max_lag = *l,
                    TestKind::Dfgls => cfg.tests.dfgls_max_lag = *l,
                }
            }
            if let Some(t) = trend {
                cfg.tests.unit_root_trend = *t;
            }
        }
        Command::Cointegrate { max_lag: Some(l), .. } => cfg.tests.residual_max_lag = *l,
        Command::Johansen { lag, trend } => {
            if let Some(l) = lag {
                cfg.tests.johansen_lag = *l;
            }
            if let Some(t) = trend {
                cfg.tests.johansen_trend = *t;
            }
        }
        Command::LagSelect { max_lag: Some(l) } => cfg.tests.lag_select_max = *l,
        Command::Synthetic {
            kind,
            length,
            phi,
            sigma,
            noise_sigma,
        } => {
            let mut spec = cfg
                .synthetic
                .clone()
                .unwrap_or_else(|| SyntheticSpec::new(SyntheticKind::RandomWalk, 207, 0));
            if let Some(k) = kind {
                spec.kind = match k {
                    SyntheticArg::RandomWalk => SyntheticKind::RandomWalk,
                    SyntheticArg::WhiteNoise => SyntheticKind::WhiteNoise,
                    SyntheticArg::Ar1 => SyntheticKind::Ar1 { phi: phi.unwrap_or(0.5) },
                    SyntheticArg::CointegratedPair => SyntheticKind::CointegratedPair {
                        noise_sigma: noise_sigma.unwrap_or(1.0),
                    },
                };
            }
            match &mut spec.kind {
                SyntheticKind::Ar1 { phi: p } => {
                    if let Some(v) = phi {
                        *p = *v;
                    }
                }
                SyntheticKind::CointegratedPair { noise_sigma: s } => {
                    if let Some(v) = noise_sigma {
                        *s = *v;
                    }
                }
                _ => {}
            }
            if let Some(n) = length {
                spec.length = *n;
            }
            if let Some(s) = sigma {
                spec.sigma = *s;
            }
            if let Some(seed) = cfg.seed {
                spec.seed = seed;
            }
            spec.validate()?;
            cfg.synthetic = Some(spec);
        }
        _ => {}
    }
    Ok(())
}

fn twelve_month() -> SmoothSpec {
    SmoothSpec::trailing(12).expect("valid window")
}

impl Context {
    fn manifest<'a>(&self, m: &'a Option<DatasetManifest>, what: &str) -> Result<&'a DatasetManifest> {
        m.as_ref()
            .ok_or_else(|| Error::Config(format!("no {what} dataset configured")))
    }

    fn daily(&self) -> Result<DailySeries> {
        ingest::load_sp500(self.manifest(&self.cfg.datasets.sp500, "sp500")?)
    }

    fn observed(&self, daily: &DailySeries) -> Result<MonthlySeries> {
        let levels = monthly_levels(daily, self.cfg.level_kind)?;
        match self.cfg.observed {
            ObservedConstruction::RunningSum => rolling_annual_return(&levels, self.cfg.return_mode),
            ObservedConstruction::MovingAverage => {
                ma(&monthly_returns(&levels, self.cfg.return_mode)?, twelve_month())
            }
        }
    }

    fn proxy_level(&self) -> Result<MonthlySeries> {
        let pyramid = ingest::load_population(self.manifest(&self.cfg.datasets.population, "population")?)?;
        cohort_proxy(&pyramid, &self.cfg.proxy_spec())
    }

    /// The regressor `x` of `R_p = v1 x + v2`. Smoothing of the predicted
    /// series commutes with the affine map, so it is applied here.
    fn predictor(&self) -> Result<MonthlySeries> {
        match self.cfg.predictor_source {
            PredictorSource::Population => {
                let x = predictor_dln(&self.proxy_level()?)?;
                match self.cfg.prediction_smoothing {
                    Some(s) => ma(&x, s),
                    None => Ok(x),
                }
            }
            PredictorSource::Gdp => {
                let g = ingest::load_gdp(self.manifest(&self.cfg.datasets.gdp, "gdp")?)?;
                ma(
                    &monthly_gdp_growth(&g)?,
                    SmoothSpec::trailing(GDP_SMOOTHING_MONTHS)?,
                )
            }
        }
    }

    /// Observed and predictor series restricted to the fit window.
    fn fit_sample(&self) -> Result<(MonthlySeries, MonthlySeries)> {
        let observed = self.observed(&self.daily()?)?;
        let (o, x) = align(&observed, &self.predictor()?)?;
        match self.cfg.fit_window {
            None => Ok((o, x)),
            Some(w) => {
                if w.from < o.start() || w.to > o.end() {
                    return Err(Error::Config(format!(
                        "fit window {}..{} lies outside the data coverage {}..{}",
                        w.from,
                        w.to,
                        o.start(),
                        o.end()
                    )));
                }
                Ok((o.window(w.from, w.to)?, x.window(w.from, w.to)?))
            }
        }
    }
}

/// Fitted model on the fit window.
struct Model {
    observed: MonthlySeries,
    predicted: MonthlySeries,
    fit: ModelFit,
}

impl Model {
    fn build(ctx: &Context) -> Result<Self> {
        let (observed, x) = ctx.fit_sample()?;
        let fit = fit_linear(&observed, &x, ctx.cfg.fit_method)?;
        let predicted = predict_returns(&x, fit.v1, fit.v2);
        Ok(Self {
            observed,
            predicted,
            fit,
        })
    }

    fn residual(&self) -> Result<MonthlySeries> {
        residual_series(&self.observed, &self.predicted)
    }

    fn pick(&self, which: ModelSeries) -> Result<MonthlySeries> {
        match which {
            ModelSeries::Observed => Ok(self.observed.clone()),
            ModelSeries::Predicted => Ok(self.predicted.clone()),
            ModelSeries::Residual => self.residual(),
        }
    }

    fn pair(&self) -> Vec<Vec<f64>> {
        vec![self.observed.values().to_vec(), self.predicted.values().to_vec()]
    }

    fn residual_stats(&self) -> ResidualStats {
        ResidualStats {
            mean: self.fit.residual_mean,
            std: self.fit.residual_std,
            rms: self.fit.rms(),
            n_obs: self.fit.n_obs,
        }
    }
}

fn unit_root(s: &[f64], test: TestKind, tests: &TestParams) -> Result<UnitRootReport> {
    match test {
        TestKind::Adf => adf_test(s, tests.adf_max_lag, tests.unit_root_trend),
        TestKind::Dfgls => dfgls_test(s, tests.dfgls_max_lag, tests.unit_root_trend),
    }
}

fn cointegration(model: &Model, tests: &TestParams, residual_only: bool) -> Result<CointegrationSection> {
    if residual_only {
        let eps = model.residual()?;
        Ok(CointegrationSection {
            mode: CointegrationMode::Residual,
            regression: None,
            report: eg_residual_test(eps.values(), tests.residual_max_lag)?,
        })
    } else {
        let eg = engle_granger(model.observed.values(), model.predicted.values(), tests.residual_max_lag)?;
        Ok(CointegrationSection {
            mode: CointegrationMode::TwoStep,
            regression: Some(eg.regression),
            report: eg.report,
        })
    }
}

enum Output {
    Series { name: String, series: MonthlySeries, provenance: Provenance },
    Synthetic { spec: SyntheticSpec, data: Vec<Vec<f64>> },
    Report(Box<RunReport>),
}

fn execute(ctx: &Context, command: &Command) -> Result<Output> {
    let cfg = &ctx.cfg;
    let series = |name: &str, series: MonthlySeries| Output::Series {
        name: name.to_string(),
        series,
        provenance: Provenance::of(cfg),
    };
    let mut report = RunReport::new(command.name(), cfg);
    match command {
        Command::Returns { series: which } => {
            let daily = ctx.daily()?;
            let levels = monthly_levels(&daily, cfg.level_kind)?;
            let s = match which {
                ReturnsSeries::Observed => ctx.observed(&daily)?,
                ReturnsSeries::Annual => annual_return(&levels, cfg.return_mode)?,
                ReturnsSeries::Monthly => monthly_returns(&levels, cfg.return_mode)?,
                ReturnsSeries::Cumulative => cumulative_return(&monthly_returns(&levels, cfg.return_mode)?),
                ReturnsSeries::Volatility => monthly_volatility(&daily)?,
                ReturnsSeries::Divergence => mean_close_divergence(&daily)?,
                ReturnsSeries::Levels => levels,
            };
            let name = format!("{which:?}").to_lowercase();
            return Ok(series(&name, s));
        }
        Command::Proxy { series: which } => {
            let s = match which {
                ProxySeries::Predictor => ctx.predictor()?,
                ProxySeries::Proxy => ctx.proxy_level()?,
            };
            let name = format!("{which:?}").to_lowercase();
            return Ok(series(&name, s));
        }
        Command::Predict { series: which, .. } => {
            let name = format!("{which:?}").to_lowercase();
            if let Some(c) = cfg.coefficients {
                let predicted = predict_returns(&ctx.predictor()?, c.v1, c.v2);
                let s = match which {
                    ModelSeries::Predicted => predicted,
                    ModelSeries::Observed => ctx.observed(&ctx.daily()?)?,
                    ModelSeries::Residual => {
                        residual_series(&ctx.observed(&ctx.daily()?)?, &predicted)?
                    }
                };
                return Ok(series(&name, s));
            }
            let model = Model::build(ctx)?;
            let s = match which {
                // predict over the whole predictor span, not only the fit window
                ModelSeries::Predicted => predict_returns(&ctx.predictor()?, model.fit.v1, model.fit.v2),
                other => model.pick(*other)?,
            };
            return Ok(series(&name, s));
        }
        Command::Synthetic { .. } => {
            let spec = cfg.synthetic.clone().expect("filled during resolution");
            let data = ingest::generate(&spec)?;
            return Ok(Output::Synthetic { spec, data });
        }
        Command::Fit => {
            let model = Model::build(ctx)?;
            report.residual = Some(model.residual_stats());
            report.fit = Some(model.fit);
        }
        Command::UnitRoot { test, series: which, .. } => {
            let model = Model::build(ctx)?;
            let s = model.pick(*which)?;
            report.unit_root.push(NamedUnitRoot {
                series: format!("{which:?}").to_lowercase(),
                report: unit_root(s.values(), *test, &cfg.tests)?,
            });
            report.fit = Some(model.fit);
        }
        Command::Cointegrate { residual_only, .. } => {
            let model = Model::build(ctx)?;
            report.cointegration = Some(cointegration(&model, &cfg.tests, *residual_only)?);
            report.fit = Some(model.fit);
        }
        Command::Johansen { .. } => {
            let model = Model::build(ctx)?;
            report.johansen = Some(johansen(&model.pair(), cfg.tests.johansen_lag, cfg.tests.johansen_trend)?);
            report.fit = Some(model.fit);
        }
        Command::LagSelect { .. } => {
            let model = Model::build(ctx)?;
            report.lag_selection = Some(lag_select(&model.pair(), cfg.tests.lag_select_max)?);
            report.fit = Some(model.fit);
        }
        Command::Report => {
            let model = Model::build(ctx)?;
            for (name, s) in [("observed", &model.observed), ("predicted", &model.predicted)] {
                for test in [TestKind::Adf, TestKind::Dfgls] {
                    report.unit_root.push(NamedUnitRoot {
                        series: name.to_string(),
                        report: unit_root(s.values(), test, &cfg.tests)?,
                    });
                }
            }
            report.cointegration = Some(cointegration(&model, &cfg.tests, true)?);
            let pair = model.pair();
            report.lag_selection = Some(lag_select(&pair, cfg.tests.lag_select_max)?);
            report.var = Some(var_fit(&pair, cfg.tests.var_lag, true)?);
            report.johansen = Some(johansen(&pair, cfg.tests.johansen_lag, cfg.tests.johansen_trend)?);
            report.residual = Some(model.residual_stats());
            report.fit = Some(model.fit);
        }
    }
    Ok(Output::Report(Box::new(report)))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn series_csv(s: &MonthlySeries) -> String {
    let mut out = String::from("month,value\n");
    for (m, v) in s.iter() {
        let _ = writeln!(out, "{m},{v}");
    }
    out
}

fn unit_root_csv(out: &mut String, series: &str, r: &UnitRootReport) {
    let test = match r.test {
        UnitRootTest::Adf => "adf",
        UnitRootTest::Dfgls => "dfgls",
    };
    for l in &r.per_lag {
        let _ = write!(out, "{series},{test},{},{},{},{}", r.trend, l.lag, l.statistic, l.n_obs);
        for level in Significance::ALL {
            let _ = write!(out, ",{}", opt(l.critical_values.get(&level).copied()));
        }
        for level in Significance::ALL {
            let _ = write!(out, ",{}", l.reject_at.get(&level).copied().unwrap_or(false));
        }
        out.push('\n');
    }
}

const UNIT_ROOT_HEADER: &str =
    "series,test,trend,lag,statistic,n_obs,cv_1pct,cv_5pct,cv_10pct,reject_1pct,reject_5pct,reject_10pct\n";

fn report_csv(r: &RunReport) -> Result<String> {
    let mut out = String::new();
    match r.command.as_str() {
        "fit" => {
            let f = r.fit.as_ref().expect("fit present");
            out.push_str("field,value\n");
            let _ = writeln!(out, "v1,{}", f.v1);
            let _ = writeln!(out, "v2,{}", f.v2);
            let _ = writeln!(out, "residual_mean,{}", f.residual_mean);
            let _ = writeln!(out, "residual_std,{}", f.residual_std);
            let _ = writeln!(out, "rms,{}", f.rms());
            let _ = writeln!(out, "n_obs,{}", f.n_obs);
            let _ = writeln!(out, "fit_start,{}", f.fit_window.0);
            let _ = writeln!(out, "fit_end,{}", f.fit_window.1);
            let _ = writeln!(out, "method,{}", f.method);
        }
        "unit-root" => {
            out.push_str(UNIT_ROOT_HEADER);
            for u in &r.unit_root {
                unit_root_csv(&mut out, &u.series, &u.report);
            }
        }
        "cointegrate" => {
            let c = r.cointegration.as_ref().expect("cointegration present");
            out.push_str(UNIT_ROOT_HEADER);
            unit_root_csv(&mut out, "residual", &c.report);
        }
        "lag-select" => {
            let t = r.lag_selection.as_ref().expect("table present");
            out.push_str("lag,log_likelihood,lr,fpe,aic,hqic,sbic,selected_by\n");
            for row in &t.rows {
                let s = t.starred;
                let by: Vec<&str> = [("lr", s.lr), ("fpe", s.fpe), ("aic", s.aic), ("hqic", s.hqic), ("sbic", s.sbic)]
                    .into_iter()
                    .filter(|(_, lag)| *lag == row.lag)
                    .map(|(name, _)| name)
                    .collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.lag,
                    row.log_likelihood,
                    opt(row.lr),
                    row.fpe,
                    row.aic,
                    row.hqic,
                    row.sbic,
                    by.join(";")
                );
            }
        }
        "johansen" => {
            let j = r.johansen.as_ref().expect("johansen present");
            out.push_str("rank,eigenvalue,trace,critical_5pct,log_likelihood,sbic,hqic,selected\n");
            for rank in 0..j.log_likelihood.len() {
                let _ = writeln!(
                    out,
                    "{rank},{},{},{},{},{},{},{}",
                    opt(rank.checked_sub(1).and_then(|i| j.eigenvalues.get(i).copied())),
                    opt(j.trace_stats.get(rank).copied()),
                    opt(j.critical_5pct.get(rank).copied()),
                    j.log_likelihood[rank],
                    j.sbic[rank],
                    j.hqic[rank],
                    rank == j.selected_rank
                );
            }
        }
        other => {
            return Err(Error::Config(format!("'{other}' output is only available as json")));
        }
    }
    Ok(out)
}

fn render(output: &Output, format: OutputFormat) -> Result<String> {
    match (output, format) {
        (Output::Series { series, .. }, OutputFormat::Csv) => Ok(series_csv(series)),
        (Output::Series { name, series, provenance }, OutputFormat::Json) => {
            #[derive(Serialize)]
            struct SeriesDoc<'a> {
                name: &'a str,
                provenance: &'a Provenance,
                series: &'a MonthlySeries,
            }
            json(&SeriesDoc { name, provenance, series })
        }
        (Output::Synthetic { data, .. }, OutputFormat::Csv) => {
            let mut out = String::from("index");
            if data.len() == 1 {
                out.push_str(",value");
            } else {
                for i in 0..data.len() {
                    let _ = write!(out, ",value{i}");
                }
            }
            out.push('\n');
            for t in 0..data.first().map_or(0, Vec::len) {
                let _ = write!(out, "{t}");
                for col in data {
                    let _ = write!(out, ",{}", col[t]);
                }
                out.push('\n');
            }
            Ok(out)
        }
        (Output::Synthetic { spec, data }, OutputFormat::Json) => {
            #[derive(Serialize)]
            struct SyntheticDoc<'a> {
                spec: &'a SyntheticSpec,
                series: &'a [Vec<f64>],
            }
            json(&SyntheticDoc { spec, series: data })
        }
        (Output::Report(r), OutputFormat::Json) => json(r),
        (Output::Report(r), OutputFormat::Csv) => report_csv(r),
    }
}

/// Runs a parsed command line and returns the rendered output.
pub fn run(cli: &Cli) -> Result<String> {
    let ctx = resolve(cli)?;
    let output = execute(&ctx, &cli.command)?;
    let format = ctx.cfg.format.unwrap_or_else(|| cli.command.default_format());
    render(&output, format)
}

/// Full binary behaviour: parse, run, write, and report errors as one line
/// `error[CODE]: message` on standard error. Returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[E_USAGE]: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text).map_err(Error::from),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush().map_err(Error::from)
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.code());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_range_parsing() {
        let r: MonthRange = "1991-01..2001-12".parse().unwrap();
        assert_eq!(r.from, MonthStamp::new(1991, 1).unwrap());
        assert_eq!(r.to, MonthStamp::new(2001, 12).unwrap());
        assert!("2001-12..1991-01".parse::<MonthRange>().is_err());
        assert!("1991-01".parse::<MonthRange>().is_err());
    }

    #[test]
    fn config_defaults_and_round_trip() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let mut full = RunConfig::default();
        full.resolve_proxy();
        full.fit_window = Some("1991-01..2001-12".parse().unwrap());
        let text = serde_json::to_string(&full).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), full);
        assert!(matches!(RunConfig::from_json(r#"{"bogus":1}"#), Err(Error::Config(_))));
    }

    #[test]
    fn n3_preset_carries_prediction_smoothing() {
        let mut cfg = RunConfig {
            preset: ProxyPreset::N3Forecast,
            ..RunConfig::default()
        };
        cfg.resolve_proxy();
        assert_eq!(cfg.prediction_smoothing, Some(SmoothSpec::trailing(6).unwrap()));
        assert_eq!(cfg.proxy, Some(ProxyPreset::N3Forecast.spec()));
    }

    #[test]
    fn series_csv_round_trips_values() {
        let s = MonthlySeries::new(MonthStamp::new(2000, 11).unwrap(), vec![0.1, -1e-17, 1.0 / 3.0]).unwrap();
        let text = series_csv(&s);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("month,value"));
        let back: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert_eq!(back, s.values());
        assert!(text.contains("2001-01,"));
    }

    #[test]
    fn synthetic_flags_override_config() {
        let cli = Cli::try_parse_from([
            "demolink", "--seed", "9", "synthetic", "--kind", "ar1", "--phi", "-0.3", "--length", "30",
        ])
        .unwrap();
        let ctx = resolve(&cli).unwrap();
        let spec = ctx.cfg.synthetic.unwrap();
        assert_eq!(spec.kind, SyntheticKind::Ar1 { phi: -0.3 });
        assert_eq!((spec.length, spec.seed), (30, 9));
    }

    #[test]
    fn missing_dataset_is_config_error() {
        let cli = Cli::try_parse_from(["demolink", "fit"]).unwrap();
        assert_eq!(run(&cli).unwrap_err().code(), "E_CONFIG");
    }
}
