//! Fit `R_o = v1 dlnN9 + v2` by least squares and by the lattice search.

use demolink::demography::{cohort_proxy, predictor_dln, ProxyPreset};
use demolink::ingest::DemoDatasets;
use demolink::linkage::{fit_linear, predict_returns, residual_series, FitMethod};
use demolink::market::{monthly_levels, rolling_annual_return, LevelKind, ReturnMode};
use demolink::MonthStamp;

fn main() -> demolink::Result<()> {
    let demo = DemoDatasets::generate(7)?;
    let observed = rolling_annual_return(&monthly_levels(&demo.daily, LevelKind::Close)?, ReturnMode::Simple)?;
    let x = predictor_dln(&cohort_proxy(&demo.population, &ProxyPreset::PostcensalN9.spec())?)?;

    let (from, to) = (MonthStamp::new(1991, 1)?, MonthStamp::new(2001, 12)?);
    let window = observed.window(from, to)?;
    for method in [FitMethod::Ols, FitMethod::Grid] {
        let fit = fit_linear(&window, &x, method)?;
        println!(
            "{method:<4} v1 = {:8.3}  v2 = {:+.4}  residual mean {:+.5}  std {:.4}  (n = {})",
            fit.v1, fit.v2, fit.residual_mean, fit.residual_std, fit.n_obs
        );
    }

    // out-of-window check with the fitted coefficients
    let fit = fit_linear(&window, &x, FitMethod::Ols)?;
    let eps = residual_series(&observed, &predict_returns(&x, fit.v1, fit.v2))?;
    let late = eps.window(MonthStamp::new(2002, 1)?, eps.end())?;
    let rms = (late.values().iter().map(|e| e * e).sum::<f64>() / late.len() as f64).sqrt();
    println!("out-of-sample RMS residual {}..{}: {rms:.4}", late.start(), late.end());
    Ok(())
}
