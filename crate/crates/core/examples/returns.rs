//! Monthly returns, the observed twelve-month return and volatility from
//! daily closes.

use demolink::ingest::DemoDatasets;
use demolink::market::{
    annual_return, cumulative_return, mean_close_divergence, monthly_levels, monthly_returns,
    monthly_volatility, rolling_annual_return, LevelKind, ReturnMode,
};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn main() -> demolink::Result<()> {
    let daily = DemoDatasets::generate(7)?.daily;
    let closes = monthly_levels(&daily, LevelKind::Close)?;

    // R_o: running sum of twelve simple monthly returns
    let observed = rolling_annual_return(&closes, ReturnMode::Simple)?;
    let annual = annual_return(&closes, ReturnMode::Simple)?;
    let gap: Vec<f64> = observed.values().iter().zip(annual.values()).map(|(a, b)| (a - b).abs()).collect();
    println!("observed R_o {}..{}, mean |R_o - annual| = {:.4}", observed.start(), observed.end(), mean(&gap));

    // in log mode the two collapse onto each other
    let lo = rolling_annual_return(&closes, ReturnMode::Log)?;
    let la = annual_return(&closes, ReturnMode::Log)?;
    let worst = lo.values().iter().zip(la.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("log mode max difference {worst:.1e}");

    let cumulative = cumulative_return(&monthly_returns(&closes, ReturnMode::Simple)?);
    println!("cumulative return by {}: {:.3}", cumulative.end(), cumulative.values().last().unwrap());

    let vol = monthly_volatility(&daily)?;
    let div = mean_close_divergence(&daily)?;
    println!("mean monthly volatility {:.4}, mean (mean - close)/mean {:.4}", mean(vol.values()), mean(div.values()));
    Ok(())
}
