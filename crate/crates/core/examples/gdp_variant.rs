//! Returns predicted from real GDP per capita, and the long-run trend rate.

use demolink::linkage::{
    predict_from_gdp, trend_growth_rate, TrendParams, GDP_V1, GDP_V2,
};
use demolink::ingest::DemoDatasets;

fn main() -> demolink::Result<()> {
    let gdp = DemoDatasets::generate(7)?.gdp.per_capita()?;
    let predicted = predict_from_gdp(&gdp, GDP_V1, GDP_V2)?;
    let v = predicted.values();
    println!(
        "R_p = {GDP_V1} dln(GDPpc) {GDP_V2:+}: {}..{}, range {:.4}..{:.4}",
        predicted.start(),
        predicted.end(),
        v.iter().cloned().fold(f64::INFINITY, f64::min),
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    );

    let trend = TrendParams::new(400.0)?;
    for level in [20_000.0, 40_000.0, 80_000.0] {
        println!("GDPpc {level:>7}: trend growth {:.4} per year", trend_growth_rate(level, &trend)?);
    }
    Ok(())
}
