//! Predictor series for each named cohort preset.

use demolink::demography::{cohort_proxy, predictor_dln, ProxyPreset};
use demolink::ingest::DemoDatasets;

fn main() -> demolink::Result<()> {
    let pyramid = DemoDatasets::generate(7)?.population;
    println!("pyramid {}..{}, ages 0..={}", pyramid.start(), pyramid.end(), pyramid.max_age());
    for preset in ProxyPreset::ALL {
        let spec = preset.spec();
        let x = predictor_dln(&cohort_proxy(&pyramid, &spec)?)?;
        let (v1, v2) = preset.reference_coefficients();
        println!(
            "{preset:<15} anchor {:>2}  shift {:>+4} months  dlnN {}..{}  published v1={v1} v2={v2}{}",
            spec.anchor_age,
            spec.shift_months(),
            x.start(),
            x.end(),
            preset
                .prediction_smoothing()
                .map(|s| format!("  prediction MA({})", s.window()))
                .unwrap_or_default()
        );
    }
    Ok(())
}
