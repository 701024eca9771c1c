//! Engle-Granger and Johansen on a cointegrated pair and on two unrelated
//! random walks.

use demolink::econometrics::{engle_granger, johansen, JohansenTrend, Significance};
use demolink::ingest::{generate, SyntheticKind, SyntheticSpec};

fn main() -> demolink::Result<()> {
    let pair = generate(&SyntheticSpec::new(SyntheticKind::CointegratedPair { noise_sigma: 1.0 }, 207, 3))?;
    let a = generate(&SyntheticSpec::new(SyntheticKind::RandomWalk, 207, 4))?.remove(0);
    let b = generate(&SyntheticSpec::new(SyntheticKind::RandomWalk, 207, 5))?.remove(0);

    for (label, data) in [("cointegrated", pair), ("independent", vec![a, b])] {
        let eg = engle_granger(&data[1], &data[0], 2)?;
        println!(
            "{label}: EG slope {:.3}, residual ADF {:.2} (5% cv {:.2}), reject: {}",
            eg.regression.coefficients[0],
            eg.report.statistic(),
            eg.report.critical_values[&Significance::Five],
            eg.report.rejects(Significance::Five)
        );
        for trend in [JohansenTrend::None, JohansenTrend::Rconstant] {
            let j = johansen(&data, 2, trend)?;
            println!(
                "  johansen {trend:<9} eigenvalues {:?}  trace {:?}  5% cv {:?}  rank {}",
                j.eigenvalues.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
                j.trace_stats.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>(),
                j.critical_5pct,
                j.selected_rank
            );
        }
    }
    Ok(())
}
