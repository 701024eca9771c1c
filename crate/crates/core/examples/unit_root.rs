//! ADF and DF-GLS on a random walk and on a persistent stationary series.

use demolink::econometrics::{adf_test, dfgls_test, Significance, TrendSpec};
use demolink::ingest::{generate, SyntheticKind, SyntheticSpec};

fn main() -> demolink::Result<()> {
    for (label, kind) in [
        ("random walk", SyntheticKind::RandomWalk),
        ("AR(0.5)", SyntheticKind::Ar1 { phi: 0.5 }),
        ("AR(0.95)", SyntheticKind::Ar1 { phi: 0.95 }),
    ] {
        let s = generate(&SyntheticSpec::new(kind, 207, 1))?.remove(0);
        for report in [adf_test(&s, 3, TrendSpec::Constant)?, dfgls_test(&s, 4, TrendSpec::Constant)?] {
            let stats: Vec<String> = report.per_lag.iter().map(|l| format!("{:.2}", l.statistic)).collect();
            println!(
                "{label:<11} {:?}  lags 0..={}: [{}]  1% cv {:.2}  reject at 5%: {}",
                report.test,
                report.reported_lag,
                stats.join(", "),
                report.critical_values[&Significance::One],
                report.rejects(Significance::Five)
            );
        }
    }
    Ok(())
}
