//! Empirical size of the ADF test from seeded random walks.
//!
//! Each draw has its own seed, so any single replication can be re-generated
//! in isolation.

use demolink::econometrics::{adf_test, Significance, TrendSpec};
use demolink::ingest::{generate, SyntheticKind, SyntheticSpec};

fn main() -> demolink::Result<()> {
    let draws = 500u64;
    let mut rejections = [0usize; 3];
    for seed in 0..draws {
        let s = generate(&SyntheticSpec::new(SyntheticKind::RandomWalk, 207, seed))?.remove(0);
        let report = adf_test(&s, 0, TrendSpec::Constant)?;
        for (i, level) in Significance::ALL.into_iter().enumerate() {
            rejections[i] += report.rejects(level) as usize;
        }
    }
    for (i, level) in Significance::ALL.into_iter().enumerate() {
        println!("nominal {level:>3}: rejected {:.1}%", 100.0 * rejections[i] as f64 / draws as f64);
    }
    Ok(())
}
