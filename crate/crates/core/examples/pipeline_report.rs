//! Full pipeline through the command-line front end, driven in-process.

use clap::Parser;
use demolink::cli::{run, Cli, RunReport};
use demolink::ingest::DemoDatasets;

fn main() -> demolink::Result<()> {
    let dir = std::env::temp_dir().join("demolink-pipeline-example");
    std::fs::create_dir_all(&dir)?;
    let [sp500, population, _] = DemoDatasets::generate(7)?.write_to(&dir)?;

    let cli = Cli::parse_from([
        "demolink".as_ref(),
        "--sp500".as_ref(),
        sp500.as_os_str(),
        "--population".as_ref(),
        population.as_os_str(),
        "--window".as_ref(),
        "1991-01..2001-12".as_ref(),
        "report".as_ref(),
    ] as [&std::ffi::OsStr; 8]);
    let report: RunReport = serde_json::from_str(&run(&cli)?)?;

    let fit = report.fit.expect("report carries a fit");
    println!("fit: v1 {:.2}, v2 {:+.4}, residual std {:.4}", fit.v1, fit.v2, fit.residual_std);
    for u in &report.unit_root {
        println!("{:<9} {:?}: statistic {:.2} at lag {}", u.series, u.report.test, u.report.statistic(), u.report.reported_lag);
    }
    if let Some(c) = &report.cointegration {
        println!("residual test: {:.2}", c.report.statistic());
    }
    if let Some(t) = &report.lag_selection {
        println!("lag selection: {:?}", t.starred);
    }
    if let Some(j) = &report.johansen {
        println!("johansen ({}): trace {:?}, rank {}", j.trend, j.trace_stats, j.selected_rank);
    }
    Ok(())
}
