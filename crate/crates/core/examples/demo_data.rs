//! Writes a seeded, internally consistent set of input files.
//!
//! ```text
//! cargo run --example demo_data -- /tmp/demolink-data 7
//! demolink --sp500 /tmp/demolink-data/sp500.csv \
//!          --population /tmp/demolink-data/population.csv fit
//! ```

use std::path::PathBuf;

use demolink::ingest::DemoDatasets;

fn main() -> demolink::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "demo-data".into()));
    let seed = args.next().map_or(7, |s| s.parse().expect("seed must be an integer"));
    std::fs::create_dir_all(&dir)?;
    let demo = DemoDatasets::generate(seed)?;
    for path in demo.write_to(&dir)? {
        println!("wrote {}", path.display());
    }
    println!(
        "{} trading days, {} population months, {} GDP quarters",
        demo.daily.len(),
        demo.population.n_months(),
        demo.gdp.rows.len()
    );
    Ok(())
}
