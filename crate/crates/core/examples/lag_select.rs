//! VAR lag-order selection on data simulated from a bivariate VAR(3).

use demolink::econometrics::{lag_select, var_fit};
use demolink::ingest::{generate, SyntheticKind, SyntheticSpec};

fn main() -> demolink::Result<()> {
    let coefficients = vec![
        vec![vec![0.3, 0.0], vec![0.0, 0.3]],
        vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        vec![vec![0.4, 0.1], vec![0.1, 0.4]],
    ];
    let data = generate(&SyntheticSpec::new(SyntheticKind::VarP { coefficients }, 207, 8))?;

    let table = lag_select(&data, 4)?;
    println!("lag        LL        LR         FPE        AIC      HQIC      SBIC");
    for r in &table.rows {
        println!(
            "{:>3} {:>9.2} {:>9} {:>11.3e} {:>9.4} {:>9.4} {:>9.4}",
            r.lag,
            r.log_likelihood,
            r.lr.map(|v| format!("{v:.2}")).unwrap_or_default(),
            r.fpe,
            r.aic,
            r.hqic,
            r.sbic
        );
    }
    println!("selected: {:?}", table.starred);

    let var = var_fit(&data, table.starred.sbic, true)?;
    for (i, eq) in var.equations.iter().enumerate() {
        println!("equation {i}: R² {:.3}, RMSE {:.3}", eq.r_squared, eq.rmse);
    }
    Ok(())
}
