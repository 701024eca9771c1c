//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails. Criterion 11 needs real archival files: set
//! `DEMOLINK_ARCHIVE_DIR` to a directory holding `sp500.csv` and a postcensal
//! `population.csv`; without it the criterion is reported as skipped.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use demolink::cli::{main_with_args, run, Cli};
use demolink::econometrics::{
    adf_test, dfgls_test, johansen, lag_select, ols, JohansenTrend, Significance, TrendSpec,
};
use demolink::ingest::{generate, DemoDatasets, SyntheticKind, SyntheticSpec};
use demolink::linkage::{fit_linear, predict_returns, trend_growth_rate, FitMethod, TrendParams};
use demolink::market::{annual_return, rolling_annual_return, ReturnMode};
use demolink::{MonthStamp, MonthlySeries};

use clap::Parser;

const N: usize = 207;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn within(limit_s: u64, elapsed: Duration, outcome: Outcome) -> Outcome {
    let secs = elapsed.as_secs_f64();
    match outcome {
        Outcome::Pass(d) if secs < limit_s as f64 => Outcome::Pass(format!("{d}; {secs:.2}s < {limit_s}s")),
        Outcome::Pass(d) => Outcome::Fail(format!("{d}; took {secs:.2}s, limit {limit_s}s")),
        other => other,
    }
}

fn series(kind: SyntheticKind, seed: u64) -> Vec<Vec<f64>> {
    generate(&SyntheticSpec::new(kind, N, seed)).expect("valid spec")
}

fn rate(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

fn telescoping() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let walk = generate(&SyntheticSpec::new(SyntheticKind::RandomWalk, 60, 10_000 + seed).with_sigma(0.05))
            .unwrap()
            .remove(0);
        let prices: Vec<f64> = walk.iter().map(|w| 100.0 * w.exp()).collect();
        let m = MonthlySeries::new(MonthStamp::new(1990, 1).unwrap(), prices).unwrap();
        let rolled = rolling_annual_return(&m, ReturnMode::Log).unwrap();
        let annual = annual_return(&m, ReturnMode::Log).unwrap();
        assert_eq!(rolled.start(), annual.start());
        for (a, b) in rolled.values().iter().zip(annual.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    within(1, start.elapsed(), check(worst <= 1e-12, format!("max |rolling - annual| = {worst:.2e}")))
}

/// Normal equations for `y = b x + a`, solved by Gaussian elimination with
/// partial pivoting on the 2x2 system.
fn normal_equations(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let mut m = [[sxx, sx, sxy], [sx, n, sy]];
    if m[1][0].abs() > m[0][0].abs() {
        m.swap(0, 1);
    }
    let f = m[1][0] / m[0][0];
    let pivot = m[0];
    for (t, p) in m[1].iter_mut().zip(pivot) {
        *t -= f * p;
    }
    let a = m[1][2] / m[1][1];
    let b = (m[0][2] - m[0][1] * a) / m[0][0];
    (b, a)
}

fn ols_exactness() -> Outcome {
    let start = Instant::now();
    let x: Vec<f64> = (0..120).map(|i| 0.002 * ((i as f64) * 0.37).sin() + 0.0001 * i as f64).collect();
    let y: Vec<f64> = x.iter().map(|v| 170.0 * v - 0.04).collect();
    let fit = ols(&y, std::slice::from_ref(&x), true).unwrap();
    let exact_err = (fit.coefficients[0] - 170.0).abs().max((fit.coefficients[1] + 0.04).abs());
    let m = MonthlySeries::new(MonthStamp::new(1991, 1).unwrap(), x.clone()).unwrap();
    let yo = MonthlySeries::new(MonthStamp::new(1991, 1).unwrap(), y.clone()).unwrap();
    let lf = fit_linear(&yo, &m, FitMethod::Ols).unwrap();
    let exact_err = exact_err.max((lf.v1 - 170.0).abs()).max((lf.v2 + 0.04).abs());

    let mut noisy_err: f64 = 0.0;
    for seed in 0..20u64 {
        let noise = generate(&SyntheticSpec::new(SyntheticKind::WhiteNoise, 150, 20_000 + seed).with_sigma(0.05))
            .unwrap()
            .remove(0);
        let xs = generate(&SyntheticSpec::new(SyntheticKind::Ar1 { phi: 0.8 }, 150, 21_000 + seed).with_sigma(0.001))
            .unwrap()
            .remove(0);
        let ys: Vec<f64> = xs.iter().zip(&noise).map(|(x, e)| 170.0 * x - 0.04 + e).collect();
        let (b, a) = normal_equations(&xs, &ys);
        let fit = ols(&ys, std::slice::from_ref(&xs), true).unwrap();
        noisy_err = noisy_err
            .max((fit.coefficients[0] - b).abs())
            .max((fit.coefficients[1] - a).abs());
    }
    let ok = exact_err <= 1e-9 && fit.r_squared >= 1.0 - 1e-12 && noisy_err <= 1e-9;
    within(
        1,
        start.elapsed(),
        check(
            ok,
            format!(
                "noiseless coef err {exact_err:.1e}, R² = 1 - {:.1e}; noisy vs normal equations {noisy_err:.1e}",
                1.0 - fit.r_squared
            ),
        ),
    )
}

fn adf_size() -> Outcome {
    let start = Instant::now();
    let (mut five, mut one) = (0, 0);
    for seed in 0..500u64 {
        let s = &series(SyntheticKind::RandomWalk, 30_000 + seed)[0];
        let r = adf_test(s, 0, TrendSpec::Constant).unwrap();
        five += r.rejects(Significance::Five) as usize;
        one += r.rejects(Significance::One) as usize;
    }
    let (r5, r1) = (rate(five, 500), rate(one, 500));
    within(
        60,
        start.elapsed(),
        check(
            (0.02..=0.08).contains(&r5) && r1 <= 0.03,
            format!("rejection {:.1}% at 5%, {:.1}% at 1%", 100.0 * r5, 100.0 * r1),
        ),
    )
}

fn adf_power() -> Outcome {
    let start = Instant::now();
    let hits = (0..500u64)
        .filter(|seed| {
            let s = &series(SyntheticKind::Ar1 { phi: 0.5 }, 40_000 + seed)[0];
            adf_test(s, 0, TrendSpec::Constant).unwrap().rejects(Significance::Five)
        })
        .count();
    let r = rate(hits, 500);
    within(60, start.elapsed(), check(r >= 0.95, format!("rejection {:.1}% at 5%", 100.0 * r)))
}

fn dfgls_efficiency() -> Outcome {
    let start = Instant::now();
    let (mut adf, mut gls) = (0, 0);
    for seed in 0..500u64 {
        let s = &series(SyntheticKind::Ar1 { phi: 0.95 }, 50_000 + seed)[0];
        adf += adf_test(s, 0, TrendSpec::Constant).unwrap().rejects(Significance::Five) as usize;
        gls += dfgls_test(s, 0, TrendSpec::Constant).unwrap().rejects(Significance::Five) as usize;
    }
    let gap = 100.0 * (rate(gls, 500) - rate(adf, 500));
    within(
        120,
        start.elapsed(),
        check(
            gap >= 5.0,
            format!(
                "DF-GLS {:.1}% vs ADF {:.1}% (+{gap:.1} pp)",
                100.0 * rate(gls, 500),
                100.0 * rate(adf, 500)
            ),
        ),
    )
}

fn johansen_discrimination() -> Outcome {
    let start = Instant::now();
    let (mut coint, mut indep) = (0, 0);
    for seed in 0..200u64 {
        let pair = series(SyntheticKind::CointegratedPair { noise_sigma: 1.0 }, 60_000 + seed);
        coint += (johansen(&pair, 1, JohansenTrend::None).unwrap().selected_rank == 1) as usize;
        let a = series(SyntheticKind::RandomWalk, 61_000 + seed).remove(0);
        let b = series(SyntheticKind::RandomWalk, 62_000 + seed).remove(0);
        indep += (johansen(&[a, b], 1, JohansenTrend::None).unwrap().selected_rank == 0) as usize;
    }
    let (rc, ri) = (rate(coint, 200), rate(indep, 200));
    within(
        120,
        start.elapsed(),
        check(
            rc >= 0.90 && ri >= 0.85,
            format!("cointegrated → rank 1 in {:.1}%, independent → rank 0 in {:.1}%", 100.0 * rc, 100.0 * ri),
        ),
    )
}

fn lag_selection() -> Outcome {
    let start = Instant::now();
    let var3 = vec![
        vec![vec![0.3, 0.0], vec![0.0, 0.3]],
        vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        vec![vec![0.4, 0.1], vec![0.1, 0.4]],
    ];
    let (mut three, mut zero) = (0, 0);
    for seed in 0..200u64 {
        let d = series(SyntheticKind::VarP { coefficients: var3.clone() }, 70_000 + seed);
        three += (lag_select(&d, 4).unwrap().starred.sbic == 3) as usize;
        let a = series(SyntheticKind::WhiteNoise, 71_000 + seed).remove(0);
        let b = series(SyntheticKind::WhiteNoise, 72_000 + seed).remove(0);
        zero += (lag_select(&[a, b], 4).unwrap().starred.sbic == 0) as usize;
    }
    let (r3, r0) = (rate(three, 200), rate(zero, 200));
    within(
        60,
        start.elapsed(),
        check(
            r3 >= 0.70 && r0 >= 0.90,
            format!("SBIC picks 3 on VAR(3) in {:.1}%, 0 on white noise in {:.1}%", 100.0 * r3, 100.0 * r0),
        ),
    )
}

fn scale_invariance() -> Outcome {
    let affine = |s: &[f64]| s.iter().map(|v| 1000.0 * v + 5.0).collect::<Vec<f64>>();
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let s = &series(SyntheticKind::Ar1 { phi: 0.9 }, 80_000 + seed)[0];
        let t = affine(s);
        for trend in [TrendSpec::Constant, TrendSpec::ConstantTrend] {
            let (a, b) = (adf_test(s, 3, trend).unwrap(), adf_test(&t, 3, trend).unwrap());
            let (c, d) = (dfgls_test(s, 3, trend).unwrap(), dfgls_test(&t, 3, trend).unwrap());
            for (x, y) in a.per_lag.iter().zip(&b.per_lag).chain(c.per_lag.iter().zip(&d.per_lag)) {
                worst = worst.max((x.statistic - y.statistic).abs());
            }
        }
        let pair = series(SyntheticKind::CointegratedPair { noise_sigma: 1.0 }, 81_000 + seed);
        let scaled: Vec<Vec<f64>> = pair.iter().map(|c| affine(c)).collect();
        for trend in [JohansenTrend::Rconstant, JohansenTrend::Constant] {
            let (a, b) = (johansen(&pair, 2, trend).unwrap(), johansen(&scaled, 2, trend).unwrap());
            for (x, y) in a.trace_stats.iter().zip(&b.trace_stats) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    check(worst <= 1e-9, format!("max statistic change under 1000x + 5: {worst:.1e}"))
}

fn arithmetic() -> Outcome {
    let x = MonthlySeries::new(MonthStamp::new(2000, 1).unwrap(), vec![0.001]).unwrap();
    let r = predict_returns(&x, 170.0, -0.04).values()[0];
    let g = trend_growth_rate(40_000.0, &TrendParams::new(400.0).unwrap()).unwrap();
    let (e1, e2) = ((r - 0.13).abs(), (g - 0.01).abs());
    check(e1 <= 1e-15 && e2 <= 1e-15, format!("R_p = {r}, trend rate = {g}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let paths = DemoDatasets::generate(11).unwrap().write_to(dir.path()).unwrap();
    let report = |name: &str| -> Vec<u8> {
        let out = dir.path().join(name);
        let args = [
            "demolink".into(),
            "--sp500".into(),
            paths[0].clone().into_os_string(),
            "--population".into(),
            paths[1].clone().into_os_string(),
            "--window".into(),
            "1991-01..2001-12".into(),
            "--out".into(),
            out.clone().into_os_string(),
            "report".into(),
        ];
        assert_eq!(main_with_args::<_, std::ffi::OsString>(args), 0);
        std::fs::read(out).unwrap()
    };
    let (a, b) = (report("a.json"), report("b.json"));
    let synth = || {
        let cli = Cli::parse_from(["demolink", "--seed", "5", "synthetic", "--kind", "cointegrated-pair"]);
        run(&cli).unwrap()
    };
    let spec = SyntheticSpec::new(SyntheticKind::Ar1 { phi: 0.7 }, 500, 99);
    let bits = |v: Vec<Vec<f64>>| v.concat().iter().map(|x| x.to_bits()).collect::<Vec<u64>>();
    let synth_same = synth() == synth() && bits(generate(&spec).unwrap()) == bits(generate(&spec).unwrap());
    check(
        !a.is_empty() && a == b && synth_same,
        format!("report {} bytes identical: {}; synthetic identical: {synth_same}", a.len(), a == b),
    )
}

fn archival_fit() -> Outcome {
    let Some(dir) = std::env::var_os("DEMOLINK_ARCHIVE_DIR").map(PathBuf::from) else {
        return Outcome::Skip("DEMOLINK_ARCHIVE_DIR not set; archival vintages absent".into());
    };
    let (sp, pop) = (dir.join("sp500.csv"), dir.join("population.csv"));
    if !sp.exists() || !pop.exists() {
        return Outcome::Skip(format!("sp500.csv / population.csv missing under {}", dir.display()));
    }
    let cli = Cli::parse_from([
        "demolink".into(),
        "--sp500".into(),
        sp.into_os_string(),
        "--population".into(),
        pop.into_os_string(),
        "--preset".into(),
        "postcensal-n9".into(),
        "--window".into(),
        "1991-01..2001-12".into(),
        "fit".into(),
    ] as [std::ffi::OsString; 10]);
    let text = match run(&cli) {
        Ok(t) => t,
        Err(e) => return Outcome::Fail(format!("pipeline error: {e}")),
    };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let f = &v["fit"];
    let (v1, sd, mean) = (
        f["v1"].as_f64().unwrap(),
        f["residual_std"].as_f64().unwrap(),
        f["residual_mean"].as_f64().unwrap(),
    );
    let ok = (120.0..=220.0).contains(&v1) && (sd / 0.082 - 1.0).abs() <= 0.25 && (mean + 0.0003).abs() <= 0.02;
    check(ok, format!("v1 = {v1:.1}, residual std = {sd:.4}, residual mean = {mean:.4}"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("1 telescoping identity", telescoping),
        ("2 OLS exactness", ols_exactness),
        ("3 ADF Monte Carlo size", adf_size),
        ("4 ADF power", adf_power),
        ("5 DF-GLS efficiency", dfgls_efficiency),
        ("6 Johansen discrimination", johansen_discrimination),
        ("7 lag selection", lag_selection),
        ("8 scale invariance", scale_invariance),
        ("9 linkage arithmetic", arithmetic),
        ("10 determinism", determinism),
        ("11 archival fit", archival_fit),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Outcome::Pass(d) => println!("PASS criterion {name}: {d}"),
            Outcome::Skip(d) => println!("SKIP criterion {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
