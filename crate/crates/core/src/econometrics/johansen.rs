//! Johansen maximum-likelihood trace test for cointegration rank.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::critical::{trace_critical_5pct, JohansenTrend, MAX_JOHANSEN_DIM};
use super::linalg::{least_squares, ln_det_spd};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenReport {
    pub trend: JohansenTrend,
    /// Lag order of the levels VAR; the VECM carries `lag - 1` differences.
    pub lag: usize,
    pub n_obs: usize,
    /// Squared canonical correlations, descending.
    pub eigenvalues: Vec<f64>,
    /// Trace statistic for `H0: rank <= r`, indexed by `r`.
    pub trace_stats: Vec<f64>,
    pub critical_5pct: Vec<f64>,
    pub selected_rank: usize,
    /// Per rank `0..=k`.
    pub log_likelihood: Vec<f64>,
    pub sbic: Vec<f64>,
    pub hqic: Vec<f64>,
}

/// Product moments of the reduced-rank regression.
pub(crate) struct MomentMatrices {
    pub s00: DMatrix<f64>,
    pub s01: DMatrix<f64>,
    pub s11: DMatrix<f64>,
    /// Residuals of `ΔY_t` and of the level block after partialling out.
    #[cfg_attr(not(test), allow(dead_code))]
    pub r0: DMatrix<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub r1: DMatrix<f64>,
}

/// Builds `ΔY_t`, the level block `Y_{t-1}` (plus a restricted constant)
/// and the short-run block, partials the latter out of the first two and
/// forms the moment matrices.
pub(crate) fn moment_matrices(
    data: &[Vec<f64>],
    lag: usize,
    trend: JohansenTrend,
) -> Result<MomentMatrices> {
    let k = data.len();
    let n = data[0].len();
    let rows: Vec<usize> = (lag..n).collect();
    let t_obs = rows.len();
    let diff = |i: usize, t: usize| data[i][t] - data[i][t - 1];

    let z0 = DMatrix::from_fn(t_obs, k, |r, i| diff(i, rows[r]));
    let level_cols = k + usize::from(trend == JohansenTrend::Rconstant);
    let z1 = DMatrix::from_fn(t_obs, level_cols, |r, i| {
        if i < k {
            data[i][rows[r] - 1]
        } else {
            1.0
        }
    });
    let short_cols = k * (lag - 1) + usize::from(trend == JohansenTrend::Constant);
    let z2 = DMatrix::from_fn(t_obs, short_cols, |r, c| {
        if c < k * (lag - 1) {
            let (j, i) = (c / k + 1, c % k);
            diff(i, rows[r] - j)
        } else {
            1.0
        }
    });

    let (r0, r1) = if short_cols == 0 {
        (z0, z1)
    } else {
        (
            least_squares(&z2, &z0)?.residuals,
            least_squares(&z2, &z1)?.residuals,
        )
    };
    let t = t_obs as f64;
    Ok(MomentMatrices {
        s00: r0.transpose() * &r0 / t,
        s01: r0.transpose() * &r1 / t,
        s11: r1.transpose() * &r1 / t,
        r0,
        r1,
    })
}

fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

/// Eigenvalues of `S11^-1 S10 S00^-1 S01`, computed as the symmetric problem
/// `L^-1 S10 S00^-1 S01 L^-T` with `S11 = L L'`. Descending order.
pub(crate) fn canonical_eigenvalues(m: &MomentMatrices) -> Result<Vec<f64>> {
    let chol11 = m.s11.clone().cholesky().ok_or_else(|| {
        Error::Eigen(format!(
            "S11 (level moments) is not positive definite, condition ~ {:.3e}",
            condition_estimate(&m.s11)
        ))
    })?;
    let chol00 = m.s00.clone().cholesky().ok_or_else(|| {
        Error::Eigen(format!(
            "S00 (difference moments) is not positive definite, condition ~ {:.3e}",
            condition_estimate(&m.s00)
        ))
    })?;
    let l = chol11.l();
    let s10 = m.s01.transpose();
    // C = L^-1 S10, then A = C S00^-1 C'
    let c = l
        .solve_lower_triangular(&s10)
        .ok_or_else(|| Error::Eigen("triangular solve against S11 failed".into()))?;
    let a = &c * chol00.solve(&c.transpose());
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Trace test for the number of cointegrating relations in `data` (one
/// series per variable) using a levels VAR of order `lag >= 1`.
pub fn johansen(data: &[Vec<f64>], lag: usize, trend: JohansenTrend) -> Result<JohansenReport> {
    let k = data.len();
    if !(1..=MAX_JOHANSEN_DIM).contains(&k) {
        return Err(Error::Spec(format!(
            "Johansen test supports 1..={MAX_JOHANSEN_DIM} variables, got {k}"
        )));
    }
    if lag == 0 {
        return Err(Error::Spec("Johansen lag must be at least 1".into()));
    }
    let n = data[0].len();
    if let Some(bad) = data.iter().find(|c| c.len() != n) {
        return Err(Error::Length {
            len: bad.len(),
            required: n,
        });
    }
    let required = (k * lag + 4).max(2 * lag + 5);
    if n < required {
        return Err(Error::Length { len: n, required });
    }

    let m = moment_matrices(data, lag, trend)?;
    let t = (n - lag) as f64;
    let eigenvalues: Vec<f64> = canonical_eigenvalues(&m)?
        .into_iter()
        .take(k)
        .map(|v| v.max(0.0))
        .collect();
    if let Some(v) = eigenvalues.iter().find(|&&v| v >= 1.0) {
        return Err(Error::Eigen(format!(
            "eigenvalue {v} outside [0, 1); moment matrices are degenerate"
        )));
    }

    let log_terms: Vec<f64> = eigenvalues.iter().map(|l| (1.0 - l).ln()).collect();
    let trace_stats: Vec<f64> = (0..k)
        .map(|r| -t * log_terms[r..].iter().sum::<f64>())
        .collect();
    let critical_5pct: Vec<f64> = (0..k).map(|r| trace_critical_5pct(trend, k, r)).collect();
    let selected_rank = (0..k)
        .find(|&r| trace_stats[r] < critical_5pct[r])
        .unwrap_or(k);

    let ln_det00 = ln_det_spd(&m.s00, "S00")?;
    let kf = k as f64;
    let base = kf * (1.0 + (2.0 * PI).ln()) + ln_det00;
    let mut log_likelihood = Vec::with_capacity(k + 1);
    let mut sbic = Vec::with_capacity(k + 1);
    let mut hqic = Vec::with_capacity(k + 1);
    for r in 0..=k {
        let ll = -0.5 * t * (base + log_terms[..r].iter().sum::<f64>());
        let rf = r as f64;
        let deterministic = match trend {
            JohansenTrend::None => 0.0,
            JohansenTrend::Rconstant => rf,
            JohansenTrend::Constant => kf,
        };
        let params = kf * kf * (lag as f64 - 1.0) + rf * (2.0 * kf - rf) + deterministic;
        log_likelihood.push(ll);
        sbic.push(-2.0 * ll / t + t.ln() * params / t);
        hqic.push(-2.0 * ll / t + 2.0 * t.ln().ln() * params / t);
    }

    Ok(JohansenReport {
        trend,
        lag,
        n_obs: n - lag,
        eigenvalues,
        trace_stats,
        critical_5pct,
        selected_rank,
        log_likelihood,
        sbic,
        hqic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::Lcg;

    fn random_walk(rng: &mut Lcg, n: usize) -> Vec<f64> {
        let mut x = 0.0;
        (0..n)
            .map(|_| {
                x += rng.normal();
                x
            })
            .collect()
    }

    fn cointegrated(rng: &mut Lcg, n: usize) -> Vec<Vec<f64>> {
        let x = random_walk(rng, n);
        let mut u = 0.0;
        let y = x
            .iter()
            .map(|v| {
                u = 0.5 * u + rng.normal();
                v + u
            })
            .collect();
        vec![x, y]
    }

    /// Canonical correlations from orthonormal bases of the residual blocks:
    /// singular values of `Q0' Q1`.
    fn qr_canonical(m: &MomentMatrices) -> Vec<f64> {
        let q0 = m.r0.clone().qr().q();
        let q1 = m.r1.clone().qr().q();
        let mut s: Vec<f64> = (q0.transpose() * q1)
            .singular_values()
            .iter()
            .map(|v| v * v)
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    #[test]
    fn eigenvalues_match_qr_svd_route() {
        let mut rng = Lcg::new(14);
        for trend in [JohansenTrend::None, JohansenTrend::Rconstant, JohansenTrend::Constant] {
            let data = cointegrated(&mut rng, 150);
            let m = moment_matrices(&data, 3, trend).unwrap();
            let a = canonical_eigenvalues(&m).unwrap();
            let b = qr_canonical(&m);
            for i in 0..2 {
                assert!((a[i] - b[i]).abs() < 1e-10, "{trend}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn report_invariants() {
        let mut rng = Lcg::new(2);
        let data = cointegrated(&mut rng, 207);
        let r = johansen(&data, 3, JohansenTrend::Constant).unwrap();
        assert!(r.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(r.eigenvalues.iter().all(|&l| (0.0..1.0).contains(&l)));
        assert!(r.trace_stats.windows(2).all(|w| w[0] >= w[1]));
        assert!(r.trace_stats.iter().all(|&s| s >= 0.0));
        let t = r.n_obs as f64;
        for rank in 0..2 {
            let expect: f64 = -t * r.eigenvalues[rank..].iter().map(|l| (1.0 - l).ln()).sum::<f64>();
            assert!((r.trace_stats[rank] - expect).abs() < 1e-9);
        }
        let first_accept = (0..2).find(|&q| r.trace_stats[q] < r.critical_5pct[q]).unwrap_or(2);
        assert_eq!(r.selected_rank, first_accept);
        assert_eq!(r.sbic.len(), 3);
        assert_eq!(r.n_obs, 204);
    }

    #[test]
    fn discriminates_rank() {
        let mut rng = Lcg::new(3);
        let data = cointegrated(&mut rng, 207);
        assert_eq!(johansen(&data, 2, JohansenTrend::Rconstant).unwrap().selected_rank, 1);
        let indep = vec![random_walk(&mut rng, 207), random_walk(&mut rng, 207)];
        assert_eq!(johansen(&indep, 2, JohansenTrend::Rconstant).unwrap().selected_rank, 0);
    }

    #[test]
    fn log_likelihood_rises_with_rank() {
        let mut rng = Lcg::new(5);
        let data = cointegrated(&mut rng, 120);
        let r = johansen(&data, 2, JohansenTrend::None).unwrap();
        assert!(r.log_likelihood.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn degenerate_input_is_diagnosed() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let data = vec![x.clone(), x];
        match johansen(&data, 2, JohansenTrend::Constant) {
            Err(Error::Eigen(msg)) => assert!(msg.contains("S11") || msg.contains("S00"), "{msg}"),
            Err(Error::Singular(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn argument_checks() {
        let data = vec![vec![0.0; 10], vec![0.0; 10]];
        assert!(johansen(&data, 0, JohansenTrend::None).is_err());
        assert!(matches!(johansen(&data, 4, JohansenTrend::None), Err(Error::Length { .. })));
    }
}
