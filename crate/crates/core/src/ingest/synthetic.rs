//! Seeded synthetic series.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, with Gaussian shocks drawn by the
//! `rand_distr` ziggurat `StandardNormal`. Both are specified bit-for-bit by
//! their crates, so equal specs give equal output everywhere. Shocks are drawn
//! in time order, and within a step in variable order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MIN_LENGTH: usize = 10;
const VAR_BURN_IN: usize = 100;
const PAIR_AR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticKind {
    RandomWalk,
    Ar1 {
        phi: f64,
    },
    WhiteNoise,
    /// `x` is a random walk with scale `sigma`; `y = x + u` with
    /// `u_t = 0.5 u_{t-1} + noise_sigma * e_t`.
    CointegratedPair {
        noise_sigma: f64,
    },
    /// `coefficients[j]` is the k×k matrix on lag `j + 1`, row = equation.
    VarP {
        coefficients: Vec<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(flatten)]
    pub kind: SyntheticKind,
    pub length: usize,
    pub seed: u64,
    #[serde(default = "unit_sigma")]
    pub sigma: f64,
}

fn unit_sigma() -> f64 {
    1.0
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, length: usize, seed: u64) -> Self {
        Self {
            kind,
            length,
            seed,
            sigma: 1.0,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < MIN_LENGTH {
            return Err(Error::Spec(format!(
                "synthetic length {} is below {MIN_LENGTH}",
                self.length
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Spec(format!("sigma must be positive, got {}", self.sigma)));
        }
        match &self.kind {
            SyntheticKind::Ar1 { phi } if !(phi.abs() < 1.0) => {
                Err(Error::Spec(format!("ar1 needs |phi| < 1, got {phi}")))
            }
            SyntheticKind::CointegratedPair { noise_sigma } if !(*noise_sigma > 0.0 && noise_sigma.is_finite()) => {
                Err(Error::Spec(format!("noise_sigma must be positive, got {noise_sigma}")))
            }
            SyntheticKind::VarP { coefficients } => {
                let k = coefficients
                    .first()
                    .map(|a| a.len())
                    .ok_or_else(|| Error::Spec("var_p needs at least one coefficient matrix".into()))?;
                let square = coefficients
                    .iter()
                    .all(|a| a.len() == k && a.iter().all(|row| row.len() == k));
                if k == 0 || !square {
                    return Err(Error::Spec("var_p coefficient matrices must all be k×k with k ≥ 1".into()));
                }
                if coefficients.iter().flatten().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::Spec("var_p coefficients must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of variables produced.
    pub fn dimension(&self) -> usize {
        match &self.kind {
            SyntheticKind::CointegratedPair { .. } => 2,
            SyntheticKind::VarP { coefficients } => coefficients.first().map_or(0, |a| a.len()),
            _ => 1,
        }
    }
}

/// One series per variable, each of `spec.length` observations.
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut z = move || -> f64 { rng.sample(StandardNormal) };
    let (n, s) = (spec.length, spec.sigma);
    let out = match &spec.kind {
        SyntheticKind::WhiteNoise => vec![(0..n).map(|_| s * z()).collect()],
        SyntheticKind::RandomWalk => {
            let mut level = 0.0;
            vec![(0..n)
                .map(|_| {
                    level += s * z();
                    level
                })
                .collect()]
        }
        SyntheticKind::Ar1 { phi } => {
            // start from the stationary distribution
            let mut x = s * z() / (1.0 - phi * phi).sqrt();
            let mut out = Vec::with_capacity(n);
            out.push(x);
            for _ in 1..n {
                x = phi * x + s * z();
                out.push(x);
            }
            vec![out]
        }
        SyntheticKind::CointegratedPair { noise_sigma } => {
            let mut x = 0.0;
            let mut u = noise_sigma * z() / (1.0 - PAIR_AR * PAIR_AR).sqrt();
            let mut xs = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            for t in 0..n {
                x += s * z();
                if t > 0 {
                    u = PAIR_AR * u + noise_sigma * z();
                }
                xs.push(x);
                ys.push(x + u);
            }
            vec![xs, ys]
        }
        SyntheticKind::VarP { coefficients } => {
            let k = coefficients[0].len();
            let p = coefficients.len();
            let total = VAR_BURN_IN + n;
            let mut path: Vec<Vec<f64>> = Vec::with_capacity(total);
            for t in 0..total {
                let mut next: Vec<f64> = (0..k).map(|_| s * z()).collect();
                for (j, a) in coefficients.iter().enumerate().take(t.min(p)) {
                    let prev = &path[t - 1 - j];
                    for (i, row) in a.iter().enumerate() {
                        next[i] += row.iter().zip(prev).map(|(c, v)| c * v).sum::<f64>();
                    }
                }
                if next.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Spec("var_p simulation diverged".into()));
                }
                path.push(next);
            }
            (0..k)
                .map(|i| path[VAR_BURN_IN..].iter().map(|row| row[i]).collect())
                .collect()
        }
    };
    Ok(out)
}
