//! Truncated moving-average sample paths.

mod conv;
pub mod dump;
mod rng;
mod stream;

pub use dump::{read_mapath, write_mapath, MapathHeader};
pub use rng::{InnovationSource, BLOCK};
pub use stream::PathStream;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    CoefficientFamily, InnovationModel, Memory, RegimeSpec, RegimeTag, TruncatedCoefficients,
};

/// Tail mass below which short-memory coefficients are dropped.
pub const SHORT_TRUNCATION_EPS: f64 = 1e-8;
/// Largest lag tried for short memory.
pub const SHORT_MAX_LAG: u64 = 1_000_000;
/// Lag used for long memory.
pub const LONG_LAG: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct PathConfig {
    pub m: usize,
    /// Truncation lag `L`: lags outside `[−L, L]` are dropped.
    pub lag: u64,
    pub seed: u64,
    pub path_index: u64,
    pub regime: Option<RegimeTag>,
    pub mu: Vec<f64>,
    pub family: CoefficientFamily,
    pub model: InnovationModel,
}

impl PathConfig {
    /// Config with the default truncation lag for `family`.
    pub fn new(family: CoefficientFamily, model: InnovationModel, m: usize, seed: u64) -> Self {
        let lag = default_lag(&family);
        let d = model.dim();
        Self {
            m,
            lag,
            seed,
            path_index: 0,
            regime: None,
            mu: vec![0.0; d],
            family,
            model,
        }
    }

    pub fn with_lag(mut self, lag: u64) -> Self {
        self.lag = lag.max(1);
        self
    }

    pub fn with_path(mut self, path_index: u64) -> Self {
        self.path_index = path_index;
        self
    }

    pub fn with_mu(mut self, mu: Vec<f64>) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_regime(mut self, tag: RegimeTag) -> Self {
        self.regime = Some(tag);
        self
    }

    pub fn truncation_error(&self) -> f64 {
        self.family.truncation_error(self.lag, self.m as u64)
    }

    pub fn coefficients(&self) -> TruncatedCoefficients {
        self.family.truncated(self.lag)
    }

    /// Stream of the same path, generated step by step.
    pub fn stream(&self, tilt: Option<&[f64]>) -> Result<PathStream> {
        if tilt.is_some() {
            check_tiltable(&self.family)?;
        }
        let src = InnovationSource::new(self.model.sampler(tilt)?, self.seed, self.path_index);
        Ok(PathStream::new(&self.coefficients(), src))
    }
}

/// Short memory: smallest `L` with `Σ_{|i|>L}|φ_i| < 1e-8`. Long memory:
/// `L = 10^4`.
pub fn default_lag(family: &CoefficientFamily) -> u64 {
    family
        .default_truncation(SHORT_TRUNCATION_EPS, SHORT_MAX_LAG, LONG_LAG)
        .max(1)
}

/// One simulated path with `S_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub dim: usize,
    /// `X_1, …, X_m`, row-major.
    pub x: Vec<f64>,
    /// `S_0, …, S_m`, row-major.
    pub s: Vec<f64>,
    pub seed: u64,
    pub path_index: u64,
    pub lag: u64,
    pub tau_err: f64,
}

impl Path {
    /// Path with the given increments.
    pub fn from_increments(x: Vec<f64>, dim: usize) -> Self {
        let m = x.len() / dim;
        let mut s = vec![0.0; (m + 1) * dim];
        for n in 0..m {
            for k in 0..dim {
                s[(n + 1) * dim + k] = s[n * dim + k] + x[n * dim + k];
            }
        }
        Self {
            dim,
            x,
            s,
            seed: 0,
            path_index: 0,
            lag: 0,
            tau_err: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `X_n`, `1 ≤ n ≤ m`.
    pub fn x_at(&self, n: usize) -> &[f64] {
        &self.x[(n - 1) * self.dim..n * self.dim]
    }

    /// `S_n`, `0 ≤ n ≤ m`.
    pub fn s_at(&self, n: usize) -> &[f64] {
        &self.s[n * self.dim..(n + 1) * self.dim]
    }

    /// `Y_n = S_n − a_n μ`.
    pub fn y_at(&self, n: usize, reg: &RegimeSpec, mu: &[f64]) -> Vec<f64> {
        let an = if n == 0 { 0.0 } else { reg.a(n as u64) };
        self.s_at(n)
            .iter()
            .zip(mu)
            .map(|(s, m)| s - an * m)
            .collect()
    }

    /// `v·S_0, …, v·S_m`.
    pub fn projected_sums(&self, v: &[f64]) -> Vec<f64> {
        if self.dim == 1 {
            return self.s.iter().map(|s| s * v[0]).collect();
        }
        self.s
            .chunks(self.dim)
            .map(|s| s.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn check_tiltable(family: &CoefficientFamily) -> Result<()> {
    if family.memory() == Memory::Long {
        return Err(Error::UnsupportedFamily(
            "tilting is offered for short-memory families only".into(),
        ));
    }
    Ok(())
}

fn generate(cfg: &PathConfig, tilt: Option<&[f64]>) -> Result<(Path, Vec<f64>)> {
    let coeffs = cfg.coefficients();
    let sampler = cfg.model.sampler(tilt)?;
    let d = sampler.dim();
    let len = coeffs.values.len();
    let m = cfg.m;
    let mut src = InnovationSource::new(sampler, cfg.seed, cfg.path_index);
    let first = 1 - coeffs.hi();
    let mut z = vec![0.0; (m + len - 1) * d];
    src.fill(first, &mut z);
    let mut x = vec![0.0; m * d];
    if m > 0 {
        conv::moving_window(&coeffs.values, &z, d, &mut x);
    }
    let mut llr = vec![0.0; m + 1];
    if tilt.is_some_and(|t| t.iter().any(|v| *v != 0.0)) && m > 0 {
        let s = src.sampler();
        // S_1 depends on Z_{1−hi} .. Z_{1−lo}, the first len innovations
        let mut acc: f64 = z[..len * d].chunks(d).map(|zj| s.llr(zj)).sum();
        llr[1] = acc;
        for n in 2..=m {
            let j = n + len - 2;
            acc += s.llr(&z[j * d..(j + 1) * d]);
            llr[n] = acc;
        }
    }
    let mut path = Path::from_increments(x, d);
    path.seed = cfg.seed;
    path.path_index = cfg.path_index;
    path.lag = cfg.lag;
    path.tau_err = cfg.truncation_error();
    Ok((path, llr))
}

/// `X_n = Σ_{|i|≤L} φ_i Z_{n−i}` for `n = 1, …, m`.
pub fn sample_path(cfg: &PathConfig) -> Result<Path> {
    Ok(generate(cfg, None)?.0)
}

/// Path under the tilted innovation law `dP_θ/dP = exp(θ·Z − Λ(θ))`,
/// with `llr[n]` the log-likelihood ratio of every innovation that
/// `S_1, …, S_n` depend on (`llr[0] = 0`).
pub fn tilted_sample_path(cfg: &PathConfig, theta: &[f64]) -> Result<(Path, Vec<f64>)> {
    check_tiltable(&cfg.family)?;
    generate(cfg, Some(theta))
}

/// Paths `first, …, first + count − 1`, generated in parallel.
pub fn sample_paths(cfg: &PathConfig, first: u64, count: usize) -> Result<Vec<Path>> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| sample_path(&cfg.clone().with_path(first + k)))
        .collect()
}
