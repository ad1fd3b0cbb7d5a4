use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Law of the i.i.d. centered innovations `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum InnovationLaw {
    /// `N(0, Σ)`; `cov` is a row-major d×d matrix.
    Gaussian { cov: Vec<Vec<f64>> },
    /// `E − 1/rate` with `E ~ Exp(rate)`.
    CenteredExponential { rate: f64 },
    /// `G − shape/rate` with `G ~ Gamma(shape, rate)`.
    CenteredGamma { shape: f64, rate: f64 },
    /// Uniform on `[−h, h]`.
    BoundedUniform { half_width: f64 },
    /// Finitely many atoms `(value, weight)`; weights are normalized.
    TwoSidedDiscrete { atoms: Vec<(f64, f64)> },
}

/// Angular part of a balanced regularly varying log-mgf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "zeta", rename_all = "snake_case")]
pub enum Zeta {
    Constant {
        value: f64,
    },
    /// d = 1: `ζ(+1) = plus`, `ζ(−1) = minus`.
    TwoSided {
        plus: f64,
        minus: f64,
    },
    /// `ζ(u) = u′ M u`.
    Quadratic {
        matrix: Vec<Vec<f64>>,
    },
}

/// `Λ(tλ_t)/t^β → ζ(λ)`; with `τ(t) = t^β`, `Λ^h(λ) = ζ(λ/‖λ‖)‖λ‖^β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeavyProfile {
    pub beta: f64,
    #[serde(flatten)]
    pub zeta: Zeta,
}

impl HeavyProfile {
    pub fn new(beta: f64, zeta: Zeta) -> Result<Self> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must exceed 1, got {beta}"
            )));
        }
        let ok = match &zeta {
            Zeta::Constant { value } => *value > 0.0,
            Zeta::TwoSided { plus, minus } => *plus >= 0.0 && *minus >= 0.0 && plus + minus > 0.0,
            Zeta::Quadratic { matrix } => {
                let d = matrix.len();
                d > 0 && matrix.iter().all(|r| r.len() == d)
            }
        };
        if !ok {
            return Err(Error::InvalidParameter("invalid zeta".into()));
        }
        Ok(Self { beta, zeta })
    }

    /// `ζ(u)` for a unit vector `u`.
    pub fn zeta_at(&self, u: &[f64]) -> f64 {
        match &self.zeta {
            Zeta::Constant { value } => *value,
            Zeta::TwoSided { plus, minus } => {
                if u[0] >= 0.0 {
                    *plus
                } else {
                    *minus
                }
            }
            Zeta::Quadratic { matrix } => quad_form(matrix, u),
        }
    }

    /// `Λ^h(λ)`.
    pub fn eval(&self, lambda: &[f64]) -> f64 {
        let r = norm(lambda);
        if r == 0.0 {
            return 0.0;
        }
        let u: Vec<f64> = lambda.iter().map(|x| x / r).collect();
        self.zeta_at(&u) * r.powf(self.beta)
    }

    /// Whether `ζ` is constant on the sphere (checked on `u = ±e_k` and
    /// diagonal directions for quadratic forms).
    pub fn constant_zeta(&self, dim: usize) -> Option<f64> {
        match &self.zeta {
            Zeta::Constant { value } => Some(*value),
            Zeta::TwoSided { plus, minus } => {
                if (plus - minus).abs() <= 1e-12 * plus.abs().max(1.0) {
                    Some(*plus)
                } else {
                    None
                }
            }
            Zeta::Quadratic { .. } => {
                let mut dirs = Vec::new();
                for k in 0..dim {
                    let mut e = vec![0.0; dim];
                    e[k] = 1.0;
                    dirs.push(e);
                    for j in k + 1..dim {
                        let mut e = vec![0.0; dim];
                        e[k] = std::f64::consts::FRAC_1_SQRT_2;
                        e[j] = std::f64::consts::FRAC_1_SQRT_2;
                        dirs.push(e.clone());
                        e[j] = -e[j];
                        dirs.push(e);
                    }
                }
                let v0 = self.zeta_at(&dirs[0]);
                dirs.iter()
                    .all(|u| (self.zeta_at(u) - v0).abs() <= 1e-12 * v0.abs().max(1.0))
                    .then_some(v0)
            }
        }
    }
}

/// Innovation law with precomputed factorizations.
#[derive(Debug, Clone)]
pub struct InnovationModel {
    law: InnovationLaw,
    dim: usize,
    heavy: Option<HeavyProfile>,
    chol: Option<Arc<DMatrix<f64>>>,
    cov_inv: Option<Arc<DMatrix<f64>>>,
    atoms: Vec<(f64, f64)>,
}

impl InnovationModel {
    pub fn new(law: InnovationLaw) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        let mut model = Self {
            law: law.clone(),
            dim: 1,
            heavy: None,
            chol: None,
            cov_inv: None,
            atoms: Vec::new(),
        };
        match &law {
            InnovationLaw::Gaussian { cov } => {
                let d = cov.len();
                if d == 0 || cov.iter().any(|r| r.len() != d) {
                    return bad("covariance must be a square matrix");
                }
                let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
                if (0..d).any(|i| {
                    (0..d).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * (1.0 + m[(i, j)].abs()))
                }) {
                    return bad("covariance must be symmetric");
                }
                let Some(ch) = m.clone().cholesky() else {
                    return bad("covariance must be positive definite");
                };
                model.dim = d;
                model.cov_inv = Some(Arc::new(ch.inverse()));
                model.chol = Some(Arc::new(ch.l()));
                let half: Vec<Vec<f64>> = cov
                    .iter()
                    .map(|r| r.iter().map(|x| 0.5 * x).collect())
                    .collect();
                model.heavy = Some(HeavyProfile {
                    beta: 2.0,
                    zeta: Zeta::Quadratic { matrix: half },
                });
            }
            InnovationLaw::CenteredExponential { rate } => {
                if !(*rate > 0.0) || !rate.is_finite() {
                    return bad("rate must be positive");
                }
            }
            InnovationLaw::CenteredGamma { shape, rate } => {
                if !(*shape > 0.0 && *rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
                    return bad("shape and rate must be positive");
                }
            }
            InnovationLaw::BoundedUniform { half_width } => {
                if !(*half_width > 0.0) || !half_width.is_finite() {
                    return bad("half width must be positive");
                }
            }
            InnovationLaw::TwoSidedDiscrete { atoms } => {
                if atoms.is_empty() || atoms.iter().any(|(z, w)| !z.is_finite() || !(*w >= 0.0)) {
                    return bad("atoms need finite values and nonnegative weights");
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if !(total > 0.0) {
                    return bad("atom weights must not all vanish");
                }
                let norm: Vec<(f64, f64)> = atoms
                    .iter()
                    .filter(|a| a.1 > 0.0)
                    .map(|&(z, w)| (z, w / total))
                    .collect();
                let mean: f64 = norm.iter().map(|(z, w)| z * w).sum();
                let scale = norm.iter().map(|a| a.0.abs()).fold(0.0, f64::max).max(1.0);
                if mean.abs() > 1e-12 * scale {
                    return bad("discrete innovations must be centered");
                }
                model.atoms = norm;
            }
        }
        Ok(model)
    }

    /// Standard Gaussian in d = 1 with variance `var`.
    pub fn gaussian_1d(var: f64) -> Result<Self> {
        Self::new(InnovationLaw::Gaussian {
            cov: vec![vec![var]],
        })
    }

    /// Attach a heavy profile. It is checked against `Λ(tu)/t^β` at large
    /// `t` along coordinate directions; laws whose log-mgf is infinite or
    /// of a different growth order there are rejected.
    pub fn with_heavy_profile(mut self, profile: HeavyProfile) -> Result<Self> {
        for k in 0..self.dim {
            for sgn in [1.0, -1.0] {
                let mut u = vec![0.0; self.dim];
                u[k] = sgn;
                let t = 1e4;
                let tu: Vec<f64> = u.iter().map(|x| x * t).collect();
                let ratio = self.log_mgf(&tu) / t.powf(profile.beta);
                let z = profile.zeta_at(&u);
                if !ratio.is_finite() || (ratio - z).abs() > 1e-2 * z.abs().max(1e-12) {
                    return Err(Error::InvalidParameter(format!(
                        "heavy profile inconsistent with the log-mgf along {u:?}: ratio {ratio}, zeta {z}"
                    )));
                }
            }
        }
        self.heavy = Some(profile);
        Ok(self)
    }

    pub fn law(&self) -> &InnovationLaw {
        &self.law
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn heavy_profile(&self) -> Option<&HeavyProfile> {
        self.heavy.as_ref()
    }

    /// `Σ` as a matrix.
    pub fn covariance(&self) -> DMatrix<f64> {
        match &self.law {
            InnovationLaw::Gaussian { cov } => {
                DMatrix::from_fn(self.dim, self.dim, |i, j| cov[i][j])
            }
            _ => DMatrix::from_element(1, 1, self.variance_1d()),
        }
    }

    /// `Σ^{-1}`.
    pub fn covariance_inverse(&self) -> DMatrix<f64> {
        match &self.cov_inv {
            Some(m) => (**m).clone(),
            None => DMatrix::from_element(1, 1, 1.0 / self.variance_1d()),
        }
    }

    fn variance_1d(&self) -> f64 {
        match &self.law {
            InnovationLaw::Gaussian { cov } => cov[0][0],
            InnovationLaw::CenteredExponential { rate } => 1.0 / (rate * rate),
            InnovationLaw::CenteredGamma { shape, rate } => shape / (rate * rate),
            InnovationLaw::BoundedUniform { half_width } => half_width * half_width / 3.0,
            InnovationLaw::TwoSidedDiscrete { .. } => {
                self.atoms.iter().map(|(z, w)| w * z * z).sum()
            }
        }
    }

    /// Whether the log-mgf is finite on all of ℝ^d.
    pub fn domain_is_everything(&self) -> bool {
        !matches!(
            self.law,
            InnovationLaw::CenteredExponential { .. } | InnovationLaw::CenteredGamma { .. }
        )
    }

    /// Effective domain of `Λ` in d = 1 as an open interval `(lo, hi)`.
    pub fn domain_1d(&self) -> (f64, f64) {
        match &self.law {
            InnovationLaw::CenteredExponential { rate }
            | InnovationLaw::CenteredGamma { rate, .. } => (f64::NEG_INFINITY, *rate),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn check_dim(&self, t: &[f64]) {
        debug_assert_eq!(t.len(), self.dim, "argument dimension");
    }

    /// `Λ(t) = log E e^{t·Z}`, `+∞` outside the domain.
    pub fn log_mgf(&self, t: &[f64]) -> f64 {
        self.check_dim(t);
        match &self.law {
            InnovationLaw::Gaussian { cov } => 0.5 * quad_form(cov, t),
            _ => self.log_mgf_1d(t[0]),
        }
    }

    /// Scalar shortcut for d = 1.
    pub fn log_mgf_1d(&self, t: f64) -> f64 {
        match &self.law {
            InnovationLaw::Gaussian { cov } => 0.5 * cov[0][0] * t * t,
            InnovationLaw::CenteredExponential { rate } => {
                let x = t / rate;
                if x >= 1.0 {
                    f64::INFINITY
                } else {
                    -(-x).ln_1p() - x
                }
            }
            InnovationLaw::CenteredGamma { shape, rate } => {
                let x = t / rate;
                if x >= 1.0 {
                    f64::INFINITY
                } else {
                    shape * (-(-x).ln_1p() - x)
                }
            }
            InnovationLaw::BoundedUniform { half_width } => log_sinhc(half_width * t),
            InnovationLaw::TwoSidedDiscrete { .. } => {
                if t == 0.0 {
                    return 0.0;
                }
                let m = self
                    .atoms
                    .iter()
                    .map(|(z, w)| w.ln() + t * z)
                    .fold(f64::NEG_INFINITY, f64::max);
                let s: f64 = self
                    .atoms
                    .iter()
                    .map(|(z, w)| (w.ln() + t * z - m).exp())
                    .sum();
                m + s.ln()
            }
        }
    }

    /// `∇Λ(t)`; entries are `+∞` outside the domain.
    pub fn grad_log_mgf(&self, t: &[f64]) -> Vec<f64> {
        self.check_dim(t);
        match &self.law {
            InnovationLaw::Gaussian { cov } => mat_vec(cov, t),
            _ => vec![self.grad_log_mgf_1d(t[0])],
        }
    }

    pub fn grad_log_mgf_1d(&self, t: f64) -> f64 {
        match &self.law {
            InnovationLaw::Gaussian { cov } => cov[0][0] * t,
            InnovationLaw::CenteredExponential { rate } => {
                if t >= *rate {
                    f64::INFINITY
                } else {
                    1.0 / (rate - t) - 1.0 / rate
                }
            }
            InnovationLaw::CenteredGamma { shape, rate } => {
                if t >= *rate {
                    f64::INFINITY
                } else {
                    shape / (rate - t) - shape / rate
                }
            }
            InnovationLaw::BoundedUniform { half_width } => {
                let x = half_width * t;
                half_width * coth_minus_inv(x)
            }
            InnovationLaw::TwoSidedDiscrete { .. } => {
                let m = self
                    .atoms
                    .iter()
                    .map(|(z, w)| w.ln() + t * z)
                    .fold(f64::NEG_INFINITY, f64::max);
                let (mut num, mut den) = (0.0, 0.0);
                for (z, w) in &self.atoms {
                    let e = (w.ln() + t * z - m).exp();
                    num += z * e;
                    den += e;
                }
                num / den
            }
        }
    }

    /// Second derivative in d = 1.
    pub fn hess_log_mgf_1d(&self, t: f64) -> f64 {
        match &self.law {
            InnovationLaw::Gaussian { cov } => cov[0][0],
            InnovationLaw::CenteredExponential { rate } => {
                if t >= *rate {
                    f64::INFINITY
                } else {
                    1.0 / ((rate - t) * (rate - t))
                }
            }
            InnovationLaw::CenteredGamma { shape, rate } => {
                if t >= *rate {
                    f64::INFINITY
                } else {
                    shape / ((rate - t) * (rate - t))
                }
            }
            InnovationLaw::BoundedUniform { half_width } => {
                let x = half_width * t;
                // d/dx (coth x − 1/x) = 1/x² − 1/sinh² x
                let v = if x.abs() < 1e-3 {
                    1.0 / 3.0 - x * x / 15.0
                } else if x.abs() > 40.0 {
                    1.0 / (x * x)
                } else {
                    1.0 / (x * x) - 1.0 / x.sinh().powi(2)
                };
                half_width * half_width * v
            }
            InnovationLaw::TwoSidedDiscrete { .. } => {
                let mean = self.grad_log_mgf_1d(t);
                let m = self
                    .atoms
                    .iter()
                    .map(|(z, w)| w.ln() + t * z)
                    .fold(f64::NEG_INFINITY, f64::max);
                let (mut num, mut den) = (0.0, 0.0);
                for (z, w) in &self.atoms {
                    let e = (w.ln() + t * z - m).exp();
                    num += (z - mean) * (z - mean) * e;
                    den += e;
                }
                num / den
            }
        }
    }

    /// Sampler for `Z` (with `tilt = None`) or for the exponentially
    /// tilted law `dP_θ/dP = exp(θ·Z − Λ(θ))`.
    pub fn sampler(&self, tilt: Option<&[f64]>) -> Result<InnovationSampler> {
        let theta: Vec<f64> = match tilt {
            Some(t) => {
                if t.len() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: t.len(),
                    });
                }
                if !self.log_mgf(t).is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "tilt {t:?} lies outside the log-mgf domain"
                    )));
                }
                t.to_vec()
            }
            None => vec![0.0; self.dim],
        };
        let zero = theta.iter().all(|x| *x == 0.0);
        let inner = match &self.law {
            InnovationLaw::Gaussian { cov } => SamplerKind::Gaussian {
                chol: self.chol.clone().expect("cholesky"),
                mean: if zero {
                    vec![0.0; self.dim]
                } else {
                    mat_vec(cov, &theta)
                },
            },
            InnovationLaw::CenteredExponential { rate } => SamplerKind::Exponential {
                dist: Exp::new(rate - theta[0])
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?,
                shift: 1.0 / rate,
            },
            InnovationLaw::CenteredGamma { shape, rate } => SamplerKind::Gamma {
                dist: Gamma::new(*shape, 1.0 / (rate - theta[0]))
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?,
                shift: shape / rate,
            },
            InnovationLaw::BoundedUniform { half_width } => SamplerKind::Uniform {
                h: *half_width,
                theta: theta[0],
            },
            InnovationLaw::TwoSidedDiscrete { .. } => {
                let logw: Vec<f64> = self
                    .atoms
                    .iter()
                    .map(|(z, w)| w.ln() + theta[0] * z)
                    .collect();
                let m = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = logw.iter().map(|l| (l - m).exp()).collect();
                SamplerKind::Discrete {
                    values: self.atoms.iter().map(|a| a.0).collect(),
                    index: WeightedIndex::new(weights)
                        .map_err(|e| Error::InvalidParameter(e.to_string()))?,
                }
            }
        };
        Ok(InnovationSampler {
            dim: self.dim,
            theta,
            log_mgf_theta: if zero {
                0.0
            } else {
                self.log_mgf(tilt.unwrap())
            },
            inner,
        })
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Gaussian {
        chol: Arc<DMatrix<f64>>,
        mean: Vec<f64>,
    },
    Exponential {
        dist: Exp<f64>,
        shift: f64,
    },
    Gamma {
        dist: Gamma<f64>,
        shift: f64,
    },
    Uniform {
        h: f64,
        theta: f64,
    },
    Discrete {
        values: Vec<f64>,
        index: WeightedIndex<f64>,
    },
}

/// Draws innovations, optionally under an exponential tilt.
#[derive(Debug, Clone)]
pub struct InnovationSampler {
    dim: usize,
    theta: Vec<f64>,
    log_mgf_theta: f64,
    inner: SamplerKind,
}

impl InnovationSampler {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `Λ(θ)`.
    pub fn log_mgf_theta(&self) -> f64 {
        self.log_mgf_theta
    }

    /// Log-likelihood ratio `log dP_θ/dP (z) = θ·z − Λ(θ)`.
    pub fn llr(&self, z: &[f64]) -> f64 {
        self.theta.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() - self.log_mgf_theta
    }

    /// Fill `out` (length `dim`) with one draw.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match &self.inner {
            SamplerKind::Gaussian { chol, mean } => {
                if self.dim == 1 {
                    let n: f64 = rng.sample(StandardNormal);
                    out[0] = mean[0] + chol[(0, 0)] * n;
                    return;
                }
                let z = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = &**chol * z;
                for k in 0..self.dim {
                    out[k] = mean[k] + x[k];
                }
            }
            SamplerKind::Exponential { dist, shift } => out[0] = dist.sample(rng) - shift,
            SamplerKind::Gamma { dist, shift } => out[0] = dist.sample(rng) - shift,
            SamplerKind::Uniform { h, theta } => {
                let u: f64 = rng.random();
                let x = theta * h;
                out[0] = if x.abs() < 1e-12 {
                    -h + 2.0 * h * u
                } else if *theta > 0.0 {
                    // inverse cdf of density ∝ e^{θz} on [−h, h], stable for large θh
                    h + (u + (1.0 - u) * (-2.0 * x).exp()).ln() / theta
                } else {
                    -h + (u + (1.0 - u) * (2.0 * x).exp()).ln() / theta
                };
            }
            SamplerKind::Discrete { values, index } => out[0] = values[index.sample(rng)],
        }
    }

    /// One scalar draw (d = 1).
    #[inline]
    pub fn sample_1d<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut out = [0.0];
        self.sample_into(rng, &mut out);
        out[0]
    }
}

/// `log(sinh x / x)`.
fn log_sinhc(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        let x2 = a * a;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if a < 20.0 {
        (a.sinh() / a).ln()
    } else {
        a + (-(-2.0 * a).exp()).ln_1p() - std::f64::consts::LN_2 - a.ln()
    }
}

/// `coth x − 1/x`.
fn coth_minus_inv(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        x / 3.0 - x * x * x / 45.0
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

pub(crate) fn quad_form(m: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            s += x[i] * v * x[j];
        }
    }
    s
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_models() -> Vec<InnovationModel> {
        vec![
            InnovationModel::gaussian_1d(1.0).unwrap(),
            InnovationModel::gaussian_1d(4.0).unwrap(),
            InnovationModel::new(InnovationLaw::CenteredExponential { rate: 1.0 }).unwrap(),
            InnovationModel::new(InnovationLaw::CenteredGamma {
                shape: 2.5,
                rate: 1.5,
            })
            .unwrap(),
            InnovationModel::new(InnovationLaw::BoundedUniform { half_width: 2.0 }).unwrap(),
            InnovationModel::new(InnovationLaw::TwoSidedDiscrete {
                atoms: vec![(-1.0, 2.0), (2.0, 1.0)],
            })
            .unwrap(),
        ]
    }

    #[test]
    fn closed_forms() {
        let g = InnovationModel::gaussian_1d(1.0).unwrap();
        assert_eq!(g.log_mgf(&[1.0]), 0.5);
        let e = InnovationModel::new(InnovationLaw::CenteredExponential { rate: 1.0 }).unwrap();
        assert!((e.log_mgf_1d(0.5) - (-(0.5f64).ln() - 0.5)).abs() < 1e-15);
        assert!((e.log_mgf_1d(0.5) - 0.19315).abs() < 1e-5);
        assert!(e.log_mgf_1d(1.0).is_infinite());
        for m in all_models() {
            assert_eq!(m.log_mgf(&[0.0]), 0.0);
            assert!(m.grad_log_mgf_1d(0.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_mgf_against_quadrature() {
        // E e^{t(E−1)} = ∫_0^∞ e^{t(x−1)} e^{−x} dx
        let e = InnovationModel::new(InnovationLaw::CenteredExponential { rate: 1.0 }).unwrap();
        let t = 0.5;
        let total = crate::numeric::integrate(
            |x| (t * (x - 1.0) - x).exp(),
            0.0,
            90.0,
            crate::numeric::QuadTol::tight(),
        )
        .unwrap()
        .value;
        assert!((total.ln() - e.log_mgf_1d(t)).abs() < 1e-8);
    }

    #[test]
    fn uniform_log_mgf_regimes_join() {
        let u = InnovationModel::new(InnovationLaw::BoundedUniform { half_width: 1.0 }).unwrap();
        for x in [1e-5f64, 0.5, 19.9, 20.1, 100.0] {
            let direct = if x < 700.0 {
                (x.sinh() / x).ln()
            } else {
                f64::NAN
            };
            assert!(
                (u.log_mgf_1d(x) - direct).abs() < 1e-9 * direct.abs().max(1e-8),
                "{x}"
            );
            assert_eq!(u.log_mgf_1d(-x), u.log_mgf_1d(x));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for m in all_models() {
            let (lo, hi) = m.domain_1d();
            let hi = hi.min(3.0) - 0.05;
            let lo = lo.max(-3.0);
            for k in 0..100 {
                let t = lo + (hi - lo) * (k as f64 + 0.5) / 100.0;
                let h = 1e-5 * (1.0 + t.abs());
                let fd = (m.log_mgf_1d(t + h) - m.log_mgf_1d(t - h)) / (2.0 * h);
                let an = m.grad_log_mgf_1d(t);
                assert!(
                    (fd - an).abs() <= 1e-6 * an.abs().max(1e-3),
                    "{:?} t={t}: {fd} vs {an}",
                    m.law()
                );
                let fd2 = (m.grad_log_mgf_1d(t + h) - m.grad_log_mgf_1d(t - h)) / (2.0 * h);
                let h2 = m.hess_log_mgf_1d(t);
                assert!((fd2 - h2).abs() <= 1e-5 * h2.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn rejects_uncentered_discrete() {
        let r = InnovationModel::new(InnovationLaw::TwoSidedDiscrete {
            atoms: vec![(-1.0, 1.0), (2.0, 1.0)],
        });
        assert!(r.is_err());
    }

    #[test]
    fn tilted_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        for m in all_models() {
            let (_, hi) = m.domain_1d();
            let theta = (0.5f64).min(hi * 0.5);
            let s = m.sampler(Some(&[theta])).unwrap();
            let mut acc = 0.0;
            let mut acc2 = 0.0;
            for _ in 0..n {
                let z = s.sample_1d(&mut rng);
                acc += z;
                acc2 += z * z;
            }
            let mean = acc / n as f64;
            let var = acc2 / n as f64 - mean * mean;
            let want = m.grad_log_mgf_1d(theta);
            let se = (var / n as f64).sqrt();
            assert!(
                (mean - want).abs() < 4.0 * se,
                "{:?}: {mean} vs {want}",
                m.law()
            );
        }
    }

    #[test]
    fn heavy_profile_evaluation() {
        let g = InnovationModel::gaussian_1d(1.0).unwrap();
        let h = g.heavy_profile().unwrap();
        assert_eq!(h.eval(&[3.0]), 4.5);
        assert_eq!(h.eval(&[0.0]), 0.0);
        let p = HeavyProfile::new(
            2.0,
            Zeta::Quadratic {
                matrix: vec![vec![0.5, 0.0], vec![0.0, 1.0]],
            },
        )
        .unwrap();
        assert_eq!(p.eval(&[0.0, 2.0]), 4.0);
        assert!(p.constant_zeta(2).is_none());
        assert_eq!(h.constant_zeta(1), Some(0.5));
        let e = InnovationModel::new(InnovationLaw::CenteredExponential { rate: 1.0 }).unwrap();
        assert!(e
            .with_heavy_profile(HeavyProfile::new(2.0, Zeta::Constant { value: 0.5 }).unwrap())
            .is_err());
    }

    #[test]
    fn multivariate_gaussian() {
        let m = InnovationModel::new(InnovationLaw::Gaussian {
            cov: vec![vec![2.0, 0.5], vec![0.5, 1.0]],
        })
        .unwrap();
        assert_eq!(m.dim(), 2);
        let t = [1.0, -1.0];
        assert!((m.log_mgf(&t) - 0.5 * (2.0 - 1.0 + 1.0)).abs() < 1e-15);
        assert_eq!(m.grad_log_mgf(&t), vec![1.5, -0.5]);
        let inv = m.covariance_inverse();
        let prod = m.covariance() * inv;
        assert!((prod - DMatrix::identity(2, 2)).norm() < 1e-12);
    }
}
