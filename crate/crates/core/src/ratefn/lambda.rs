//! The transforms entering the rate functions: `Λ`, `G_Σ`, `Λ^h`, `Λ_α`.

use crate::error::{Error, Result};
use crate::model::{HeavyProfile, InnovationModel};
use crate::numeric::QuadTol;

use super::kernel::KernelG;
use super::legendre::ConvexFunction;

impl ConvexFunction for InnovationModel {
    fn dim(&self) -> usize {
        InnovationModel::dim(self)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.log_mgf(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.grad_log_mgf(x))
    }
}

/// `Λ(t)`, `+∞` outside the domain.
pub fn log_mgf(model: &InnovationModel, t: &[f64]) -> f64 {
    model.log_mgf(t)
}

/// `G_Σ(λ) = ½ λ′Σλ` with `Σ` the covariance of the innovations.
#[derive(Debug, Clone)]
pub struct GaussianPart {
    cov: Vec<Vec<f64>>,
}

impl GaussianPart {
    pub fn of(model: &InnovationModel) -> Self {
        let c = model.covariance();
        let d = c.nrows();
        Self {
            cov: (0..d)
                .map(|i| (0..d).map(|j| c[(i, j)]).collect())
                .collect(),
        }
    }
}

impl ConvexFunction for GaussianPart {
    fn dim(&self) -> usize {
        self.cov.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * crate::model::innovation::quad_form(&self.cov, x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(
            self.cov
                .iter()
                .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }
}

/// `Λ^h(λ) = ζ(λ/‖λ‖)‖λ‖^β`.
pub fn lambda_h(model: &InnovationModel, lambda: &[f64]) -> Result<f64> {
    let h = model.heavy_profile().ok_or(Error::MissingHeavyProfile)?;
    Ok(h.eval(lambda))
}

/// `scale · Λ^h`.
#[derive(Debug, Clone)]
pub struct HeavyFn {
    pub profile: HeavyProfile,
    pub dim: usize,
    pub scale: f64,
}

impl ConvexFunction for HeavyFn {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.scale * self.profile.eval(x)
    }
}

/// `c · f`.
pub struct Scaled<F> {
    pub inner: F,
    pub scale: f64,
}

impl<F: ConvexFunction> ConvexFunction for Scaled<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.scale * self.inner.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.inner
            .gradient(x)
            .map(|g| g.into_iter().map(|v| v * self.scale).collect())
    }
}

/// `Λ_α(λ) = ∫ Λ(λ g(x)) dx` (`Λ` itself for `α = 1`).
pub fn lambda_alpha(model: &InnovationModel, kern: &KernelG, lambda: &[f64]) -> Result<f64> {
    if lambda.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    if kern.alpha == 1.0 {
        return Ok(model.log_mgf(lambda));
    }
    kern.integrate(
        |s| {
            if lambda.len() == 1 {
                return model.log_mgf_1d(s * lambda[0]);
            }
            let t: Vec<f64> = lambda.iter().map(|l| s * l).collect();
            model.log_mgf(&t)
        },
        2.0 * kern.alpha,
        QuadTol::default(),
    )
}

/// `Λ_α` as a convex function (gradient by quadrature in d = 1).
#[derive(Debug, Clone)]
pub struct LambdaAlpha {
    pub model: InnovationModel,
    pub kern: KernelG,
}

impl ConvexFunction for LambdaAlpha {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        lambda_alpha(&self.model, &self.kern, x).unwrap_or(f64::NAN)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        if self.model.dim() != 1 {
            return None;
        }
        if self.kern.alpha == 1.0 {
            return Some(vec![self.model.grad_log_mgf_1d(x[0])]);
        }
        let l = x[0];
        let m = &self.model;
        self.kern
            .integrate(
                |s| s * m.grad_log_mgf_1d(s * l),
                2.0 * self.kern.alpha,
                QuadTol::default(),
            )
            .ok()
            .map(|v| vec![v])
    }
}
