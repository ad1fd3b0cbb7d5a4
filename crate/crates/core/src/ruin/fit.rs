//! Least-squares decay slopes of `log ρ̂(u)`.

use serde::Serialize;

use super::RuinEstimate;
use crate::error::{Error, Result};
use crate::model::RegimeSpec;

/// Largest relative standard error of a point used in a fit.
pub const MAX_REL_SE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_points: usize,
    pub u: Vec<f64>,
    pub regressor: Vec<f64>,
    pub log_rho: Vec<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// `lower ≤ slope ≤ upper` when a bracket was supplied.
    pub inside: Option<bool>,
}

/// Slope of `log ρ̂(u)` against `b_{a^←(u)}`.
pub fn ruin_decay_fit(
    estimates: &[RuinEstimate],
    reg: &RegimeSpec,
    bracket: Option<(f64, f64)>,
) -> Result<DecayFit> {
    ruin_decay_fit_with(estimates, |u| reg.b(reg.a_inverse(u)), bracket)
}

/// Slope of `log ρ̂(u)` against an arbitrary regressor `x(u)`.
pub fn ruin_decay_fit_with<F: Fn(f64) -> f64>(
    estimates: &[RuinEstimate],
    regressor: F,
    bracket: Option<(f64, f64)>,
) -> Result<DecayFit> {
    let mut pts: Vec<&RuinEstimate> = estimates
        .iter()
        .filter(|e| e.rho_hat > 0.0 && e.se / e.rho_hat < MAX_REL_SE)
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} usable grid points, need 4 with relative s.e. below {MAX_REL_SE}",
            pts.len()
        )));
    }
    pts.sort_by(|a, b| a.u.total_cmp(&b.u));
    let u: Vec<f64> = pts.iter().map(|e| e.u).collect();
    let x: Vec<f64> = u.iter().map(|&v| regressor(v)).collect();
    let y: Vec<f64> = pts.iter().map(|e| e.rho_hat.ln()).collect();
    let k = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / k, y.iter().sum::<f64>() / k);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData(
            "regressor takes a single value".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    let (lower, upper) = bracket.map_or((None, None), |(l, h)| (Some(l), Some(h)));
    Ok(DecayFit {
        slope,
        intercept,
        r2,
        n_points: x.len(),
        u,
        regressor: x,
        log_rho: y,
        lower,
        upper,
        inside: bracket.map(|(l, h)| l <= slope && slope <= h),
    })
}
