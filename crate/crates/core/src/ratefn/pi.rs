//! The tilt regions `Π` (short memory) and `Π_α` (long memory) in d = 1.
//!
//! `λ ∈ Π` iff `Λ(λ φ_{i,n})` stays bounded over all `i` and all large `n`.
//! The partial sums `φ_{i,n}` accumulate, as `n → ∞`, exactly on the values
//! between `M⁻` and `M⁺` below, so `Π = {λ : λM⁺, λM⁻ ∈ 𝓕_Λ°}`. For
//! balanced power coefficients `sup_i φ_{i,n}/Ψ_n` tends to `max g`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoefficientFamily, CoefficientKind, InnovationModel, Memory};

use super::kernel::KernelG;

/// Horizon of the finite-n diagnostic scan.
pub const PI_SCAN_N: u64 = 10_000;

#[derive(Debug, Clone, Serialize)]
pub struct PiRegion {
    /// `Π` is the open interval `(lower, upper)`.
    pub lower: f64,
    pub upper: f64,
    /// `λ* = sup Π` (equals `upper`).
    pub lambda_star: f64,
    /// Limit points of the (normalized) partial sums.
    pub m_plus: f64,
    pub m_minus: f64,
    /// `sup_i` of the normalized partial sums at `n = PI_SCAN_N`.
    pub scan_sup: f64,
    /// `|scan_sup − m_plus|`: how far the finite scan is from the limit.
    pub margin: f64,
}

impl PiRegion {
    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.lower && lambda < self.upper
    }
}

/// `Π` (short memory) or `Π_α` (long memory) for a one-dimensional model.
pub fn pi_region(fam: &CoefficientFamily, model: &InnovationModel) -> Result<PiRegion> {
    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension(model.dim()));
    }
    let (lo, hi) = model.domain_1d();
    let (m_plus, m_minus, scan_sup) = match fam.memory() {
        Memory::Short => {
            let (sup_p, inf_p) = prefix_range(fam);
            let s = fam.sum();
            let mp = sup_p.max(s - inf_p);
            let mm = inf_p.min(s - sup_p);
            (mp, mm, short_scan(fam, PI_SCAN_N))
        }
        Memory::Long => {
            let (alpha, p) = fam.long_memory_params().unwrap();
            let kappa = KernelG::new(alpha, p)?.max_value();
            (kappa, 0.0, long_scan(fam, PI_SCAN_N))
        }
    };
    // Π = {λ : λM± ∈ (lo, hi)}
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for m in [m_plus, m_minus] {
        if m > 0.0 {
            upper = upper.min(hi / m);
            lower = lower.max(lo / m);
        } else if m < 0.0 {
            upper = upper.min(lo / m);
            lower = lower.max(hi / m);
        }
    }
    if let Some((alpha, p)) = fam.long_memory_params() {
        // Π_α additionally asks (p ∧ q)λ ∈ 𝓕_Λ°
        let pq = if alpha < 1.0 { p.min(1.0 - p) } else { 1.0 };
        if pq > 0.0 {
            upper = upper.min(hi / pq);
            lower = lower.max(lo / pq);
        }
    }
    Ok(PiRegion {
        lower,
        upper,
        lambda_star: upper,
        m_plus,
        m_minus,
        scan_sup,
        margin: (scan_sup - m_plus).abs(),
    })
}

/// `(sup_b P(b), inf_b P(b))` for `P(b) = Σ_{k≤b} φ_k`, including the limits
/// `0` and `Σφ`.
fn prefix_range(fam: &CoefficientFamily) -> (f64, f64) {
    let s = fam.sum();
    match fam.kind() {
        CoefficientKind::FiniteLag { lags } => {
            let mut acc = 0.0;
            let (mut hi, mut lo) = (0.0f64, 0.0f64);
            let mut sorted = lags.clone();
            sorted.sort_by_key(|x| x.0);
            for (_, v) in sorted {
                acc += v;
                hi = hi.max(acc);
                lo = lo.min(acc);
            }
            (hi.max(s), lo.min(s))
        }
        // one-signed coefficients: P is monotone between 0 and Σφ
        _ => (s.max(0.0), s.min(0.0)),
    }
}

fn short_scan(fam: &CoefficientFamily, n: u64) -> f64 {
    let (slo, shi) = fam.support();
    let lo = slo.unwrap_or(0) - n as i64;
    let hi = shi.unwrap_or(n as i64);
    (lo..=hi)
        .map(|i| fam.partial_sum(i, n))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn long_scan(fam: &CoefficientFamily, n: u64) -> f64 {
    let psi = fam.psi_sum(n).unwrap();
    // the maximizing window straddles the origin
    (-(n as i64)..=0)
        .map(|i| fam.partial_sum(i, n) / psi)
        .fold(f64::NEG_INFINITY, f64::max)
}
