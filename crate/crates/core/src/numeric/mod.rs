//! Numerical building blocks: quadrature, 1-d optimization, compensated
//! summation and power-series prefix sums.

pub mod optim;
pub mod powersum;
pub mod quad;
pub mod sum;

pub use optim::{bisect, golden_min, log_grid_max, log_grid_min, positive_root_from};
pub use quad::{integrate, integrate_power_tail, QuadResult, QuadTol};
pub use sum::CompensatedSum;

/// Relative difference `|a − b| / max(|a|, |b|, tiny)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() / scale
}
