//! Transform-level objects: `Λ`, Legendre transforms, `Λ_α`, `C_{α,β}`,
//! `Λ^h`, `G_Σ`, the regions `Π`/`Π_α` and the regime speeds.

pub mod kernel;
pub mod lambda;
pub mod legendre;
pub mod mgfsum;
pub mod pi;

pub use kernel::{kernel_integral, KernelG};
pub use lambda::{lambda_alpha, lambda_h, log_mgf, GaussianPart, HeavyFn, LambdaAlpha, Scaled};
pub use legendre::{half_line_dual, legendre, ConjugateResult, ConvexFunction, FnConvex, Region};
pub use mgfsum::{finite_n_mgf_sum, partial_sum_log_mgf};
pub use pi::{pi_region, PiRegion};

use serde::Serialize;

use crate::model::RegimeSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Speed {
    pub b: f64,
    /// `c_n` for S4/R4.
    pub c: Option<f64>,
}

/// `b_n` (and `c_n` where the regime has one).
pub fn speed_sequence(reg: &RegimeSpec, n: u64) -> Speed {
    Speed {
        b: reg.b(n),
        c: reg.c(n),
    }
}
