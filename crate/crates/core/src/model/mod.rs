//! Coefficients, innovations, target sets and regimes.

pub mod coefficients;
pub mod innovation;
pub mod regime;
pub mod target;

pub use coefficients::{CoefficientFamily, CoefficientKind, Memory, TruncatedCoefficients};
pub use innovation::{HeavyProfile, InnovationLaw, InnovationModel, InnovationSampler, Zeta};
pub use regime::{Normalization, RegimeSpec, RegimeTag};
pub use target::TargetSet;
