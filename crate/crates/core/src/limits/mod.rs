//! Limit constants: segment rates `I_*`, `I^*`, the growth and decay
//! exponents, and the logarithmic ruin asymptotics.

mod nyrhinen;
mod ruin_long;
mod ruin_short;
mod segment;
mod tables;

pub use nyrhinen::{nyrhinen_bounds, NyrhinenBounds, NyrhinenSearch};
pub use ruin_long::{ruin_lm_bounds, ruin_lm_gaussian_bounds, ruin_lm_heavy_bounds};
pub use ruin_short::{ruin_cramer_bounds, ruin_gaussian_bounds, ruin_heavy_bounds};
pub use segment::{segment_rate_bounds, RateBounds};
pub use tables::{table1_theta, table2_theta, Theta};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoefficientFamily, InnovationModel, RegimeSpec, RegimeTag, TargetSet};
use crate::numeric::{log_grid_max, log_grid_min};
use crate::ratefn::KernelG;

/// Search range and resolution for every inf/sup over `c`, `u` or `κ`.
pub const GRID_LO: f64 = 1e-4;
pub const GRID_HI: f64 = 1e4;
pub const GRID_PER_DECADE: usize = 64;
pub const OPT_TOL: f64 = 1e-10;
/// Strict inequalities in set membership are tested with this margin.
pub const MEMBERSHIP_MARGIN: f64 = 1e-9;

/// Bounds on `lim (1/b_{a^←(u)}) log ρ(u)`.
#[derive(Debug, Clone, Serialize)]
pub struct RuinAsymptote {
    pub lower: f64,
    pub upper: f64,
    /// The explicit limit, when a remark's hypotheses were verified.
    pub exact: Option<f64>,
    pub constants: BTreeMap<String, f64>,
    /// Optimizing `c` (or tilt scale `κ`) of the lower bound.
    pub argopt: Option<f64>,
    pub notes: Vec<String>,
}

impl RuinAsymptote {
    fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            exact: None,
            constants: BTreeMap::new(),
            argopt: None,
            notes: Vec::new(),
        }
    }

    fn constant(&mut self, k: &str, v: f64) {
        self.constants.insert(k.to_string(), v);
    }

    /// Accept `value` as the exact limit if both bounds agree with it.
    fn offer_exact(&mut self, value: f64) {
        let tol = 1e-9 * value.abs().max(1.0);
        if (self.lower - self.upper).abs() <= tol && (self.lower - value).abs() <= tol {
            self.exact = Some(value);
        } else {
            self.notes.push(format!(
                "explicit value {value} not adopted: bounds are [{}, {}]",
                self.lower, self.upper
            ));
        }
    }
}

/// `A` in half-space form with a unit normal, together with the drift
/// projection.
#[derive(Debug, Clone)]
pub(crate) struct HalfSpace {
    pub v: Vec<f64>,
    pub c: f64,
    /// `v·μ`
    pub m: f64,
}

/// Condition 𝒜 for a half-space: `v·μ > 0` and `c > 0`.
pub(crate) fn condition_a(a: &TargetSet, mu: &[f64]) -> Result<HalfSpace> {
    if a.dim() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: mu.len(),
        });
    }
    let (v, c) = a.normal_form();
    let norm = dot(&v, &v).sqrt();
    let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let c = c / norm;
    let m = dot(&v, mu);
    if !(m > 0.0 && c > 0.0) {
        return Err(Error::EmptyFeasibleSet(format!(
            "Condition A fails: v·μ = {m}, threshold = {c}"
        )));
    }
    Ok(HalfSpace { v, c, m })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn inf_positive<F: FnMut(f64) -> f64>(f: F) -> Option<(f64, f64)> {
    log_grid_min(f, GRID_LO, GRID_HI, GRID_PER_DECADE, OPT_TOL)
}

pub(crate) fn sup_positive<F: FnMut(f64) -> f64>(f: F) -> Option<(f64, f64)> {
    log_grid_max(f, GRID_LO, GRID_HI, GRID_PER_DECADE, OPT_TOL)
}

/// `inf_{c>0} c^{−k} inner(c)`, returning `(argmin, value)`.
pub(crate) fn power_outer_inf<F: Fn(f64) -> f64>(k: f64, inner: F) -> Result<(f64, f64)> {
    inf_positive(|c| c.powf(-k) * inner(c))
        .ok_or_else(|| Error::EmptyFeasibleSet("objective is infinite for every c > 0".into()))
}

/// Whether unit `v` and `x` point the same way.
pub(crate) fn parallel(v: &[f64], x: &[f64]) -> bool {
    let n = dot(x, x).sqrt();
    n > 0.0 && (dot(v, x) / n - 1.0).abs() < 1e-12
}

/// `K_β(a) = (β−1)(aβ^β)^{1/(1−β)}`: `sup_κ {κh − aκ^β} = K_β(a) h^{β/(β−1)}`.
pub fn k_beta(a: f64, beta: f64) -> f64 {
    (beta - 1.0) * (a * beta.powf(beta)).powf(1.0 / (1.0 - beta))
}

/// Dispatch to the ruin theorem matching `reg`.
pub fn ruin_bounds(
    fam: &CoefficientFamily,
    model: &InnovationModel,
    reg: &RegimeSpec,
    a: &TargetSet,
    mu: &[f64],
) -> Result<RuinAsymptote> {
    reg.validate_model(model)?;
    let kern = || -> Result<KernelG> {
        let (alpha, p) = fam.long_memory_params().ok_or_else(|| {
            Error::RegimeMismatch("long-memory regime needs balanced power coefficients".into())
        })?;
        KernelG::new(alpha, p)
    };
    let cov = || -> Vec<Vec<f64>> {
        let c = model.covariance();
        (0..c.nrows())
            .map(|i| (0..c.ncols()).map(|j| c[(i, j)]).collect())
            .collect()
    };
    let omega = reg.omega();
    match reg.tag() {
        RegimeTag::S1 | RegimeTag::S2 => ruin_cramer_bounds(fam, model, a, mu),
        RegimeTag::S3 => ruin_gaussian_bounds(&cov(), mu, a, omega.unwrap()),
        RegimeTag::S4 => ruin_heavy_bounds(
            model.heavy_profile().ok_or(Error::MissingHeavyProfile)?,
            mu,
            a,
            omega.unwrap(),
        ),
        RegimeTag::R1 => Err(Error::RegimeMismatch(
            "no ruin asymptotics are available under R1".into(),
        )),
        RegimeTag::R2 => ruin_lm_bounds(fam, model, mu, a),
        RegimeTag::R3 => ruin_lm_gaussian_bounds(&cov(), mu, a, &kern()?, omega.unwrap()),
        RegimeTag::R4 => ruin_lm_heavy_bounds(
            model.heavy_profile().ok_or(Error::MissingHeavyProfile)?,
            mu,
            a,
            &kern()?,
            omega.unwrap(),
        ),
    }
}
