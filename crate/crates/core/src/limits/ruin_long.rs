//! Ruin asymptotics under long memory: R2 (linear normalization), R3
//! (Gaussian moderate deviations) and R4 (heavy tails).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{CoefficientFamily, HeavyProfile, InnovationModel, TargetSet};
use crate::ratefn::{half_line_dual, kernel_integral, lambda_alpha, KernelG};

use super::{
    condition_a, inf_positive, k_beta, power_outer_inf, sup_positive, RuinAsymptote,
    MEMBERSHIP_MARGIN,
};

fn kernel_of(fam: &CoefficientFamily) -> Result<KernelG> {
    let (alpha, p) = fam.long_memory_params().ok_or_else(|| {
        Error::RegimeMismatch("long-memory bounds need balanced power coefficients".into())
    })?;
    KernelG::new(alpha, p)
}

/// Whether `A = (1, ∞)` in d = 1, the setting of the explicit remarks.
fn unit_half_line(v: &[f64], c: f64) -> bool {
    v.len() == 1 && v[0] == 1.0 && (c - 1.0).abs() < 1e-15
}

/// Bounds on `lim (1/a^←(u)) log ρ(u)` under R2.
pub fn ruin_lm_bounds(
    fam: &CoefficientFamily,
    model: &InnovationModel,
    mu: &[f64],
    a: &TargetSet,
) -> Result<RuinAsymptote> {
    let kern = kernel_of(fam)?;
    let d = model.dim();
    if mu.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: mu.len(),
        });
    }
    let hs = condition_a(a, mu)?;
    let alpha = kern.alpha;
    let along = |k: f64| -> f64 {
        let t: Vec<f64> = hs.v.iter().map(|x| k * x).collect();
        lambda_alpha(model, &kern, &t).unwrap_or(f64::INFINITY)
    };
    // (Λ_α)* over {v·x ≥ h} by duality along v
    let inner = |c: f64| -> f64 {
        half_line_dual(along, hs.m + c * hs.c, f64::INFINITY)
            .map(|r| r.value)
            .unwrap_or(f64::INFINITY)
    };
    let k = 1.0 / (2.0 - alpha);
    let (cstar, val) = power_outer_inf(k, inner)?;
    let lower = -val;

    if alpha == 1.0 {
        let mut out = RuinAsymptote::new(lower, lower);
        out.argopt = Some(cstar);
        return Ok(out);
    }
    // upper: inf over κv ∈ G of sup_u {−u^{α−1} κc + u D}, D = Λ_α(κv) − κm < 0
    let e = 1.0 - alpha;
    let best = inf_positive(|kap| {
        let dd = along(kap) - kap * hs.m;
        if !(dd < -MEMBERSHIP_MARGIN) {
            return f64::INFINITY;
        }
        let s = kap * hs.c;
        let u = (e * s / -dd).powf(1.0 / (1.0 + e));
        dd * u * (1.0 + e) / e
    });
    let (kap, upper) = best.ok_or(Error::EmptyG)?;
    let mut out = RuinAsymptote::new(lower, upper);
    out.argopt = Some(cstar);
    out.constant("kappa_upper", kap);
    Ok(out)
}

/// Bounds on `lim (1/b_{a^←(u)}) log ρ(u)` under R3.
pub fn ruin_lm_gaussian_bounds(
    cov: &[Vec<f64>],
    mu: &[f64],
    a: &TargetSet,
    kern: &KernelG,
    omega: f64,
) -> Result<RuinAsymptote> {
    let alpha = kern.alpha;
    if !(omega > 1.5 - alpha && omega <= 2.0 - alpha) {
        return Err(Error::OutOfRange(format!(
            "ω = {omega} is outside ({}, {}]",
            1.5 - alpha,
            2.0 - alpha
        )));
    }
    let d = mu.len();
    if cov.len() != d || cov.iter().any(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: cov.len(),
        });
    }
    let hs = condition_a(a, mu)?;
    let sigma = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
    let v = DVector::from_column_slice(&hs.v);
    let q = v.dot(&(&sigma * &v));
    let cc = kernel_integral(kern, 2.0)?;
    let ep = (3.0 - 2.0 * alpha) / omega;
    let k = 2.0 - ep;
    let inner = |c: f64| (hs.m + c * hs.c).powi(2) / (2.0 * q);
    let (cstar, val) = power_outer_inf(k, inner)?;
    let lower = -val / cc;

    let mut out = if alpha == 1.0 {
        RuinAsymptote::new(lower, lower)
    } else {
        let kk = omega * (3.0 - 2.0 * alpha - omega).powf(1.0 - ep)
            / (2.0 * (alpha + omega) - 3.0).powf(2.0 - ep);
        let best = sup_positive(|kap| {
            let dd = kap * hs.m - 0.5 * cc * kap * kap * q;
            if !(dd > MEMBERSHIP_MARGIN) {
                return f64::NEG_INFINITY;
            }
            dd.powf(-1.0 + ep) * (kap * hs.c).powf(2.0 - ep)
        });
        let (kap, s) = best.ok_or(Error::EmptyG)?;
        let mut o = RuinAsymptote::new(lower, -kk * s);
        o.constant("K_alpha_omega", kk);
        o.constant("kappa_upper", kap);
        o
    };
    out.argopt = Some(cstar);
    out.constant("C_alpha_2", cc);
    out.constant("exponent", k);
    if unit_half_line(&hs.v, hs.c) {
        let w = omega;
        let s2 = cov[0][0];
        let value = -(2.0 * (w + alpha) - 3.0).powf((3.0 - 2.0 * (w + alpha)) / w)
            / (3.0 - 2.0 * alpha).powf((3.0 - 2.0 * alpha) / w)
            * 2.0
            / (s2 * cc)
            * w
            * w
            * mu[0].powf((3.0 - 2.0 * alpha) / w);
        out.offer_exact(value);
    }
    Ok(out)
}

/// Bounds on `lim (1/b_{a^←(u)}) log ρ(u)` under R4.
pub fn ruin_lm_heavy_bounds(
    profile: &HeavyProfile,
    mu: &[f64],
    a: &TargetSet,
    kern: &KernelG,
    omega: f64,
) -> Result<RuinAsymptote> {
    let alpha = kern.alpha;
    let beta = profile.beta;
    if !(omega >= 2.0 - alpha) {
        return Err(Error::OutOfRange(format!(
            "ω = {omega} is below {}",
            2.0 - alpha
        )));
    }
    let split = beta * (1.0 - alpha) + 1.0;
    if alpha < 1.0 && (omega - split).abs() <= 1e-12 * split {
        return Err(Error::ForbiddenOmega(omega));
    }
    let hs = condition_a(a, mu)?;
    let cc = kernel_integral(kern, beta)?;
    let zeta = profile.zeta_at(&hs.v);
    let p = beta / (beta - 1.0);
    let kb = k_beta(zeta, beta);
    let num = beta * (omega + alpha - 1.0) - 1.0;
    let k = num / (omega * (beta - 1.0));
    let inner = |c: f64| kb * (hs.m + c * hs.c).powf(p);
    let (cstar, val) = power_outer_inf(k, inner)?;
    let lower = -val / cc.powf(1.0 / (beta - 1.0));

    let lh = |kap: f64| cc * zeta * kap.powf(beta);
    let mut out = if alpha == 1.0 {
        RuinAsymptote::new(lower, lower)
    } else if omega < split {
        let e1 = (split - omega) / (omega * (beta - 1.0));
        let e2 = -num / (omega * (beta - 1.0));
        let k1 = omega * (beta - 1.0) * (split - omega).powf(-e1)
            / num.powf(num / (omega * (beta - 1.0)));
        let best = sup_positive(|kap| {
            let dd = kap * hs.m - lh(kap);
            if !(dd > MEMBERSHIP_MARGIN) {
                return f64::NEG_INFINITY;
            }
            dd.powf(e1) / (kap * hs.c).powf(e2)
        });
        let (kap, s) = best.ok_or(Error::EmptyG)?;
        let mut o = RuinAsymptote::new(lower, -k1 * s);
        o.constant("K1", k1);
        o.constant("kappa_upper", kap);
        o
    } else {
        let del = omega - split;
        let k2 = del * split.powf(split / del) / omega.powf(omega / del);
        let best = sup_positive(|kap| {
            let b = kap * hs.c - k2 * lh(kap).powf(omega / del) / (kap * hs.m).powf(split / del);
            if !(b > MEMBERSHIP_MARGIN) {
                return f64::NEG_INFINITY;
            }
            b
        });
        let (kap, s) = best.ok_or(Error::EmptyG)?;
        let mut o = RuinAsymptote::new(lower, -s);
        o.constant("K2", k2);
        o.constant("kappa_upper", kap);
        o
    };
    out.argopt = Some(cstar);
    out.constant(&format!("C_alpha_{beta}"), cc);
    out.constant("exponent", k);
    if unit_half_line(&hs.v, hs.c) {
        let xi = profile.zeta_at(&[1.0]);
        let w = omega;
        let f = omega * (beta - 1.0);
        let value = -num.powf(-num / f) / split.powf(split / f)
            * (beta - 1.0)
            * (w.powf(beta) / (xi * cc)).powf(1.0 / (beta - 1.0))
            * mu[0].powf(split / f);
        out.offer_exact(value);
    }
    Ok(out)
}
