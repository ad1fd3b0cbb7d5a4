//! `I_*` and `I^*` for the long-strange-segment theorem.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CoefficientFamily, InnovationModel, RegimeSpec, RegimeTag, TargetSet};
use crate::ratefn::{
    half_line_dual, kernel_integral, pi_region, ConvexFunction, GaussianPart, HeavyFn, KernelG,
    LambdaAlpha, Scaled,
};

#[derive(Debug, Clone, Serialize)]
pub struct RateBounds {
    /// `I_* = inf_{Ā} I_u`.
    pub lower: f64,
    /// `I^*`: `inf_{A°} I_l`, or its `Θ`-restricted version under S1/R1.
    pub upper: f64,
    pub regime: RegimeTag,
    /// `λ*` (S1) or `λ*_α` (R1).
    pub lambda_star: Option<f64>,
    /// Left end of `Θ` (S1/R1 with finite `λ*`).
    pub eta0: Option<f64>,
    /// Maximizing dual scale `κ` for each bound.
    pub kappa_lower: Option<f64>,
    pub kappa_upper: Option<f64>,
}

/// The convex function whose conjugate is the regime's rate function.
fn transform(
    fam: &CoefficientFamily,
    model: &InnovationModel,
    reg: &RegimeSpec,
) -> Result<Box<dyn ConvexFunction>> {
    let kern = || -> Result<KernelG> {
        let (a, p) = fam.long_memory_params().ok_or_else(|| {
            Error::RegimeMismatch("long memory needs balanced power coefficients".into())
        })?;
        KernelG::new(a, p)
    };
    let heavy = |scale: f64| -> Result<Box<dyn ConvexFunction>> {
        let profile = model
            .heavy_profile()
            .ok_or(Error::MissingHeavyProfile)?
            .clone();
        Ok(Box::new(HeavyFn {
            profile,
            dim: model.dim(),
            scale,
        }))
    };
    Ok(match reg.tag() {
        RegimeTag::S1 | RegimeTag::S2 => Box::new(model.clone()),
        RegimeTag::S3 => Box::new(GaussianPart::of(model)),
        RegimeTag::S4 => heavy(1.0)?,
        RegimeTag::R1 | RegimeTag::R2 => Box::new(LambdaAlpha {
            model: model.clone(),
            kern: kern()?,
        }),
        RegimeTag::R3 => Box::new(Scaled {
            inner: GaussianPart::of(model),
            scale: kernel_integral(&kern()?, 2.0)?,
        }),
        RegimeTag::R4 => heavy(kernel_integral(&kern()?, reg.beta().unwrap())?)?,
    })
}

/// `inf_{v·x ≥ h} f*(x) = sup_{κ ∈ [0, κ_max]} {κh − f(κv)}`.
fn half_space_inf(f: &dyn ConvexFunction, v: &[f64], h: f64, kappa_max: f64) -> Result<(f64, f64)> {
    let r = half_line_dual(
        |k| {
            let t: Vec<f64> = v.iter().map(|x| k * x).collect();
            f.value(&t)
        },
        h,
        kappa_max,
    )?;
    Ok((r.value, r.maximizer[0]))
}

/// The same infimum over the open half-space `{v·x > h}`: equal to the
/// closed one unless the conjugate is infinite just past the boundary.
fn open_half_space_inf(f: &dyn ConvexFunction, v: &[f64], h: f64) -> Result<(f64, f64)> {
    let closed = half_space_inf(f, v, h, f64::INFINITY)?;
    let beyond = half_space_inf(f, v, h + 1e-9 * h.abs().max(1.0), f64::INFINITY)?;
    if beyond.0.is_infinite() {
        Ok((f64::INFINITY, beyond.1))
    } else {
        Ok(closed)
    }
}

pub fn segment_rate_bounds(
    fam: &CoefficientFamily,
    model: &InnovationModel,
    reg: &RegimeSpec,
    a: &TargetSet,
) -> Result<RateBounds> {
    reg.validate_model(model)?;
    if a.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: a.dim(),
        });
    }
    let f = transform(fam, model, reg)?;
    let (v, c) = a.normal_form();
    let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let restricted = matches!(reg.tag(), RegimeTag::S1 | RegimeTag::R1);

    if !restricted {
        let (lower, kl) = half_space_inf(f.as_ref(), &v, c, f64::INFINITY)?;
        let (upper, ku) = open_half_space_inf(f.as_ref(), &v, c)?;
        return Ok(RateBounds {
            lower,
            upper,
            regime: reg.tag(),
            lambda_star: None,
            eta0: None,
            kappa_lower: Some(kl),
            kappa_upper: Some(ku),
        });
    }

    if model.dim() != 1 {
        return Err(Error::UnsupportedDimension(model.dim()));
    }
    let pi = pi_region(fam, model)?;
    // κv ∈ Π with v = ±|v|
    let kappa_pi = if v[0] > 0.0 {
        pi.upper / v[0]
    } else {
        pi.lower / v[0]
    };
    let (lower, kl) = half_space_inf(f.as_ref(), &v, c, kappa_pi)?;
    let lambda_star = pi.lambda_star;

    // J(η) = inf over A(η) of I_l
    let j = |eta: f64| open_half_space_inf(f.as_ref(), &v, c + eta * vnorm).map(|x| x.0);
    let mut out = RateBounds {
        lower,
        upper: f64::INFINITY,
        regime: reg.tag(),
        lambda_star: Some(lambda_star),
        eta0: None,
        kappa_lower: Some(kl),
        kappa_upper: None,
    };
    if lambda_star.is_infinite() {
        let (upper, ku) = open_half_space_inf(f.as_ref(), &v, c)?;
        out.upper = upper;
        out.kappa_upper = Some(ku);
        return Ok(out);
    }
    // Θ = {η : ηλ* > J(η)}; ηλ* − J(η) is concave, so Θ is an interval
    // and the infimum of the nondecreasing J over it sits at its left end
    let feasible = |eta: f64| -> Result<bool> { Ok(eta * lambda_star > j(eta)?) };
    let per_decade = 32;
    let (lo_exp, hi_exp) = (-8i32, 8i32);
    let mut prev: Option<f64> = None;
    for k in 0..=((hi_exp - lo_exp) as usize * per_decade) {
        let eta = 10f64.powf(lo_exp as f64 + k as f64 / per_decade as f64);
        if feasible(eta)? {
            let eta0 = match prev {
                None => eta,
                Some(p) => {
                    let (mut a, mut b) = (p, eta);
                    for _ in 0..200 {
                        let mid = 0.5 * (a + b);
                        if b - a <= 1e-13 * b {
                            break;
                        }
                        if feasible(mid)? {
                            b = mid;
                        } else {
                            a = mid;
                        }
                    }
                    b
                }
            };
            out.eta0 = Some(eta0);
            out.upper = j(eta0)?;
            return Ok(out);
        }
        prev = Some(eta);
    }
    // Θ empty on the scanned range
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoefficientKind, HeavyProfile, InnovationLaw, Normalization, Zeta};

    fn iid() -> CoefficientFamily {
        CoefficientFamily::iid()
    }

    fn reg(
        tag: RegimeTag,
        fam: &CoefficientFamily,
        norm: Normalization,
        beta: Option<f64>,
    ) -> RegimeSpec {
        RegimeSpec::new(tag, norm, fam, beta).unwrap()
    }

    fn lm(alpha: f64) -> CoefficientFamily {
        CoefficientFamily::new(
            CoefficientKind::BalancedPower {
                alpha,
                p: 1.0,
                scale: 1.0,
                log_power: 0.0,
            },
            false,
        )
        .unwrap()
    }

    #[test]
    fn s2_gaussian_half_line() {
        let m = InnovationModel::gaussian_1d(1.0).unwrap();
        let r = reg(
            RegimeTag::S2,
            &iid(),
            Normalization::Power { omega: 1.0 },
            None,
        );
        for y in [0.5, 1.0, 2.0] {
            let b = segment_rate_bounds(&iid(), &m, &r, &TargetSet::half_line(y)).unwrap();
            assert!((b.lower - y * y / 2.0).abs() < 1e-10);
            assert!((b.upper - y * y / 2.0).abs() < 1e-10);
        }
        let b = segment_rate_bounds(&iid(), &m, &r, &TargetSet::half_line(-0.5)).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper, 0.0);
    }

    #[test]
    fn r2_gaussian_scales_with_kernel_constant() {
        let f = lm(0.75);
        let m = InnovationModel::gaussian_1d(1.0).unwrap();
        let r = reg(RegimeTag::R2, &f, Normalization::ProductPsi, None);
        let b = segment_rate_bounds(&f, &m, &r, &TargetSet::half_line(1.0)).unwrap();
        let c = kernel_integral(&KernelG::new(0.75, 1.0).unwrap(), 2.0).unwrap();
        assert!(
            (b.lower - 1.0 / (2.0 * c)).abs() < 1e-7,
            "{} vs {}",
            b.lower,
            1.0 / (2.0 * c)
        );
        assert!((b.upper - b.lower).abs() < 1e-9);
    }

    #[test]
    fn gaussian_scale_covariance() {
        let m = InnovationModel::gaussian_1d(2.0).unwrap();
        let r = reg(
            RegimeTag::S2,
            &iid(),
            Normalization::Power { omega: 1.0 },
            None,
        );
        let base = segment_rate_bounds(&iid(), &m, &r, &TargetSet::half_line(0.7)).unwrap();
        for k in [0.5, 3.0] {
            let b = segment_rate_bounds(&iid(), &m, &r, &TargetSet::half_line(0.7 * k)).unwrap();
            assert!((b.lower - k * k * base.lower).abs() < 1e-9 * b.lower);
        }
    }

    #[test]
    fn s1_exponential_theta_restriction() {
        // Λ*(x) = x − log(1 + x); λ* = 1; J(η) = Λ*(y + η)
        let m = InnovationModel::new(InnovationLaw::CenteredExponential { rate: 1.0 }).unwrap();
        let r = reg(
            RegimeTag::S1,
            &iid(),
            Normalization::Power { omega: 1.0 },
            None,
        );
        let y = 1.0;
        let b = segment_rate_bounds(&iid(), &m, &r, &TargetSet::half_line(y)).unwrap();
        let ls = |x: f64| x - (1.0 + x).ln();
        // i.i.d.: Π = (−∞, 1) so Λ^♯ = Λ* on x ≥ 0
        assert!((b.lower - ls(y)).abs() < 1e-9);
        // η₀ solves η = Λ*(y + η), i.e. log(2 + η) = y
        let eta0 = y.exp() - 2.0;
        assert!((b.eta0.unwrap() - eta0).abs() < 1e-8, "{:?}", b.eta0);
        assert!((b.upper - ls(y + eta0)).abs() < 1e-8);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn s1_theta_empty_gives_infinity() {
        // φ = (2, −1): λ* = 1/2, and η/2 > Λ*(3 + η) has no solution
        let f = CoefficientFamily::new(
            CoefficientKind::FiniteLag {
                lags: vec![(0, 2.0), (1, -1.0)],
            },
            false,
        )
        .unwrap();
        let m = InnovationModel::new(InnovationLaw::CenteredExponential { rate: 1.0 }).unwrap();
        let r = reg(RegimeTag::S1, &f, Normalization::Power { omega: 1.0 }, None);
        let b = segment_rate_bounds(&f, &m, &r, &TargetSet::half_line(3.0)).unwrap();
        assert_eq!(b.lambda_star, Some(0.5));
        assert!(b.upper.is_infinite());
        // Λ^♯(3) = sup_{κ ≤ 1/2} {3κ − Λ(κ)} = 1.5 + log(1/2) + 0.5
        assert!((b.lower - (2.0 - 2f64.ln())).abs() < 1e-9, "{}", b.lower);
    }

    #[test]
    fn s4_heavy_conjugate() {
        // ζ = 1/2, β = 2: Λ^h = λ²/2 and (Λ^h)*(2) = 2
        let m = InnovationModel::gaussian_1d(1.0)
            .unwrap()
            .with_heavy_profile(HeavyProfile::new(2.0, Zeta::Constant { value: 0.5 }).unwrap())
            .unwrap();
        let r = reg(
            RegimeTag::S4,
            &iid(),
            Normalization::Power { omega: 1.5 },
            Some(2.0),
        );
        let b = segment_rate_bounds(&iid(), &m, &r, &TargetSet::half_line(2.0)).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-9);
        assert!((b.upper - 2.0).abs() < 1e-9);
    }

    #[test]
    fn higher_dimension_under_s1_is_refused() {
        let m = InnovationModel::new(InnovationLaw::Gaussian {
            cov: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        })
        .unwrap();
        let r = reg(
            RegimeTag::S1,
            &iid(),
            Normalization::Power { omega: 1.0 },
            None,
        );
        let a = TargetSet::half_space(vec![1.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            segment_rate_bounds(&iid(), &m, &r, &a),
            Err(Error::UnsupportedDimension(2))
        ));
        let r2 = reg(
            RegimeTag::S2,
            &iid(),
            Normalization::Power { omega: 1.0 },
            None,
        );
        let b = segment_rate_bounds(&iid(), &m, &r2, &a).unwrap();
        assert!((b.lower - 0.5).abs() < 1e-10);
    }
}
