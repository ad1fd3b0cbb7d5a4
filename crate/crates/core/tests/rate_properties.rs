use maruin::limits::{
    ruin_bounds, ruin_gaussian_bounds, ruin_heavy_bounds, ruin_lm_gaussian_bounds,
    segment_rate_bounds,
};
use maruin::model::{
    CoefficientFamily, CoefficientKind, HeavyProfile, InnovationLaw, InnovationModel,
    Normalization, RegimeSpec, RegimeTag, TargetSet, Zeta,
};
use maruin::ratefn::{legendre, speed_sequence, FnConvex, KernelG, Region};
use proptest::prelude::*;

fn families() -> Vec<CoefficientFamily> {
    vec![
        CoefficientFamily::new(
            CoefficientKind::FiniteLag {
                lags: vec![(-2, 0.3), (0, 0.5), (3, 0.2)],
            },
            false,
        )
        .unwrap(),
        CoefficientFamily::new(
            CoefficientKind::Geometric {
                ratio: 0.6,
                normalizer: 1.0,
            },
            true,
        )
        .unwrap(),
        CoefficientFamily::new(
            CoefficientKind::PowerSummable {
                exponent: 2.5,
                scale: 1.0,
            },
            true,
        )
        .unwrap(),
        CoefficientFamily::new(
            CoefficientKind::BalancedPower {
                alpha: 0.75,
                p: 0.7,
                scale: 1.0,
                log_power: 0.0,
            },
            false,
        )
        .unwrap(),
    ]
}

fn models() -> Vec<InnovationModel> {
    vec![
        InnovationModel::gaussian_1d(1.5).unwrap(),
        InnovationModel::new(InnovationLaw::CenteredExponential { rate: 2.0 }).unwrap(),
        InnovationModel::new(InnovationLaw::CenteredGamma {
            shape: 3.0,
            rate: 1.0,
        })
        .unwrap(),
        InnovationModel::new(InnovationLaw::BoundedUniform { half_width: 1.0 }).unwrap(),
        InnovationModel::new(InnovationLaw::TwoSidedDiscrete {
            atoms: vec![(-1.0, 2.0), (2.0, 1.0)],
        })
        .unwrap(),
    ]
}

fn spd(entries: &[f64], d: usize) -> Vec<Vec<f64>> {
    // B Bᵀ + I
    let b: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| entries[i * 3 + j]).collect())
        .collect();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d).map(|k| b[i][k] * b[j][k]).sum::<f64>() + if i == j { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_sums_satisfy_recurrence(fi in 0usize..4, i in -200i64..200, n in 1u64..300) {
        let f = &families()[fi];
        let lhs = f.partial_sum(i, n + 1) - f.partial_sum(i, n) - f.phi(i + n as i64 + 1);
        prop_assert!(lhs.abs() < 1e-12, "{lhs}");
    }

    #[test]
    fn support_inf_is_homogeneous(c in -3.0f64..3.0, v in -2.0f64..2.0, w in 0.1f64..2.0, k in 0.01f64..50.0, s in -1.0f64..1.0) {
        prop_assume!(v.abs() > 1e-3);
        let a = TargetSet::half_space(vec![v, w], c).unwrap();
        for t in [vec![v, w], vec![s * v, s * w], vec![w, -v]] {
            let base = a.support_inf(&t);
            let scaled = a.support_inf(&[k * t[0], k * t[1]]);
            if base.is_finite() {
                prop_assert!((scaled - k * base).abs() <= 1e-9 * (1.0 + scaled.abs()));
            } else {
                prop_assert_eq!(scaled, base);
            }
        }
    }

    #[test]
    fn shrunken_sets_are_nested(y in -2.0f64..2.0, e1 in 0.0f64..1.0, e2 in 0.0f64..1.0, x in -5.0f64..5.0) {
        let a = TargetSet::half_line(y);
        let (big, small) = (e1.min(e2), e1.max(e2));
        if a.shrink(small).contains(&[x]) {
            prop_assert!(a.shrink(big).contains(&[x]));
        }
    }

    #[test]
    fn fenchel_young(mi in 0usize..5, x in -3.0f64..3.0, l in -0.9f64..0.9) {
        let model = &models()[mi];
        let f = FnConvex::new(1, |t: &[f64]| model.log_mgf(t));
        let conj = legendre(&f, &[x], None).unwrap().value;
        let lam = model.log_mgf(&[l]);
        prop_assert!(conj + lam >= l * x - 1e-10, "{conj} + {lam} < {}", l * x);
    }

    #[test]
    fn gradient_matches_differences(mi in 0usize..5, t in -0.9f64..0.9) {
        let model = &models()[mi];
        let h = 1e-6;
        let fd = (model.log_mgf_1d(t + h) - model.log_mgf_1d(t - h)) / (2.0 * h);
        let g = model.grad_log_mgf_1d(t);
        prop_assert!((fd - g).abs() <= 1e-6 * g.abs().max(1.0), "{fd} vs {g}");
    }

    #[test]
    fn quadratic_conjugate(d in 1usize..=3, b in prop::collection::vec(-1.0f64..1.0, 9), x in prop::collection::vec(-2.0f64..2.0, 3)) {
        let s = spd(&b, d);
        let model = InnovationModel::new(InnovationLaw::Gaussian { cov: s.clone() }).unwrap();
        let x = &x[..d];
        let f = FnConvex::new(d, |t: &[f64]| model.log_mgf(t));
        let got = legendre(&f, x, None).unwrap().value;
        let inv = model.covariance_inverse();
        let want: f64 = 0.5 * (0..d).map(|i| (0..d).map(|j| x[i] * inv[(i, j)] * x[j]).sum::<f64>()).sum::<f64>();
        prop_assert!((got - want).abs() < 1e-8 * want.max(1.0), "{got} vs {want}");
        let whole = legendre(&f, x, Some(&Region::whole(d))).unwrap().value;
        prop_assert!((whole - got).abs() < 1e-12 * got.abs().max(1.0));
    }

    #[test]
    fn ruin_brackets_are_ordered(mu in 0.05f64..2.0, y in 0.2f64..3.0, w in 0.55f64..0.95, beta in 1.2f64..3.5, wh in 1.05f64..3.0) {
        let a = TargetSet::half_line(y);
        let b = ruin_gaussian_bounds(&[vec![1.0]], &[mu], &a, w).unwrap();
        prop_assert!(b.lower <= b.upper + 1e-9 * b.upper.abs().max(1.0), "{b:?}");
        let h = HeavyProfile::new(beta, Zeta::Constant { value: 1.0 }).unwrap();
        let b = ruin_heavy_bounds(&h, &[mu], &a, wh).unwrap();
        prop_assert!(b.lower <= b.upper + 1e-9 * b.upper.abs().max(1.0), "{b:?}");
        let kern = KernelG::new(0.75, 1.0).unwrap();
        let b = ruin_lm_gaussian_bounds(&[vec![1.0]], &[mu], &a, &kern, 0.8 + 0.4 * (w - 0.55)).unwrap();
        prop_assert!(b.lower <= b.upper + 1e-9 * b.upper.abs().max(1.0), "{b:?}");
    }

    #[test]
    fn cramer_brackets_are_ordered(mi in 0usize..5, mu in 0.05f64..1.0, y in 0.2f64..3.0) {
        let fam = CoefficientFamily::new(CoefficientKind::FiniteLag { lags: vec![(0, 0.5), (1, 0.5)] }, false).unwrap();
        let reg = RegimeSpec::new(RegimeTag::S1, Normalization::Power { omega: 1.0 }, &fam, None).unwrap();
        let b = ruin_bounds(&fam, &models()[mi], &reg, &TargetSet::half_line(y), &[mu]).unwrap();
        prop_assert!(b.lower <= b.upper + 1e-9 * b.upper.abs().max(1.0), "{b:?}");
    }

    #[test]
    fn segment_rates_scale_quadratically(k in 0.2f64..5.0, y in 0.2f64..3.0) {
        // Gaussian: I(y) = y²/(2σ²)
        let fam = CoefficientFamily::iid();
        let reg = RegimeSpec::new(RegimeTag::S2, Normalization::Power { omega: 1.0 }, &fam, None).unwrap();
        let m = InnovationModel::gaussian_1d(1.0).unwrap();
        let r1 = segment_rate_bounds(&fam, &m, &reg, &TargetSet::half_line(y)).unwrap();
        let r2 = segment_rate_bounds(&fam, &m, &reg, &TargetSet::half_line(k * y)).unwrap();
        prop_assert!((r2.lower - k * k * r1.lower).abs() < 1e-8 * r2.lower.max(1.0));
        prop_assert!((r2.upper - k * k * r1.upper).abs() < 1e-8 * r2.upper.max(1.0));
    }
}

#[test]
fn speeds_nondecreasing_on_log_grid() {
    let iid = CoefficientFamily::iid();
    let lm = &families()[3];
    let regs = vec![
        RegimeSpec::new(
            RegimeTag::S1,
            Normalization::Power { omega: 1.0 },
            &iid,
            None,
        )
        .unwrap(),
        RegimeSpec::new(
            RegimeTag::S3,
            Normalization::Power { omega: 0.75 },
            &iid,
            None,
        )
        .unwrap(),
        RegimeSpec::new(
            RegimeTag::S4,
            Normalization::Power { omega: 1.5 },
            &iid,
            Some(2.0),
        )
        .unwrap(),
        RegimeSpec::new(RegimeTag::R2, Normalization::ProductPsi, lm, None).unwrap(),
        RegimeSpec::new(RegimeTag::R3, Normalization::Power { omega: 1.0 }, lm, None).unwrap(),
        RegimeSpec::new(
            RegimeTag::R4,
            Normalization::Power { omega: 1.5 },
            lm,
            Some(2.0),
        )
        .unwrap(),
    ];
    for r in regs {
        let mut last = 0.0;
        for k in 0..=120 {
            let n = 10f64.powf(k as f64 / 20.0).round() as u64;
            let b = speed_sequence(&r, n).b;
            assert!(b >= last, "{:?} at {n}", r.tag());
            last = b;
        }
    }
}
