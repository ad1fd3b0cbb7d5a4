//! Scaled cumulant generating functions `g_n(t) = n^{-1} log E e^{t·Y_n}`
//! computed from the innovation log-mgf.

use serde::Serialize;

use super::RuinSpec;
use crate::error::{Error, Result};
use crate::limits::dot;
use crate::ratefn::partial_sum_log_mgf;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalG {
    pub n: Vec<u64>,
    pub g_n: Vec<f64>,
    /// Limit estimate from the last two grid points, exact when
    /// `n g_n(t) = n g(t) + const`.
    pub g: f64,
    pub grad: Vec<f64>,
}

/// `g_n(t) = n^{-1}[Σ_i Λ(t φ_{i,n}) − a_n t·μ]` for the full family, the
/// window `|i| ≤ n²`.
pub fn g_n(spec: &RuinSpec, t: &[f64], n: u64) -> Result<f64> {
    let psi = partial_sum_log_mgf(&spec.family, &spec.model, t, n, n.saturating_mul(n))?;
    Ok((psi - spec.regime.a(n) * dot(t, &spec.mu)) / n as f64)
}

fn extrapolate(spec: &RuinSpec, t: &[f64], n1: u64, n2: u64) -> Result<f64> {
    let (a, b) = (g_n(spec, t, n1)?, g_n(spec, t, n2)?);
    Ok((n2 as f64 * b - n1 as f64 * a) / (n2 - n1) as f64)
}

pub fn empirical_g(spec: &RuinSpec, t: &[f64], n_grid: &[u64]) -> Result<EmpiricalG> {
    let mut n: Vec<u64> = n_grid.iter().copied().filter(|x| *x > 0).collect();
    n.sort_unstable();
    n.dedup();
    if n.len() < 2 {
        return Err(Error::InvalidParameter(
            "the n grid needs two distinct positive values".into(),
        ));
    }
    let g_vals = n
        .iter()
        .map(|&k| g_n(spec, t, k))
        .collect::<Result<Vec<_>>>()?;
    let (n1, n2) = (n[n.len() - 2], n[n.len() - 1]);
    let g = extrapolate(spec, t, n1, n2)?;
    let mut grad = Vec::with_capacity(t.len());
    for k in 0..t.len() {
        let h = 1e-5 * t[k].abs().max(1.0);
        let mut tp = t.to_vec();
        let mut tm = t.to_vec();
        tp[k] += h;
        tm[k] -= h;
        grad.push((extrapolate(spec, &tp, n1, n2)? - extrapolate(spec, &tm, n1, n2)?) / (2.0 * h));
    }
    Ok(EmpiricalG {
        n,
        g_n: g_vals,
        g,
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::gaussian_spec;
    use super::*;
    use crate::model::{
        CoefficientFamily, CoefficientKind, InnovationModel, Normalization, RegimeSpec, RegimeTag,
        TargetSet,
    };
    use crate::ratefn::finite_n_mgf_sum;

    #[test]
    fn iid_gaussian_is_flat_at_the_tilt() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let e = empirical_g(&spec, &[1.0], &[1, 10, 100]).unwrap();
        assert!(e.g_n.iter().all(|g| g.abs() < 1e-14));
        assert!(e.g.abs() < 1e-12);
        // g'(t) = t − μ
        assert!((e.grad[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn two_lag_average_closed_form() {
        let fam = CoefficientFamily::new(
            CoefficientKind::FiniteLag {
                lags: vec![(0, 0.5), (1, 0.5)],
            },
            false,
        )
        .unwrap();
        let spec = gaussian_spec(fam, 0.5);
        let t = 0.8;
        let e = empirical_g(&spec, &[t], &[5, 50, 500]).unwrap();
        for (n, g) in e.n.iter().zip(&e.g_n) {
            // n − 1 interior weights 1 and two edge weights ½
            let nf = *n as f64;
            let want = ((nf - 1.0) * t * t / 2.0 + 2.0 * (t * 0.5).powi(2) / 2.0) / nf - t * 0.5;
            assert!((g - want).abs() < 1e-12, "{n}: {g} vs {want}");
        }
        assert!((e.g - (t * t / 2.0 - t * 0.5)).abs() < 1e-10);
    }

    #[test]
    fn long_memory_scaling_matches_mgf_sum() {
        let fam = CoefficientFamily::new(
            CoefficientKind::BalancedPower {
                alpha: 0.75,
                p: 1.0,
                scale: 1.0,
                log_power: 0.0,
            },
            false,
        )
        .unwrap();
        let reg = RegimeSpec::new(RegimeTag::R2, Normalization::ProductPsi, &fam, None).unwrap();
        let model = InnovationModel::gaussian_1d(1.0).unwrap();
        let mu = 0.3;
        let spec = RuinSpec::new(
            fam.clone(),
            model.clone(),
            reg.clone(),
            vec![mu],
            TargetSet::half_line(1.0),
            Some(10),
        )
        .unwrap();
        let n = 40;
        let psi = fam.psi_sum(n).unwrap();
        for lambda in [0.5, 1.0, 2.0] {
            let g = g_n(&spec, &[lambda / psi], n).unwrap();
            let s = finite_n_mgf_sum(&fam, &model, &reg, &[lambda], n, None).unwrap();
            assert!(
                (g + lambda * mu - s).abs() < 1e-10 * s.abs().max(1.0),
                "{g} {s}"
            );
        }
    }
}
