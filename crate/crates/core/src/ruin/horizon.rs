//! Chernoff bound on ruin after the simulation horizon.

use super::RuinSpec;
use crate::error::{Error, Result};
use crate::limits::dot;
use crate::numeric::log_grid_min;
use crate::ratefn::partial_sum_log_mgf;

/// `inf_{κ>0} log E exp{κ v·(Y_n − u c)}` for the simulated law.
fn log_term(spec: &RuinSpec, v: &[f64], level: f64, m: f64, n: u64) -> f64 {
    let fam = spec.simulated_family();
    let (lo, hi) = fam.support();
    let k = n + lo.unwrap_or(0).unsigned_abs() + hi.unwrap_or(0).unsigned_abs() + 1;
    let shift = level + spec.regime.a(n) * m;
    let f = |kappa: f64| {
        let t: Vec<f64> = v.iter().map(|x| kappa * x).collect();
        match partial_sum_log_mgf(fam, &spec.model, &t, n, k) {
            Ok(psi) => psi - kappa * shift,
            Err(_) => f64::INFINITY,
        }
    };
    log_grid_min(f, 1e-4, 1e3, 4, 1e-8).map_or(0.0, |(_, val)| val.min(0.0))
}

/// Union bound `Σ_{n>N} min(1, e^{ℓ(n)})` on `P(N < first hit < ∞)`, with
/// `ℓ(n)` the optimized Chernoff exponent at step `n`.
///
/// `ℓ` is evaluated on a grid growing by 10% per point and each gap is
/// charged at the larger endpoint value. The sum stops once
/// `n e^{ℓ(n)} < e^{−80}` with `ℓ` still falling.
pub fn horizon_tail_bound(spec: &RuinSpec, u: f64, horizon: u64) -> Result<f64> {
    let (v, c) = spec.target.normal_form();
    let norm = dot(&v, &v).sqrt();
    let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let level = u * c / norm;
    let m = dot(&v, &spec.mu);
    if !(m > 0.0) {
        return Err(Error::NoDriftCertificate);
    }
    let cap = horizon.saturating_mul(10_000).max(1_000_000);
    let mut n0 = horizon + 1;
    let mut l0 = log_term(spec, &v, level, m, n0);
    let mut total = 0.0;
    loop {
        let n1 = (n0 + 1).max((n0 as f64 * 1.1).ceil() as u64);
        let l1 = log_term(spec, &v, level, m, n1);
        total += (n1 - n0) as f64 * l0.max(l1).exp();
        if total >= 1.0 {
            return Ok(1.0);
        }
        if l1 + (n1 as f64).ln() < -80.0 && l1 <= l0 {
            return Ok(total + (n1 as f64 * l1.exp()));
        }
        if n1 > cap {
            return Err(Error::NoDriftCertificate);
        }
        n0 = n1;
        l0 = l1;
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::gaussian_spec;
    use super::*;
    use crate::model::CoefficientFamily;

    #[test]
    fn gaussian_tail_matches_closed_form_chernoff() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let (u, n) = (4.0, 80);
        let b = horizon_tail_bound(&spec, u, n).unwrap();
        // Σ_{k>n} exp(−(u + k/2)²/(2k)) summed directly
        let exact: f64 = (n + 1..100_000)
            .map(|k| (-(u + 0.5 * k as f64).powi(2) / (2.0 * k as f64)).exp())
            .sum();
        assert!(b >= exact * (1.0 - 1e-6), "{b} vs {exact}");
        assert!(b <= exact * 2.0, "{b} vs {exact}");
    }
}
