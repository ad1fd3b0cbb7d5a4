//! The finite-n normalized log-mgf sum
//! `(1/b_n) Σ_{|i|≤k_n} Λ((b_n/a_n) λ φ_{i,n})`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CoefficientFamily, InnovationModel, RegimeSpec};
use crate::numeric::CompensatedSum;

const CHUNK: i64 = 1 << 16;

/// Evaluate the sum over `|i| ≤ k_n` (default `k_n = n²`). Offsets whose
/// window misses the support contribute `Λ(0) = 0` and are skipped.
pub fn finite_n_mgf_sum(
    fam: &CoefficientFamily,
    model: &InnovationModel,
    reg: &RegimeSpec,
    lambda: &[f64],
    n: u64,
    window: Option<u64>,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let bn = reg.b(n);
    let scale = bn / reg.a(n);
    let t: Vec<f64> = lambda.iter().map(|l| l * scale).collect();
    let k = window.unwrap_or(n.saturating_mul(n));
    Ok(partial_sum_log_mgf(fam, model, &t, n, k)? / bn)
}

/// `Σ_{|i|≤k} Λ(t φ_{i,n})`, the log-mgf of `Σ_{|i|≤k} φ_{i,n} Z_i`.
pub fn partial_sum_log_mgf(
    fam: &CoefficientFamily,
    model: &InnovationModel,
    t: &[f64],
    n: u64,
    k: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if t.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: t.len(),
        });
    }
    let k = k.min(i64::MAX as u64 / 4) as i64;
    let ni = n as i64;
    let (slo, shi) = fam.support();
    // φ_{i,n} ≠ 0 needs [i+1, i+n] to meet the support
    let lo = slo.map_or(-k, |s| (s - ni).max(-k));
    let hi = shi.map_or(k, |s| (s - 1).min(k));
    if hi < lo {
        return Ok(0.0);
    }

    let starts: Vec<i64> = (0..=((hi - lo) / CHUNK)).map(|c| lo + c * CHUNK).collect();
    let parts: Vec<Result<f64>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK - 1).min(hi);
            let mut acc = CompensatedSum::new();
            let mut buf = vec![0.0; t.len()];
            // exact value at the chunk start, then the recurrence
            // φ_{i+1,n} = φ_{i,n} − φ_{i+1} + φ_{i+n+1}
            let mut phi = fam.partial_sum(start, n);
            for i in start..=end {
                if i > start {
                    phi += fam.phi(i + ni) - fam.phi(i);
                }
                let v = if buf.len() == 1 {
                    model.log_mgf_1d(t[0] * phi)
                } else {
                    for (b, ti) in buf.iter_mut().zip(t) {
                        *b = ti * phi;
                    }
                    model.log_mgf(&buf)
                };
                if !v.is_finite() {
                    return Err(Error::DivergentTerm {
                        offset: i,
                        window: n as usize,
                    });
                }
                acc.add(v);
            }
            Ok(acc.value())
        })
        .collect();
    let mut total = CompensatedSum::new();
    for p in parts {
        total.add(p?);
    }
    Ok(total.value())
}
