use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::powersum::PowerSums;
use crate::numeric::CompensatedSum;

/// Parametric description of the coefficient sequence `(φ_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientKind {
    /// Finitely many nonzero coefficients, given as `(lag, value)`.
    FiniteLag { lags: Vec<(i64, f64)> },
    /// `φ_i = normalizer · ratio^i` for `i ≥ 0`.
    Geometric { ratio: f64, normalizer: f64 },
    /// `φ_i = scale · (i + 1)^{-exponent}` for `i ≥ 0`, exponent > 1.
    PowerSummable { exponent: f64, scale: f64 },
    /// Two-sided long memory: `φ_k = p ψ(k)`, `φ_{-k} = (1 − p) ψ(k)` for
    /// `k ≥ 1`, `φ_0 = 0`, `ψ(k) = scale · k^{-α} (log(k + e))^δ`.
    BalancedPower {
        alpha: f64,
        p: f64,
        scale: f64,
        #[serde(default)]
        log_power: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Memory {
    Short,
    Long,
}

/// A validated coefficient sequence with fast partial-sum evaluation.
#[derive(Debug, Clone)]
pub struct CoefficientFamily {
    kind: CoefficientKind,
    normalized: bool,
    // FiniteLag: sorted lags and their running sums
    lags: Vec<(i64, f64)>,
    lag_prefix: Vec<f64>,
    sums: Option<Arc<PowerSums>>,
}

/// Dense window of coefficients `φ_lo, …, φ_{lo + len − 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedCoefficients {
    pub lo: i64,
    pub values: Vec<f64>,
}

impl TruncatedCoefficients {
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }
}

impl CoefficientFamily {
    /// Validate `kind` and build the family. With `normalized`, the
    /// coefficients are rescaled so that `Σφ_i = 1` (short memory only).
    pub fn new(kind: CoefficientKind, normalized: bool) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let kind = match kind {
            CoefficientKind::FiniteLag { lags } => {
                if lags.is_empty() {
                    return bad("FiniteLag needs at least one lag".into());
                }
                if lags.iter().any(|(_, v)| !v.is_finite()) {
                    return bad("FiniteLag values must be finite".into());
                }
                let mut merged: Vec<(i64, f64)> = Vec::new();
                let mut sorted = lags;
                sorted.sort_by_key(|&(i, _)| i);
                for (i, v) in sorted {
                    match merged.last_mut() {
                        Some(last) if last.0 == i => last.1 += v,
                        _ => merged.push((i, v)),
                    }
                }
                if normalized {
                    let total: f64 = merged.iter().map(|x| x.1).sum();
                    if total.abs() < 1e-300 {
                        return Err(Error::NotNormalizable);
                    }
                    for x in &mut merged {
                        x.1 /= total;
                    }
                }
                CoefficientKind::FiniteLag { lags: merged }
            }
            CoefficientKind::Geometric { ratio, normalizer } => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return bad(format!("geometric ratio must lie in (0, 1), got {ratio}"));
                }
                if !normalizer.is_finite() {
                    return bad("geometric normalizer must be finite".into());
                }
                let normalizer = if normalized { 1.0 - ratio } else { normalizer };
                CoefficientKind::Geometric { ratio, normalizer }
            }
            CoefficientKind::PowerSummable { exponent, scale } => {
                if !(exponent > 1.0) || !exponent.is_finite() {
                    return bad(format!(
                        "summable power exponent must exceed 1, got {exponent}"
                    ));
                }
                if !(scale >= 0.0) || !scale.is_finite() {
                    return bad(format!("scale must be nonnegative, got {scale}"));
                }
                CoefficientKind::PowerSummable { exponent, scale }
            }
            CoefficientKind::BalancedPower {
                alpha,
                p,
                scale,
                log_power,
            } => {
                if !(alpha > 0.5 && alpha <= 1.0) {
                    return bad(format!("alpha must lie in (1/2, 1], got {alpha}"));
                }
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("p must lie in [0, 1], got {p}"));
                }
                if !(scale > 0.0) || !scale.is_finite() {
                    return bad(format!("scale must be positive, got {scale}"));
                }
                if !log_power.is_finite() {
                    return bad("log power must be finite".into());
                }
                if alpha == 1.0 && log_power < -1.0 {
                    return bad("alpha = 1 with log power < -1 is summable".into());
                }
                if normalized {
                    return bad(
                        "long-memory coefficients are not summable and cannot be normalized".into(),
                    );
                }
                CoefficientKind::BalancedPower {
                    alpha,
                    p,
                    scale,
                    log_power,
                }
            }
        };
        let mut fam = Self {
            kind,
            normalized,
            lags: Vec::new(),
            lag_prefix: Vec::new(),
            sums: None,
        };
        match &fam.kind {
            CoefficientKind::FiniteLag { lags } => {
                fam.lags = lags.clone();
                let mut acc = CompensatedSum::new();
                fam.lag_prefix.push(0.0);
                for &(_, v) in lags {
                    acc.add(v);
                    fam.lag_prefix.push(acc.value());
                }
            }
            CoefficientKind::PowerSummable { exponent, scale } => {
                let sums = PowerSums::new(*exponent, 0.0);
                if normalized {
                    let z = sums.total().expect("exponent > 1");
                    fam.kind = CoefficientKind::PowerSummable {
                        exponent: *exponent,
                        scale: 1.0 / z,
                    };
                } else if *scale == 0.0 {
                    return Err(Error::InvalidParameter("scale must be positive".into()));
                }
                fam.sums = Some(Arc::new(sums));
            }
            CoefficientKind::BalancedPower {
                alpha, log_power, ..
            } => {
                fam.sums = Some(Arc::new(PowerSums::new(*alpha, *log_power)));
            }
            CoefficientKind::Geometric { .. } => {}
        }
        if let CoefficientKind::Geometric { normalizer, .. } = fam.kind {
            if normalizer == 0.0 {
                return Err(Error::InvalidParameter(
                    "geometric normalizer must be nonzero".into(),
                ));
            }
        }
        Ok(fam)
    }

    /// The i.i.d. embedding `φ_0 = 1`.
    pub fn iid() -> Self {
        Self::new(
            CoefficientKind::FiniteLag {
                lags: vec![(0, 1.0)],
            },
            false,
        )
        .expect("valid")
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn memory(&self) -> Memory {
        match self.kind {
            CoefficientKind::BalancedPower { .. } => Memory::Long,
            _ => Memory::Short,
        }
    }

    /// `(α, p)` for long memory.
    pub fn long_memory_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            CoefficientKind::BalancedPower { alpha, p, .. } => Some((alpha, p)),
            _ => None,
        }
    }

    /// Whether every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        match &self.kind {
            CoefficientKind::FiniteLag { lags } => lags.iter().all(|x| x.1 >= 0.0),
            CoefficientKind::Geometric { normalizer, .. } => *normalizer >= 0.0,
            CoefficientKind::PowerSummable { .. } | CoefficientKind::BalancedPower { .. } => true,
        }
    }

    /// `φ_i`.
    pub fn phi(&self, i: i64) -> f64 {
        match &self.kind {
            CoefficientKind::FiniteLag { .. } => {
                match self.lags.binary_search_by_key(&i, |x| x.0) {
                    Ok(k) => self.lags[k].1,
                    Err(_) => 0.0,
                }
            }
            CoefficientKind::Geometric { ratio, normalizer } => {
                if i < 0 {
                    0.0
                } else {
                    normalizer * ratio.powf(i as f64)
                }
            }
            CoefficientKind::PowerSummable { exponent, scale } => {
                if i < 0 {
                    0.0
                } else {
                    scale * ((i + 1) as f64).powf(-exponent)
                }
            }
            CoefficientKind::BalancedPower { p, .. } => {
                let s = self.sums.as_ref().expect("long memory sums");
                match i.cmp(&0) {
                    std::cmp::Ordering::Equal => 0.0,
                    std::cmp::Ordering::Greater => p * self.psi_at(s, i as f64),
                    std::cmp::Ordering::Less => (1.0 - p) * self.psi_at(s, (-i) as f64),
                }
            }
        }
    }

    fn psi_at(&self, s: &PowerSums, k: f64) -> f64 {
        match self.kind {
            CoefficientKind::BalancedPower { scale, .. } => scale * s.term(k),
            _ => 0.0,
        }
    }

    /// `ψ(n)` for long memory.
    pub fn psi(&self, n: u64) -> Option<f64> {
        let s = self.sums.as_ref()?;
        match self.kind {
            CoefficientKind::BalancedPower { scale, .. } if n >= 1 => {
                Some(scale * s.term(n as f64))
            }
            CoefficientKind::BalancedPower { .. } => Some(0.0),
            _ => None,
        }
    }

    /// `Ψ_n = Σ_{1≤k≤n} ψ(k)` for long memory.
    pub fn psi_sum(&self, n: u64) -> Option<f64> {
        match self.kind {
            CoefficientKind::BalancedPower { scale, .. } => {
                Some(scale * self.sums.as_ref()?.prefix(n))
            }
            _ => None,
        }
    }

    /// Lag bounds of the support: `(lowest, highest)`, `None` when unbounded.
    pub fn support(&self) -> (Option<i64>, Option<i64>) {
        match &self.kind {
            CoefficientKind::FiniteLag { .. } => {
                (Some(self.lags[0].0), Some(self.lags[self.lags.len() - 1].0))
            }
            CoefficientKind::Geometric { .. } | CoefficientKind::PowerSummable { .. } => {
                (Some(0), None)
            }
            CoefficientKind::BalancedPower { p, .. } => {
                let lo = if *p < 1.0 { None } else { Some(1) };
                let hi = if *p > 0.0 { None } else { Some(-1) };
                (lo, hi)
            }
        }
    }

    /// `Σ φ_i` (`+∞` for long memory).
    pub fn sum(&self) -> f64 {
        match &self.kind {
            CoefficientKind::FiniteLag { .. } => *self.lag_prefix.last().unwrap(),
            CoefficientKind::Geometric { ratio, normalizer } => normalizer / (1.0 - ratio),
            CoefficientKind::PowerSummable { scale, .. } => {
                scale * self.sums.as_ref().unwrap().total().unwrap()
            }
            CoefficientKind::BalancedPower { .. } => f64::INFINITY,
        }
    }

    /// `Σ |φ_i|`.
    pub fn abs_sum(&self) -> f64 {
        match &self.kind {
            CoefficientKind::FiniteLag { lags } => lags.iter().map(|x| x.1.abs()).sum(),
            _ => self.sum().abs(),
        }
    }

    /// `Σ φ_i²` (`+∞` when not square summable).
    pub fn sq_sum(&self) -> f64 {
        match &self.kind {
            CoefficientKind::FiniteLag { lags } => lags.iter().map(|x| x.1 * x.1).sum(),
            CoefficientKind::Geometric { ratio, normalizer } => {
                normalizer * normalizer / (1.0 - ratio * ratio)
            }
            CoefficientKind::PowerSummable { exponent, scale } => {
                scale * scale * PowerSums::new(2.0 * exponent, 0.0).total().unwrap()
            }
            CoefficientKind::BalancedPower {
                alpha,
                p,
                scale,
                log_power,
            } => {
                if 2.0 * alpha > 1.0 {
                    let t = PowerSums::new(2.0 * alpha, 2.0 * log_power)
                        .total()
                        .unwrap();
                    scale * scale * (p * p + (1.0 - p) * (1.0 - p)) * t
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `Σ_{|i|>L} |φ_i|` (`+∞` for long memory).
    pub fn abs_tail(&self, lag: u64) -> f64 {
        let l = lag as i64;
        match &self.kind {
            CoefficientKind::FiniteLag { lags } => lags
                .iter()
                .filter(|x| x.0.abs() > l)
                .map(|x| x.1.abs())
                .sum(),
            CoefficientKind::Geometric { ratio, normalizer } => {
                normalizer.abs() * ratio.powf((l + 1) as f64) / (1.0 - ratio)
            }
            CoefficientKind::PowerSummable { scale, .. } => {
                // φ_i for i > L covers (i+1) ≥ L+2
                scale * self.sums.as_ref().unwrap().tail(lag + 1).unwrap()
            }
            CoefficientKind::BalancedPower { .. } => f64::INFINITY,
        }
    }

    /// `φ_{i,n} = φ_{i+1} + … + φ_{i+n}`.
    pub fn partial_sum(&self, i: i64, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let lo = i + 1;
        let hi = i + n as i64;
        self.range_sum(lo, hi)
    }

    /// `Σ_{k=lo}^{hi} φ_k`.
    pub fn range_sum(&self, lo: i64, hi: i64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        match &self.kind {
            CoefficientKind::FiniteLag { .. } => {
                let a = self.lags.partition_point(|x| x.0 < lo);
                let b = self.lags.partition_point(|x| x.0 <= hi);
                if b <= a {
                    0.0
                } else if b - a <= 8 {
                    self.lags[a..b].iter().map(|x| x.1).sum()
                } else {
                    self.lag_prefix[b] - self.lag_prefix[a]
                }
            }
            CoefficientKind::Geometric { ratio, normalizer } => {
                let lo = lo.max(0);
                if hi < lo {
                    return 0.0;
                }
                let r_lo = ratio.powf(lo as f64);
                // r^lo (1 − r^{hi−lo+1}) / (1 − r)
                let len = (hi - lo + 1) as f64;
                -normalizer * r_lo * (len * ratio.ln()).exp_m1() / (1.0 - ratio)
            }
            CoefficientKind::PowerSummable { scale, .. } => {
                let lo = lo.max(0);
                if hi < lo {
                    return 0.0;
                }
                let s = self.sums.as_ref().unwrap();
                // φ_k = scale·(k+1)^{-s}: indices k+1 ∈ [lo+1, hi+1]
                scale * prefix_diff(s, lo as u64, (hi + 1) as u64)
            }
            CoefficientKind::BalancedPower { p, scale, .. } => {
                let s = self.sums.as_ref().unwrap();
                let q = 1.0 - p;
                let mut total = 0.0;
                // positive lags k ∈ [max(lo,1), hi]
                let plo = lo.max(1);
                if hi >= plo && *p > 0.0 {
                    total += p * scale * prefix_diff(s, (plo - 1) as u64, hi as u64);
                }
                // negative lags k ∈ [lo, min(hi,−1)] ↔ j = −k ∈ [max(1,−hi), −lo]
                let nhi = hi.min(-1);
                if nhi >= lo && q > 0.0 {
                    let jlo = (-nhi).max(1);
                    let jhi = -lo;
                    total += q * scale * prefix_diff(s, (jlo - 1) as u64, jhi as u64);
                }
                total
            }
        }
    }

    /// Default truncation lag and its diagnostic.
    ///
    /// Short memory: the smallest `L ≤ max_lag` with `Σ_{|i|>L}|φ_i| < eps`
    /// (or `max_lag` if none), diagnostic = that tail mass. Long memory:
    /// `L = long_lag`; the diagnostic needs a path length, see
    /// [`CoefficientFamily::long_memory_truncation_error`].
    pub fn default_truncation(&self, eps: f64, max_lag: u64, long_lag: u64) -> u64 {
        match &self.kind {
            CoefficientKind::FiniteLag { lags } => {
                lags.iter().map(|x| x.0.unsigned_abs()).max().unwrap()
            }
            CoefficientKind::BalancedPower { .. } => long_lag,
            _ => {
                if self.abs_tail(max_lag) >= eps {
                    return max_lag;
                }
                let (mut lo, mut hi) = (0u64, max_lag);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if self.abs_tail(mid) < eps {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                lo
            }
        }
    }

    /// For long memory, the relative weight of the coefficients dropped by
    /// truncation at lag `L` over a window of `m` steps:
    /// `(Ψ_{L+m} − Ψ_L) / Ψ_m`.
    pub fn long_memory_truncation_error(&self, lag: u64, m: u64) -> Option<f64> {
        let s = self.sums.as_ref()?;
        if self.memory() != Memory::Long || m == 0 {
            return None;
        }
        Some(prefix_diff(s, lag, lag + m) / s.prefix(m))
    }

    /// Truncation diagnostic `τ_err` for a path of length `m` at lag `L`.
    pub fn truncation_error(&self, lag: u64, m: u64) -> f64 {
        match self.memory() {
            Memory::Short => self.abs_tail(lag),
            Memory::Long => self
                .long_memory_truncation_error(lag, m)
                .unwrap_or(f64::INFINITY),
        }
    }

    /// Dense coefficients for lags in `[-L, L]` intersected with the support.
    pub fn truncated(&self, lag: u64) -> TruncatedCoefficients {
        let l = lag as i64;
        let (slo, shi) = self.support();
        let lo = slo.map_or(-l, |s| s.max(-l));
        let hi = shi.map_or(l, |s| s.min(l));
        if hi < lo {
            return TruncatedCoefficients {
                lo: 0,
                values: vec![0.0],
            };
        }
        let values = (lo..=hi).map(|i| self.phi(i)).collect();
        TruncatedCoefficients { lo, values }
    }
}

/// `Σ_{j=a+1}^{b} f(j)` from the prefix table.
fn prefix_diff(s: &PowerSums, a: u64, b: u64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if b - a <= 32 {
        let mut acc = CompensatedSum::new();
        for j in a + 1..=b {
            acc.add(s.term(j as f64));
        }
        return acc.value();
    }
    s.prefix(b) - s.prefix(a)
}
