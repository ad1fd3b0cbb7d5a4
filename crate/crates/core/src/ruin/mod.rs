//! Monte Carlo estimates of the ruin probability
//! `ρ(u) = P(Y_n ∈ uA for some n ≥ 1)`, `Y_n = S_n − a_n μ`.

mod fit;
mod g;
mod horizon;

pub use fit::{ruin_decay_fit, ruin_decay_fit_with, DecayFit};
pub use g::{empirical_g, g_n, EmpiricalG};
pub use horizon::horizon_tail_bound;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::{condition_a, dot, HalfSpace};
use crate::model::{
    CoefficientFamily, CoefficientKind, InnovationModel, Memory, RegimeSpec, RegimeTag, TargetSet,
};
use crate::numeric::positive_root_from;
use crate::simulate::{default_lag, InnovationSource, PathStream};

/// Default horizon multiplier `M` in `N(u) = M·a^←(u)`.
pub const DEFAULT_HORIZON_MULTIPLIER: f64 = 20.0;

/// Model, regime, drift and target set of a ruin problem.
#[derive(Debug, Clone)]
pub struct RuinSpec {
    pub family: CoefficientFamily,
    pub model: InnovationModel,
    pub regime: RegimeSpec,
    pub mu: Vec<f64>,
    pub target: TargetSet,
    /// Truncation lag of the simulated paths.
    pub lag: u64,
    // the law actually simulated: the coefficients inside [−L, L]
    simulated: CoefficientFamily,
}

impl RuinSpec {
    pub fn new(
        family: CoefficientFamily,
        model: InnovationModel,
        regime: RegimeSpec,
        mu: Vec<f64>,
        target: TargetSet,
        lag: Option<u64>,
    ) -> Result<Self> {
        let d = model.dim();
        for got in [mu.len(), target.dim()] {
            if got != d {
                return Err(Error::DimensionMismatch { expected: d, got });
            }
        }
        regime.validate_model(&model)?;
        let lag = lag.unwrap_or_else(|| default_lag(&family)).max(1);
        let tc = family.truncated(lag);
        let lags = tc
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, v)| (tc.lo + k as i64, *v))
            .collect::<Vec<_>>();
        let lags = if lags.is_empty() {
            vec![(0, 0.0)]
        } else {
            lags
        };
        let simulated = CoefficientFamily::new(CoefficientKind::FiniteLag { lags }, false)?;
        Ok(Self {
            family,
            model,
            regime,
            mu,
            target,
            lag,
            simulated,
        })
    }

    /// The truncated coefficients the paths are built from, as a family.
    pub fn simulated_family(&self) -> &CoefficientFamily {
        &self.simulated
    }

    fn half_space(&self) -> Result<HalfSpace> {
        condition_a(&self.target, &self.mu).map_err(|_| Error::NoDriftCertificate)
    }

    fn stream(&self, seed: u64, path: u64, tilt: Option<&[f64]>) -> Result<PathStream> {
        let src = InnovationSource::new(self.model.sampler(tilt)?, seed, path);
        Ok(PathStream::new(&self.family.truncated(self.lag), src))
    }

    /// `N(u) = ⌈M · a^←(u)⌉`.
    pub fn horizon(&self, u: f64, multiplier: f64) -> u64 {
        (multiplier * self.regime.a_inverse(u) as f64).ceil() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Plain,
    Tilted,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Plain => "plain",
            Method::Tilted => "tilted",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McOptions {
    pub n_paths: usize,
    /// `M` in `N(u) = M·a^←(u)`.
    pub horizon_multiplier: f64,
    pub seed: u64,
}

impl McOptions {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            horizon_multiplier: DEFAULT_HORIZON_MULTIPLIER,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter("n_paths must be positive".into()));
        }
        if !(self.horizon_multiplier >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon multiplier must be at least 2, got {}",
                self.horizon_multiplier
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuinEstimate {
    pub u: f64,
    pub rho_hat: f64,
    /// Sampling standard error.
    pub se: f64,
    pub method: Method,
    pub horizon: u64,
    /// Bound on `P(N(u) < first hit < ∞)`.
    pub tail_bound: f64,
    /// `se + tail_bound`.
    pub uncertainty: f64,
    pub hits: usize,
    /// Share of hits after `N(u)/2`.
    pub late_hit_fraction: f64,
    /// 10%, 50% and 90% quantiles of the hit time among hitting paths.
    pub hit_quantiles: Option<[f64; 3]>,
    pub seed: u64,
    pub n_paths: usize,
    pub regime: RegimeTag,
    pub tilt: Option<Vec<f64>>,
}

fn quantiles(mut times: Vec<u64>) -> Option<[f64; 3]> {
    if times.is_empty() {
        return None;
    }
    times.sort_unstable();
    let q = |p: f64| times[((times.len() - 1) as f64 * p).round() as usize] as f64;
    Some([q(0.1), q(0.5), q(0.9)])
}

fn late_fraction(times: &[u64], horizon: u64) -> f64 {
    if times.is_empty() {
        return 0.0;
    }
    times.iter().filter(|t| 2 * **t > horizon).count() as f64 / times.len() as f64
}

/// Plain Monte Carlo for one `u`.
pub fn ruin_mc(spec: &RuinSpec, u: f64, opts: McOptions) -> Result<RuinEstimate> {
    Ok(ruin_mc_grid(spec, &[u], opts)?.remove(0))
}

/// Plain Monte Carlo on a grid of `u`, every path serving every `u`.
pub fn ruin_mc_grid(spec: &RuinSpec, us: &[f64], opts: McOptions) -> Result<Vec<RuinEstimate>> {
    opts.check()?;
    if us.is_empty() || us.iter().any(|u| !(*u > 0.0)) {
        return Err(Error::InvalidParameter("u must be positive".into()));
    }
    let hs = spec.half_space()?;
    let horizons: Vec<u64> = us
        .iter()
        .map(|&u| spec.horizon(u, opts.horizon_multiplier))
        .collect();
    let tails = us
        .iter()
        .zip(&horizons)
        .map(|(&u, &n)| horizon_tail_bound(spec, u, n))
        .collect::<Result<Vec<f64>>>()?;
    let n_max = *horizons.iter().max().unwrap();
    let drift: Vec<f64> = (0..=n_max)
        .map(|n| if n == 0 { 0.0 } else { spec.regime.a(n) * hs.m })
        .collect();

    // per path: the record values of v·Y_n and when they were set
    let records: Vec<Vec<(u64, f64)>> = (0..opts.n_paths as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<(u64, f64)>> {
            let mut st = spec.stream(opts.seed, k, None)?;
            let mut rec = Vec::new();
            let mut best = f64::NEG_INFINITY;
            for n in 1..=n_max {
                let w = dot(st.advance(), &hs.v) - drift[n as usize];
                if w > best {
                    best = w;
                    rec.push((n, w));
                }
            }
            Ok(rec)
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(us.len());
    for ((&u, &horizon), &tail_bound) in us.iter().zip(&horizons).zip(&tails) {
        let level = u * hs.c;
        let times: Vec<u64> = records
            .iter()
            .filter_map(|rec| {
                rec.iter()
                    .find(|(n, w)| *n <= horizon && *w > level)
                    .map(|r| r.0)
            })
            .collect();
        let hits = times.len();
        let n = opts.n_paths as f64;
        let p = hits as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        out.push(RuinEstimate {
            u,
            rho_hat: p,
            se,
            method: Method::Plain,
            horizon,
            tail_bound,
            uncertainty: se + tail_bound,
            hits,
            late_hit_fraction: late_fraction(&times, horizon),
            hit_quantiles: quantiles(times),
            seed: opts.seed,
            n_paths: opts.n_paths,
            regime: spec.regime.tag(),
            tilt: None,
        });
    }
    Ok(out)
}

/// The innovation tilt `θ* = κ* (Σφ) v`, with `κ* > 0` the root of
/// `Λ(κ (Σφ) v) = κ v·μ`.
pub fn tilt_root(spec: &RuinSpec) -> Result<Vec<f64>> {
    if spec.family.memory() == Memory::Long {
        return Err(Error::UnsupportedFamily(
            "tilting is offered for short-memory families only".into(),
        ));
    }
    let (v, c) = spec.target.normal_form();
    let norm = dot(&v, &v).sqrt();
    let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let m = dot(&v, &spec.mu);
    if !(m > 0.0) || !(c > 0.0) {
        return Err(Error::RootNotBracketed(format!(
            "no positive tilt root: v·μ = {m}"
        )));
    }
    let s = spec.simulated.sum();
    let dir: Vec<f64> = v.iter().map(|x| x * s).collect();
    let f = |k: f64| {
        let t: Vec<f64> = dir.iter().map(|x| k * x).collect();
        let l = spec.model.log_mgf(&t);
        if l.is_finite() {
            l - k * m
        } else {
            f64::INFINITY
        }
    };
    let mut x0 = 1e-3;
    while !(f(x0) < 0.0) && x0 > 1e-300 {
        x0 *= 0.5;
    }
    let k = positive_root_from(f, x0, 1e8, 1e-14)?;
    Ok(dir.iter().map(|x| k * x).collect())
}

/// Importance sampling with innovations tilted by [`tilt_root`], each path
/// stopped at its first hit.
pub fn ruin_is(spec: &RuinSpec, u: f64, opts: McOptions) -> Result<RuinEstimate> {
    opts.check()?;
    if !(u > 0.0) {
        return Err(Error::InvalidParameter("u must be positive".into()));
    }
    let theta = tilt_root(spec)?;
    let hs = spec.half_space()?;
    let horizon = spec.horizon(u, opts.horizon_multiplier);
    let tail_bound = horizon_tail_bound(spec, u, horizon)?;
    let level = u * hs.c;
    let drift: Vec<f64> = (0..=horizon)
        .map(|n| if n == 0 { 0.0 } else { spec.regime.a(n) * hs.m })
        .collect();
    let per_path: Vec<Option<(u64, f64)>> = (0..opts.n_paths as u64)
        .into_par_iter()
        .map(|k| -> Result<Option<(u64, f64)>> {
            let mut st = spec.stream(opts.seed, k, Some(&theta))?;
            for n in 1..=horizon {
                if dot(st.advance(), &hs.v) - drift[n as usize] > level {
                    return Ok(Some((n, (-st.llr()).exp())));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let n = opts.n_paths as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut times = Vec::new();
    for (t, w) in per_path.iter().flatten() {
        s1 += w;
        s2 += w * w;
        times.push(*t);
    }
    let mean = s1 / n;
    let var = if opts.n_paths > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let se = (var / n).sqrt();
    Ok(RuinEstimate {
        u,
        rho_hat: mean.min(1.0),
        se,
        method: Method::Tilted,
        horizon,
        tail_bound,
        uncertainty: se + tail_bound,
        hits: times.len(),
        late_hit_fraction: late_fraction(&times, horizon),
        hit_quantiles: quantiles(times),
        seed: opts.seed,
        n_paths: opts.n_paths,
        regime: spec.regime.tag(),
        tilt: Some(theta),
    })
}

/// Tilted estimate where a tilt exists, plain Monte Carlo otherwise.
pub fn ruin_estimate(spec: &RuinSpec, u: f64, opts: McOptions) -> Result<RuinEstimate> {
    match ruin_is(spec, u, opts) {
        Err(e @ (Error::RootNotBracketed(_) | Error::UnsupportedFamily(_))) => {
            log::warn!("falling back to plain Monte Carlo at u = {u}: {e}");
            ruin_mc(spec, u, opts)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InnovationLaw, Normalization};

    fn linear(fam: &CoefficientFamily) -> RegimeSpec {
        RegimeSpec::new(
            RegimeTag::S1,
            Normalization::Power { omega: 1.0 },
            fam,
            None,
        )
        .unwrap()
    }

    pub(super) fn gaussian_spec(fam: CoefficientFamily, mu: f64) -> RuinSpec {
        let reg = linear(&fam);
        RuinSpec::new(
            fam,
            InnovationModel::gaussian_1d(1.0).unwrap(),
            reg,
            vec![mu],
            TargetSet::half_line(1.0),
            None,
        )
        .unwrap()
    }

    #[test]
    fn degenerate_innovations_never_ruin() {
        let fam = CoefficientFamily::iid();
        let model = InnovationModel::new(InnovationLaw::TwoSidedDiscrete {
            atoms: vec![(0.0, 1.0)],
        })
        .unwrap();
        let spec = RuinSpec::new(
            fam.clone(),
            model,
            linear(&fam),
            vec![0.5],
            TargetSet::half_line(1.0),
            None,
        )
        .unwrap();
        let e = ruin_mc(&spec, 1.0, McOptions::new(200, 1)).unwrap();
        assert_eq!(e.rho_hat, 0.0);
        assert_eq!(e.se, 0.0);
        assert_eq!(e.tail_bound, 0.0);
    }

    #[test]
    fn gaussian_tilt_is_two_mu() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let t = tilt_root(&spec).unwrap();
        assert!((t[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_drift_has_no_tilt() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.0);
        assert!(matches!(tilt_root(&spec), Err(Error::RootNotBracketed(_))));
        assert!(matches!(
            ruin_mc(&spec, 1.0, McOptions::new(10, 1)),
            Err(Error::NoDriftCertificate)
        ));
    }

    #[test]
    fn tilted_relative_error_at_u10() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let e = ruin_is(&spec, 10.0, McOptions::new(100_000, 3)).unwrap();
        assert!(e.se / e.rho_hat < 0.05, "{e:?}");
        // log ρ(u) ≈ −u + O(1)
        assert!((e.rho_hat.ln() + 10.0).abs() < 2.0, "{e:?}");
        assert!(e.tail_bound < 1e-6 * e.rho_hat);
    }

    #[test]
    fn tilted_and_plain_agree() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let opts = McOptions::new(40_000, 8);
        let a = ruin_is(&spec, 4.0, opts).unwrap();
        let b = ruin_mc(&spec, 4.0, opts).unwrap();
        assert!(b.hits >= 50);
        let se = (a.se * a.se + b.se * b.se).sqrt();
        assert!((a.rho_hat - b.rho_hat).abs() < 3.0 * se, "{a:?} {b:?}");
    }

    #[test]
    fn grid_estimates_are_monotone() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let es = ruin_mc_grid(&spec, &[1.0, 2.0, 3.0, 4.0], McOptions::new(20_000, 2)).unwrap();
        for w in es.windows(2) {
            assert!(w[1].rho_hat <= w[0].rho_hat);
        }
        let single = ruin_mc(&spec, 3.0, McOptions::new(20_000, 2)).unwrap();
        assert_eq!(single.rho_hat, es[2].rho_hat);
    }

    #[test]
    fn longer_horizons_never_lose_hits() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let mut last = 0.0;
        for m in [2.0, 5.0, 20.0] {
            let o = McOptions {
                horizon_multiplier: m,
                ..McOptions::new(5_000, 4)
            };
            let e = ruin_mc(&spec, 3.0, o).unwrap();
            assert!(e.rho_hat >= last);
            last = e.rho_hat;
        }
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let spec = gaussian_spec(CoefficientFamily::iid(), 0.5);
        let opts = McOptions::new(2_000, 6);
        let a = ruin_is(&spec, 5.0, opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| ruin_is(&spec, 5.0, opts).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn long_memory_tilt_refused() {
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
        let reg = RegimeSpec::new(
            RegimeTag::R3,
            Normalization::Power { omega: 1.0 },
            &fam,
            None,
        )
        .unwrap();
        let spec = RuinSpec::new(
            fam,
            InnovationModel::gaussian_1d(1.0).unwrap(),
            reg,
            vec![0.5],
            TargetSet::half_line(1.0),
            Some(100),
        )
        .unwrap();
        assert!(matches!(
            ruin_is(&spec, 2.0, McOptions::new(10, 0)),
            Err(Error::UnsupportedFamily(_))
        ));
        let e = ruin_estimate(&spec, 2.0, McOptions::new(200, 0)).unwrap();
        assert_eq!(e.method, Method::Plain);
    }
}
