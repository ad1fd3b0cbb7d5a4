//! The acceptance suite run by `maruin verify` and by the `acceptance`
//! integration test. Every tolerance is a named constant below.

use std::sync::OnceLock;
use std::time::Instant;

use num_rational::Ratio;
use serde::Serialize;

use maruin::limits::{
    nyrhinen_bounds, ruin_cramer_bounds, ruin_gaussian_bounds, ruin_heavy_bounds,
    ruin_lm_gaussian_bounds, ruin_lm_heavy_bounds, table1_theta, table2_theta, NyrhinenSearch,
    Theta,
};
use maruin::model::{
    CoefficientFamily, CoefficientKind, HeavyProfile, InnovationModel, Memory, Normalization,
    RegimeSpec, RegimeTag, TargetSet, Zeta,
};
use maruin::numeric::rel_diff;
use maruin::ratefn::{finite_n_mgf_sum, kernel_integral, lambda_alpha, KernelG};
use maruin::ruin::{
    g_n, ruin_decay_fit, ruin_decay_fit_with, ruin_is, ruin_mc_grid, McOptions, RuinSpec,
};
use maruin::segments::{
    first_hitting_t, longest_strange_segment_exact, longest_strange_segment_fast, running_segments,
    simulate_growth,
};
use maruin::simulate::{sample_paths, PathConfig};
use maruin::Error;

pub const SEED: u64 = 20241018;

// 1, 2: ruin slopes
pub const RUIN_PATHS: usize = 100_000;
pub const CRAMER_SLOPE: f64 = -1.0;
pub const CRAMER_REL_TOL: f64 = 0.10;
pub const CRAMER_MAX_SECONDS: f64 = 60.0;
pub const MA_VS_IID_REL_TOL: f64 = 0.15;
/// Relative widening of a theory bracket that collapses to a point.
pub const BRACKET_REL_WIDEN: f64 = 0.10;
// 3: segment growth
pub const GROWTH_PATHS: usize = 20;
pub const GROWTH_M: usize = 1_000_000;
pub const GROWTH_RANGE: (f64, f64) = (1.5, 2.5);
pub const GROWTH_MAX_SECONDS: f64 = 90.0;
// 4, 5: quadrature identities
pub const QUAD_REL_TOL: f64 = 1e-6;
pub const TRUNCATION_N: u64 = 10_000;
pub const TRUNCATION_REL_TOL: f64 = 0.02;
// 6: cross-formula consistency
pub const CROSS_REL_TOL: f64 = 1e-10;
// 8: segment algorithms
pub const ALGO_PATHS: usize = 1000;
pub const ALGO_M: usize = 2000;
pub const DUALITY_PATHS: usize = 200;
pub const DUALITY_M: usize = 500;
// 9: appendix bounds
pub const NYRHINEN_TOL: f64 = 1e-8;
// 10: long memory, directional
pub const LM_ALPHA: f64 = 0.75;
/// Large enough that `ρ(u)` visibly decays on the `u` grid, small enough
/// that plain Monte Carlo still resolves it.
pub const LM_MU: f64 = 2.0;
pub const LM_U: [f64; 9] = [2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0];
pub const LM_RUIN_PATHS: usize = 20_000;
pub const LM_MIN_R2: f64 = 0.9;
pub const LM_GROWTH_PATHS: usize = 8;
pub const LM_GROWTH_M: (usize, usize) = (10_000, 1_000_000);

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {}: {} [{:.1}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "cramer slope"),
    (2, "short-memory invariance"),
    (3, "segment growth"),
    (4, "quadrature identities"),
    (5, "truncation irrelevance"),
    (6, "cross-formula consistency"),
    (7, "exponent tables"),
    (8, "segment algorithms"),
    (9, "appendix bounds"),
    (10, "long-memory direction"),
];

type Check = Result<(bool, String), String>;

/// Results shared between criteria: the ruin slopes of 1 and 2.
#[derive(Default)]
pub struct Suite {
    iid: OnceLock<Result<SlopeRun, String>>,
    ma: OnceLock<Result<SlopeRun, String>>,
}

#[derive(Debug, Clone)]
struct SlopeRun {
    slope: f64,
    seconds: f64,
    /// Slope bracket from the short-memory theory.
    bracket: (f64, f64),
}

fn err(e: Error) -> String {
    e.to_string()
}

fn gaussian() -> InnovationModel {
    InnovationModel::gaussian_1d(1.0).expect("unit variance")
}

fn linear(fam: &CoefficientFamily, tag: RegimeTag) -> Result<RegimeSpec, String> {
    RegimeSpec::new(tag, Normalization::Power { omega: 1.0 }, fam, None).map_err(err)
}

fn two_lag() -> CoefficientFamily {
    CoefficientFamily::new(
        CoefficientKind::FiniteLag {
            lags: vec![(0, 0.5), (1, 0.5)],
        },
        true,
    )
    .expect("valid family")
}

fn balanced(alpha: f64) -> CoefficientFamily {
    CoefficientFamily::new(
        CoefficientKind::BalancedPower {
            alpha,
            p: 1.0,
            scale: 1.0,
            log_power: 0.0,
        },
        false,
    )
    .expect("valid family")
}

fn short_spec(fam: CoefficientFamily, mu: f64) -> Result<RuinSpec, String> {
    let reg = linear(&fam, RegimeTag::S1)?;
    RuinSpec::new(
        fam,
        gaussian(),
        reg,
        vec![mu],
        TargetSet::half_line(1.0),
        None,
    )
    .map_err(err)
}

fn slope_run(fam: CoefficientFamily) -> Result<SlopeRun, String> {
    let spec = short_spec(fam, 0.5)?;
    let th = ruin_cramer_bounds(&spec.family, &spec.model, &spec.target, &spec.mu).map_err(err)?;
    let start = Instant::now();
    let est = (4..=12)
        .map(|u| ruin_is(&spec, u as f64, McOptions::new(RUIN_PATHS, SEED)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let fit = ruin_decay_fit(&est, &spec.regime, None).map_err(err)?;
    Ok(SlopeRun {
        slope: fit.slope,
        seconds: start.elapsed().as_secs_f64(),
        bracket: (th.lower, th.upper),
    })
}

/// `[lo, hi]` widened by a fraction of its magnitude on each side.
fn widen(b: (f64, f64), rel: f64) -> (f64, f64) {
    (b.0 - rel * b.0.abs(), b.1 + rel * b.1.abs())
}

impl Suite {
    pub fn new() -> Self {
        Self::default()
    }

    fn iid(&self) -> Result<SlopeRun, String> {
        self.iid
            .get_or_init(|| slope_run(CoefficientFamily::iid()))
            .clone()
    }

    fn ma(&self) -> Result<SlopeRun, String> {
        self.ma.get_or_init(|| slope_run(two_lag())).clone()
    }

    pub fn run(&self, id: u8) -> Outcome {
        let title = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map(|c| c.1)
            .unwrap_or("unknown");
        let start = Instant::now();
        let res = match id {
            1 => self.cramer_slope(),
            2 => self.ma_invariance(),
            3 => segment_growth(),
            4 => quadrature(),
            5 => truncation(),
            6 => cross_formulas(),
            7 => tables(),
            8 => algorithms(),
            9 => self.appendix(),
            10 => self.long_memory(),
            _ => Err(format!("no criterion {id}")),
        };
        let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
        Outcome {
            id,
            title,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn cramer_slope(&self) -> Check {
        let r = self.iid()?;
        let ok = (r.slope - CRAMER_SLOPE).abs() <= CRAMER_REL_TOL * CRAMER_SLOPE.abs()
            && r.seconds < CRAMER_MAX_SECONDS;
        Ok((
            ok,
            format!(
                "slope {:.4} (target {CRAMER_SLOPE} ± {:.0}%), {:.1}s of {CRAMER_MAX_SECONDS}s",
                r.slope,
                100.0 * CRAMER_REL_TOL,
                r.seconds
            ),
        ))
    }

    fn ma_invariance(&self) -> Check {
        let (iid, ma) = (self.iid()?, self.ma()?);
        let (lo, hi) = widen(ma.bracket, BRACKET_REL_WIDEN);
        let in_bracket = ma.slope >= lo && ma.slope <= hi;
        let near_iid = (ma.slope - iid.slope).abs() <= MA_VS_IID_REL_TOL * iid.slope.abs();
        Ok((
            in_bracket && near_iid,
            format!(
                "slope {:.4}; theory [{:.4}, {:.4}] widened to [{lo:.4}, {hi:.4}]; i.i.d. slope {:.4} (± {:.0}%)",
                ma.slope,
                ma.bracket.0,
                ma.bracket.1,
                iid.slope,
                100.0 * MA_VS_IID_REL_TOL
            ),
        ))
    }

    fn appendix(&self) -> Check {
        let search = NyrhinenSearch::default();
        let iid = short_spec(CoefficientFamily::iid(), 0.5)?;
        let g = |n: u64, t: &[f64]| g_n(&iid, t, n).unwrap_or(f64::INFINITY);
        let b = nyrhinen_bounds(&g, &iid.target, search).map_err(err)?;
        let tight = (b.upper + 1.0).abs() <= NYRHINEN_TOL && (b.lower + 1.0).abs() <= NYRHINEN_TOL;

        let ma_spec = short_spec(two_lag(), 0.5)?;
        let g = |n: u64, t: &[f64]| g_n(&ma_spec, t, n).unwrap_or(f64::INFINITY);
        let mb = nyrhinen_bounds(&g, &ma_spec.target, search).map_err(err)?;
        let ma = self.ma()?;
        let (lo, hi) = widen((mb.lower, mb.upper), BRACKET_REL_WIDEN);
        let inside = ma.slope >= lo && ma.slope <= hi;
        Ok((
            tight && inside,
            format!(
                "i.i.d. [{:.12}, {:.12}] vs -1 (tol {NYRHINEN_TOL:e}); moving average [{:.6}, {:.6}] widened to [{lo:.4}, {hi:.4}] holds slope {:.4}",
                b.lower, b.upper, mb.lower, mb.upper, ma.slope
            ),
        ))
    }

    fn long_memory(&self) -> Check {
        let fam = balanced(LM_ALPHA);
        let reg = linear(&fam, RegimeTag::R3)?;
        let spec = RuinSpec::new(
            fam.clone(),
            gaussian(),
            reg.clone(),
            vec![LM_MU],
            TargetSet::half_line(1.0),
            None,
        )
        .map_err(err)?;
        let opts = McOptions::new(LM_RUIN_PATHS, SEED);
        let est = ruin_mc_grid(&spec, &LM_U, opts).map_err(err)?;
        let root = ruin_decay_fit_with(&est, f64::sqrt, None).map_err(err)?;
        let per_u = ruin_decay_fit_with(&est, |u| u, None).map_err(err)?;
        let shape = root.r2 > LM_MIN_R2;
        // the short-memory run at the same drift and grid
        let short = short_spec(CoefficientFamily::iid(), LM_MU)?;
        let short_est = LM_U
            .iter()
            .map(|&u| ruin_is(&short, u, McOptions::new(RUIN_PATHS, SEED)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let short_slope = ruin_decay_fit_with(&short_est, |u| u, None)
            .map_err(err)?
            .slope;
        let slower = per_u.slope > short_slope;

        let cfg = PathConfig::new(fam, gaussian(), LM_GROWTH_M.1, SEED).with_regime(RegimeTag::R3);
        let table = simulate_growth(
            &cfg,
            LM_GROWTH_PATHS,
            &TargetSet::half_line(1.0),
            &reg,
            &[LM_GROWTH_M.0, LM_GROWTH_M.1],
        )
        .map_err(err)?;
        let (s0, s1) = (table.rows[0].mean, table.rows[1].mean);
        let grows = s1 > s0;
        let rho: Vec<String> = est.iter().map(|e| format!("{:.3e}", e.rho_hat)).collect();
        Ok((
            shape && slower && grows,
            format!(
                "(a) rho {} ; R^2 vs sqrt(u) {:.4} (> {LM_MIN_R2}); per-u slope {:.4} vs i.i.d. {:.4} at mu = {LM_MU}; (b) R3 statistic {:.4} at m = {} -> {:.4} at m = {}",
                rho.join(" "),
                root.r2,
                per_u.slope,
                short_slope,
                s0,
                LM_GROWTH_M.0,
                s1,
                LM_GROWTH_M.1
            ),
        ))
    }
}

fn segment_growth() -> Check {
    let fam = CoefficientFamily::iid();
    let reg = linear(&fam, RegimeTag::S2)?;
    let cfg = PathConfig::new(fam, gaussian(), GROWTH_M, SEED).with_regime(RegimeTag::S2);
    let start = Instant::now();
    let t = simulate_growth(
        &cfg,
        GROWTH_PATHS,
        &TargetSet::half_line(1.0),
        &reg,
        &[GROWTH_M],
    )
    .map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let row = t.rows[0];
    let ok = row.mean >= GROWTH_RANGE.0 && row.mean <= GROWTH_RANGE.1 && secs < GROWTH_MAX_SECONDS;
    Ok((
        ok,
        format!(
            "mean R_m/log m = {:.4} (sd {:.4}) over {} paths at m = {GROWTH_M}, range [{}, {}]; {secs:.1}s of {GROWTH_MAX_SECONDS}s",
            row.mean, row.std, row.n_paths, GROWTH_RANGE.0, GROWTH_RANGE.1
        ),
    ))
}

fn quadrature() -> Check {
    let model = gaussian();
    let lambdas = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
    let mut worst: f64 = 0.0;
    for alpha in [0.6, 0.75, 0.9, 1.0] {
        for p in [1.0, 0.5] {
            let kern = KernelG::new(alpha, p).map_err(err)?;
            let c = kernel_integral(&kern, 2.0).map_err(err)?;
            for &l in &lambdas {
                let v = lambda_alpha(&model, &kern, &[l]).map_err(err)?;
                worst = worst.max(rel_diff(v / (0.5 * l * l), c));
            }
        }
    }
    let mut unit = true;
    for beta in [1.5, 2.0, 3.0, 7.5] {
        for p in [0.0, 0.3, 1.0] {
            unit &= kernel_integral(&KernelG::new(1.0, p).map_err(err)?, beta).map_err(err)? == 1.0;
        }
    }
    Ok((
        worst < QUAD_REL_TOL && unit,
        format!(
            "max relative deviation {worst:.2e} (tol {QUAD_REL_TOL:e}); C_(1,beta) == 1: {unit}"
        ),
    ))
}

fn truncation() -> Check {
    let fam = balanced(0.75);
    let model = gaussian();
    let reg = RegimeSpec::new(RegimeTag::R2, Normalization::ProductPsi, &fam, None).map_err(err)?;
    let sum = finite_n_mgf_sum(&fam, &model, &reg, &[1.0], TRUNCATION_N, None).map_err(err)?;
    let target =
        lambda_alpha(&model, &KernelG::new(0.75, 1.0).map_err(err)?, &[1.0]).map_err(err)?;
    let rel = rel_diff(sum, target);
    Ok((
        rel <= TRUNCATION_REL_TOL,
        format!("finite-n sum {sum:.6} vs Lambda_alpha(1) {target:.6}: relative gap {rel:.4} (tol {TRUNCATION_REL_TOL})"),
    ))
}

fn cross_formulas() -> Check {
    let a = TargetSet::half_line(1.0);
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for (s2, mu) in [(1.0, 0.5), (4.0, 1.0), (0.5, 2.0)] {
        let cov = vec![vec![s2]];
        let model = InnovationModel::gaussian_1d(s2).map_err(err)?;
        let cramer =
            ruin_cramer_bounds(&CoefficientFamily::iid(), &model, &a, &[mu]).map_err(err)?;
        let s3 = ruin_gaussian_bounds(&cov, &[mu], &a, 1.0).map_err(err)?;
        let pick = |x: Option<f64>| x.ok_or_else(|| "explicit value not certified".to_string());
        worst_a = worst_a.max(rel_diff(pick(s3.exact)?, pick(cramer.exact)?));
        for omega in [0.6, 0.75, 0.9, 1.0] {
            let s3 = ruin_gaussian_bounds(&cov, &[mu], &a, omega).map_err(err)?;
            let r3 = ruin_lm_gaussian_bounds(
                &cov,
                &[mu],
                &a,
                &KernelG::new(1.0, 1.0).map_err(err)?,
                omega,
            )
            .map_err(err)?;
            worst_b = worst_b.max(rel_diff(pick(r3.exact)?, pick(s3.exact)?));
        }
    }
    // the R4 exponent at α = 1 against the S4 one, in exact arithmetic
    // through the table and in floating point through the bounds
    let mut exact = true;
    let mut worst_c: f64 = 0.0;
    for beta in [
        Ratio::new(3, 2),
        Ratio::from_integer(2),
        Ratio::from_integer(3),
    ] {
        for omega in [
            Ratio::new(5, 4),
            Ratio::new(3, 2),
            Ratio::from_integer(2),
            Ratio::from_integer(3),
        ] {
            let one = Ratio::from_integer(1);
            let want = Theta::Finite((beta * omega - one) / (omega * (beta - one)));
            exact &= table2_theta(Memory::Long, omega, one, beta).map_err(err)? == want;
            exact &= table2_theta(Memory::Short, omega, one, beta).map_err(err)? == want;
            let (b, w) = (to_f64(beta), to_f64(omega));
            let profile = HeavyProfile::new(b, Zeta::Constant { value: 0.5 }).map_err(err)?;
            let r4 = ruin_lm_heavy_bounds(
                &profile,
                &[0.5],
                &a,
                &KernelG::new(1.0, 1.0).map_err(err)?,
                w,
            )
            .map_err(err)?;
            let s4 = ruin_heavy_bounds(&profile, &[0.5], &a, w).map_err(err)?;
            let k = (b * w - 1.0) / (w * (b - 1.0));
            exact &= r4.constants["exponent"] == k;
            worst_c = worst_c.max(rel_diff(s4.constants["nu"] / w, k));
        }
    }
    Ok((
        worst_a < CROSS_REL_TOL && worst_b < CROSS_REL_TOL && exact && worst_c < CROSS_REL_TOL,
        format!(
            "S3(omega=1) vs Cramer {worst_a:.1e}; R3(alpha=1) vs S3 {worst_b:.1e}; R4 exponent exact: {exact}; S4 nu/omega {worst_c:.1e}"
        ),
    ))
}

fn to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The rows of both exponent tables, read off the printed tables: each
/// entry is (row range, closed at the left, closed at the right, value).
type Row = (Ratio<i64>, bool, Ratio<i64>, bool, Theta);

fn printed_rows(
    table: u8,
    memory: Memory,
    alpha: Ratio<i64>,
    beta: Ratio<i64>,
    w: Ratio<i64>,
) -> Vec<Row> {
    let q = Ratio::new;
    let n = Ratio::from_integer;
    let big = n(1_000_000);
    let div = |a: Ratio<i64>, b: Ratio<i64>| {
        if b == n(0) {
            Theta::Infinite
        } else {
            Theta::Finite(a / b)
        }
    };
    let (half, lo, one, hi) = (q(1, 2), q(3, 2) - alpha, n(1), n(2) - alpha);
    match (table, memory) {
        (1, Memory::Short) => vec![
            (half, true, lo, true, div(n(1), n(2) * w - n(1))),
            (lo, true, one, true, div(n(1), n(2) * w - n(1))),
            (one, true, hi, true, div(beta - n(1), beta * w - n(1))),
            (hi, true, big, true, div(beta - n(1), beta * w - n(1))),
        ],
        (1, _) => vec![
            (half, true, lo, true, Theta::Infinite),
            (
                lo,
                true,
                one,
                true,
                div(n(1), n(2) * w + n(2) * alpha - n(3)),
            ),
            (
                one,
                true,
                hi,
                true,
                div(n(1), n(2) * w + n(2) * alpha - n(3)),
            ),
            (
                hi,
                true,
                big,
                true,
                div(beta - n(1), beta * (w + alpha - n(1)) - n(1)),
            ),
        ],
        (_, Memory::Short) => vec![
            (half, true, lo, true, div(n(2) * w - n(1), w)),
            (lo, true, one, true, div(n(2) * w - n(1), w)),
            (
                one,
                false,
                hi,
                false,
                div(beta * w - n(1), w * (beta - n(1))),
            ),
            (hi, true, big, true, div(beta * w - n(1), w * (beta - n(1)))),
        ],
        (_, _) => vec![
            (half, true, lo, true, Theta::Finite(n(0))),
            (lo, true, one, true, div(n(2) * w + n(2) * alpha - n(3), w)),
            (
                one,
                false,
                hi,
                false,
                div(n(2) * w + n(2) * alpha - n(3), w),
            ),
            (
                hi,
                true,
                big,
                true,
                div(beta * (w + alpha - n(1)) - n(1), w * (beta - n(1))),
            ),
        ],
    }
}

fn tables() -> Check {
    let q = Ratio::new;
    let alphas = [q(3, 5), q(3, 4), q(9, 10)];
    let betas = [q(3, 2), q(2, 1), q(3, 1)];
    let mut omegas: Vec<Ratio<i64>> = (0..=40).map(|k| q(1, 2) + q(k, 16)).collect();
    // row boundaries for each α
    for a in alphas {
        omegas.extend([q(3, 2) - a, q(2, 1) - a]);
    }
    let (mut cells, mut bad) = (0usize, Vec::new());
    for a in alphas {
        for b in betas {
            for &w in &omegas {
                for table in [1u8, 2] {
                    for memory in [Memory::Short, Memory::Long] {
                        let got = if table == 1 {
                            table1_theta(memory, w, a, b)
                        } else {
                            table2_theta(memory, w, a, b)
                        }
                        .map_err(err)?;
                        // the row must exist, and every row covering w must agree
                        let rows: Vec<Row> = printed_rows(table, memory, a, b, w)
                            .into_iter()
                            .filter(|(l, lc, h, hc, _)| {
                                (w > *l || (*lc && w == *l)) && (w < *h || (*hc && w == *h))
                            })
                            .collect();
                        cells += 1;
                        if rows.is_empty() || rows.iter().any(|r| r.4 != got) {
                            bad.push(format!(
                                "table {table} {memory:?} a={a} b={b} w={w}: got {got}"
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("{cells} cells agree with the printed rows")
        } else {
            format!("{} of {cells} cells differ, first: {}", bad.len(), bad[0])
        },
    ))
}

fn algorithms() -> Check {
    let fam = CoefficientFamily::iid();
    let reg = linear(&fam, RegimeTag::S2)?;
    let a = TargetSet::half_line(1.0);
    let cfg = PathConfig::new(fam.clone(), gaussian(), ALGO_M, SEED);
    let paths = sample_paths(&cfg, 0, ALGO_PATHS).map_err(err)?;
    let mut mismatch = 0;
    for p in &paths {
        let e = longest_strange_segment_exact(p, &a, &reg).map_err(err)?;
        let f = longest_strange_segment_fast(p, &a, &reg).map_err(err)?;
        mismatch += (e.r != f.r) as usize;
    }

    let cfg = PathConfig::new(fam, gaussian(), DUALITY_M, SEED ^ 0x5eed);
    let paths = sample_paths(&cfg, 0, DUALITY_PATHS).map_err(err)?;
    let grid: Vec<usize> = (2..=DUALITY_M).collect();
    let (mut violations, mut checks) = (0usize, 0usize);
    for p in &paths {
        let r_m = running_segments(p, &a, &reg, &grid).map_err(err)?;
        let r_max = *r_m.last().unwrap();
        for r in 1..=r_max + 1 {
            let t = match first_hitting_t(p, &a, &reg, r) {
                Ok(t) => t,
                Err(Error::NotFoundWithinBudget { .. }) => usize::MAX,
                Err(e) => return Err(err(e)),
            };
            for (m, rm) in grid.iter().zip(&r_m) {
                checks += 1;
                violations += ((*rm >= r) != (t <= *m)) as usize;
            }
        }
    }
    Ok((
        mismatch == 0 && violations == 0,
        format!(
            "{mismatch} exact/fast mismatches over {ALGO_PATHS} paths of m = {ALGO_M}; {violations} duality violations in {checks} (r, m) pairs over {DUALITY_PATHS} paths"
        ),
    ))
}

/// Run the given criteria in order.
pub fn run(ids: &[u8]) -> Vec<Outcome> {
    let suite = Suite::new();
    ids.iter().map(|&id| suite.run(id)).collect()
}

pub fn all_ids() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.0).collect()
}
