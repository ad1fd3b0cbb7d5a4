//! The subcommands. Each writes its artifacts through [`Output`] and
//! returns a short human-readable summary.

use maruin::limits::{
    ruin_bounds, segment_rate_bounds, table1_theta, table2_theta, RateBounds, RuinAsymptote,
    OPT_TOL,
};
use maruin::model::{Memory, RegimeTag};
use maruin::ruin::{
    ruin_decay_fit, ruin_estimate, ruin_is, ruin_mc_grid, McOptions, RuinEstimate, RuinSpec,
};
use maruin::segments::{log_grid, simulate_growth};
use maruin::simulate::PathConfig;
use serde::Serialize;

use crate::config::{Config, RuinMethod};
use crate::output::Output;
use crate::svg::{line_plot, Series};
use crate::{numeric, CliError};

#[derive(Serialize)]
struct RateReport {
    regime: RegimeTag,
    seed: u64,
    segments: Option<RateBounds>,
    segments_error: Option<String>,
    ruin: Option<RuinAsymptote>,
    ruin_error: Option<String>,
}

#[derive(Serialize)]
struct RateRow {
    quantity: &'static str,
    lower: f64,
    upper: f64,
    exact: Option<f64>,
    regime: RegimeTag,
    seed: u64,
    opt_tol: f64,
}

pub fn rate(cfg: &Config, out: &Output) -> Result<String, CliError> {
    let b = cfg.build()?;
    let seg = segment_rate_bounds(&b.family, &b.model, &b.regime, &b.target);
    let ruin = ruin_bounds(&b.family, &b.model, &b.regime, &b.target, &b.mu);
    if let (Err(e1), Err(e2)) = (&seg, &ruin) {
        return Err(CliError::Numeric(format!(
            "segment rates: {e1}; ruin asymptotics: {e2}"
        )));
    }
    let tag = b.regime.tag();
    let seed = cfg.experiment.seed;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    if let Ok(s) = &seg {
        rows.push(RateRow {
            quantity: "segment_rate",
            lower: s.lower,
            upper: s.upper,
            exact: (s.lower == s.upper).then_some(s.lower),
            regime: tag,
            seed,
            opt_tol: OPT_TOL,
        });
        summary.push(format!("{tag}: I_* = {}, I^* = {}", s.lower, s.upper));
    }
    if let Ok(r) = &ruin {
        rows.push(RateRow {
            quantity: "ruin_limit",
            lower: r.lower,
            upper: r.upper,
            exact: r.exact,
            regime: tag,
            seed,
            opt_tol: OPT_TOL,
        });
        summary.push(format!("{tag}: ruin limit in [{}, {}]", r.lower, r.upper));
    }
    let report = RateReport {
        regime: tag,
        seed,
        segments_error: seg.as_ref().err().map(|e| e.to_string()),
        segments: seg.ok(),
        ruin_error: ruin.as_ref().err().map(|e| e.to_string()),
        ruin: ruin.ok(),
    };
    out.csv("rate", &rows)?;
    out.json("rate", &report)?;
    Ok(summary.join("\n"))
}

#[derive(Serialize)]
struct SegmentRow {
    m: usize,
    path_id: u64,
    #[serde(rename = "R_m")]
    r_m: usize,
    #[serde(rename = "b_R")]
    b_r: f64,
    statistic: f64,
    regime: RegimeTag,
    seed: u64,
    lag: u64,
}

#[derive(Serialize)]
struct SegmentReport<'a> {
    regime: RegimeTag,
    seed: u64,
    lag: u64,
    truncation_error: f64,
    /// `1/I^*` and `1/I_*`: the bracket of the limit of the statistic.
    limit_lower: Option<f64>,
    limit_upper: Option<f64>,
    rows: &'a [maruin::segments::GrowthRow],
}

pub fn segments(cfg: &Config, out: &Output) -> Result<String, CliError> {
    let b = cfg.build()?;
    let e = &cfg.experiment;
    let mut pc = PathConfig::new(b.family.clone(), b.model.clone(), e.segments.m_max, e.seed)
        .with_regime(b.regime.tag());
    if let Some(l) = e.lag {
        pc = pc.with_lag(l);
    }
    let grid = log_grid(e.segments.m_min, e.segments.m_max, e.segments.per_decade);
    let table = simulate_growth(&pc, e.segments.n_paths, &b.target, &b.regime, &grid)
        .map_err(numeric("segment growth"))?;
    let tag = b.regime.tag();
    let rows: Vec<SegmentRow> = table
        .records
        .iter()
        .map(|r| SegmentRow {
            m: r.m,
            path_id: r.path_id,
            r_m: r.r_m,
            b_r: r.b_r,
            statistic: r.statistic,
            regime: tag,
            seed: e.seed,
            lag: pc.lag,
        })
        .collect();
    let bounds = segment_rate_bounds(&b.family, &b.model, &b.regime, &b.target).ok();
    let inv = |x: f64| if x > 0.0 { Some(1.0 / x) } else { None };
    let report = SegmentReport {
        regime: tag,
        seed: e.seed,
        lag: pc.lag,
        truncation_error: pc.truncation_error(),
        limit_lower: bounds.as_ref().and_then(|b| inv(b.upper)),
        limit_upper: bounds.as_ref().and_then(|b| inv(b.lower)),
        rows: &table.rows,
    };
    out.csv("segments", &rows)?;
    out.json("segments", &report)?;
    out.svg("segments", || {
        let xs: Vec<f64> = table.rows.iter().map(|r| (r.m as f64).log10()).collect();
        let mut series = vec![Series {
            name: "mean b(R_m)/log m".into(),
            points: xs
                .iter()
                .zip(&table.rows)
                .map(|(x, r)| (*x, r.mean))
                .collect(),
            dashed: false,
            markers: true,
        }];
        for (name, v) in [("1/I^*", report.limit_lower), ("1/I_*", report.limit_upper)] {
            if let (Some(v), Some(x0), Some(x1)) = (v, xs.first(), xs.last()) {
                series.push(Series {
                    name: name.into(),
                    points: vec![(*x0, v), (*x1, v)],
                    dashed: true,
                    markers: false,
                });
            }
        }
        line_plot(
            "Longest strange segment growth",
            "log10 m",
            "b(R_m) / log m",
            &series,
        )
    })?;
    let last = table.rows.last().expect("grid is non-empty");
    Ok(format!(
        "{tag}: mean statistic {:.4} (sd {:.4}) at m = {} over {} paths",
        last.mean, last.std, last.m, last.n_paths
    ))
}

#[derive(Serialize)]
struct RuinRow {
    u: f64,
    rho_hat: f64,
    se: f64,
    method: String,
    horizon: u64,
    tail_bound: f64,
    n_paths: usize,
    seed: u64,
    regime: RegimeTag,
    lag: u64,
    horizon_multiplier: f64,
    hits: usize,
    late_hit_fraction: f64,
}

/// Estimates over `cfg.experiment.ruin.u` with the configured method.
pub fn ruin_estimates(cfg: &Config) -> Result<(RuinSpec, Vec<RuinEstimate>), CliError> {
    let b = cfg.build()?;
    let e = &cfg.experiment;
    let spec = RuinSpec::new(b.family, b.model, b.regime, b.mu, b.target, e.lag)
        .map_err(numeric("ruin setup"))?;
    let opts = McOptions {
        n_paths: e.ruin.n_paths,
        horizon_multiplier: e.ruin.horizon_multiplier,
        seed: e.seed,
    };
    let est = match e.ruin.method {
        RuinMethod::Plain => ruin_mc_grid(&spec, &e.ruin.u, opts),
        RuinMethod::Tilted => e.ruin.u.iter().map(|&u| ruin_is(&spec, u, opts)).collect(),
        RuinMethod::Auto => e
            .ruin
            .u
            .iter()
            .map(|&u| ruin_estimate(&spec, u, opts))
            .collect(),
    }
    .map_err(numeric("ruin estimate"))?;
    Ok((spec, est))
}

pub fn ruin(cfg: &Config, out: &Output) -> Result<String, CliError> {
    let (spec, est) = ruin_estimates(cfg)?;
    let tag = spec.regime.tag();
    let theory = ruin_bounds(
        &spec.family,
        &spec.model,
        &spec.regime,
        &spec.target,
        &spec.mu,
    );
    let bracket = theory.as_ref().ok().map(|t| (t.lower, t.upper));
    let fit = ruin_decay_fit(&est, &spec.regime, bracket);
    let rows: Vec<RuinRow> = est
        .iter()
        .map(|e| RuinRow {
            u: e.u,
            rho_hat: e.rho_hat,
            se: e.se,
            method: e.method.to_string(),
            horizon: e.horizon,
            tail_bound: e.tail_bound,
            n_paths: e.n_paths,
            seed: e.seed,
            regime: tag,
            lag: spec.lag,
            horizon_multiplier: cfg.experiment.ruin.horizon_multiplier,
            hits: e.hits,
            late_hit_fraction: e.late_hit_fraction,
        })
        .collect();
    out.csv("ruin", &rows)?;
    out.json(
        "ruin",
        &serde_json::json!({
            "regime": tag,
            "lag": spec.lag,
            "estimates": est,
            "fit": fit.as_ref().ok(),
            "fit_error": fit.as_ref().err().map(|e| e.to_string()),
            "theory": theory.as_ref().ok(),
            "theory_error": theory.as_ref().err().map(|e| e.to_string()),
        }),
    )?;
    if let Ok(f) = &fit {
        out.svg("ruin", || {
            let pts: Vec<(f64, f64)> = f
                .regressor
                .iter()
                .copied()
                .zip(f.log_rho.iter().copied())
                .collect();
            let mut series = vec![Series {
                name: "log rho_hat".into(),
                points: pts,
                dashed: false,
                markers: true,
            }];
            let (x0, x1) = (f.regressor[0], *f.regressor.last().unwrap());
            let y0 = f.intercept + f.slope * x0;
            for (name, s) in [("lower", f.lower), ("upper", f.upper)] {
                if let Some(s) = s.filter(|s| s.is_finite()) {
                    series.push(Series {
                        name: format!("theory {name}"),
                        points: vec![(x0, y0), (x1, y0 + s * (x1 - x0))],
                        dashed: true,
                        markers: false,
                    });
                }
            }
            line_plot("Ruin probability decay", "b(a^-1(u))", "log rho", &series)
        })?;
    }
    Ok(match fit {
        Ok(f) => format!(
            "{tag}: slope {:.4} (R^2 {:.4}) over {} points{}",
            f.slope,
            f.r2,
            f.n_points,
            match (f.lower, f.upper) {
                (Some(l), Some(u)) => format!(", theory [{l:.4}, {u:.4}]"),
                _ => String::new(),
            }
        ),
        Err(e) => format!("{tag}: {} estimates written; no decay fit ({e})", est.len()),
    })
}

#[derive(Serialize)]
struct TableRow {
    table: u8,
    memory: &'static str,
    alpha: String,
    beta: String,
    omega: String,
    theta: String,
    theta_value: Option<f64>,
}

pub fn tables(cfg: &Config, out: &Output) -> Result<String, CliError> {
    let t = &cfg.experiment.tables;
    let parse = |v: &[crate::config::Rational]| -> Result<Vec<_>, CliError> {
        v.iter()
            .map(|r| r.parse().map_err(CliError::Config))
            .collect()
    };
    let (alphas, betas, omegas) = (parse(&t.alpha)?, parse(&t.beta)?, parse(&t.omega)?);
    let mut rows = Vec::new();
    for &alpha in &alphas {
        for &beta in &betas {
            for &omega in &omegas {
                for table in [1u8, 2] {
                    for (memory, name) in [(Memory::Short, "short"), (Memory::Long, "long")] {
                        let th = if table == 1 {
                            table1_theta(memory, omega, alpha, beta)
                        } else {
                            table2_theta(memory, omega, alpha, beta)
                        };
                        let (theta, theta_value) = match th {
                            Ok(x) => (x.to_string(), Some(x.to_f64()).filter(|v| v.is_finite())),
                            Err(_) => ("n/a".to_string(), None),
                        };
                        rows.push(TableRow {
                            table,
                            memory: name,
                            alpha: alpha.to_string(),
                            beta: beta.to_string(),
                            omega: omega.to_string(),
                            theta,
                            theta_value,
                        });
                    }
                }
            }
        }
    }
    out.csv("tables", &rows)?;
    out.json("tables", &rows)?;
    Ok(format!("{} cells written", rows.len()))
}
