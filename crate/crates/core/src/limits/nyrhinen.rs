//! Ruin bounds for a general process from its scaled cumulant generating
//! functions `g_n(t) = n^{-1} log E e^{t·Y_n}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::TargetSet;
use crate::numeric::{bisect, log_grid_max};

use super::{dot, MEMBERSHIP_MARGIN, OPT_TOL};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NyrhinenSearch {
    /// Tilts `t = κv` are searched over `κ ∈ (0, kappa_max]`.
    pub kappa_max: f64,
    /// Largest `n` at which `g_n` is evaluated.
    pub n_max: u64,
}

impl Default for NyrhinenSearch {
    fn default() -> Self {
        Self {
            kappa_max: 100.0,
            n_max: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NyrhinenBounds {
    pub upper: f64,
    pub lower: f64,
    pub kappa_upper: Option<f64>,
    pub kappa_lower: Option<f64>,
    /// `sup_{n ≤ n_max} n g_n(t)` is finite and no longer growing at the
    /// upper tilt.
    pub certified: bool,
    /// `inf_{γ∈A} t·γ ≤ 0` for every `t`: only the trivial bounds hold.
    pub degenerate: bool,
}

/// Upper and lower bounds on `lim (1/u) log P(Y_n ∈ uA for some n)`.
pub fn nyrhinen_bounds(
    g_n: &dyn Fn(u64, &[f64]) -> f64,
    a: &TargetSet,
    search: NyrhinenSearch,
) -> Result<NyrhinenBounds> {
    let (v, c) = a.normal_form();
    let norm = dot(&v, &v).sqrt();
    let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let c = c / norm;
    if c <= 0.0 {
        return Ok(NyrhinenBounds {
            upper: 0.0,
            lower: 0.0,
            kappa_upper: None,
            kappa_lower: None,
            certified: false,
            degenerate: true,
        });
    }
    let n_max = search.n_max.max(2);
    let at = |k: f64| -> Vec<f64> { v.iter().map(|x| k * x).collect() };
    // the limit with the O(1/n) term removed
    let g = |k: f64| {
        let t = at(k);
        2.0 * g_n(n_max, &t) - g_n(n_max / 2, &t)
    };
    let grid: Vec<f64> = (0..=400)
        .map(|i| search.kappa_max * 10f64.powf(-8.0 + 8.0 * i as f64 / 400.0))
        .collect();
    let neg = grid
        .iter()
        .copied()
        .find(|&k| g(k) < -MEMBERSHIP_MARGIN)
        .ok_or(Error::NoNegativeG)?;

    // upper: κ̄ = sup{κ : g(κv) < 0} past the first negative point
    let mut last_neg = neg;
    let mut root = None;
    for &k in grid.iter().filter(|&&k| k > neg) {
        let gv = g(k);
        if gv.is_nan() || gv >= 0.0 {
            root = Some(bisect(
                |x| {
                    let y = g(x);
                    if y.is_nan() {
                        1.0
                    } else {
                        y
                    }
                },
                last_neg,
                k,
                1e-14,
            )?);
            break;
        }
        last_neg = k;
    }
    let kappa_bar = root.unwrap_or(search.kappa_max);
    let upper = -kappa_bar * c;

    // certificate: n g_n stays bounded at a tilt just inside
    let t = at(kappa_bar * (1.0 - 1e-3));
    let mut vals = Vec::new();
    let mut n = 1u64;
    while n <= n_max {
        vals.push(n as f64 * g_n(n, &t));
        n = if n < 16 {
            n + 1
        } else {
            (n as f64 * 1.5).ceil() as u64
        };
    }
    vals.push(n_max as f64 * g_n(n_max, &t));
    let k = vals.len();
    let certified = vals.iter().all(|x| x.is_finite())
        && vals[k - 1] <= vals[k - 2]
        && vals[k - 2] <= vals[k - 3];

    // lower: sup_κ η(κv)[g − κ ∂_κ g] with η = c / ∂_κ g
    let slope = |k: f64| {
        let h = 1e-5 * k.max(1e-8);
        (g(k + h) - g(k - h)) / (2.0 * h)
    };
    let lower_obj = |k: f64| {
        if k > search.kappa_max {
            return f64::NEG_INFINITY;
        }
        let gv = g(k);
        let s = slope(k);
        if !(gv.is_finite() && s.is_finite() && s > 0.0) {
            return f64::NEG_INFINITY;
        }
        c / s * (gv - k * s)
    };
    let lo = search.kappa_max * 1e-8;
    let best = log_grid_max(lower_obj, lo, search.kappa_max, 32, OPT_TOL);
    let (kappa_lower, lower) = match best {
        Some((k, val)) => (Some(k), val),
        None => (None, f64::NEG_INFINITY),
    };
    Ok(NyrhinenBounds {
        upper,
        lower,
        kappa_upper: Some(kappa_bar),
        kappa_lower,
        certified,
        degenerate: false,
    })
}
