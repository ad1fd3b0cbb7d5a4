//! One-dimensional optimization and root finding.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn finite_or_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
/// Stops once the bracket is narrower than `tol·(1 + |x|)`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = finite_or_inf(f(c));
    let mut fd = finite_or_inf(f(d));
    for _ in 0..400 {
        if (b - a).abs() <= tol * (1.0 + c.abs().max(d.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = finite_or_inf(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = finite_or_inf(f(d));
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimize `f` over `[lo, hi] ⊂ (0, ∞)` by scanning a logarithmic grid with
/// `per_decade` points per decade, then refining around the best grid point
/// by golden section in log-space.
///
/// Returns `None` when `f` is `+∞` (or NaN) on the whole grid.
pub fn log_grid_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    per_decade: usize,
    tol: f64,
) -> Option<(f64, f64)> {
    assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).ceil() as usize).max(2) + 1;
    let step = (hi / lo).ln() / (count - 1) as f64;
    let (llo, _) = (lo.ln(), hi.ln());
    let mut best = (0usize, f64::INFINITY);
    for k in 0..count {
        let x = (llo + step * k as f64).exp();
        let v = finite_or_inf(f(x));
        if v < best.1 {
            best = (k, v);
        }
    }
    if !best.1.is_finite() {
        return None;
    }
    let k = best.0;
    let left = llo + step * k.saturating_sub(1) as f64;
    let right = llo + step * (k + 1).min(count - 1) as f64;
    let (ls, vs) = golden_min(|s| f(s.exp()), left, right, tol);
    if vs <= best.1 {
        Some((ls.exp(), vs))
    } else {
        Some(((llo + step * k as f64).exp(), best.1))
    }
}

/// Maximize `f` over a logarithmic grid on `[lo, hi]`; see [`log_grid_min`].
pub fn log_grid_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    per_decade: usize,
    tol: f64,
) -> Option<(f64, f64)> {
    log_grid_min(
        |x| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                -v
            }
        },
        lo,
        hi,
        per_decade,
        tol,
    )
    .map(|(x, v)| (x, -v))
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::RootNotBracketed(format!(
            "f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol * (1.0 + m.abs()) || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Find the positive root of an increasing-eventually `f` with `f(x0) < 0`:
/// doubles the upper end until `f > 0` (or `+∞`), then bisects. A `+∞`
/// value counts as positive.
pub fn positive_root_from<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    x_max: f64,
    tol: f64,
) -> Result<f64> {
    let sign = |v: f64| if v.is_nan() { 1.0 } else { v };
    let f0 = sign(f(x0));
    if !(f0 < 0.0) {
        return Err(Error::RootNotBracketed(format!(
            "f is not negative at the starting point {x0}"
        )));
    }
    let mut lo = x0;
    let mut hi = x0 * 2.0;
    loop {
        if hi > x_max {
            return Err(Error::RootNotBracketed(format!(
                "no sign change below {x_max}"
            )));
        }
        if sign(f(hi)) > 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    bisect(|x| sign(f(x)), lo, hi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, v) = golden_min(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-12);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_grid_handles_wide_ranges() {
        // min over c > 0 of c^{-1}(0.5 + c)^2 is at c = 0.5, value 2
        let (c, v) = log_grid_min(|c| (0.5 + c).powi(2) / c, 1e-4, 1e4, 64, 1e-12).unwrap();
        assert!((c - 0.5).abs() < 1e-5);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn log_grid_all_infinite() {
        assert!(log_grid_min(|_| f64::INFINITY, 1.0, 10.0, 4, 1e-9).is_none());
    }

    #[test]
    fn bisect_and_bracket() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        let r = positive_root_from(|x| x * x - 10.0, 0.1, 1e6, 1e-14).unwrap();
        assert!((r - 10f64.sqrt()).abs() < 1e-12);
    }
}
