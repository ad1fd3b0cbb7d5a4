//! Convex conjugates `f*(x) = sup_λ {λ·x − f(λ)}`, optionally restricted to
//! a box.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::golden_min;

/// A convex function `ℝ^d → (−∞, ∞]`; `+∞` encodes points outside the
/// effective domain.
pub trait ConvexFunction {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Analytic gradient, if available.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// Wraps a closure as a [`ConvexFunction`].
pub struct FnConvex<F, G = fn(&[f64]) -> Option<Vec<f64>>> {
    dim: usize,
    f: F,
    g: Option<G>,
}

impl<F: Fn(&[f64]) -> f64> FnConvex<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, g: None }
    }
}

impl<F: Fn(&[f64]) -> f64, G: Fn(&[f64]) -> Option<Vec<f64>>> FnConvex<F, G> {
    pub fn with_gradient(dim: usize, f: F, g: G) -> Self {
        Self { dim, f, g: Some(g) }
    }
}

impl<F: Fn(&[f64]) -> f64, G: Fn(&[f64]) -> Option<Vec<f64>>> ConvexFunction for FnConvex<F, G> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.g.as_ref().and_then(|g| g(x))
    }
}

/// Closed box `{λ : lo ≤ λ ≤ hi}` (entries may be infinite).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    pub fn whole(dim: usize) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    fn project(&self, x: &mut [f64]) {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[k], self.hi[k]);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateResult {
    pub value: f64,
    pub maximizer: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Beyond this `|λ|` a still-increasing objective is declared unbounded.
const LAMBDA_MAX: f64 = 1e10;

/// `sup_{λ ∈ region} {λ·x − f(λ)}`.
pub fn legendre<F: ConvexFunction + ?Sized>(
    f: &F,
    x: &[f64],
    region: Option<&Region>,
) -> Result<ConjugateResult> {
    let d = f.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    let whole = Region::whole(d);
    let region = region.unwrap_or(&whole);
    if region.lo.len() != d || region.hi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: region.lo.len(),
        });
    }
    if region.lo.iter().zip(&region.hi).any(|(a, b)| a > b) {
        return Err(Error::EmptyRegion);
    }
    if d == 1 {
        legendre_1d(f, x[0], region.lo[0], region.hi[0])
    } else {
        legendre_nd(f, x, region)
    }
}

fn legendre_1d<F: ConvexFunction + ?Sized>(
    f: &F,
    x: f64,
    lo: f64,
    hi: f64,
) -> Result<ConjugateResult> {
    let mut iters = 0usize;
    let mut h = |l: f64| {
        iters += 1;
        let v = f.value(&[l]);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            l * x - v
        }
    };
    let s = 0f64.clamp(lo, hi);
    let hs = h(s);
    if hs == f64::NEG_INFINITY {
        return Err(Error::EmptyRegion);
    }
    let delta = 1e-3_f64.max(1e-3 * s.abs());
    let right = (s + delta).min(hi);
    let left = (s - delta).max(lo);
    let hr = if right > s {
        h(right)
    } else {
        f64::NEG_INFINITY
    };
    let hl = if left < s { h(left) } else { f64::NEG_INFINITY };

    // bracket [a, c] around the maximizer, found by doubling steps
    let (a, c) = if hr > hs {
        match expand(&mut h, s, right, hr, hi) {
            Expansion::Bracket(a, c) => (a, c),
            Expansion::Boundary(b, v) => return Ok(done(b, v, true, iters)),
            Expansion::Unbounded => return Ok(unbounded(iters)),
        }
    } else if hl > hs {
        match expand(&mut h, s, left, hl, lo) {
            Expansion::Bracket(a, c) => (a.min(c), a.max(c)),
            Expansion::Boundary(b, v) => return Ok(done(b, v, true, iters)),
            Expansion::Unbounded => return Ok(unbounded(iters)),
        }
    } else {
        (left, right)
    };

    // derivative bisection on x − f'(λ) when the gradient is usable, else
    // golden section
    let grad = |l: f64| f.gradient(&[l]).map(|g| x - g[0]).filter(|v| v.is_finite());
    let (ga, gc) = (grad(a), grad(c));
    let (arg, val) = match (ga, gc) {
        // past the domain edge the slope is unavailable but the sign is known
        (Some(ga), gc) if ga > 0.0 && gc.is_none_or(|g| g < 0.0) => {
            let (mut p, mut q) = (a, c);
            for _ in 0..200 {
                let m = 0.5 * (p + q);
                if m <= p || m >= q || (q - p) <= 1e-15 * (1.0 + m.abs()) {
                    break;
                }
                match grad(m) {
                    Some(g) if g > 0.0 => p = m,
                    Some(g) if g == 0.0 => {
                        p = m;
                        q = m;
                    }
                    _ => q = m,
                }
            }
            let m = 0.5 * (p + q);
            (m, h(m))
        }
        _ => {
            let (m, negv) = golden_min(|l| -h(l), a, c, 1e-12);
            (m, -negv)
        }
    };
    // keep the best probed point (golden may stop next to a kink)
    let mut best = (arg, val);
    for &(p, v) in &[(s, hs), (right, hr), (left, hl)] {
        if v > best.1 {
            best = (p, v);
        }
    }
    Ok(done(best.0, best.1, true, iters))
}

enum Expansion {
    Bracket(f64, f64),
    Boundary(f64, f64),
    Unbounded,
}

/// Walk from `p0` through `p1` (`h(p1) > h(p0)`) with doubling steps toward
/// `limit` until the objective stops increasing.
fn expand<H: FnMut(f64) -> f64>(h: &mut H, p0: f64, p1: f64, h1: f64, limit: f64) -> Expansion {
    let (mut a, mut b, mut hb) = (p0, p1, h1);
    loop {
        let step = 2.0 * (b - a);
        let mut c = b + step;
        let at_limit = if (limit - c) * step.signum() <= 0.0 {
            c = limit;
            true
        } else {
            false
        };
        if c.abs() > LAMBDA_MAX && !at_limit {
            return Expansion::Unbounded;
        }
        let hc = h(c);
        if hc <= hb {
            return Expansion::Bracket(a, c);
        }
        if at_limit {
            return Expansion::Boundary(c, hc);
        }
        a = b;
        b = c;
        hb = hc;
    }
}

fn done(arg: f64, val: f64, converged: bool, iterations: usize) -> ConjugateResult {
    ConjugateResult {
        value: val,
        maximizer: vec![arg],
        converged,
        iterations,
    }
}

fn unbounded(iterations: usize) -> ConjugateResult {
    ConjugateResult {
        value: f64::INFINITY,
        maximizer: vec![f64::INFINITY],
        converged: true,
        iterations,
    }
}

fn num_gradient<F: ConvexFunction + ?Sized>(f: &F, l: &[f64]) -> Vec<f64> {
    if let Some(g) = f.gradient(l) {
        return g;
    }
    let mut g = vec![0.0; l.len()];
    let mut p = l.to_vec();
    for k in 0..l.len() {
        let h = 1e-6 * (1.0 + l[k].abs());
        p[k] = l[k] + h;
        let fp = f.value(&p);
        p[k] = l[k] - h;
        let fm = f.value(&p);
        p[k] = l[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    g
}

fn num_hessian<F: ConvexFunction + ?Sized>(f: &F, l: &[f64]) -> DMatrix<f64> {
    let d = l.len();
    let mut m = DMatrix::zeros(d, d);
    let mut p = l.to_vec();
    for k in 0..d {
        let h = 1e-5 * (1.0 + l[k].abs());
        p[k] = l[k] + h;
        let gp = num_gradient(f, &p);
        p[k] = l[k] - h;
        let gm = num_gradient(f, &p);
        p[k] = l[k];
        for j in 0..d {
            m[(j, k)] = (gp[j] - gm[j]) / (2.0 * h);
        }
    }
    0.5 * (&m + m.transpose())
}

/// Damped Newton with backtracking and box projection.
fn legendre_nd<F: ConvexFunction + ?Sized>(
    f: &F,
    x: &[f64],
    region: &Region,
) -> Result<ConjugateResult> {
    let d = x.len();
    let obj = |l: &[f64]| {
        let v = f.value(l);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            l.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - v
        }
    };
    let mut lam = vec![0.0; d];
    region.project(&mut lam);
    let mut val = obj(&lam);
    if val == f64::NEG_INFINITY {
        return Err(Error::EmptyRegion);
    }
    let max_iter = 500;
    for it in 0..max_iter {
        let g: Vec<f64> = num_gradient(f, &lam)
            .iter()
            .zip(x)
            .map(|(gf, xi)| xi - gf)
            .collect();
        // free coordinates: not pinned at a bound with the gradient pushing out
        let free: Vec<bool> = (0..d)
            .map(|k| {
                !((lam[k] <= region.lo[k] && g[k] < 0.0) || (lam[k] >= region.hi[k] && g[k] > 0.0))
            })
            .collect();
        let pg: f64 = (0..d)
            .filter(|&k| free[k])
            .map(|k| g[k] * g[k])
            .sum::<f64>()
            .sqrt();
        if pg < 1e-10 {
            return Ok(ConjugateResult {
                value: val,
                maximizer: lam,
                converged: true,
                iterations: it,
            });
        }
        let hess = num_hessian(f, &lam);
        let idx: Vec<usize> = (0..d).filter(|&k| free[k]).collect();
        let hsub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| hess[(idx[i], idx[j])]);
        let gsub = DVector::from_fn(idx.len(), |i, _| g[idx[i]]);
        let step = match hsub.clone().cholesky() {
            Some(ch) => ch.solve(&gsub),
            None => gsub.clone(),
        };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let mut cand = lam.clone();
            for (i, &k) in idx.iter().enumerate() {
                cand[k] += t * step[i];
            }
            region.project(&mut cand);
            let cv = obj(&cand);
            if cv > val {
                lam = cand;
                val = cv;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if lam.iter().any(|v| v.abs() > LAMBDA_MAX) {
            return Ok(ConjugateResult {
                value: f64::INFINITY,
                maximizer: lam,
                converged: true,
                iterations: it,
            });
        }
        if !improved {
            return Ok(ConjugateResult {
                value: val,
                maximizer: lam,
                converged: pg < 1e-6 * (1.0 + val.abs()),
                iterations: it,
            });
        }
    }
    Ok(ConjugateResult {
        value: val,
        maximizer: lam,
        converged: false,
        iterations: max_iter,
    })
}

/// `sup_{κ ∈ [0, κ_max]} {κ c − k(κ)}` for a convex `k` on the half-line:
/// the infimum of a conjugate over the half-space `{v·x ≥ c}` when
/// `k(κ) = f(κv)`.
pub fn half_line_dual<K: Fn(f64) -> f64>(k: K, c: f64, kappa_max: f64) -> Result<ConjugateResult> {
    let f = FnConvex::new(1, |l: &[f64]| k(l[0]));
    legendre(&f, &[c], Some(&Region::interval(0.0, kappa_max)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InnovationLaw, InnovationModel};

    #[test]
    fn gaussian_conjugate() {
        let g = InnovationModel::gaussian_1d(1.0).unwrap();
        let r = legendre(&g, &[1.0], None).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!((r.maximizer[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exponential_conjugate() {
        let e = InnovationModel::new(InnovationLaw::CenteredExponential { rate: 1.0 }).unwrap();
        let r = legendre(&e, &[1.0], None).unwrap();
        assert!((r.value - (1.0 - 2f64.ln())).abs() < 1e-12);
        assert!((r.maximizer[0] - 0.5).abs() < 1e-9);
        // left of the support the conjugate is infinite
        assert!(legendre(&e, &[-1.5], None).unwrap().value.is_infinite());
        // grid-search oracle
        let grid = (0..300_000)
            .map(|k| -20.0 + k as f64 * 1e-4)
            .map(|l| l * 1.0 - e.log_mgf_1d(l))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((grid - r.value).abs() < 1e-8);
    }

    #[test]
    fn restricted_conjugate_hits_boundary() {
        let g = InnovationModel::gaussian_1d(1.0).unwrap();
        let r = legendre(&g, &[2.0], Some(&Region::interval(0.0, 1.0))).unwrap();
        assert!((r.value - 1.5).abs() < 1e-12);
        assert_eq!(r.maximizer[0], 1.0);
    }

    #[test]
    fn uniform_conjugate_blows_up_at_the_edge() {
        let u = InnovationModel::new(InnovationLaw::BoundedUniform { half_width: 1.0 }).unwrap();
        assert!(legendre(&u, &[1.0], None).unwrap().value.is_infinite());
        assert!(legendre(&u, &[1.5], None).unwrap().value.is_infinite());
        let v = legendre(&u, &[0.5], None).unwrap().value;
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn quadratic_conjugate_in_3d() {
        let cov = vec![
            vec![2.0, 0.3, 0.1],
            vec![0.3, 1.0, -0.2],
            vec![0.1, -0.2, 0.5],
        ];
        let m = InnovationModel::new(InnovationLaw::Gaussian { cov }).unwrap();
        let x = [0.7, -1.2, 0.4];
        let r = legendre(&m, &x, None).unwrap();
        let inv = m.covariance_inverse();
        let xv = DVector::from_row_slice(&x);
        let want = 0.5 * (xv.transpose() * inv * &xv)[(0, 0)];
        assert!((r.value - want).abs() < 1e-8, "{} vs {want}", r.value);
    }

    #[test]
    fn half_line_dual_gaussian() {
        // inf_{x ≥ 2} x²/2 = 2
        let r = half_line_dual(|k| 0.5 * k * k, 2.0, f64::INFINITY).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        // c ≤ 0: the origin is feasible
        let r = half_line_dual(|k| 0.5 * k * k, -1.0, f64::INFINITY).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
