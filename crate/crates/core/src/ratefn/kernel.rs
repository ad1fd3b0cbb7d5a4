//! The long-memory kernel
//! `g(x) = (1−α) ∫_x^{x+1} |y|^{−α} (p 1{y≥0} + q 1{y<0}) dy`
//! and integrals `∫ F(g(x)) dx` against it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{integrate, integrate_power_tail, QuadTol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelG {
    pub alpha: f64,
    pub p: f64,
}

impl KernelG {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.5 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (1/2, 1], got {alpha}"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in [0, 1], got {p}"
            )));
        }
        Ok(Self { alpha, p })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// `h(x) = (x+1)^{1−α} − x^{1−α}` for `x ≥ 0`.
    fn h(&self, x: f64) -> f64 {
        let e = 1.0 - self.alpha;
        if x == 0.0 {
            return 1.0;
        }
        // x^e · ((1 + 1/x)^e − 1), stable for large x
        x.powf(e) * (e * (1.0 / x).ln_1p()).exp_m1()
    }

    /// `g(x)`. For `α = 1` this is the indicator of `(−1, 0)`.
    pub fn eval(&self, x: f64) -> f64 {
        let (p, q, e) = (self.p, self.q(), 1.0 - self.alpha);
        if self.alpha == 1.0 {
            return if x > -1.0 && x < 0.0 { 1.0 } else { 0.0 };
        }
        if x >= 0.0 {
            p * self.h(x)
        } else if x <= -1.0 {
            q * self.h(-x - 1.0)
        } else {
            q * (-x).powf(e) + p * (x + 1.0).powf(e)
        }
    }

    /// `max g = (p^{1/α} + q^{1/α})^α`.
    pub fn max_value(&self) -> f64 {
        let a = self.alpha;
        (self.p.powf(1.0 / a) + self.q().powf(1.0 / a)).powf(a)
    }

    /// Location of the maximum inside `[−1, 0]`.
    fn argmax(&self) -> f64 {
        let (p, q) = (self.p, self.q());
        if q == 0.0 {
            return 0.0;
        }
        if p == 0.0 {
            return -1.0;
        }
        let r = (p / q).powf(1.0 / self.alpha);
        -1.0 / (1.0 + r)
    }

    /// `∫ F(g(x)) dx` for `F` with `F(0) = 0` and `F(s) = O(s^{decay/α})`
    /// near zero; `decay` is the power-law decay of `F(g(x))` in `|x|`
    /// (must exceed 1). Returns `+∞` if `F` is infinite at `max g`.
    pub fn integrate<Fs: Fn(f64) -> f64>(&self, f: Fs, decay: f64, tol: QuadTol) -> Result<f64> {
        if self.alpha == 1.0 {
            return Ok(f(1.0));
        }
        if !(decay > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "kernel integral diverges: decay exponent {decay} ≤ 1"
            )));
        }
        if !f(self.max_value()).is_finite() {
            return Ok(f64::INFINITY);
        }
        let (p, q) = (self.p, self.q());
        let mut total = 0.0;
        // central piece, split at the peak
        let m = self.argmax();
        let g = |x: f64| f(self.eval(x));
        if m > -1.0 {
            total += integrate(&g, -1.0, m, tol)?.value;
        }
        if m < 0.0 {
            total += integrate(&g, m, 0.0, tol)?.value;
        }
        // the two tails share h; each is ∫_0^1 + ∫_1^∞
        for w in [p, q] {
            if w == 0.0 {
                continue;
            }
            let fw = |y: f64| f(w * self.h(y));
            total += integrate(fw, 0.0, 1.0, tol)?.value;
            total += integrate_power_tail(fw, 1.0, decay, tol)?.value;
        }
        Ok(total)
    }
}

/// `C_{α,β} = ∫ g(x)^β dx`; exactly 1 for `α = 1`. Finite iff `αβ > 1`.
pub fn kernel_integral(kern: &KernelG, beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must exceed 1, got {beta}"
        )));
    }
    if kern.alpha == 1.0 {
        return Ok(1.0);
    }
    if kern.alpha * beta <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "C_(alpha,beta) diverges for alpha·beta = {} ≤ 1",
            kern.alpha * beta
        )));
    }
    kern.integrate(|s| s.powf(beta), kern.alpha * beta, QuadTol::tight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// g by direct quadrature of its defining integral
    fn g_direct(alpha: f64, p: f64, x: f64) -> f64 {
        let q = 1.0 - p;
        let w = |y: f64| (1.0 - alpha) * y.abs().powf(-alpha) * if y >= 0.0 { p } else { q };
        let tol = QuadTol::tight();
        if x < 0.0 && x + 1.0 > 0.0 {
            integrate(w, x, 0.0, tol).unwrap().value
                + integrate(w, 0.0, x + 1.0, tol).unwrap().value
        } else {
            integrate(w, x, x + 1.0, tol).unwrap().value
        }
    }

    #[test]
    fn closed_form_matches_definition() {
        for &(a, p) in &[(0.75, 1.0), (0.6, 0.3), (0.9, 0.5)] {
            let k = KernelG::new(a, p).unwrap();
            for &x in &[-30.0, -2.5, -1.0, -0.7, -0.2, 0.0, 0.4, 3.0, 1e4] {
                let d = g_direct(a, p, x);
                assert!(
                    (k.eval(x) - d).abs() < 1e-8 * d.max(1e-3),
                    "a={a} p={p} x={x}"
                );
            }
        }
    }

    #[test]
    fn max_value_is_the_peak() {
        let k = KernelG::new(0.7, 0.3).unwrap();
        let grid = (0..=100_000)
            .map(|i| k.eval(-1.0 + i as f64 * 1e-5))
            .fold(0.0, f64::max);
        assert!((grid - k.max_value()).abs() < 1e-8);
    }

    #[test]
    fn alpha_one_is_identity() {
        for beta in [1.5, 2.0, 3.0] {
            assert_eq!(
                kernel_integral(&KernelG::new(1.0, 0.4).unwrap(), beta).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn c_three_quarters_two() {
        let c = kernel_integral(&KernelG::new(0.75, 1.0).unwrap(), 2.0).unwrap();
        assert!((c - 0.874_019_184_763_835_9).abs() < 1e-9, "{c}");
    }

    #[test]
    fn monte_carlo_oracle() {
        // importance sample x from a density with the same tail order:
        // on [−1, 1] uniform weight, outside Pareto tails with index 1
        let k = KernelG::new(0.75, 1.0).unwrap();
        let c = kernel_integral(&k, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let u: f64 = rng.random();
            // density: 1/4 on [−1, 1]; (1/4)|x|^{-2} on |x| > 1 (mass 1/2)
            let (x, dens) = if u < 0.5 {
                (-1.0 + 4.0 * u, 0.25)
            } else {
                let v: f64 = rng.random::<f64>();
                let r = 1.0 / (1.0 - v);
                let x = if u < 0.75 { r } else { -r };
                (x, 0.25 / (r * r))
            };
            let w = k.eval(x).powi(2) / dens;
            s += w;
            s2 += w * w;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - c).abs() < 3.0 * se, "{mean} ± {se} vs {c}");
    }

    #[test]
    fn continuity_at_alpha_one() {
        let mut prev = 0.0;
        for a in [0.9, 0.95, 0.98, 0.99, 0.999] {
            let c = kernel_integral(&KernelG::new(a, 1.0).unwrap(), 2.0).unwrap();
            assert!(c > prev && c < 1.0, "{a}: {c}");
            prev = c;
        }
        assert!((1.0 - prev) < 0.01);
    }

    #[test]
    fn divergent_exponent_rejected() {
        let k = KernelG::new(0.6, 1.0).unwrap();
        assert!(kernel_integral(&k, 1.5).is_err());
    }
}
