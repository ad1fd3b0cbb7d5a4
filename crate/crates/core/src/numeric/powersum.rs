//! Prefix sums of `f(k) = k^{-s} (log(k + e))^δ`, `k ≥ 1`.
//!
//! The first [`CACHE_LEN`] prefix sums are tabulated with compensated
//! summation; beyond that an Euler–Maclaurin continuation is used.

use std::f64::consts::E;

use super::quad::{integrate, QuadTol};
use super::sum::CompensatedSum;

pub const CACHE_LEN: usize = 1 << 16;

#[derive(Debug)]
pub struct PowerSums {
    s: f64,
    delta: f64,
    // prefix[k] = Σ_{j=1}^{k} f(j), prefix[0] = 0
    prefix: Vec<f64>,
    total: Option<f64>,
}

impl PowerSums {
    pub fn new(s: f64, delta: f64) -> Self {
        let mut prefix = Vec::with_capacity(CACHE_LEN + 1);
        prefix.push(0.0);
        let mut acc = CompensatedSum::new();
        for k in 1..=CACHE_LEN {
            acc.add(term(s, delta, k as f64));
            prefix.push(acc.value());
        }
        let mut out = Self {
            s,
            delta,
            prefix,
            total: None,
        };
        if s > 1.0 {
            out.total = Some(out.tail_limit());
        }
        out
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn log_power(&self) -> f64 {
        self.delta
    }

    /// `f(k)` for real `k ≥ 1`.
    #[inline]
    pub fn term(&self, k: f64) -> f64 {
        term(self.s, self.delta, k)
    }

    /// `Σ_{j=1}^{n} f(j)`.
    pub fn prefix(&self, n: u64) -> f64 {
        if (n as usize) <= CACHE_LEN {
            return self.prefix[n as usize];
        }
        let a = CACHE_LEN as f64;
        let b = n as f64;
        self.prefix[CACHE_LEN]
            + self.integral(a, b)
            + 0.5 * (self.term(b) - self.term(a))
            + (self.dterm(b) - self.dterm(a)) / 12.0
    }

    /// `Σ_{j=1}^{∞} f(j)`; `None` when the series diverges (`s ≤ 1`).
    pub fn total(&self) -> Option<f64> {
        self.total
    }

    /// `Σ_{j>n} f(j)` for a convergent series.
    pub fn tail(&self, n: u64) -> Option<f64> {
        let total = self.total?;
        if (n as usize) < CACHE_LEN {
            // direct differencing loses little here: total is O(1)
            return Some(total - self.prefix[n as usize]);
        }
        let a = n as f64;
        // Euler–Maclaurin for Σ_{j>a} f(j)
        Some(self.tail_integral(a) - 0.5 * self.term(a) - self.dterm(a) / 12.0)
    }

    fn tail_limit(&self) -> f64 {
        let a = CACHE_LEN as f64;
        self.prefix[CACHE_LEN] + self.tail_integral(a) - 0.5 * self.term(a) - self.dterm(a) / 12.0
    }

    fn dterm(&self, x: f64) -> f64 {
        let l = (x + E).ln();
        let f = self.term(x);
        f * (-self.s / x + self.delta / ((x + E) * l))
    }

    /// `∫_a^b f`.
    fn integral(&self, a: f64, b: f64) -> f64 {
        if self.delta == 0.0 {
            if (self.s - 1.0).abs() < 1e-14 {
                return (b / a).ln();
            }
            let e = 1.0 - self.s;
            // (b^e − a^e)/e, computed as a^e·expm1(e·log(b/a))/e
            return a.powf(e) * (e * (b / a).ln()).exp_m1() / e;
        }
        // substitute x = e^y to flatten the power law
        let (s, d) = (self.s, self.delta);
        integrate(
            |y: f64| {
                let x = y.exp();
                term(s, d, x) * x
            },
            a.ln(),
            b.ln(),
            QuadTol::tight(),
        )
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
    }

    /// `∫_a^∞ f`, for `s > 1`.
    fn tail_integral(&self, a: f64) -> f64 {
        if self.delta == 0.0 {
            return a.powf(1.0 - self.s) / (self.s - 1.0);
        }
        let (s, d) = (self.s, self.delta);
        // y = log(x/a) ∈ [0, ∞); integrand decays like e^{-(s-1)y}·poly(y)
        let cut = 60.0 / (s - 1.0);
        integrate(
            |y: f64| {
                let x = a * y.exp();
                term(s, d, x) * x
            },
            0.0,
            cut,
            QuadTol::tight(),
        )
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
    }
}

#[inline]
fn term(s: f64, delta: f64, k: f64) -> f64 {
    let base = k.powf(-s);
    if delta == 0.0 {
        base
    } else {
        base * (k + E).ln().powf(delta)
    }
}

/// Riemann zeta for `s > 1`.
pub fn zeta(s: f64) -> f64 {
    PowerSums::new(s, 0.0).total().expect("zeta requires s > 1")
}
