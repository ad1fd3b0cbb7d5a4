//! Paths generated one step at a time, for stopping rules.

use super::rng::InnovationSource;
use crate::model::TruncatedCoefficients;

/// Incremental generator of `X_n`, `S_n` and the running log-likelihood
/// ratio. Yields the same values as [`super::sample_path`] for the same
/// seed, path index and truncation.
#[derive(Debug, Clone)]
pub struct PathStream {
    coeffs: Vec<f64>,
    lo: i64,
    src: InnovationSource,
    // Z_{n−hi} .. Z_{n−lo} as a ring of len(coeffs) vectors
    ring: Vec<f64>,
    head: usize,
    n: u64,
    x: Vec<f64>,
    s: Vec<f64>,
    llr: f64,
    tilted: bool,
}

impl PathStream {
    pub(crate) fn new(coeffs: &TruncatedCoefficients, mut src: InnovationSource) -> Self {
        let d = src.dim();
        let len = coeffs.values.len();
        let tilted = src.sampler().theta().iter().any(|t| *t != 0.0);
        let mut ring = vec![0.0; len * d];
        let mut llr = 0.0;
        // slots 1.. hold Z_{1−hi} .. Z_{−lo}; slot 0 is filled by the first step
        let first = 1 - coeffs.hi();
        for k in 1..len {
            let (z, l) = src.get_with_llr(first + k as i64 - 1);
            if tilted {
                llr += l;
            }
            ring[k * d..(k + 1) * d].copy_from_slice(z);
        }
        Self {
            coeffs: coeffs.values.clone(),
            lo: coeffs.lo,
            src,
            ring,
            head: 0,
            n: 0,
            x: vec![0.0; d],
            s: vec![0.0; d],
            llr,
            tilted,
        }
    }

    /// Index of the last generated step (`0` before the first call to
    /// [`PathStream::advance`]).
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// Log-likelihood ratio of every innovation `S_1, …, S_n` depend on.
    pub fn llr(&self) -> f64 {
        self.llr
    }

    /// Generate the next step and return `S_n`.
    pub fn advance(&mut self) -> &[f64] {
        let d = self.x.len();
        let len = self.coeffs.len();
        self.n += 1;
        // head holds the oldest value (empty before the first step)
        let slot = self.head;
        let j = self.n as i64 - self.lo;
        let (z, l) = self.src.get_with_llr(j);
        if self.tilted {
            self.llr += l;
        }
        self.ring[slot * d..(slot + 1) * d].copy_from_slice(z);
        // ring order from head: Z_{n−hi}, …, Z_{n−lo}; φ_hi pairs with the oldest
        self.head = (slot + 1) % len;
        for k in 0..d {
            let mut acc = 0.0;
            for (jj, c) in self.coeffs.iter().enumerate() {
                let pos = (self.head + len - 1 - jj) % len;
                acc += c * self.ring[pos * d + k];
            }
            self.x[k] = acc;
            self.s[k] += acc;
        }
        &self.s
    }
}
