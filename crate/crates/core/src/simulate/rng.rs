//! Counter-based innovation streams.
//!
//! Innovation `j` of path `p` under seed `s` is drawn from the ChaCha8
//! keystream with key `(s, p)` and stream number `⌊(j + 2^62) / BLOCK⌋`, as
//! draw number `(j + 2^62) mod BLOCK` of that stream. A block is always
//! generated from its start, so any innovation can be reproduced without
//! touching the others and chunking never changes a value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::InnovationSampler;

/// Innovations per keystream block.
pub const BLOCK: usize = 256;
const OFFSET: u64 = 1 << 62;

fn key(seed: u64, path: u64) -> [u8; 32] {
    let mut k = [0u8; 32];
    k[..8].copy_from_slice(&seed.to_le_bytes());
    k[8..16].copy_from_slice(&path.to_le_bytes());
    k[16..].copy_from_slice(b"ma innovations\0\0");
    k
}

fn locate(j: i64) -> (u64, usize) {
    let idx = OFFSET.wrapping_add(j as u64);
    (idx / BLOCK as u64, (idx % BLOCK as u64) as usize)
}

/// Deterministic source of the innovations of one path.
#[derive(Debug, Clone)]
pub struct InnovationSource {
    sampler: InnovationSampler,
    key: [u8; 32],
    dim: usize,
    cached: Option<u64>,
    cache: Vec<f64>,
}

impl InnovationSource {
    pub fn new(sampler: InnovationSampler, seed: u64, path: u64) -> Self {
        let dim = sampler.dim();
        Self {
            sampler,
            key: key(seed, path),
            dim,
            cached: None,
            cache: vec![0.0; BLOCK * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sampler(&self) -> &InnovationSampler {
        &self.sampler
    }

    fn load(&mut self, block: u64) {
        if self.cached == Some(block) {
            return;
        }
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(block);
        let d = self.dim;
        for k in 0..BLOCK {
            self.sampler
                .sample_into(&mut rng, &mut self.cache[k * d..(k + 1) * d]);
        }
        self.cached = Some(block);
    }

    /// Innovation `Z_j`.
    pub fn get(&mut self, j: i64) -> &[f64] {
        let (b, off) = locate(j);
        self.load(b);
        &self.cache[off * self.dim..(off + 1) * self.dim]
    }

    /// `Z_j` with its log-likelihood ratio under the sampler's tilt.
    pub fn get_with_llr(&mut self, j: i64) -> (&[f64], f64) {
        let (b, off) = locate(j);
        self.load(b);
        let z = &self.cache[off * self.dim..(off + 1) * self.dim];
        (z, self.sampler.llr(z))
    }

    /// Fill `out` with `Z_first, Z_{first+1}, …` (`out.len() / dim` of them).
    pub fn fill(&mut self, first: i64, out: &mut [f64]) {
        let d = self.dim;
        let count = out.len() / d;
        let mut k = 0usize;
        while k < count {
            let (b, off) = locate(first + k as i64);
            self.load(b);
            let take = (BLOCK - off).min(count - k);
            out[k * d..(k + take) * d].copy_from_slice(&self.cache[off * d..(off + take) * d]);
            k += take;
        }
    }
}
