//! Moving-window convolution `X_n = Σ_j c_j Z_{n − lo − j}`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// `out[n] = Σ_j c[j] z[n + len(c) − 1 − j]` for `n < out.len()`, for each of
/// the `d` interleaved components of `z`. `z` holds
/// `out.len() / d + len(c) − 1` vectors.
pub fn moving_window(c: &[f64], z: &[f64], d: usize, out: &mut [f64]) {
    let m = out.len() / d;
    let len = c.len();
    debug_assert_eq!(z.len(), (m + len - 1) * d);
    if use_fft(m, len) {
        let mut comp = vec![0.0; m + len - 1];
        let mut res = vec![0.0; m];
        for k in 0..d {
            for (i, v) in comp.iter_mut().enumerate() {
                *v = z[i * d + k];
            }
            fft_window(c, &comp, &mut res);
            for n in 0..m {
                out[n * d + k] = res[n];
            }
        }
    } else {
        for n in 0..m {
            for k in 0..d {
                let mut acc = 0.0;
                for (j, cj) in c.iter().enumerate() {
                    acc += cj * z[(n + len - 1 - j) * d + k];
                }
                out[n * d + k] = acc;
            }
        }
    }
}

fn use_fft(m: usize, len: usize) -> bool {
    if len < 64 {
        return false;
    }
    let n = (m + 2 * len).next_power_of_two() as f64;
    (m as f64) * (len as f64) > 30.0 * n * n.log2()
}

fn fft_window(c: &[f64], z: &[f64], out: &mut [f64]) {
    let len = c.len();
    let size = (z.len() + len - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    // pack kernel (real) and signal (imaginary) into one transform
    let mut buf = vec![Complex::new(0.0, 0.0); size];
    for (j, v) in c.iter().enumerate() {
        buf[j].re = *v;
    }
    for (i, v) in z.iter().enumerate() {
        buf[i].im = *v;
    }
    fwd.process(&mut buf);
    let mut prod = vec![Complex::new(0.0, 0.0); size];
    for k in 0..size {
        let a = buf[k];
        let b = buf[(size - k) % size].conj();
        let fc = (a + b) * 0.5;
        let fz = (a - b) * Complex::new(0.0, -0.5);
        prod[k] = fc * fz;
    }
    inv.process(&mut prod);
    let scale = 1.0 / size as f64;
    for (n, o) in out.iter_mut().enumerate() {
        *o = prod[n + len - 1].re * scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fft_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c: Vec<f64> = (0..2000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let m = 5000;
        let z: Vec<f64> = (0..m + c.len() - 1)
            .map(|_| rng.random::<f64>() - 0.5)
            .collect();
        assert!(use_fft(m, c.len()));
        let mut fast = vec![0.0; m];
        moving_window(&c, &z, 1, &mut fast);
        for n in (0..m).step_by(97) {
            let direct: f64 = c
                .iter()
                .enumerate()
                .map(|(j, cj)| cj * z[n + c.len() - 1 - j])
                .sum();
            assert!(
                (fast[n] - direct).abs() < 1e-11,
                "{n}: {} vs {direct}",
                fast[n]
            );
        }
    }
}
