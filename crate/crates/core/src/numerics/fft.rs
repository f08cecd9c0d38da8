//! Unitary DFT / inverse DFT on power-of-two lengths.
//!
//! Both directions scale by `1/sqrt(n)` so `dft` and `idft` are exact
//! inverses of each other and both preserve energy (Parseval). All of the
//! modulator/demodulator math in this crate assumes that convention, which
//! keeps per-carrier and per-sample powers directly comparable.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Cached FFT plans keyed by (length, inverse?). Planning is cheap but not
/// free, and the Monte Carlo paths transform the same couple of lengths
/// millions of times.
fn plan(n: usize, inverse: bool) -> Arc<dyn rustfft::Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn rustfft::Fft<f64>>>>> =
        OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn check_len(what: &'static str, n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::config(format!(
            "{what} requires a power-of-two length, got {n}"
        )));
    }
    Ok(())
}

/// Forward unitary DFT: `X[k] = (1/sqrt(n)) * sum_i x[i] e^{-j 2 pi k i / n}`.
pub fn dft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len("dft", x.len())?;
    let mut buf = x.to_vec();
    plan(buf.len(), false).process(&mut buf);
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    Ok(buf)
}

/// Inverse unitary DFT: `x[i] = (1/sqrt(n)) * sum_k X[k] e^{+j 2 pi k i / n}`.
pub fn idft(x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len("idft", x.len())?;
    let mut buf = x.to_vec();
    plan(buf.len(), true).process(&mut buf);
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn energy(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum()
    }

    #[test]
    fn rejects_non_power_of_two() {
        let v = vec![Complex64::new(1.0, 0.0); 12];
        assert!(dft(&v).is_err());
        assert!(idft(&v).is_err());
        assert!(dft(&[]).is_err());
    }

    #[test]
    fn single_bin_synthesizes_a_tone() {
        // idft of a unit impulse at bin k is e^{j 2 pi k i / n} / sqrt(n).
        let n = 64;
        let k = 5;
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        spec[k] = Complex64::new(1.0, 0.0);
        let t = idft(&spec).unwrap();
        let amp = 1.0 / (n as f64).sqrt();
        for (i, v) in t.iter().enumerate() {
            let phase = 2.0 * PI * (k * i) as f64 / n as f64;
            let expect = Complex64::from_polar(amp, phase);
            assert!((v - expect).norm() < 1e-12, "sample {i}: {v} vs {expect}");
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let n = 256;
        let x: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = i as f64;
                Complex64::new((0.3 * t).sin(), (0.7 * t).cos() * 0.5)
            })
            .collect();
        let back = idft(&dft(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_energy_is_preserved() {
        let n = 1024;
        let x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64 * 0.11).sin(), (i as f64 * 0.37).cos()))
            .collect();
        let spec = dft(&x).unwrap();
        let (et, ef) = (energy(&x), energy(&spec));
        assert!((et - ef).abs() < 1e-9 * et, "time {et} vs freq {ef}");
    }
}
