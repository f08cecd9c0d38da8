//! Statistic-level reserved-tone models.
//!
//! These helpers draw reserved-tone observations directly from their
//! distribution: unit-variance circular complex Gaussians while only the
//! secondary's receiver noise occupies the tones, variance `rho = 1 + PNR`
//! (scaled by the average channel gain in fading) once the primary is on
//! the air. Skipping the waveform keeps a million-evaluation run in
//! seconds while still exercising the real streaming monitor.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::detector::run_monitor;
use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian, complex_gaussian_into, derive_seed, rng_from_seed, MonitorRng};

/// Evaluations per parallel chunk for the streaming false-alarm runs; each
/// chunk gets its own derived seed, so totals are independent of the chunk
/// schedule.
const EVALS_PER_CHUNK: usize = 128;

/// One snapshot of the decision statistic: an older window of `n`
/// unit-variance noise samples against a newer window of `n` samples at
/// variance `rho`.
pub(crate) fn ratio_snapshot(rng: &mut MonitorRng, n: u32, rho: f64) -> f64 {
    let mut v = 0.0;
    for _ in 0..n {
        v += complex_gaussian(rng, 1.0).norm_sqr();
    }
    let mut u = 0.0;
    for _ in 0..n {
        u += complex_gaussian(rng, rho).norm_sqr();
    }
    // Noise draws make v = 0 a probability-zero event; guard anyway so a
    // degenerate rho cannot poison an aggregate with NaN.
    if v > 0.0 {
        u / v
    } else if u > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Empirical per-evaluation false-alarm rate of the streaming monitor under
/// noise-only input, measured on non-overlapping evaluations: the decision
/// stream is decimated to every `2n`-th decision so successive evaluations
/// share no samples. Deterministic in `seed`; evaluations run chunked in
/// parallel.
pub fn measure_false_alarm_rate(n: u32, p_fa: f64, evals: usize, seed: u64) -> Result<f64> {
    if evals == 0 {
        return Err(Error::config("false-alarm measurement needs evals >= 1"));
    }
    let two_n = 2 * n as usize;
    let n_chunks = evals.div_ceil(EVALS_PER_CHUNK);
    let hits: usize = (0..n_chunks)
        .into_par_iter()
        .map(|c| -> Result<usize> {
            let chunk_evals = EVALS_PER_CHUNK.min(evals - c * EVALS_PER_CHUNK);
            let mut rng = rng_from_seed(derive_seed(seed, &[c as u64]));
            let mut samples = vec![Complex64::new(0.0, 0.0); two_n * chunk_evals];
            complex_gaussian_into(&mut rng, 1.0, &mut samples);
            let (decisions, _) = run_monitor(&samples, n, p_fa)?;
            Ok((0..chunk_evals)
                .filter(|&j| decisions[j * two_n].pu_detected)
                .count())
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(hits as f64 / evals as f64)
}

/// Empirical detection probability of the snapshot statistic: the newer
/// window holds `n` samples at variance `rho`, the older window noise only,
/// and a detection is `u/v > gamma`. This is the operating point where the
/// newer window has just filled with primary energy. Deterministic in
/// `seed`; trials run in parallel.
pub fn measure_detection_rate(
    n: u32,
    gamma: f64,
    rho: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::config("detection measurement needs trials >= 1"));
    }
    if n == 0 {
        return Err(Error::config("window length must be at least 1"));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::domain(format!(
            "threshold must be finite and positive, got {gamma}"
        )));
    }
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::domain(format!(
            "window variance ratio must be finite and nonnegative, got {rho}"
        )));
    }
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, &[t as u64]));
            usize::from(ratio_snapshot(&mut rng, n, rho) > gamma)
        })
        .sum();
    Ok(hits as f64 / trials as f64)
}

/// Result of one latency trial.
pub(crate) struct LatencyOutcome {
    /// A calibrated detection fired before the primary arrived.
    pub pre_onset_false_alarm: bool,
    /// Reserved-tone samples from the first primary-bearing sample to the
    /// first post-onset detection, inclusive; `None` if never detected.
    pub latency_tones: Option<u64>,
}

/// Streams one trial through the monitor: `onset` noise-only samples, then
/// primary-occupied samples at variance `rho` to the end of the stream.
pub(crate) fn latency_trial(
    n: u32,
    p_fa: f64,
    stream_len: usize,
    onset: usize,
    rho: f64,
    seed: u64,
) -> Result<LatencyOutcome> {
    if onset > stream_len {
        return Err(Error::config(format!(
            "primary onset {onset} lies beyond the {stream_len}-sample stream"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut samples = vec![Complex64::new(0.0, 0.0); stream_len];
    complex_gaussian_into(&mut rng, 1.0, &mut samples[..onset]);
    complex_gaussian_into(&mut rng, rho, &mut samples[onset..]);
    let (decisions, _) = run_monitor(&samples, n, p_fa)?;

    let mut pre_onset_false_alarm = false;
    let mut latency_tones = None;
    for d in &decisions {
        if !(d.pu_detected && d.calibrated) {
            continue;
        }
        if d.tone_index < onset {
            pre_onset_false_alarm = true;
        } else {
            latency_tones = Some((d.tone_index - onset + 1) as u64);
            break;
        }
    }
    Ok(LatencyOutcome {
        pre_onset_false_alarm,
        latency_tones,
    })
}
