//! Receiver front end: synchronization, windowed demodulation, and
//! reserved-tone extraction.
//!
//! Frame detection and symbol timing are assumed perfect; what remains is
//! carrier frequency offset (CFO), sampling frequency offset (SFO), and the
//! spectral leakage of off-grid interferers. The front end runs per frame:
//!
//! 1. fractional CFO from the repetition structure of the preamble bodies,
//! 2. integer CFO by correlating against the known preamble over a bounded
//!    search set,
//! 3. joint residual-CFO/SFO least squares on the per-carrier phase
//!    progression between the two preambles,
//! 4. compensation (phase rotation, then fractional resampling),
//! 5. per-symbol windowing with folding, DFT, and grid extraction,
//! 6. reserved-tone collection into the detector's input stream.
//!
//! All stages accept integer-oversampled buffers; the oversampling factor is
//! inferred from the buffer's sample rate against the configuration's
//! nominal rate.

mod cfo;
mod ls;
mod stream;
mod window;

pub use cfo::{compensate_cfo, estimate_cfo_fractional, estimate_cfo_integer};
pub use ls::{estimate_cfo_sfo_ls, snrd_cfo, snrd_sfo};
pub use stream::{extract_reserved_tones, ReservedToneStream};
pub use window::window_fold;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iq::IqBuffer;
use crate::numerics::{dft, fractional_resample};
use crate::phy_tx::{build_frame, symbol_roles, synthesize_oversampled, FrameConfig, FrequencyGrid};
use crate::phy_tx::GridSymbol;

/// Receiver window applied across each CP-extended symbol before the DFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// Plain body extraction: rectangular window over the symbol body.
    None,
    /// Raised-cosine taper over the cyclic extensions with fold-back, so the
    /// DFT length stays at one symbol while per-carrier leakage narrows.
    Hanning,
}

/// How the receiver learns the offsets it must compensate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyncMode {
    /// Genie-aided: compensate with the true values (normalized CFO in
    /// carrier spacings, normalized SFO as a fraction).
    Perfect { eps_total: f64, delta: f64 },
    /// Estimate CFO and SFO from the preambles; the integer-CFO search is
    /// bounded by the design maximum.
    Estimate { cfo_max_hz: f64 },
}

/// Synchronization result: the estimated offset components and the totals
/// actually compensated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncEstimate {
    /// Fractional normalized CFO from the repetition estimator, in carrier
    /// spacings; always in [-0.5, 0.5].
    pub eps_frac: f64,
    /// Integer normalized CFO from the known-preamble correlation.
    pub eps_int: i64,
    /// Residual CFO from the least-squares stage, after the other two
    /// components were compensated.
    pub eps_residual: f64,
    /// Normalized SFO estimate (dimensionless; 1e-4 means 100 ppm).
    pub delta_hat: f64,
    /// Total normalized CFO compensated: `eps_frac + eps_int + eps_residual`.
    pub eps_total: f64,
}

/// Infers the integer oversampling factor of `buf` relative to the nominal
/// rate. Errors unless the ratio is a power of two within rounding.
pub(crate) fn oversample_factor(buf: &IqBuffer, cfg: &FrameConfig) -> Result<usize> {
    let ratio = buf.sample_rate / cfg.sample_rate_hz;
    let ov = ratio.round();
    if !(ratio.is_finite() && (ratio - ov).abs() < 1e-9) || ov < 1.0 {
        return Err(Error::config(format!(
            "buffer rate {} Hz is not an integer multiple of the nominal {} Hz",
            buf.sample_rate, cfg.sample_rate_hz
        )));
    }
    let ov = ov as usize;
    if !ov.is_power_of_two() {
        return Err(Error::config(format!(
            "oversampling factor must be a power of two, got {ov}"
        )));
    }
    Ok(ov)
}

/// Synthesizes the known training span (the preamble symbols only) at the
/// given oversampling factor, for the integer-CFO correlation.
pub(crate) fn preamble_reference(
    cfg: &FrameConfig,
    pilot_seed: u64,
    oversample: usize,
) -> Result<IqBuffer> {
    let mut tmp = cfg.clone();
    tmp.n_data_symbols = 1; // smallest valid frame; only the preambles are kept
    let grid = build_frame(&tmp, &[], pilot_seed)?;
    let mut buf = synthesize_oversampled(&grid, &tmp, oversample)?;
    buf.samples.truncate(cfg.n_preambles * cfg.symbol_len() * oversample);
    Ok(buf)
}

/// Runs the synchronization and demodulation pipeline on one received frame
/// (one buffer per antenna), returning the per-antenna frequency grids and
/// the synchronization diagnostics.
///
/// Estimation runs on antenna 0 — the offsets come from the receiver's own
/// oscillator and clock, shared by all antenna paths — and the resulting
/// compensation is applied to every antenna: CFO as a phase de-rotation,
/// SFO as a fractional resample at rate `1/(1 + delta_hat)`. A fast
/// receiver clock leaves the last few samples of the final symbol
/// unobserved after resampling; they are treated as zero, which perturbs
/// only that symbol's tail.
///
/// `pilot_seed` must match the transmitter's so the known preamble can be
/// regenerated. Grids include the preamble symbols; values are the raw DFT
/// outputs per carrier (no equalization), with roles labeled from the
/// schedule.
pub fn receive_frame(
    rx: &[IqBuffer],
    cfg: &FrameConfig,
    window: WindowKind,
    mode: SyncMode,
    pilot_seed: u64,
) -> Result<(Vec<FrequencyGrid>, SyncEstimate)> {
    cfg.validate()?;
    if rx.is_empty() {
        return Err(Error::config("receive_frame needs at least one antenna"));
    }
    let ov = oversample_factor(&rx[0], cfg)?;
    let needed = cfg.frame_len() * ov;
    for (r, buf) in rx.iter().enumerate() {
        if buf.sample_rate != rx[0].sample_rate {
            return Err(Error::config(format!(
                "antenna {r} sample rate {} differs from antenna 0 ({})",
                buf.sample_rate, rx[0].sample_rate
            )));
        }
        if buf.len() < needed {
            return Err(Error::Size {
                what: "received frame samples",
                expected: needed,
                got: buf.len(),
            });
        }
    }

    let est = match mode {
        SyncMode::Perfect { eps_total, delta } => {
            let eps_int = eps_total.round() as i64;
            SyncEstimate {
                eps_frac: eps_total - eps_int as f64,
                eps_int,
                eps_residual: 0.0,
                delta_hat: delta,
                eps_total,
            }
        }
        SyncMode::Estimate { cfo_max_hz } => estimate_sync(&rx[0], cfg, cfo_max_hz, pilot_seed)?,
    };

    let mut grids = Vec::with_capacity(rx.len());
    for buf in rx {
        let mut comp = compensate_cfo(buf, est.eps_total, cfg)?;
        if est.delta_hat != 0.0 {
            let resampled = fractional_resample(&comp.samples, 1.0 / (1.0 + est.delta_hat))?;
            comp = IqBuffer::new(resampled, buf.sample_rate)?;
        }
        comp.samples.resize(needed, Complex64::new(0.0, 0.0));
        grids.push(demodulate(&comp.samples, cfg, window, ov)?);
    }
    Ok((grids, est))
}

/// Runs the three-stage offset estimation chain on one antenna's buffer
/// without demodulating: fractional CFO from the preamble repetition,
/// integer CFO against the regenerated known preamble, then joint
/// residual-CFO/SFO least squares on the preamble phase progression.
///
/// `buf` needs only the preamble span (plus the second preamble's full
/// symbol), so offset-estimation studies can run on truncated frames.
pub fn estimate_sync(
    buf: &IqBuffer,
    cfg: &FrameConfig,
    cfo_max_hz: f64,
    pilot_seed: u64,
) -> Result<SyncEstimate> {
    cfg.validate()?;
    let ov = oversample_factor(buf, cfg)?;
    let eps_f = estimate_cfo_fractional(buf, cfg)?;
    let coarse = compensate_cfo(buf, eps_f, cfg)?;
    let reference = preamble_reference(cfg, pilot_seed, ov)?;
    let eps_i = estimate_cfo_integer(&coarse, &reference, cfg, cfo_max_hz)?;
    let fine = compensate_cfo(&coarse, eps_i as f64, cfg)?;
    let (y, x) = preamble_phase_diffs(&fine, cfg, ov)?;
    let (delta_hat, eps_r) = estimate_cfo_sfo_ls(&y, &x, cfg)?;
    Ok(SyncEstimate {
        eps_frac: eps_f,
        eps_int: eps_i,
        eps_residual: eps_r,
        delta_hat,
        eps_total: eps_f + eps_i as f64 + eps_r,
    })
}

/// Per-carrier phase advance between the two preamble symbols, measured on
/// the preamble's training carriers: input to the least-squares stage.
fn preamble_phase_diffs(buf: &IqBuffer, cfg: &FrameConfig, ov: usize) -> Result<(Vec<f64>, Vec<i64>)> {
    if cfg.n_preambles < 2 {
        return Err(Error::config(
            "joint CFO/SFO estimation needs two preamble symbols",
        ));
    }
    let d = cfg.symbol_len() * ov;
    let n_g = cfg.cp_len * ov;
    let n_fft = cfg.n_subcarriers * ov;
    if buf.len() < 2 * d {
        return Err(Error::Size {
            what: "preamble span",
            expected: 2 * d,
            got: buf.len(),
        });
    }
    let spectrum = |m: usize| -> Result<Vec<Complex64>> {
        dft(&buf.samples[m * d + n_g..m * d + n_g + n_fft])
    };
    let (y1, y2) = (spectrum(0)?, spectrum(1)?);

    let half_used = (cfg.n_used() / 2) as i64;
    let (mut phases, mut indices) = (Vec::new(), Vec::new());
    for u in (0..cfg.n_used()).step_by(4) {
        if cfg.disabled_tones.contains(&u) {
            continue;
        }
        let k = u as i64 - half_used;
        let bin = k.rem_euclid(n_fft as i64) as usize;
        let prod = y2[bin] * y1[bin].conj();
        if prod.norm_sqr() == 0.0 {
            continue;
        }
        phases.push(prod.arg());
        indices.push(k);
    }
    Ok((phases, indices))
}

/// Per-symbol windowing, DFT, and carrier extraction back into a grid.
fn demodulate(
    samples: &[Complex64],
    cfg: &FrameConfig,
    window: WindowKind,
    ov: usize,
) -> Result<FrequencyGrid> {
    let d = cfg.symbol_len() * ov;
    let n_s = cfg.n_subcarriers;
    let n_fft = n_s * ov;
    // Oversampled synthesis carries a sqrt(ov) gain so the waveform matches
    // the nominal one sample-for-sample; the longer DFT returns it here.
    let gain = 1.0 / (ov as f64).sqrt();

    let mut symbols = Vec::with_capacity(cfg.n_symbols_total());
    for m in 0..cfg.n_symbols_total() {
        let folded = window_fold(&samples[m * d..(m + 1) * d], cfg, window, ov)?;
        let bins = dft(&folded)?;
        let mut values = vec![Complex64::new(0.0, 0.0); n_s];
        for (s, v) in values.iter_mut().enumerate() {
            let k = s as i64 - (n_s / 2) as i64;
            *v = bins[k.rem_euclid(n_fft as i64) as usize] * gain;
        }
        symbols.push(GridSymbol {
            values,
            roles: symbol_roles(cfg, m)?,
        });
    }
    Ok(FrequencyGrid {
        n_subcarriers: n_s,
        symbols,
    })
}
