//! Carrier-frequency-offset estimation and compensation.
//!
//! The preamble symbol keeps only every 4th used carrier, so its body is
//! four identical quarter-period repetitions. Correlating samples half a
//! body apart turns a normalized offset `eps` into a phase of `pi * eps`,
//! which resolves the fractional part of the offset unambiguously across
//! (-1, 1); the integer part then comes from a known-preamble correlation
//! over a bounded candidate set.

use num_complex::Complex64;

use super::oversample_factor;
use crate::error::{Error, Result};
use crate::iq::IqBuffer;
use crate::phy_tx::FrameConfig;

/// Estimates the fractional normalized CFO from the preamble bodies.
///
/// `preamble_rx` must start at the frame boundary (timing is assumed
/// perfect) and contain all `cfg.n_preambles` training symbols. The
/// estimate is the folded phase of the half-body autocorrelation,
/// `angle(sum conj(y[n]) y[n + N_s/2]) / pi`, always in [-0.5, 0.5]; an
/// applied offset of 2.3 carrier spacings therefore reads as 0.3, with the
/// integer stage responsible for the rest. Compensating with the returned
/// value cancels an applied offset of the same value.
pub fn estimate_cfo_fractional(preamble_rx: &IqBuffer, cfg: &FrameConfig) -> Result<f64> {
    cfg.validate()?;
    let ov = oversample_factor(preamble_rx, cfg)?;
    let d = cfg.symbol_len() * ov;
    let n_g = cfg.cp_len * ov;
    let half = cfg.n_subcarriers * ov / 2;
    let needed = cfg.n_preambles * d;
    if preamble_rx.len() < needed {
        return Err(Error::Size {
            what: "preamble samples",
            expected: needed,
            got: preamble_rx.len(),
        });
    }

    let y = &preamble_rx.samples;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..cfg.n_preambles {
        let body = m * d + n_g;
        for i in 0..half {
            acc += y[body + i].conj() * y[body + i + half];
        }
    }
    let raw = acc.arg() / std::f64::consts::PI;
    Ok(raw - raw.round())
}

/// Estimates the integer normalized CFO after fractional compensation by
/// correlating against the regenerated preamble.
///
/// Candidates run over every integer with magnitude up to
/// `floor(cfo_max_hz / delta_f)`; each is scored by the magnitude of the
/// de-rotated cross-correlation with `known_preamble` over the whole
/// training span, and ties go to the smaller magnitude (then the negative
/// sign). A negative or non-finite `cfo_max_hz` leaves no candidates and is
/// a configuration error.
pub fn estimate_cfo_integer(
    compensated: &IqBuffer,
    known_preamble: &IqBuffer,
    cfg: &FrameConfig,
    cfo_max_hz: f64,
) -> Result<i64> {
    cfg.validate()?;
    let ov = oversample_factor(compensated, cfg)?;
    if !cfo_max_hz.is_finite() || cfo_max_hz < 0.0 {
        return Err(Error::config(format!(
            "cfo_max_hz = {cfo_max_hz} admits no integer-offset candidates"
        )));
    }
    let span = cfg.n_preambles * cfg.symbol_len() * ov;
    for (what, len) in [
        ("compensated preamble span", compensated.len()),
        ("known preamble span", known_preamble.len()),
    ] {
        if len < span {
            return Err(Error::Size {
                what,
                expected: span,
                got: len,
            });
        }
    }

    let m_max = (cfo_max_hz / cfg.delta_f_hz()).floor() as i64;
    let mut candidates: Vec<i64> = (-m_max..=m_max).collect();
    candidates.sort_by_key(|m| (m.abs(), *m));

    let n_fft = (cfg.n_subcarriers * ov) as f64;
    let mut best = (f64::NEG_INFINITY, 0i64);
    for &m in &candidates {
        let step = -2.0 * std::f64::consts::PI * m as f64 / n_fft;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..span {
            acc += compensated.samples[n]
                * known_preamble.samples[n].conj()
                * Complex64::from_polar(1.0, step * n as f64);
        }
        let metric = acc.norm();
        if metric > best.0 {
            best = (metric, m);
        }
    }
    Ok(best.1)
}

/// De-rotates the buffer by a normalized CFO of `eps_total` carrier
/// spacings: the exact inverse of applying a CFO of `eps_total *
/// cfg.delta_f_hz()`. Works at any oversampling factor because the rotation
/// is expressed in absolute frequency.
pub fn compensate_cfo(buf: &IqBuffer, eps_total: f64, cfg: &FrameConfig) -> Result<IqBuffer> {
    if !eps_total.is_finite() {
        return Err(Error::domain(format!(
            "eps_total must be finite, got {eps_total}"
        )));
    }
    crate::channel::apply_cfo(buf, -eps_total * cfg.delta_f_hz())
}
