//! Joint residual-CFO/SFO least squares and the closed-form SNR-degradation
//! predictions for what remains after compensation.

use crate::error::{Error, Result};
use crate::phy_tx::FrameConfig;

/// Solves the two-parameter linear model behind the per-carrier phase
/// advance between two consecutive training symbols.
///
/// A sampling offset `delta` tilts the advance linearly in the carrier
/// index while a carrier offset `eps` shifts it uniformly:
/// `y_j = (2 pi (N_s + N_g) / N_s) * (delta * x_j + eps)`. Given measured
/// phase advances `y` at signed carrier indices `x`, the least-squares
/// solution is `(N_s / (2 pi (N_s + N_g))) * (X^T X)^{-1} X^T y` with
/// `X = [x | 1]`, solved here through the explicit 2x2 normal equations.
/// Returns `(delta_hat, eps_hat)`.
pub fn estimate_cfo_sfo_ls(y: &[f64], x: &[i64], cfg: &FrameConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    if y.len() != x.len() {
        return Err(Error::Size {
            what: "phase differences",
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "joint CFO/SFO fit needs at least two carriers, got {}",
            x.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("pilot phase difference".to_string()));
    }

    let j = x.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (&xi, &yi) in x.iter().zip(y) {
        let xf = xi as f64;
        sx += xf;
        sxx += xf * xf;
        sy += yi;
        sxy += xf * yi;
    }
    let det = j * sxx - sx * sx;
    if det.abs() <= 1e-9 * j * sxx.max(1.0) {
        return Err(Error::Degenerate(
            "carrier indices are collinear; slope and offset cannot be separated".to_string(),
        ));
    }
    let slope = (j * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;

    let scale = cfg.n_subcarriers as f64
        / (2.0 * std::f64::consts::PI * cfg.symbol_len() as f64);
    Ok((scale * slope, scale * intercept))
}

/// SNR degradation (dB) caused by a residual normalized CFO `eps_r` at
/// linear SNR: `(10 / (3 ln 10)) * (pi eps_r)^2 * snr`.
pub fn snrd_cfo(eps_r: f64, snr_linear: f64) -> Result<f64> {
    check_snr(snr_linear)?;
    if !eps_r.is_finite() {
        return Err(Error::domain(format!("eps_r must be finite, got {eps_r}")));
    }
    let p = std::f64::consts::PI * eps_r;
    Ok(10.0 / (3.0 * std::f64::consts::LN_10) * p * p * snr_linear)
}

/// SNR degradation (dB) caused by a residual normalized SFO `delta_r` on
/// carrier `k` at linear SNR: `10 log10(1 + (pi delta_r k)^2 snr / 3)`.
/// Grows with the carrier index — the outermost carriers suffer most.
pub fn snrd_sfo(delta_r: f64, k: i64, snr_linear: f64) -> Result<f64> {
    check_snr(snr_linear)?;
    if !delta_r.is_finite() {
        return Err(Error::domain(format!(
            "delta_r must be finite, got {delta_r}"
        )));
    }
    let p = std::f64::consts::PI * delta_r * k as f64;
    Ok(10.0 * (1.0 + p * p * snr_linear / 3.0).log10())
}

fn check_snr(snr_linear: f64) -> Result<()> {
    if !(snr_linear.is_finite() && snr_linear > 0.0) {
        return Err(Error::domain(format!(
            "snr_linear must be finite and positive, got {snr_linear}"
        )));
    }
    Ok(())
}
