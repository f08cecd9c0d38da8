//! Closed-form statistics of the energy-ratio variable.
//!
//! With each window holding `N` independent circular complex Gaussian
//! samples, the window energies are Gamma(N) variates and their ratio
//! `X = U/V` follows a scaled F distribution: for a variance ratio
//! `rho = sigma_u^2 / sigma_v^2`,
//!
//! ```text
//! pdf:  f(x) = (1/rho) * Gamma(2N)/Gamma(N)^2 * (x/rho)^(N-1) / (1 + x/rho)^(2N)
//! cdf:  F(x) = I_{ (x/rho) / (1 + x/rho) } (N, N)
//! ```
//!
//! where `I` is the regularized incomplete beta. Both hypotheses are this
//! law with different `rho`: idle gives `rho = 1`, a primary user raising
//! the newer window's variance gives `rho = 1 + PNR` (or `1 + sigma_H^2 PNR`
//! through a Rayleigh-fading channel). Thresholds, false-alarm and detection
//! probabilities below are direct evaluations of these forms.

use crate::error::{Error, Result};
use crate::numerics::{incomplete_beta_reg, inverse_incomplete_beta, log_gamma, BetaParams};

fn window_params(n: u32) -> Result<BetaParams> {
    if n == 0 {
        return Err(Error::config("window size N must be at least 1"));
    }
    BetaParams::symmetric(n)
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::domain(format!(
            "variance ratio must be positive and finite, got {ratio}"
        )));
    }
    Ok(())
}

/// False-alarm probability of threshold `gamma` with window size `n`:
/// `P_FA = 1 - I_{gamma/(1+gamma)}(N, N)`.
pub fn pfa_from_threshold(gamma: f64, n: u32) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::domain(format!(
            "threshold must be positive and finite, got {gamma}"
        )));
    }
    let p = window_params(n)?;
    Ok(1.0 - incomplete_beta_reg(gamma / (1.0 + gamma), p)?)
}

/// Threshold achieving false-alarm probability `p_fa` with window size `n`.
///
/// Inverts the false-alarm expression: with `q` the `(1 - p_fa)` quantile of
/// the symmetric beta law, the threshold is `gamma = q / (1 - q)`. The
/// result is checked by forward evaluation to within 1e-8.
pub fn threshold_from_pfa(p_fa: f64, n: u32) -> Result<f64> {
    if !(p_fa.is_finite() && p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::domain(format!(
            "target false-alarm probability must lie strictly inside (0, 1), got {p_fa}"
        )));
    }
    let p = window_params(n)?;
    let q = inverse_incomplete_beta(1.0 - p_fa, p)?;
    let gamma = q / (1.0 - q);
    let achieved = pfa_from_threshold(gamma, n)?;
    if (achieved - p_fa).abs() > 1e-8 {
        return Err(Error::Convergence(format!(
            "threshold inversion for p_fa={p_fa}, N={n} achieved {achieved}"
        )));
    }
    Ok(gamma)
}

/// Detection probability of threshold `gamma` at post-processing
/// primary-to-noise ratio `pnr_linear` (linear scale, not dB) over an AWGN
/// channel: `P_D = 1 - I_{t/(1+t)}(N, N)` with `t = gamma / (1 + PNR)`.
pub fn pd_closed_form(gamma: f64, pnr_linear: f64, n: u32) -> Result<f64> {
    pd_closed_form_fading(gamma, pnr_linear, 1.0, n)
}

/// Detection probability when the primary reaches the monitor through a
/// channel of average power gain `sigma_h_sq`, which scales the effective
/// PNR: `t = gamma / (1 + sigma_h_sq * PNR)`.
pub fn pd_closed_form_fading(gamma: f64, pnr_linear: f64, sigma_h_sq: f64, n: u32) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::domain(format!(
            "threshold must be positive and finite, got {gamma}"
        )));
    }
    if pnr_linear.is_nan() || pnr_linear < 0.0 {
        return Err(Error::domain(format!(
            "PNR must be nonnegative, got {pnr_linear}"
        )));
    }
    if !(sigma_h_sq.is_finite() && sigma_h_sq >= 0.0) {
        return Err(Error::domain(format!(
            "channel power gain must be nonnegative, got {sigma_h_sq}"
        )));
    }
    let p = window_params(n)?;
    if pnr_linear.is_infinite() {
        return Ok(1.0);
    }
    let t = gamma / (1.0 + sigma_h_sq * pnr_linear);
    Ok(1.0 - incomplete_beta_reg(t / (1.0 + t), p)?)
}

/// Density of the energy ratio at `x >= 0` for window size `n` and variance
/// ratio `ratio`.
pub fn pdf_x(x: f64, n: u32, ratio: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::config("window size N must be at least 1"));
    }
    check_ratio(ratio)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("density argument must be >= 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let nf = n as f64;
    if x == 0.0 {
        // (x/rho)^(N-1) -> 1 for N = 1, 0 for N > 1.
        return Ok(if n == 1 { 1.0 / ratio } else { 0.0 });
    }
    let y = x / ratio;
    let ln_coeff = log_gamma(2.0 * nf)? - 2.0 * log_gamma(nf)?;
    let ln_pdf = -ratio.ln() + ln_coeff + (nf - 1.0) * y.ln() - 2.0 * nf * y.ln_1p();
    Ok(ln_pdf.exp())
}

/// Distribution function of the energy ratio:
/// `F(x) = I_{(x/ratio)/(1+x/ratio)}(N, N)`.
pub fn cdf_x(x: f64, n: u32, ratio: f64) -> Result<f64> {
    let p = window_params(n)?;
    check_ratio(ratio)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("cdf argument must be >= 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let y = x / ratio;
    incomplete_beta_reg(y / (1.0 + y), p)
}

/// Mean of the energy ratio, `ratio * N / (N - 1)`; finite only for `n >= 2`.
pub fn mean_x(n: u32, ratio: f64) -> Result<f64> {
    check_ratio(ratio)?;
    if n < 2 {
        return Err(Error::domain(format!(
            "the energy-ratio mean is finite only for N >= 2, got N={n}"
        )));
    }
    let nf = n as f64;
    Ok(ratio * nf / (nf - 1.0))
}

/// Variance of the energy ratio,
/// `ratio^2 * N(2N - 1) / ((N - 1)^2 (N - 2))`; finite only for `n >= 3`.
pub fn var_x(n: u32, ratio: f64) -> Result<f64> {
    check_ratio(ratio)?;
    if n < 3 {
        return Err(Error::domain(format!(
            "the energy-ratio variance is finite only for N >= 3, got N={n}"
        )));
    }
    let nf = n as f64;
    Ok(ratio * ratio * nf * (2.0 * nf - 1.0) / ((nf - 1.0) * (nf - 1.0) * (nf - 2.0)))
}
