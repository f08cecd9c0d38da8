//! Gamma and incomplete-beta special functions.
//!
//! The detector's false-alarm and detection probabilities are regularized
//! incomplete beta evaluations with equal shape parameters, and thresholds
//! come from the inverse. These routines are self-contained so the numeric
//! behaviour of that path is fully pinned by this crate's tests:
//!
//! * [`log_gamma`] — Lanczos approximation, full double precision,
//! * [`incomplete_beta_reg`] — continued fraction (modified Lentz) with the
//!   symmetry switch at `x > (a+1)/(a+b+2)`,
//! * [`inverse_incomplete_beta`] — bracketed bisection refined by Newton.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Shape parameters `(a, b)` of a beta law; both must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    /// Validates positivity of both shapes.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(Error::domain(format!(
                "beta shape parameters must be positive, got a={a}, b={b}"
            )));
        }
        Ok(BetaParams { a, b })
    }

    /// Symmetric case used by the energy-ratio statistic.
    pub fn symmetric(n: u32) -> Result<Self> {
        BetaParams::new(n as f64, n as f64)
    }
}

// Lanczos coefficients for g = 607/128, rational part of degree 14.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS_COF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Natural log of the gamma function for `x > 0`.
///
/// Accuracy is close to machine precision over the supported range (the
/// tests pin a relative error of 1e-12 on `ln Γ` values of order one and
/// better elsewhere).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!(
            "log_gamma requires x > 0, got {x}"
        )));
    }
    let mut ser = LANCZOS_C0;
    let mut y = x;
    for c in LANCZOS_COF {
        y += 1.0;
        ser += c / y;
    }
    let tmp = x + LANCZOS_G + 0.5;
    Ok((x + 0.5) * tmp.ln() - tmp + (SQRT_2PI * ser / x).ln())
}

/// Natural log of the complete beta function `B(a, b)`.
pub fn log_beta(p: BetaParams) -> Result<f64> {
    Ok(log_gamma(p.a)? + log_gamma(p.b)? - log_gamma(p.a + p.b)?)
}

/// Regularized incomplete beta function `I_x(a, b)` for `x` in `[0, 1]`.
///
/// Evaluates the continued fraction with modified Lentz iteration. For
/// arguments past the symmetry point `x > (a+1)/(a+b+2)` it evaluates the
/// mirrored fraction `1 - I_{1-x}(b, a)`, which converges fast on that side.
/// Absolute error is well inside 1e-10 over the tested grid.
pub fn incomplete_beta_reg(x: f64, p: BetaParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::domain(format!(
            "incomplete_beta_reg requires x in [0, 1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }

    let (a, b) = (p.a, p.b);
    // ln of the prefactor x^a (1-x)^b / (a B(a, b)) shared by both branches.
    let ln_pre = a * x.ln() + b * (1.0 - x).ln() - log_beta(p)?;

    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_pre.exp() / a) * beta_cf(x, a, b)?)
    } else {
        Ok(1.0 - (ln_pre.exp() / b) * beta_cf(1.0 - x, b, a)?)
    }
}

/// Continued fraction for the incomplete beta, evaluated with the modified
/// Lentz algorithm.
fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64> {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-30;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        // Even step.
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        // Odd step.
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Convergence(format!(
        "incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )))
}

/// Inverse of the regularized incomplete beta: the `x` with `I_x(a, b) = prob`.
///
/// Bisection narrows a `[0, 1]` bracket, then Newton steps (safeguarded to
/// stay inside the bracket) polish to `|I_x - prob| <= 1e-12`.
pub fn inverse_incomplete_beta(prob: f64, p: BetaParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&prob) || prob.is_nan() {
        return Err(Error::domain(format!(
            "inverse_incomplete_beta requires prob in [0, 1], got {prob}"
        )));
    }
    if prob == 0.0 {
        return Ok(0.0);
    }
    if prob == 1.0 {
        return Ok(1.0);
    }

    const TOL: f64 = 1e-12;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x = 0.5;

    // Coarse bisection to get Newton into its basin.
    for _ in 0..20 {
        if incomplete_beta_reg(x, p)? > prob {
            hi = x;
        } else {
            lo = x;
        }
        x = 0.5 * (lo + hi);
    }

    let ln_beta = log_beta(p)?;
    for _ in 0..60 {
        let f = incomplete_beta_reg(x, p)? - prob;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if f.abs() <= TOL {
            return Ok(x);
        }
        // Beta density at x; the derivative of I_x.
        let pdf = ((p.a - 1.0) * x.ln() + (p.b - 1.0) * (1.0 - x).ln() - ln_beta).exp();
        let next = if pdf > 0.0 && pdf.is_finite() {
            x - f / pdf
        } else {
            f64::NAN
        };
        x = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < f64::EPSILON {
            return Ok(x);
        }
    }
    let f = incomplete_beta_reg(x, p)? - prob;
    if f.abs() <= 1e-10 {
        Ok(x)
    } else {
        Err(Error::Convergence(format!(
            "inverse incomplete beta stalled at x={x} with residual {f:e} (a={}, b={}, prob={prob})",
            p.a, p.b
        )))
    }
}
