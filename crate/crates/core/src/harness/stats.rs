//! Small statistical helpers shared by the scenarios: goodness-of-fit,
//! binomial confidence intervals, and percentiles.

use crate::error::{Error, Result};

/// Kolmogorov–Smirnov statistic of `sorted` against a reference CDF:
/// the largest absolute gap between the empirical step function and `cdf`,
/// checked on both sides of each step.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientData(
            "KS statistic needs at least one sample".to_string(),
        ));
    }
    if sorted.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("KS statistic input must be sorted ascending"));
    }
    let n = sorted.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        if !f.is_finite() {
            return Err(Error::NonFinite(format!("reference CDF at {x}")));
        }
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d = d.max(above.max(below));
    }
    Ok(d)
}

/// Normal-approximation half-width of a proportion's 95% confidence
/// interval: `1.96 * sqrt(p(1-p)/n)`.
pub fn binomial_halfwidth(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    1.96 * (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n as f64).sqrt()
}

/// Linear-interpolation percentile of a sorted slice; `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientData(
            "percentile needs at least one sample".to_string(),
        ));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("percentile rank {q} outside [0, 1]")));
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Equal-width histogram counts of `samples` over `[lo, hi)`; values outside
/// the range are clamped into the edge bins so mass is never dropped.
pub fn histogram(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Vec<usize>> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::domain(format!(
            "histogram needs bins >= 1 and hi > lo, got {bins} bins over [{lo}, {hi})"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let idx = ((x - lo) / width).floor();
        let idx = (idx.max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts)
}
