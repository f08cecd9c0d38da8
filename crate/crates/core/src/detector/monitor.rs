//! Streaming detector state, decision records, and vote fusion.

use crate::error::{Error, Result};
use crate::iq::ComplexSample;
use crate::table::{fmt_sig9, Table};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One evaluation of the decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    /// Ratio of the newer window's energy to the older window's.
    pub x_value: f64,
    /// Whether `x_value` exceeded the threshold.
    pub pu_detected: bool,
    /// Index (0-based) of the newest sample contributing to this evaluation.
    pub tone_index: usize,
    /// Whether the monitor had completed its idle-fill calibration when this
    /// decision was formed; uncalibrated decisions are advisory only.
    pub calibrated: bool,
}

/// One operating point of a receiver characteristic: target and measured
/// rates at a given threshold and primary strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub p_fa: f64,
    pub p_d: f64,
    pub gamma: f64,
    /// Primary strength at which `p_d` was measured, in dB. ROC sweeps store
    /// the primary-to-secondary ratio here; PNR sweeps store PNR.
    pub strength_db: f64,
}

impl RocPoint {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [("p_fa", self.p_fa), ("p_d", self.p_d)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::domain(format!(
                    "{what} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Sliding two-window energy-ratio monitor.
///
/// Keeps the squared magnitudes of the last `2N` samples in a ring buffer
/// and maintains both window energies recursively: each new sample adds to
/// the newer window `U`, migrates one sample from `U` into the older window
/// `V`, and retires the oldest from `V`. Cost per sample is O(1) regardless
/// of `N`.
///
/// Calibration gates the decisions: the caller declares idle periods (no
/// primary present, e.g. right after the secondary claimed the band), and
/// once `2N` consecutive samples have been ingested under a declared idle,
/// the monitor is calibrated and subsequent decisions are binding.
#[derive(Debug, Clone)]
pub struct DetectorState {
    n: usize,
    gamma: f64,
    /// Squared magnitudes of the most recent `2N` samples (ring buffer).
    energies: Vec<f64>,
    /// Ring index of the oldest stored sample once the buffer is full.
    head: usize,
    /// Energy of the older window.
    v: f64,
    /// Energy of the newer window.
    u: f64,
    samples_seen: u64,
    idle_declared: bool,
    idle_run: u64,
    calibrated: bool,
}

impl DetectorState {
    /// Creates a monitor with window size `n` (per window) and decision
    /// threshold `gamma`.
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("window size N must be at least 1"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::domain(format!(
                "threshold must be positive and finite, got {gamma}"
            )));
        }
        Ok(DetectorState {
            n: n as usize,
            gamma,
            energies: Vec::with_capacity(2 * n as usize),
            head: 0,
            v: 0.0,
            u: 0.0,
            samples_seen: 0,
            idle_declared: false,
            idle_run: 0,
            calibrated: false,
        })
    }

    pub fn window_size(&self) -> u32 {
        self.n as u32
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibrated
    }

    /// Current window energies `(older, newer)`; meaningful once `2N`
    /// samples have been ingested.
    pub fn window_energies(&self) -> (f64, f64) {
        (self.v, self.u)
    }

    /// Declares whether the samples being ingested from now on are known to
    /// be primary-free. Calibration completes after `2N` consecutive idle
    /// samples and then latches.
    pub fn declare_idle(&mut self, idle: bool) {
        self.idle_declared = idle;
        if !idle {
            self.idle_run = 0;
        }
    }

    /// Ingests one reserved-tone sample. Returns a [`Decision`] once both
    /// windows are filled (from the `2N`-th sample onward), `None` before.
    pub fn ingest(&mut self, z: ComplexSample) -> Result<Option<Decision>> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite(format!(
                "reserved-tone sample at index {} is not finite: {z}",
                self.samples_seen
            )));
        }
        let e = z.norm_sqr();
        let two_n = 2 * self.n;

        if self.energies.len() < two_n {
            // Filling phase: the first N samples seed the older window, the
            // next N the newer one.
            if self.energies.len() < self.n {
                self.v += e;
            } else {
                self.u += e;
            }
            self.energies.push(e);
        } else {
            // Steady state: O(1) recursive update. The sample leaving the
            // newer window slides into the older one, whose own oldest
            // sample retires.
            let leaving_v = self.energies[self.head];
            let migrating = self.energies[(self.head + self.n) % two_n];
            self.u += e - migrating;
            self.v += migrating - leaving_v;
            // Sums of nonnegative terms can only dip below zero through
            // floating-point cancellation; clamp so X stays in range.
            self.u = self.u.max(0.0);
            self.v = self.v.max(0.0);
            self.energies[self.head] = e;
            self.head = (self.head + 1) % two_n;
        }

        self.samples_seen += 1;
        if self.idle_declared {
            self.idle_run += 1;
            if self.idle_run >= two_n as u64 {
                self.calibrated = true;
            }
        }

        if self.samples_seen < two_n as u64 {
            return Ok(None);
        }
        let x_value = ratio_statistic(self.u, self.v);
        Ok(Some(Decision {
            x_value,
            pu_detected: x_value > self.gamma,
            tone_index: (self.samples_seen - 1) as usize,
            calibrated: self.calibrated,
        }))
    }
}

/// Decision variable for window energies `(u, v)`, with the degenerate
/// zero-energy cases pinned: an empty older window against a live newer one
/// reads as certain detection, and two empty windows read as the neutral
/// ratio 1. Both are reachable only with synthetic noise-free input, and
/// the first choice errs toward protecting the primary user.
fn ratio_statistic(u: f64, v: f64) -> f64 {
    if v > 0.0 {
        u / v
    } else if u > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Runs a calibrated monitor over a reserved-tone sample stream.
///
/// The stream is assumed to begin primary-free (the secondary claims the
/// band, fills both windows with its own leakage and noise, then watches),
/// so idle is declared from the first sample and the monitor is calibrated
/// exactly when the windows first fill. Returns every decision plus the
/// index of the first binding detection, if any; scoring continues past it
/// so callers get the full trace.
pub fn run_monitor(
    samples: &[ComplexSample],
    n: u32,
    p_fa: f64,
) -> Result<(Vec<Decision>, Option<usize>)> {
    let two_n = 2 * n as usize;
    if samples.len() < two_n {
        return Err(Error::InsufficientData(format!(
            "monitor calibration needs at least 2N = {two_n} reserved-tone samples, got {}",
            samples.len()
        )));
    }
    let gamma = super::closed_form::threshold_from_pfa(p_fa, n)?;
    let mut state = DetectorState::new(n, gamma)?;
    state.declare_idle(true);

    let mut decisions = Vec::with_capacity(samples.len() - two_n + 1);
    let mut first_detection = None;
    for &z in samples {
        if let Some(d) = state.ingest(z)? {
            if first_detection.is_none() && d.calibrated && d.pu_detected {
                first_detection = Some(d.tone_index);
            }
            decisions.push(d);
        }
    }
    Ok((decisions, first_detection))
}

/// Majority fusion of per-receiver detection votes: true when at least half
/// the votes are detections (even-split ties resolve toward detection, the
/// conservative choice for protecting the primary user).
pub fn fuse_majority(votes: &[bool]) -> Result<bool> {
    if votes.is_empty() {
        return Err(Error::InsufficientData(
            "majority fusion needs at least one vote".into(),
        ));
    }
    let detections = votes.iter().filter(|&&v| v).count();
    Ok(2 * detections >= votes.len())
}

/// Writes a decision trace as CSV with columns
/// `k,x,gamma,detected,calibrated`.
pub fn write_decision_csv(decisions: &[Decision], gamma: f64, path: &Path) -> Result<()> {
    let mut table = Table::new(&["k", "x", "gamma", "detected", "calibrated"]);
    for d in decisions {
        table.push_row(vec![
            d.tone_index.to_string(),
            fmt_sig9(d.x_value),
            fmt_sig9(gamma),
            (d.pu_detected as u8).to_string(),
            (d.calibrated as u8).to_string(),
        ])?;
    }
    table.write_csv(path)
}
