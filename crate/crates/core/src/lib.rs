//! Simulation core for reserved-tone spectrum monitoring in OFDM systems.
//!
//! A secondary (cognitive) OFDM transmitter leaves a few scheduled
//! sub-carriers empty ("reserved tones") in every data symbol. A monitoring
//! receiver watches the energy on those tones with two adjacent sliding
//! windows and declares primary-user reappearance when the energy ratio
//! between the newer and the older window exceeds a threshold derived from
//! a target false-alarm probability. The ratio statistic follows a scaled
//! F-like law, so thresholds and detection probabilities have closed forms
//! built on the regularized incomplete beta function.
//!
//! The crate is organized around that signal path:
//!
//! * [`numerics`] — special functions, unitary DFT helpers, seeded complex
//!   Gaussian generation, and fractional resampling,
//! * [`phy_tx`] — frame configuration, reserved-tone scheduling, OFDM
//!   synthesis, and the primary-user waveform,
//! * [`channel`] — multipath draws and CFO/SFO/noise/NBI impairments,
//! * [`rx_sync`] — synchronization (CFO, joint CFO/SFO least squares),
//!   receiver windowing with folding, reserved-tone extraction,
//! * [`detector`] — closed-form threshold/detection math and the streaming
//!   energy-ratio monitor,
//! * [`harness`] — Monte Carlo experiment scenarios with CSV output.
//!
//! # Quick start
//!
//! ```
//! use specmon_core::detector::{threshold_from_pfa, DetectorState};
//!
//! let n = 32;
//! let gamma = threshold_from_pfa(0.025, n).unwrap();
//! let mut det = DetectorState::new(n, gamma).unwrap();
//! det.declare_idle(true);
//! // Feed reserved-tone samples; decisions start once both windows fill.
//! for i in 0..(2 * n as usize) {
//!     let z = num_complex::Complex64::new(0.1 * (i as f64).cos(), 0.0);
//!     let _ = det.ingest(z).unwrap();
//! }
//! ```

pub mod channel;
pub mod detector;
pub mod error;
pub mod harness;
pub mod iq;
pub mod numerics;
pub mod phy_tx;
pub mod rx_sync;
pub mod table;

pub use channel::{ChannelKind, ChannelProfile, ImpairmentSpec, NbiSpec};
pub use detector::{Decision, DetectorState, RocPoint};
pub use error::{Error, Result};
pub use harness::{reference_config, run_experiment, ExperimentSpec, Scenario, TrialReport};
pub use iq::{ComplexSample, IqBuffer};
pub use phy_tx::{CarrierRole, FrameConfig, FrequencyGrid, Mapper, ToneSchedule};
pub use rx_sync::{ReservedToneStream, SyncEstimate, SyncMode, WindowKind};
