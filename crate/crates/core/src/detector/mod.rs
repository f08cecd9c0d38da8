//! The energy-ratio decision engine.
//!
//! The monitor slides two consecutive equal-sized windows over the stream of
//! reserved-tone samples and forms the ratio of their energies,
//! `X_k = U_k / V_k` (newer over older). While only the secondary signal's
//! leakage and noise occupy the reserved tones, both windows see the same
//! variance and `X` hovers near 1; a primary transmission entering the newer
//! window pushes `X` up, and crossing a threshold declares the primary user
//! present.
//!
//! Under the Gaussian model, `X` is a scaled F statistic, so the false-alarm
//! rate, detection probability, threshold, density, and distribution all
//! have closed forms in the regularized incomplete beta function
//! ([`closed_form`]). The streaming state machine, decision records, and
//! vote fusion live in [`monitor`].

mod closed_form;
mod monitor;

pub use closed_form::{
    cdf_x, mean_x, pd_closed_form, pd_closed_form_fading, pdf_x, pfa_from_threshold,
    threshold_from_pfa, var_x,
};
pub use monitor::{
    fuse_majority, run_monitor, write_decision_csv, Decision, DetectorState, RocPoint,
};
