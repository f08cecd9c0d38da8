//! Monte Carlo experiment driver: scenario specifications, trial execution,
//! and CSV-ready aggregation.
//!
//! Two levels of simulation coexist here. *Statistic-level* scenarios draw
//! reserved-tone observations directly from their distribution (complex
//! Gaussians whose variance jumps when the primary appears) and exercise the
//! detector math and the streaming monitor at scale. *Waveform-level*
//! scenarios run the full pipeline — frame synthesis, impairments,
//! synchronization, windowed demodulation, tone extraction — and are used
//! where the question is about the pipeline itself (offset-estimation error,
//! leakage and ICI robustness). Every scenario reports closed-form
//! companions next to the empirical columns where a closed form exists, so
//! one pass over the CSV validates the run.
//!
//! Determinism: every trial derives its RNG stream from
//! `(spec.seed, scenario tag, sweep-point index, trial index)`, so results
//! are independent of execution order and thread count, and a re-run with
//! the same spec produces byte-identical CSV.

mod model;
mod phy;
mod scenarios;
mod stats;

pub use model::{measure_detection_rate, measure_false_alarm_rate};
pub use stats::{binomial_halfwidth, ks_statistic, percentile};

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ImpairmentSpec;
use crate::error::{Error, Result};
use crate::phy_tx::{FrameConfig, Mapper};
use crate::rx_sync::SyncEstimate;
use crate::table::Table;

/// Experiment families the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Statistic distribution under a fixed window-power ratio vs the
    /// closed-form density (statistic level).
    PdfCheck,
    /// Conditional statistic distributions at several primary strengths
    /// (statistic level).
    CondPdf,
    /// Detection probability against the secondary-to-primary power ratio
    /// at a fixed false-alarm target (statistic level).
    PdVsSpr,
    /// Operating characteristic: detection and false-alarm rates across
    /// false-alarm targets (statistic level).
    Roc,
    /// Offset estimation error vs SNR through the full receiver chain
    /// (waveform level).
    SyncMse,
    /// Detection curves with impairments and compensation on vs the
    /// clean-sync reference (waveform level).
    ImpairmentAblation,
    /// Fading and multi-antenna detection curves (statistic level).
    FadingMimo,
    /// Time from primary reappearance to detection (statistic level).
    Latency,
}

impl Scenario {
    /// Stable tag mixed into per-trial seed derivation. Disjoint from the
    /// transmitter/channel tags so scenario streams never alias them.
    pub(crate) fn tag(self) -> u64 {
        match self {
            Scenario::PdfCheck => 10,
            Scenario::CondPdf => 11,
            Scenario::PdVsSpr => 12,
            Scenario::Roc => 13,
            Scenario::SyncMse => 14,
            Scenario::ImpairmentAblation => 15,
            Scenario::FadingMimo => 16,
            Scenario::Latency => 17,
        }
    }
}

/// Full description of one experiment run.
///
/// Which sweep lists a scenario reads is documented on [`Scenario`]'s
/// variants and checked by [`ExperimentSpec::validate`]; unused lists are
/// ignored. Construct with [`ExperimentSpec::for_scenario`] and override
/// fields, or deserialize a complete spec from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    /// Monte Carlo trials (or evaluations) per sweep point.
    pub trials: usize,
    /// Base seed; all per-trial streams derive from it.
    pub seed: u64,
    /// Frame numerology for waveform-level scenarios and for tone/symbol
    /// bookkeeping everywhere.
    pub frame: FrameConfig,
    /// Channel and receiver impairments; `snr_db` also anchors the
    /// PNR = SNR − SPR conversion used by the statistic-level scenarios.
    pub impairments: ImpairmentSpec,
    /// Detector window lengths N. Most scenarios use the first entry.
    pub window_n: Vec<u32>,
    /// False-alarm targets. Sweep axis for `roc`; first entry elsewhere.
    pub p_fa: Vec<f64>,
    /// Secondary-to-primary power ratios in dB (sweep axis for
    /// `pd_vs_spr`, `impairment_ablation`, `fading_mimo`, `latency`).
    pub spr_db: Vec<f64>,
    /// Primary-to-noise ratios in dB (sweep axis for `cond_pdf`).
    pub pnr_db: Vec<f64>,
    /// Signal-to-noise ratios in dB (sweep axis for `sync_mse`).
    pub snr_db: Vec<f64>,
    /// Newer-to-older window power ratio in dB for `pdf_check`.
    pub ratio_db: f64,
    /// Histogram resolution for the distribution scenarios.
    pub histogram_bins: usize,
    /// Receive-antenna counts compared by `fading_mimo`.
    pub n_rx_arms: Vec<usize>,
    /// Primary onset for `latency`, as an index into the flattened
    /// reserved-tone stream. `None` puts it mid-stream on a symbol boundary.
    pub onset_tone: Option<usize>,
    /// Force the primary absent in detection trials; the detection column
    /// then measures the false-alarm rate by construction.
    pub force_pu_absent: bool,
}

/// Outcome of a single Monte Carlo trial, reproducible from `(spec, seed)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    /// The derived per-trial seed actually used.
    pub seed: u64,
    pub scenario: Scenario,
    /// Swept parameter values in effect for this trial, name → value.
    pub swept: Vec<(String, f64)>,
    /// Ground truth: whether primary energy was injected.
    pub pu_present: bool,
    /// Whether the monitor declared a (calibrated) detection.
    pub detected: bool,
    /// Reserved-tone samples from primary onset to detection, inclusive.
    pub latency_tones: Option<u64>,
    /// Latency converted to OFDM symbols (tones per symbol × antennas).
    pub latency_symbols: Option<f64>,
    /// Synchronization diagnostics, for waveform-level trials.
    pub sync: Option<SyncEstimate>,
}

/// The frame numerology and impairment set used throughout the experiment
/// write-ups: 1024 sub-carriers with 224 guards, 32 pilots, 4 reserved
/// tones hopping by 2, 64-sample cyclic prefix, 16 MHz sampling
/// (15.625 kHz spacing), 2 preambles + 256 data symbols of 16-PSK;
/// 9 dB SNR, 320 kHz CFO (bounded by 400 kHz), 100 ppm SFO, one antenna.
pub fn reference_config() -> (FrameConfig, ImpairmentSpec) {
    let frame = FrameConfig {
        n_subcarriers: 1024,
        n_guard_total: 224,
        n_pilots: 32,
        n_reserved: 4,
        cp_len: 64,
        sample_rate_hz: 16e6,
        delta_r: 2,
        n_preambles: 2,
        n_data_symbols: 256,
        mapper: Mapper::Psk16,
        disabled_tones: BTreeSet::new(),
    };
    let impairments = ImpairmentSpec {
        snr_db: Some(9.0),
        cfo_hz: 320e3,
        sfo_ppm: 100.0,
        cfo_max_hz: 400e3,
        spr_db: 0.0,
        n_rx: 1,
        nbi: None,
    };
    (frame, impairments)
}

impl ExperimentSpec {
    /// A ready-to-run spec for `scenario` at desk-scale trial counts, based
    /// on [`reference_config`]. Waveform-level scenarios shorten the
    /// frame where the extra symbols would only cost time (offset
    /// estimation uses the preambles alone; detection curves need the
    /// stream to cover the windows around the onset, not 256 symbols).
    pub fn for_scenario(scenario: Scenario) -> Self {
        let (frame, impairments) = reference_config();
        let mut spec = ExperimentSpec {
            scenario,
            trials: 10_000,
            seed: 1,
            frame,
            impairments,
            window_n: vec![32],
            p_fa: vec![0.025],
            spr_db: (0..=14).map(f64::from).collect(),
            pnr_db: vec![-2.0, 0.0, 2.0, 4.0],
            snr_db: vec![0.0, 3.0, 6.0, 9.0, 12.0],
            ratio_db: 5.0,
            histogram_bins: 80,
            n_rx_arms: vec![1, 2],
            onset_tone: None,
            force_pu_absent: false,
        };
        match scenario {
            Scenario::PdfCheck => spec.trials = 100_000,
            Scenario::CondPdf => spec.trials = 50_000,
            Scenario::PdVsSpr => {}
            Scenario::Roc => {
                spec.p_fa = vec![0.01, 0.025, 0.04, 0.1];
                spec.spr_db = vec![5.0];
            }
            Scenario::SyncMse => {
                spec.trials = 1_000;
                // Only the preambles feed the estimators.
                spec.frame.n_data_symbols = 1;
            }
            Scenario::ImpairmentAblation => {
                spec.trials = 200;
                spec.frame.n_data_symbols = 48;
                spec.spr_db = (5..=11).map(f64::from).collect();
            }
            Scenario::FadingMimo => {
                spec.window_n = vec![128];
                spec.spr_db = (6..=14).map(f64::from).collect();
            }
            Scenario::Latency => {
                spec.trials = 2_000;
                spec.spr_db = vec![0.0, 3.0, 6.0];
            }
        }
        spec
    }

    /// SNR in dB, required by every scenario that injects or budgets noise.
    pub(crate) fn snr_db_required(&self) -> Result<f64> {
        self.impairments.snr_db.ok_or_else(|| {
            Error::config("this scenario needs impairments.snr_db set (noise budget and PNR = SNR - SPR bookkeeping)")
        })
    }

    /// Checks invariants: positive trial count, non-empty sweep lists for
    /// the axes the scenario reads, and a valid frame/impairment pair.
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        self.impairments.validate()?;
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        let need = |name: &str, ok: bool| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "scenario {:?} sweeps {name}, which is empty",
                    self.scenario
                )))
            }
        };
        need("window_n", !self.window_n.is_empty())?;
        need("p_fa", !self.p_fa.is_empty())?;
        match self.scenario {
            Scenario::PdfCheck | Scenario::CondPdf => {
                if self.histogram_bins < 2 {
                    return Err(Error::config("histogram needs at least 2 bins"));
                }
                if self.scenario == Scenario::CondPdf {
                    // PNRs are swept directly; no SNR - SPR conversion here.
                    need("pnr_db", !self.pnr_db.is_empty())?;
                }
                if !self.ratio_db.is_finite() {
                    return Err(Error::domain(format!(
                        "ratio_db must be finite, got {}",
                        self.ratio_db
                    )));
                }
            }
            Scenario::PdVsSpr | Scenario::ImpairmentAblation | Scenario::Latency => {
                need("spr_db", !self.spr_db.is_empty())?;
                self.snr_db_required()?;
            }
            Scenario::Roc => {
                need("spr_db", !self.spr_db.is_empty())?;
                self.snr_db_required()?;
            }
            Scenario::SyncMse => {
                need("snr_db", !self.snr_db.is_empty())?;
            }
            Scenario::FadingMimo => {
                need("spr_db", !self.spr_db.is_empty())?;
                need("n_rx_arms", !self.n_rx_arms.is_empty())?;
                if self.n_rx_arms.iter().any(|&r| r == 0) {
                    return Err(Error::config("n_rx_arms entries must be at least 1"));
                }
                self.snr_db_required()?;
            }
        }
        for &n in &self.window_n {
            if n == 0 {
                return Err(Error::config("window_n entries must be at least 1"));
            }
        }
        Ok(())
    }
}

/// Runs the experiment described by `spec` and returns the aggregated,
/// CSV-ready table. Deterministic in `(spec, seed)`; trials execute in
/// parallel but aggregate in a fixed order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    match spec.scenario {
        Scenario::PdfCheck => scenarios::run_pdf_check(spec),
        Scenario::CondPdf => scenarios::run_cond_pdf(spec),
        Scenario::PdVsSpr => scenarios::run_pd_vs_spr(spec),
        Scenario::Roc => scenarios::run_roc(spec),
        Scenario::SyncMse => scenarios::run_sync_mse(spec),
        Scenario::ImpairmentAblation => scenarios::run_ablation(spec),
        Scenario::FadingMimo => scenarios::run_fading_mimo(spec),
        Scenario::Latency => scenarios::run_latency(spec),
    }
}

/// Writes a result table as UTF-8 CSV (header row; floats at 9 significant
/// digits). I/O failures carry the path.
pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    table.write_csv(path)
}
