//! Reserved-tone extraction: the bridge from demodulated frames to the
//! energy-ratio monitor.
//!
//! The monitor consumes one flat complex stream. Tones are interleaved in
//! a fixed order — symbol, then tone slot within the symbol, then receive
//! antenna — so that a multi-antenna setup simply widens each time step and
//! the window length can be scaled to match.

use crate::detector::{run_monitor, Decision};
use crate::error::{Error, Result};
use crate::iq::ComplexSample;
use crate::phy_tx::{schedule_reserved_tones, FrameConfig, FrequencyGrid};

/// Flat stream of reserved-tone observations in monitor feed order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservedToneStream {
    /// Tone values, symbol-major: all tones of data symbol 0 (each tone
    /// across every antenna) before any tone of symbol 1.
    pub samples: Vec<ComplexSample>,
    /// Number of data symbols contributing tones.
    pub n_symbols: usize,
    /// Reserved tones per symbol per antenna.
    pub n_tones: usize,
    /// Receive antennas interleaved per tone slot.
    pub n_rx: usize,
}

impl ReservedToneStream {
    /// Total sample count.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// True when no tones were extracted.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples contributed by one data symbol across all antennas.
    pub fn samples_per_symbol(&self) -> usize {
        self.n_tones * self.n_rx
    }

    /// Runs the calibrated energy-ratio monitor over this stream.
    ///
    /// Returns the full decision trace and the stream index of the first
    /// calibrated detection, if any.
    pub fn monitor(&self, window_len: u32, p_fa: f64) -> Result<(Vec<Decision>, Option<usize>)> {
        run_monitor(&self.samples, window_len, p_fa)
    }
}

/// Pulls the scheduled reserved-tone values out of demodulated frames.
///
/// Every grid must cover the full frame described by `cfg` (one grid per
/// receive antenna, all the same shape). For each data symbol the schedule
/// is re-derived, so the extractor follows the same tone hopping as the
/// transmitter without any side channel. Tone values are emitted in
/// ascending carrier order, antennas innermost.
pub fn extract_reserved_tones(
    grids: &[FrequencyGrid],
    cfg: &FrameConfig,
) -> Result<ReservedToneStream> {
    cfg.validate()?;
    if grids.is_empty() {
        return Err(Error::config("reserved-tone extraction needs at least one grid"));
    }
    let n_total = cfg.n_symbols_total();
    for g in grids {
        if g.n_subcarriers != cfg.n_subcarriers {
            return Err(Error::Size {
                what: "grid subcarrier count",
                expected: cfg.n_subcarriers,
                got: g.n_subcarriers,
            });
        }
        if g.symbols.len() != n_total {
            return Err(Error::Size {
                what: "grid symbol count",
                expected: n_total,
                got: g.symbols.len(),
            });
        }
    }

    let n_rx = grids.len();
    let mut samples =
        Vec::with_capacity(cfg.n_data_symbols * cfg.n_reserved * n_rx);
    for m in cfg.n_preambles..n_total {
        let schedule = schedule_reserved_tones(cfg, m)?;
        for s in schedule.shifted_indices(cfg) {
            for g in grids {
                samples.push(g.symbols[m].values[s]);
            }
        }
    }
    Ok(ReservedToneStream {
        samples,
        n_symbols: cfg.n_data_symbols,
        n_tones: cfg.n_reserved,
        n_rx,
    })
}
