//! Pilot placement and the per-symbol reserved-tone schedule.

use super::{FrameConfig, ToneSchedule};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Used-band indices of the scattered pilots on data symbols: evenly strided
/// across the band, offset by half a stride so pilots sit between the
/// reserved-tone base positions instead of on top of them.
pub fn pilot_positions(cfg: &FrameConfig) -> BTreeSet<usize> {
    let n_used = cfg.n_used();
    if cfg.n_pilots == 0 {
        return BTreeSet::new();
    }
    let half_stride = n_used / (2 * cfg.n_pilots);
    (0..cfg.n_pilots)
        .map(|j| (half_stride + j * n_used / cfg.n_pilots) % n_used)
        .collect()
}

/// Reserved-tone indices for data symbol `m` (counted from the frame start,
/// so the first data symbol is `m = n_preambles`).
///
/// The base pattern spreads the tones evenly across the used band; every
/// data symbol advances it by `delta_r` carriers, wrapping at the band edge,
/// so the tones sweep every position over time. An index landing on a
/// pilot, a disabled carrier, or another reserved tone steps forward one
/// carrier at a time until free — pilots must survive for synchronization
/// and tracking, so the null tone yields.
pub fn schedule_reserved_tones(cfg: &FrameConfig, m: usize) -> Result<ToneSchedule> {
    cfg.validate()?;
    if m < cfg.n_preambles {
        return Err(Error::config(format!(
            "symbol {m} is a preamble; reserved tones exist only on data symbols \
             (first data symbol is {})",
            cfg.n_preambles
        )));
    }
    if m >= cfg.n_symbols_total() {
        return Err(Error::config(format!(
            "symbol {m} is outside the frame of {} symbols",
            cfg.n_symbols_total()
        )));
    }
    let n_used = cfg.n_used();
    let occupied = {
        let mut set = pilot_positions(cfg);
        set.extend(cfg.disabled_tones.iter().copied());
        set
    };

    let shift = (m - cfg.n_preambles) * cfg.delta_r % n_used;
    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    for i in 0..cfg.n_reserved {
        let mut idx = (i * n_used / cfg.n_reserved + shift) % n_used;
        let mut steps = 0;
        while occupied.contains(&idx) || chosen.contains(&idx) {
            idx = (idx + 1) % n_used;
            steps += 1;
            if steps > n_used {
                return Err(Error::config(
                    "no free carrier available for a reserved tone",
                ));
            }
        }
        chosen.insert(idx);
    }
    Ok(ToneSchedule {
        symbol_index: m,
        reserved_indices: chosen.into_iter().collect(),
    })
}
