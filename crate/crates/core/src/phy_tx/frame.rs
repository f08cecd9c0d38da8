//! Frequency-grid assembly: preambles, pilots, payload, and nulled tones.

use super::schedule::{pilot_positions, schedule_reserved_tones};
use super::{CarrierRole, FrameConfig, FrequencyGrid, GridSymbol};
use crate::error::{Error, Result};
use crate::numerics::{derive_seed, rng_from_seed};
use num_complex::Complex64;
use rand::Rng;

// Seed-derivation tags for the independent pseudo-random streams a frame
// consumes.
const TAG_PREAMBLE: u64 = 1;
const TAG_PILOTS: u64 = 2;
const TAG_PAYLOAD: u64 = 3;

fn bpsk(bit: bool) -> Complex64 {
    Complex64::new(if bit { 1.0 } else { -1.0 }, 0.0)
}

/// Training carriers of a preamble symbol: every 4th used carrier. Keeping
/// only every 4th carrier makes the symbol body consist of four identical
/// quarter-period repetitions, which is what the repetition-based CFO
/// estimator correlates against.
pub(crate) fn preamble_carriers(cfg: &FrameConfig) -> Vec<usize> {
    (0..cfg.n_used())
        .step_by(4)
        .filter(|u| !cfg.disabled_tones.contains(u))
        .collect()
}

/// Builds the frame's frequency grid: `n_preambles` identical training
/// symbols followed by data symbols carrying `payload` (already-mapped
/// constellation points, laid out symbol-major then ascending carrier).
///
/// `pilot_seed` determines the preamble pattern and the scattered-pilot
/// BPSK sequence. A payload shorter than the frame capacity leaves the
/// remaining data slots zero; a longer one is rejected.
pub fn build_frame(
    cfg: &FrameConfig,
    payload: &[Complex64],
    pilot_seed: u64,
) -> Result<FrequencyGrid> {
    cfg.validate()?;
    let capacity = cfg.frame_capacity();
    if payload.len() > capacity {
        return Err(Error::Size {
            what: "payload symbols",
            expected: capacity,
            got: payload.len(),
        });
    }

    let n_s = cfg.n_subcarriers;
    let pilots = pilot_positions(cfg);
    let mut preamble_rng = rng_from_seed(derive_seed(pilot_seed, &[TAG_PREAMBLE]));
    let mut pilot_rng = rng_from_seed(derive_seed(pilot_seed, &[TAG_PILOTS]));

    // One preamble symbol, reused verbatim for every training position:
    // the CFO estimators rely on consecutive identical training symbols.
    let mut preamble = GridSymbol {
        values: vec![Complex64::new(0.0, 0.0); n_s],
        roles: symbol_roles(cfg, 0)?,
    };
    for &u in &preamble_carriers(cfg) {
        preamble.values[cfg.used_to_shifted(u)] = bpsk(preamble_rng.gen());
    }

    let mut symbols = vec![preamble; cfg.n_preambles];
    let mut payload_iter = payload.iter();

    for m in cfg.n_preambles..cfg.n_symbols_total() {
        let mut sym = GridSymbol {
            values: vec![Complex64::new(0.0, 0.0); n_s],
            roles: symbol_roles(cfg, m)?,
        };
        for &u in &pilots {
            sym.values[cfg.used_to_shifted(u)] = bpsk(pilot_rng.gen());
        }
        for u in 0..cfg.n_used() {
            let s = cfg.used_to_shifted(u);
            if sym.roles[s] == CarrierRole::Data {
                if let Some(&v) = payload_iter.next() {
                    sym.values[s] = v;
                }
            }
        }
        symbols.push(sym);
    }

    Ok(FrequencyGrid {
        n_subcarriers: n_s,
        symbols,
    })
}

/// Role layout of one symbol, independent of any values: guards and
/// disabled carriers everywhere, training carriers on preamble symbols,
/// scattered pilots plus the scheduled reserved tones on data symbols.
///
/// The receiver labels demodulated grids with this same layout, so the
/// extraction stage and the transmitter can never disagree about where the
/// reserved tones sit.
pub fn symbol_roles(cfg: &FrameConfig, symbol_index: usize) -> Result<Vec<CarrierRole>> {
    cfg.validate()?;
    if symbol_index >= cfg.n_symbols_total() {
        return Err(Error::config(format!(
            "symbol index {symbol_index} outside the {}-symbol frame",
            cfg.n_symbols_total()
        )));
    }
    let mut roles = base_roles(cfg);
    if symbol_index < cfg.n_preambles {
        for &u in &preamble_carriers(cfg) {
            roles[cfg.used_to_shifted(u)] = CarrierRole::Pilot;
        }
    } else {
        for &u in &pilot_positions(cfg) {
            roles[cfg.used_to_shifted(u)] = CarrierRole::Pilot;
        }
        for s in schedule_reserved_tones(cfg, symbol_index)?.shifted_indices(cfg) {
            roles[s] = CarrierRole::Reserved;
        }
    }
    Ok(roles)
}

/// Role template shared by all symbols: guards at the edges, disabled
/// carriers nulled, everything else data until overwritten.
fn base_roles(cfg: &FrameConfig) -> Vec<CarrierRole> {
    let mut roles = vec![CarrierRole::Data; cfg.n_subcarriers];
    let lo = cfg.guard_low();
    for role in roles.iter_mut().take(lo) {
        *role = CarrierRole::Guard;
    }
    for role in roles.iter_mut().skip(lo + cfg.n_used()) {
        *role = CarrierRole::Guard;
    }
    for &u in &cfg.disabled_tones {
        roles[cfg.used_to_shifted(u)] = CarrierRole::Disabled;
    }
    roles
}

/// Draws a full frame's worth of uniformly random constellation points.
pub fn random_payload(cfg: &FrameConfig, seed: u64) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let mut rng = rng_from_seed(derive_seed(seed, &[TAG_PAYLOAD]));
    let arity = cfg.mapper.arity();
    (0..cfg.frame_capacity())
        .map(|_| cfg.mapper.point(rng.gen_range(0..arity)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy_tx::tests::reference_config;

    #[test]
    fn grid_shape_and_invariants_hold() {
        let cfg = reference_config();
        let payload = random_payload(&cfg, 42).unwrap();
        assert_eq!(payload.len(), 764 * 256);
        let grid = build_frame(&cfg, &payload, 7).unwrap();
        assert_eq!(grid.n_symbols(), 258);
        grid.check_invariants(&cfg).unwrap();
    }

    #[test]
    fn preamble_symbols_are_identical_and_unreserved() {
        let cfg = reference_config();
        let grid = build_frame(&cfg, &[], 7).unwrap();
        assert_eq!(grid.symbols[0], grid.symbols[1]);
        assert!(grid.symbols[0]
            .roles
            .iter()
            .all(|&r| r != CarrierRole::Reserved));
        // Training carriers sit on every 4th used position.
        let active: Vec<usize> = (0..cfg.n_subcarriers)
            .filter(|&s| grid.symbols[0].roles[s] == CarrierRole::Pilot)
            .collect();
        assert_eq!(active.len(), 200);
        for s in &active {
            assert_eq!((s - cfg.guard_low()) % 4, 0);
        }
    }

    #[test]
    fn reserved_entries_are_exactly_zero() {
        let cfg = reference_config();
        let payload = random_payload(&cfg, 1).unwrap();
        let grid = build_frame(&cfg, &payload, 2).unwrap();
        let mut n_reserved = 0;
        for sym in &grid.symbols[cfg.n_preambles..] {
            for (v, r) in sym.values.iter().zip(&sym.roles) {
                if *r == CarrierRole::Reserved {
                    assert_eq!(*v, Complex64::new(0.0, 0.0));
                    n_reserved += 1;
                }
            }
        }
        assert_eq!(n_reserved, cfg.n_reserved * cfg.n_data_symbols);
    }

    #[test]
    fn role_sets_are_disjoint_and_complete() {
        let cfg = reference_config();
        let grid = build_frame(&cfg, &random_payload(&cfg, 3).unwrap(), 3).unwrap();
        for sym in &grid.symbols[cfg.n_preambles..] {
            let mut counts = [0usize; 5];
            for r in &sym.roles {
                counts[*r as usize] += 1;
            }
            let [data, pilot, reserved, guard, disabled] = counts;
            assert_eq!(pilot, cfg.n_pilots);
            assert_eq!(reserved, cfg.n_reserved);
            assert_eq!(guard, cfg.n_guard_total);
            assert_eq!(disabled, cfg.disabled_tones.len());
            assert_eq!(data, cfg.data_capacity_per_symbol());
        }
    }

    #[test]
    fn payload_fills_symbol_major_in_carrier_order() {
        let mut cfg = reference_config();
        cfg.n_data_symbols = 2;
        let marker = Complex64::new(0.5, -0.5);
        let mut payload = vec![Complex64::new(1.0, 0.0); cfg.frame_capacity()];
        payload[0] = marker; // first data slot of the first data symbol
        let grid = build_frame(&cfg, &payload, 9).unwrap();
        let sym = &grid.symbols[cfg.n_preambles];
        let first_data = (0..cfg.n_subcarriers)
            .find(|&s| sym.roles[s] == CarrierRole::Data)
            .unwrap();
        assert_eq!(sym.values[first_data], marker);
    }

    #[test]
    fn payload_overflow_is_rejected_short_payload_padded() {
        let mut cfg = reference_config();
        cfg.n_data_symbols = 4;
        let too_long = vec![Complex64::new(1.0, 0.0); cfg.frame_capacity() + 1];
        assert!(matches!(
            build_frame(&cfg, &too_long, 0),
            Err(Error::Size { .. })
        ));
        let short = vec![Complex64::new(1.0, 0.0); 10];
        let grid = build_frame(&cfg, &short, 0).unwrap();
        grid.check_invariants(&cfg).unwrap();
        let placed: usize = grid.symbols[cfg.n_preambles..]
            .iter()
            .flat_map(|s| s.values.iter())
            .filter(|v| **v != Complex64::new(0.0, 0.0))
            .count();
        // 10 payload points plus the pilots.
        assert_eq!(placed, 10 + cfg.n_pilots * cfg.n_data_symbols);
    }

    #[test]
    fn disabled_tones_are_nulled_everywhere() {
        let mut cfg = reference_config();
        cfg.disabled_tones = [5usize, 6, 7].into_iter().collect();
        cfg.n_data_symbols = 8;
        let grid = build_frame(&cfg, &random_payload(&cfg, 4).unwrap(), 4).unwrap();
        for sym in &grid.symbols {
            for &u in &cfg.disabled_tones {
                let s = cfg.used_to_shifted(u);
                assert_eq!(sym.roles[s], CarrierRole::Disabled);
                assert_eq!(sym.values[s], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn payload_draw_is_deterministic_per_seed() {
        let mut cfg = reference_config();
        cfg.n_data_symbols = 2;
        assert_eq!(
            random_payload(&cfg, 5).unwrap(),
            random_payload(&cfg, 5).unwrap()
        );
        assert_ne!(
            random_payload(&cfg, 5).unwrap(),
            random_payload(&cfg, 6).unwrap()
        );
    }
}
