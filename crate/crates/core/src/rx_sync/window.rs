//! Receiver windowing with folding.
//!
//! A rectangular DFT window gives every carrier sinc-shaped skirts, so an
//! off-grid interferer smears across the whole band and a reserved tone is
//! never quite empty. Tapering the window edges narrows the skirts, but a
//! taper longer than the symbol body would need a longer DFT. The fold
//! trick keeps the DFT at one body length: weight the CP-extended symbol
//! with a window whose edge tapers sum to one across a body-length shift
//! (a Nyquist window), then fold the overhanging edges back into the body
//! span. On-grid carriers are body-periodic over the whole extended symbol,
//! so the paired weights reconstruct them exactly; only off-grid energy
//! sees the taper.

use num_complex::Complex64;

use super::WindowKind;
use crate::error::{Error, Result};
use crate::iq::ComplexSample;
use crate::phy_tx::FrameConfig;

/// Applies the receiver window across one CP-extended symbol and returns
/// the body-length sample block to feed the DFT.
///
/// `symbol_td` holds at least one full symbol (`(N_s + N_g) * oversample`
/// samples) starting at its cyclic prefix. `None` extracts the plain body.
/// `Hanning` weights the full extent with a raised-cosine-edged Nyquist
/// window (flat top, half-prefix fold region on each side), folds the first
/// half of the prefix onto the block's tail and the tapered tail onto its
/// head, and realigns the result to body order so on-grid carriers land on
/// their usual DFT bins with unit gain.
pub fn window_fold(
    symbol_td: &[ComplexSample],
    cfg: &FrameConfig,
    window: WindowKind,
    oversample: usize,
) -> Result<Vec<ComplexSample>> {
    cfg.validate()?;
    if oversample == 0 || !oversample.is_power_of_two() {
        return Err(Error::config(format!(
            "oversample factor must be a power of two, got {oversample}"
        )));
    }
    let n_s = cfg.n_subcarriers * oversample;
    let n_g = cfg.cp_len * oversample;
    let d = n_s + n_g;
    if symbol_td.len() < d {
        return Err(Error::Size {
            what: "windowed symbol samples",
            expected: d,
            got: symbol_td.len(),
        });
    }

    match window {
        WindowKind::None => Ok(symbol_td[n_g..d].to_vec()),
        WindowKind::Hanning => {
            if n_g % 2 != 0 {
                return Err(Error::config(format!(
                    "folding needs an even cyclic-prefix length, got {n_g}"
                )));
            }
            let half = n_g / 2;
            // Raised-cosine edges over the CP length; w(q) + w(q + N_s) = 1
            // on the overlapping regions, which is what makes the fold
            // transparent to body-periodic content.
            let weight = |q: usize| -> f64 {
                let pi = std::f64::consts::PI;
                if q < n_g {
                    0.5 * (1.0 - (pi * q as f64 / n_g as f64).cos())
                } else if q < n_s {
                    1.0
                } else {
                    0.5 * (1.0 - (pi * (d - q) as f64 / n_g as f64).cos())
                }
            };
            // folded[i] accumulates position q = half + i and its fold
            // partner one body length away.
            let mut folded = vec![Complex64::new(0.0, 0.0); n_s];
            for (q, &v) in symbol_td.iter().enumerate().take(d) {
                let dest = if q < half {
                    q + n_s
                } else if q >= n_s + half {
                    q - n_s
                } else {
                    q
                };
                folded[dest - half] += v * weight(q);
            }
            // Rotate so index n is body position n (the block above starts
            // half a prefix into the body's cyclic order).
            Ok((0..n_s).map(|n| folded[(n + half) % n_s]).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dft;
    use crate::phy_tx::tests::reference_config;
    use crate::phy_tx::{synthesize, synthesize_oversampled, CarrierRole, FrequencyGrid, GridSymbol};

    fn single_carrier_grid(cfg: &FrameConfig, k: i64) -> FrequencyGrid {
        let n_s = cfg.n_subcarriers;
        let mut values = vec![Complex64::new(0.0, 0.0); n_s];
        values[(k + n_s as i64 / 2) as usize] = Complex64::new(1.0, 0.0);
        FrequencyGrid {
            n_subcarriers: n_s,
            symbols: vec![GridSymbol {
                values,
                roles: vec![CarrierRole::Data; n_s],
            }],
        }
    }

    /// A tone `offset` carrier spacings off bin `k`, spanning the full
    /// CP-extended symbol with body-aligned phase.
    fn off_grid_symbol(cfg: &FrameConfig, k: f64) -> Vec<Complex64> {
        let n_s = cfg.n_subcarriers as f64;
        let d = cfg.symbol_len();
        (0..d)
            .map(|q| {
                let body_pos = q as f64 - cfg.cp_len as f64;
                Complex64::from_polar(
                    1.0 / n_s.sqrt(),
                    2.0 * std::f64::consts::PI * k * body_pos / n_s,
                )
            })
            .collect()
    }

    #[test]
    fn plain_extraction_returns_the_body_bit_exactly() {
        let cfg = reference_config();
        let grid = single_carrier_grid(&cfg, 37);
        let tx = synthesize(&grid, &cfg).unwrap();
        let out = window_fold(&tx.samples, &cfg, WindowKind::None, 1).unwrap();
        assert_eq!(out, tx.samples[cfg.cp_len..cfg.symbol_len()].to_vec());
    }

    #[test]
    fn fold_preserves_on_grid_carriers_exactly() {
        let cfg = reference_config();
        for k in [-400i64, -37, 0, 123, 399] {
            let grid = single_carrier_grid(&cfg, k);
            let tx = synthesize(&grid, &cfg).unwrap();
            let out = window_fold(&tx.samples, &cfg, WindowKind::Hanning, 1).unwrap();
            let bins = dft(&out).unwrap();
            let idx = k.rem_euclid(cfg.n_subcarriers as i64) as usize;
            assert!(
                (bins[idx] - Complex64::new(1.0, 0.0)).norm() < 1e-9,
                "carrier {k}: {}",
                bins[idx]
            );
            let leak: f64 = bins
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, b)| b.norm_sqr())
                .sum();
            assert!(leak < 1e-18, "carrier {k} leakage {leak}");
        }
    }

    #[test]
    fn fold_matches_plain_window_on_grid_at_oversampling() {
        let cfg = reference_config();
        let grid = single_carrier_grid(&cfg, 200);
        let tx = synthesize_oversampled(&grid, &cfg, 4).unwrap();
        let out = window_fold(&tx.samples, &cfg, WindowKind::Hanning, 4).unwrap();
        assert_eq!(out.len(), 4 * cfg.n_subcarriers);
        let bins = dft(&out).unwrap();
        // Oversampled synthesis carries a sqrt(4) gain (see synthesize docs).
        assert!(
            (bins[200].norm() - 2.0).abs() < 1e-9,
            "carrier gain {}",
            bins[200].norm()
        );
    }

    #[test]
    fn taper_cuts_far_leakage_of_an_off_grid_tone() {
        // Worst case: a tone half-way between carriers. The taper spans
        // only the cyclic prefix, so close-in skirts barely move, but past
        // roughly D/N_g bins they drop fast. Demand 20 dB over the far band.
        let cfg = reference_config();
        let k0 = 100.5;
        let sym = off_grid_symbol(&cfg, k0);
        let plain = dft(&window_fold(&sym, &cfg, WindowKind::None, 1).unwrap()).unwrap();
        let tapered = dft(&window_fold(&sym, &cfg, WindowKind::Hanning, 1).unwrap()).unwrap();
        let band_power = |bins: &[Complex64], lo: i64, hi: i64| -> f64 {
            (lo..=hi)
                .map(|k| bins[k.rem_euclid(cfg.n_subcarriers as i64) as usize].norm_sqr())
                .sum()
        };
        // Far band: 32..300 carriers above the tone (mirrored band below).
        let far_plain =
            band_power(&plain, 133, 400) + band_power(&plain, -232, 68);
        let far_tapered =
            band_power(&tapered, 133, 400) + band_power(&tapered, -232, 68);
        let gain_db = 10.0 * (far_plain / far_tapered).log10();
        assert!(gain_db >= 20.0, "far-band suppression only {gain_db} dB");
        // The main lobe survives: the two nearest bins keep most energy.
        let main = band_power(&tapered, 100, 101);
        assert!(main > 0.5, "main lobe power {main}");
    }

    #[test]
    fn short_input_is_a_size_error() {
        let cfg = reference_config();
        let sym = vec![Complex64::new(0.0, 0.0); cfg.symbol_len() - 1];
        assert!(matches!(
            window_fold(&sym, &cfg, WindowKind::Hanning, 1),
            Err(Error::Size { .. })
        ));
        assert!(matches!(
            window_fold(&sym, &cfg, WindowKind::None, 1),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn odd_prefix_cannot_fold() {
        let mut cfg = reference_config();
        cfg.cp_len = 63;
        let sym = vec![Complex64::new(0.0, 0.0); cfg.n_subcarriers + 63];
        assert!(window_fold(&sym, &cfg, WindowKind::Hanning, 1).is_err());
        // The plain window does not care about prefix parity.
        assert!(window_fold(&sym, &cfg, WindowKind::None, 1).is_ok());
    }

    #[test]
    fn bad_oversample_factor_is_rejected() {
        let cfg = reference_config();
        let sym = vec![Complex64::new(0.0, 0.0); 3 * cfg.symbol_len()];
        assert!(window_fold(&sym, &cfg, WindowKind::Hanning, 0).is_err());
        assert!(window_fold(&sym, &cfg, WindowKind::Hanning, 3).is_err());
    }
}
