//! Time-domain synthesis: IDFT per symbol, cyclic prefix, optional
//! oversampling, and the primary-user interferer waveform.

use super::{CarrierRole, FrameConfig, FrequencyGrid, GridSymbol};
use crate::error::{Error, Result};
use crate::iq::IqBuffer;
use crate::numerics::{derive_seed, idft, rng_from_seed};
use num_complex::Complex64;
use rand::Rng;

const TAG_PRIMARY: u64 = 4;

/// Synthesizes the baseband waveform at the nominal rate: per symbol, an
/// `N_s`-point unitary IDFT of the grid followed by a cyclic prefix copied
/// from the body tail.
pub fn synthesize(grid: &FrequencyGrid, cfg: &FrameConfig) -> Result<IqBuffer> {
    synthesize_oversampled(grid, cfg, 1)
}

/// Synthesizes at `oversample` times the nominal rate (a power of two).
///
/// The spectrum is embedded in an `oversample * N_s`-point IDFT at the same
/// carrier frequencies, scaled so that the waveform agrees with the
/// nominal-rate synthesis on every `oversample`-th sample (and therefore
/// has the same mean power). The cyclic prefix scales to
/// `oversample * N_g` samples. Oversampled synthesis feeds the leakage
/// experiments, where a longer receiver DFT resolves the spectral skirts
/// that an on-grid DFT hides.
pub fn synthesize_oversampled(
    grid: &FrequencyGrid,
    cfg: &FrameConfig,
    oversample: usize,
) -> Result<IqBuffer> {
    cfg.validate()?;
    check_oversample(oversample)?;
    if grid.n_subcarriers != cfg.n_subcarriers {
        return Err(Error::Size {
            what: "grid width",
            expected: cfg.n_subcarriers,
            got: grid.n_subcarriers,
        });
    }
    let n_s = cfg.n_subcarriers;
    let fft_len = oversample * n_s;
    let cp = oversample * cfg.cp_len;
    // Unitary IDFT of the padded spectrum scales by 1/sqrt(fft_len); the
    // symbol's defining scale is 1/sqrt(N_s), so compensate by sqrt(ov).
    let gain = (oversample as f64).sqrt();

    let mut samples = Vec::with_capacity(grid.n_symbols() * (fft_len + cp));
    let mut spectrum = vec![Complex64::new(0.0, 0.0); fft_len];
    for sym in &grid.symbols {
        if sym.values.len() != n_s {
            return Err(Error::Size {
                what: "grid symbol width",
                expected: n_s,
                got: sym.values.len(),
            });
        }
        spectrum.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (s, &v) in sym.values.iter().enumerate() {
            let k = s as i64 - (n_s / 2) as i64; // shifted order -> signed carrier
            spectrum[k.rem_euclid(fft_len as i64) as usize] = v;
        }
        let body: Vec<Complex64> = idft(&spectrum)?.into_iter().map(|v| v * gain).collect();
        samples.extend_from_slice(&body[fft_len - cp..]);
        samples.extend_from_slice(&body);
    }
    IqBuffer::new(samples, cfg.sample_rate_hz * oversample as f64)
}

/// Primary-user waveform at the nominal rate; see
/// [`generate_primary_oversampled`].
pub fn generate_primary(
    cfg: &FrameConfig,
    power_scale: f64,
    onset_sample: usize,
    seed: u64,
) -> Result<IqBuffer> {
    generate_primary_oversampled(cfg, 1, power_scale, onset_sample, seed)
}

/// An independent OFDM transmission with the secondary's numerology that
/// switches on at `onset_sample` (in output samples, so sub-symbol onsets
/// are expressible) and runs to the end of the frame duration.
///
/// Every used carrier bears data — the primary neither schedules reserved
/// tones nor respects the secondary's disabled set — and its symbol clock
/// starts at the onset, so an onset inside a receiver DFT window leaves a
/// truncated first symbol there. Amplitude is scaled so the average
/// per-carrier symbol energy is `power_scale` times the constellation
/// energy; `power_scale = 0` yields silence.
pub fn generate_primary_oversampled(
    cfg: &FrameConfig,
    oversample: usize,
    power_scale: f64,
    onset_sample: usize,
    seed: u64,
) -> Result<IqBuffer> {
    cfg.validate()?;
    check_oversample(oversample)?;
    if !(power_scale.is_finite() && power_scale >= 0.0) {
        return Err(Error::domain(format!(
            "power_scale must be nonnegative, got {power_scale}"
        )));
    }
    let total = cfg.frame_len() * oversample;
    if onset_sample >= total {
        return Err(Error::config(format!(
            "primary onset {onset_sample} is outside the {total}-sample frame duration"
        )));
    }
    let rate = cfg.sample_rate_hz * oversample as f64;
    if power_scale == 0.0 {
        return IqBuffer::new(vec![Complex64::new(0.0, 0.0); total], rate);
    }

    // Build enough full-band data symbols to cover the post-onset span.
    let n_s = cfg.n_subcarriers;
    let sym_len = (n_s + cfg.cp_len) * oversample;
    let n_symbols = (total - onset_sample).div_ceil(sym_len);
    let mut rng = rng_from_seed(derive_seed(seed, &[TAG_PRIMARY]));
    let arity = cfg.mapper.arity();
    let mut symbols = Vec::with_capacity(n_symbols);
    for _ in 0..n_symbols {
        let mut values = vec![Complex64::new(0.0, 0.0); n_s];
        for u in 0..cfg.n_used() {
            values[cfg.used_to_shifted(u)] = cfg.mapper.point(rng.gen_range(0..arity))?;
        }
        symbols.push(GridSymbol {
            values,
            roles: vec![CarrierRole::Data; n_s],
        });
    }
    let grid = FrequencyGrid {
        n_subcarriers: n_s,
        symbols,
    };
    let burst = synthesize_oversampled(&grid, cfg, oversample)?;

    let amp = power_scale.sqrt();
    let mut samples = vec![Complex64::new(0.0, 0.0); total];
    for (out, &s) in samples[onset_sample..].iter_mut().zip(burst.samples.iter()) {
        *out = s * amp;
    }
    IqBuffer::new(samples, rate)
}

fn check_oversample(oversample: usize) -> Result<()> {
    if oversample == 0 || !oversample.is_power_of_two() {
        return Err(Error::config(format!(
            "oversample factor must be a power of two, got {oversample}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dft;
    use crate::phy_tx::tests::reference_config;
    use crate::phy_tx::{build_frame, random_payload};

    fn small_config() -> FrameConfig {
        let mut cfg = reference_config();
        cfg.n_data_symbols = 6;
        cfg
    }

    #[test]
    fn dc_carrier_synthesizes_to_a_constant() {
        let cfg = small_config();
        let n_s = cfg.n_subcarriers;
        let mut values = vec![Complex64::new(0.0, 0.0); n_s];
        values[n_s / 2] = Complex64::new(1.0, 0.0); // signed carrier k = 0
        let grid = FrequencyGrid {
            n_subcarriers: n_s,
            symbols: vec![GridSymbol {
                values,
                roles: vec![CarrierRole::Data; n_s],
            }],
        };
        let buf = synthesize(&grid, &cfg).unwrap();
        assert_eq!(buf.len(), cfg.symbol_len());
        let expect = 1.0 / (n_s as f64).sqrt();
        for v in &buf.samples {
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn cyclic_prefix_copies_the_body_tail() {
        let cfg = small_config();
        let grid = build_frame(&cfg, &random_payload(&cfg, 8).unwrap(), 8).unwrap();
        let buf = synthesize(&grid, &cfg).unwrap();
        let (n_s, n_g, d) = (cfg.n_subcarriers, cfg.cp_len, cfg.symbol_len());
        for m in 0..grid.n_symbols() {
            let sym = &buf.samples[m * d..(m + 1) * d];
            assert_eq!(&sym[..n_g], &sym[n_s..], "CP mismatch at symbol {m}");
        }
    }

    #[test]
    fn receiver_dft_recovers_the_grid() {
        // Strip CP, unitary DFT, reorder to spectral order: the transmitted
        // grid must come back exactly (no channel in between).
        let cfg = small_config();
        let grid = build_frame(&cfg, &random_payload(&cfg, 11).unwrap(), 11).unwrap();
        let buf = synthesize(&grid, &cfg).unwrap();
        let (n_s, n_g, d) = (cfg.n_subcarriers, cfg.cp_len, cfg.symbol_len());
        let mut worst = 0.0_f64;
        for (m, sym) in grid.symbols.iter().enumerate() {
            let body = &buf.samples[m * d + n_g..(m + 1) * d];
            let bins = dft(body).unwrap();
            for (s, &sent) in sym.values.iter().enumerate() {
                let k = s as i64 - (n_s / 2) as i64;
                let got = bins[k.rem_euclid(n_s as i64) as usize];
                worst = worst.max((got - sent).norm());
            }
        }
        assert!(worst < 1e-9, "grid roundtrip error {worst}");
    }

    #[test]
    fn data_symbol_power_matches_active_carrier_fraction() {
        let cfg = small_config(); // 16-PSK: constant modulus
        let grid = build_frame(&cfg, &random_payload(&cfg, 13).unwrap(), 13).unwrap();
        let buf = synthesize(&grid, &cfg).unwrap();
        let d = cfg.symbol_len();
        let expected = cfg.n_active_per_data_symbol() as f64 / cfg.n_subcarriers as f64;
        for m in cfg.n_preambles..grid.n_symbols() {
            let body = &buf.samples[m * d + cfg.cp_len..(m + 1) * d];
            let p: f64 =
                body.iter().map(|v| v.norm_sqr()).sum::<f64>() / cfg.n_subcarriers as f64;
            assert!(
                (p - expected).abs() < 0.02 * expected,
                "symbol {m}: power {p} vs expected {expected}"
            );
        }
    }

    #[test]
    fn oversampled_waveform_agrees_on_the_nominal_instants() {
        let mut cfg = small_config();
        cfg.n_data_symbols = 2;
        let grid = build_frame(&cfg, &random_payload(&cfg, 17).unwrap(), 17).unwrap();
        let base = synthesize(&grid, &cfg).unwrap();
        let ov = 4;
        let up = synthesize_oversampled(&grid, &cfg, ov).unwrap();
        assert_eq!(up.len(), ov * base.len());
        assert_eq!(up.sample_rate, ov as f64 * base.sample_rate);
        // Compare symbol bodies sample by sample (CP regions differ in
        // length, so align per symbol).
        let (d1, d4) = (cfg.symbol_len(), ov * cfg.symbol_len());
        let mut worst = 0.0_f64;
        for m in 0..grid.n_symbols() {
            let b1 = &base.samples[m * d1 + cfg.cp_len..(m + 1) * d1];
            let b4 = &up.samples[m * d4 + ov * cfg.cp_len..(m + 1) * d4];
            for (i, v1) in b1.iter().enumerate() {
                worst = worst.max((v1 - b4[ov * i]).norm());
            }
        }
        assert!(worst < 1e-9, "oversampled disagreement {worst}");
    }

    #[test]
    fn invalid_oversample_factors_are_rejected() {
        let cfg = small_config();
        let grid = build_frame(&cfg, &[], 1).unwrap();
        assert!(synthesize_oversampled(&grid, &cfg, 0).is_err());
        assert!(synthesize_oversampled(&grid, &cfg, 3).is_err());
    }

    #[test]
    fn primary_is_silent_before_onset_and_live_after() {
        let mut cfg = small_config();
        cfg.n_data_symbols = 4;
        let onset = 3 * cfg.symbol_len() / 2; // mid-symbol
        let pu = generate_primary(&cfg, 0.25, onset, 99).unwrap();
        assert_eq!(pu.len(), cfg.frame_len());
        assert!(pu.samples[..onset].iter().all(|v| v.norm() == 0.0));
        let post: f64 = pu.samples[onset..].iter().map(|v| v.norm_sqr()).sum();
        assert!(post > 0.0);
    }

    #[test]
    fn primary_power_tracks_the_scale() {
        let mut cfg = small_config();
        cfg.n_data_symbols = 32;
        let scale = 0.1;
        let pu = generate_primary(&cfg, scale, 0, 5).unwrap();
        // Average over whole symbols: per-sample power is
        // scale * n_used / N_s (every used carrier active).
        let span = cfg.n_data_symbols * cfg.symbol_len();
        let p: f64 =
            pu.samples[..span].iter().map(|v| v.norm_sqr()).sum::<f64>() / span as f64;
        let expected = scale * cfg.n_used() as f64 / cfg.n_subcarriers as f64;
        // CP duplication does not change the per-sample average for
        // constant-modulus constellations; allow a small tolerance.
        assert!(
            (p - expected).abs() < 0.03 * expected,
            "power {p} vs expected {expected}"
        );
    }

    #[test]
    fn zero_scale_primary_is_all_zero() {
        let cfg = small_config();
        let pu = generate_primary(&cfg, 0.0, 100, 1).unwrap();
        assert!(pu.samples.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn primary_onset_must_be_inside_the_frame() {
        let cfg = small_config();
        assert!(generate_primary(&cfg, 1.0, cfg.frame_len(), 1).is_err());
        assert!(generate_primary(&cfg, -0.5, 0, 1).is_err());
    }

    #[test]
    fn symbol_boundary_onset_gives_full_first_symbol() {
        let mut cfg = small_config();
        cfg.n_data_symbols = 4;
        let onset = cfg.symbol_len(); // exactly one symbol in
        let pu = generate_primary(&cfg, 1.0, onset, 31).unwrap();
        // The first post-onset symbol must have the full per-sample power.
        let body = &pu.samples[onset + cfg.cp_len..onset + cfg.symbol_len()];
        let p: f64 = body.iter().map(|v| v.norm_sqr()).sum::<f64>() / body.len() as f64;
        let expected = cfg.n_used() as f64 / cfg.n_subcarriers as f64;
        assert!((p - expected).abs() < 0.05 * expected, "power {p}");
    }
}
