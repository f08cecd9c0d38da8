//! Waveform-level trial functions: full transmit → impair → synchronize →
//! demodulate → monitor pipelines, one trial per call.
//!
//! These are the expensive counterparts to the statistic-level models in
//! [`super::model`]; the offset-estimation and ablation studies need the
//! real signal path because their whole point is what synchronization error
//! and spectral leakage do to the reserved tones.

use rand::Rng;

use crate::channel::{mix_scene, ChannelProfile, ImpairmentSpec};
use crate::error::{Error, Result};
use crate::iq::IqBuffer;
use crate::numerics::{derive_seed, rng_from_seed};
use crate::phy_tx::{
    build_frame, generate_primary_oversampled, random_payload, synthesize_oversampled,
    FrameConfig,
};
use crate::rx_sync::{estimate_sync, extract_reserved_tones, receive_frame, SyncMode, WindowKind};

/// One offset-estimation trial: impair the given clean frame, run the
/// preamble-based estimators, and return the signed errors
/// `(eps_error, delta_error)`.
///
/// The CFO truth is referred to the receiver's sampling clock: the channel
/// rotates at `cfo_hz` per transmitter second, and the receiver samples
/// `1 + delta` times faster, so the rotation it actually observes per
/// carrier spacing is `(cfo_hz / delta_f) * (1 + delta)`. That is the value
/// the estimators can (and should) converge to.
pub(crate) fn sync_mse_trial(
    tx: &IqBuffer,
    pu_silence: &IqBuffer,
    cfg: &FrameConfig,
    imp: &ImpairmentSpec,
    pilot_seed: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let rx = mix_scene(
        tx,
        pu_silence,
        imp,
        &[(ChannelProfile::unit(), ChannelProfile::unit())],
        cfg,
        seed,
    )?;
    let est = estimate_sync(&rx[0], cfg, imp.cfo_max_hz, pilot_seed)?;
    let delta = imp.sfo_ppm * 1e-6;
    let eps_eff = imp.cfo_hz / cfg.delta_f_hz() * (1.0 + delta);
    Ok((est.eps_total - eps_eff, est.delta_hat - delta))
}

/// One arm of the impairment study.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AblationVariant {
    pub name: &'static str,
    /// Apply the configured CFO/SFO (and estimate them at the receiver)
    /// rather than running a genie-synchronized chain.
    pub impaired: bool,
    /// Receiver window for demodulation.
    pub window: WindowKind,
}

/// The study's fixed arms: a genie-synchronized baseline, the impaired
/// chain with plain demodulation, and the impaired chain with the tapered
/// fold-back window.
pub(crate) const ABLATION_VARIANTS: [AblationVariant; 3] = [
    AblationVariant {
        name: "perfect_sync",
        impaired: false,
        window: WindowKind::None,
    },
    AblationVariant {
        name: "impaired_plain",
        impaired: true,
        window: WindowKind::None,
    },
    AblationVariant {
        name: "impaired_windowed",
        impaired: true,
        window: WindowKind::Hanning,
    },
];

/// Oversampling factor for the impairment study. The primary's onset is
/// jittered at this resolution, and residual-CFO leakage is rendered more
/// faithfully than at the nominal rate.
pub(crate) const ABLATION_OVERSAMPLE: usize = 4;

/// One impairment-study trial: synthesize a fresh frame, overlay a primary
/// that switches on inside data symbol `onset_data_symbol` (uniformly
/// jittered within the symbol), run the configured receiver chain, and
/// return whether the decision whose newer window holds the first `window_n`
/// primary-bearing reserved tones fired.
///
/// The primary is scaled by `10^(-spr_db / 10)`; CFO/SFO come from `base`
/// when the variant is impaired and are zero (with genie sync) otherwise.
pub(crate) fn ablation_trial(
    cfg: &FrameConfig,
    base: &ImpairmentSpec,
    variant: &AblationVariant,
    spr_db: f64,
    window_n: u32,
    p_fa: f64,
    onset_data_symbol: usize,
    pilot_seed: u64,
    seed: u64,
) -> Result<bool> {
    let n = window_n as usize;
    let onset_tone = onset_data_symbol * cfg.n_reserved;
    let stream_len = cfg.n_data_symbols * cfg.n_reserved;
    if onset_tone < 2 * n {
        return Err(Error::config(format!(
            "window {n} needs {} primary-free reserved tones to calibrate, \
             but the primary arrives at tone {onset_tone}",
            2 * n
        )));
    }
    if stream_len < onset_tone + n {
        return Err(Error::config(format!(
            "window {n} needs {} reserved tones but the frame only yields {stream_len}",
            onset_tone + n
        )));
    }

    let payload = random_payload(cfg, derive_seed(seed, &[1]))?;
    let grid = build_frame(cfg, &payload, pilot_seed)?;
    let su = synthesize_oversampled(&grid, cfg, ABLATION_OVERSAMPLE)?;

    let span = cfg.symbol_len() * ABLATION_OVERSAMPLE;
    let jitter = rng_from_seed(derive_seed(seed, &[2])).gen_range(0..span);
    let onset_sample = (cfg.n_preambles + onset_data_symbol) * span + jitter;
    let pu = generate_primary_oversampled(
        cfg,
        ABLATION_OVERSAMPLE,
        10f64.powf(-spr_db / 10.0),
        onset_sample,
        derive_seed(seed, &[3]),
    )?;

    let imp = ImpairmentSpec {
        cfo_hz: if variant.impaired { base.cfo_hz } else { 0.0 },
        sfo_ppm: if variant.impaired { base.sfo_ppm } else { 0.0 },
        spr_db,
        n_rx: 1,
        ..base.clone()
    };
    let rx = mix_scene(
        &su,
        &pu,
        &imp,
        &[(ChannelProfile::unit(), ChannelProfile::unit())],
        cfg,
        derive_seed(seed, &[4]),
    )?;

    let mode = if variant.impaired {
        SyncMode::Estimate {
            cfo_max_hz: imp.cfo_max_hz,
        }
    } else {
        SyncMode::Perfect {
            eps_total: 0.0,
            delta: 0.0,
        }
    };
    let (grids, _) = receive_frame(&rx, cfg, variant.window, mode, pilot_seed)?;
    let stream = extract_reserved_tones(&grids, cfg)?;
    let (decisions, _) = stream.monitor(window_n, p_fa)?;

    // Decision i covers reserved tones [i + N, i + 2N) with its newer
    // window, so i = onset_tone - N is the first evaluation whose newer
    // window is entirely primary-bearing while the older one is still clean.
    let d = decisions[onset_tone - n];
    Ok(d.calibrated && d.pu_detected)
}
