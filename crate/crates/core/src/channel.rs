//! Impairments between the transmitters and the monitoring receiver.
//!
//! A scene combines the secondary frame and the primary interferer at each
//! receive antenna through independent multipath channels, then applies the
//! receiver-referred impairments in a fixed order:
//!
//! ```text
//! fading -> carrier frequency offset -> sampling frequency offset
//!        -> additive noise -> narrowband interference
//! ```
//!
//! Every stage is individually bypassable (zero offset, unit tap, no noise
//! spec), and bypassing all of them passes the input through bit-exactly.
//! CFO and SFO model the receiver's own oscillator, so they act on the
//! combined signal rather than per transmitter.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iq::IqBuffer;
use crate::numerics::{complex_gaussian_into, derive_seed, fractional_resample, rng_from_seed};
use crate::phy_tx::FrameConfig;

/// Seed-derivation tags for the stochastic channel stages. Disjoint from the
/// transmitter tags so a shared base seed never aliases streams.
const TAG_CHANNEL: u64 = 5;
const TAG_NOISE: u64 = 6;
const TAG_NBI: u64 = 7;

/// Multipath model selector for [`draw_channel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    /// No multipath: a single unit tap.
    Awgn,
    /// Exponentially decaying power delay profile spanning the cyclic
    /// prefix: tap `l` is a zero-mean complex Gaussian with amplitude
    /// scaled by `e^{-l}`.
    ExpPdp,
}

/// One realization of a frequency-selective channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    /// FIR tap gains `h(l)`. Never longer than the cyclic prefix, so each
    /// sub-carrier sees flat fading after the receiver DFT.
    pub taps: Vec<Complex64>,
    /// Expected per-carrier power gain `sum_l E[|h(l)|^2]`, from the model
    /// that produced the taps (not the realized sum, which fluctuates).
    pub sigma_h_sq: f64,
}

impl ChannelProfile {
    /// Builds a profile after validating the tap vector and power gain.
    pub fn new(taps: Vec<Complex64>, sigma_h_sq: f64) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::config("channel profile needs at least one tap"));
        }
        if taps.iter().any(|t| !(t.re.is_finite() && t.im.is_finite())) {
            return Err(Error::NonFinite("channel tap".to_string()));
        }
        if !(sigma_h_sq.is_finite() && sigma_h_sq > 0.0) {
            return Err(Error::domain(format!(
                "sigma_h_sq must be finite and positive, got {sigma_h_sq}"
            )));
        }
        Ok(ChannelProfile { taps, sigma_h_sq })
    }

    /// The transparent channel: one unit tap, unit power gain.
    pub fn unit() -> Self {
        ChannelProfile {
            taps: vec![Complex64::new(1.0, 0.0)],
            sigma_h_sq: 1.0,
        }
    }

    /// True for a profile [`apply_channel`] passes through bit-exactly.
    pub fn is_identity(&self) -> bool {
        self.taps.len() == 1 && self.taps[0] == Complex64::new(1.0, 0.0)
    }
}

/// Narrowband interferer: a cluster of complex tones on adjacent sub-carrier
/// frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbiSpec {
    /// Sub-carrier index of the cluster center in signed carrier units
    /// (0 = DC). May be fractional: an interferer half-way between two
    /// carriers is the worst case for spectral leakage.
    pub center_bin: f64,
    /// Number of adjacent tones, one carrier spacing apart, centered on
    /// `center_bin`. At least 1.
    pub width_bins: usize,
    /// Total mean power of the cluster, split evenly across the tones.
    pub power: f64,
}

impl NbiSpec {
    fn validate(&self) -> Result<()> {
        if self.width_bins == 0 {
            return Err(Error::config("NBI width_bins must be at least 1"));
        }
        if !self.center_bin.is_finite() {
            return Err(Error::domain(format!(
                "NBI center_bin must be finite, got {}",
                self.center_bin
            )));
        }
        if !(self.power.is_finite() && self.power >= 0.0) {
            return Err(Error::domain(format!(
                "NBI power must be finite and nonnegative, got {}",
                self.power
            )));
        }
        Ok(())
    }
}

/// Everything the channel does to the combined signal, plus the scene-level
/// power bookkeeping the harness needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpairmentSpec {
    /// Secondary-to-noise ratio in dB, defined per used carrier at the
    /// receiver (see [`mix_scene`]). `None` disables noise entirely.
    pub snr_db: Option<f64>,
    /// Carrier frequency offset in Hz, receiver-referred.
    pub cfo_hz: f64,
    /// Sampling clock offset in parts per million. |value| <= 1000.
    pub sfo_ppm: f64,
    /// Largest CFO magnitude the receiver is designed for; bounds both
    /// `cfo_hz` here and the integer-offset search at the receiver.
    pub cfo_max_hz: f64,
    /// Secondary-to-primary power ratio in dB; the harness scales the
    /// primary waveform by `10^(-spr_db/10)` so that the per-carrier
    /// primary-to-noise ratio comes out as `snr_db - spr_db`.
    pub spr_db: f64,
    /// Number of receive antennas.
    pub n_rx: usize,
    /// Optional narrowband interferer added after the noise.
    pub nbi: Option<NbiSpec>,
}

impl Default for ImpairmentSpec {
    /// A transparent single-antenna scene: no noise, no offsets, no NBI.
    fn default() -> Self {
        ImpairmentSpec {
            snr_db: None,
            cfo_hz: 0.0,
            sfo_ppm: 0.0,
            cfo_max_hz: 400e3,
            spr_db: 0.0,
            n_rx: 1,
            nbi: None,
        }
    }
}

impl ImpairmentSpec {
    /// Checks the whole specification for internal consistency.
    pub fn validate(&self) -> Result<()> {
        if self.n_rx == 0 {
            return Err(Error::config("n_rx must be at least 1"));
        }
        if !(self.cfo_max_hz.is_finite() && self.cfo_max_hz >= 0.0) {
            return Err(Error::domain(format!(
                "cfo_max_hz must be finite and nonnegative, got {}",
                self.cfo_max_hz
            )));
        }
        if !self.cfo_hz.is_finite() || self.cfo_hz.abs() > self.cfo_max_hz {
            return Err(Error::domain(format!(
                "cfo_hz = {} exceeds the design maximum {} Hz",
                self.cfo_hz, self.cfo_max_hz
            )));
        }
        if !self.sfo_ppm.is_finite() || self.sfo_ppm.abs() > 1000.0 {
            return Err(Error::domain(format!(
                "sfo_ppm must lie in [-1000, 1000], got {}",
                self.sfo_ppm
            )));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::domain(format!("snr_db must be finite, got {snr}")));
            }
        }
        if !self.spr_db.is_finite() {
            return Err(Error::domain(format!(
                "spr_db must be finite, got {}",
                self.spr_db
            )));
        }
        if let Some(nbi) = &self.nbi {
            nbi.validate()?;
        }
        Ok(())
    }
}

/// Draws one channel realization.
///
/// `Awgn` returns the transparent unit tap. `ExpPdp` draws one tap per
/// cyclic-prefix sample, tap `l` a circularly symmetric unit-variance
/// complex Gaussian scaled by `e^{-l}`, and records the model's expected
/// per-carrier gain `sum_l e^{-2l}` (a truncated geometric series, about
/// 1.1565 for 64 taps).
pub fn draw_channel(cfg: &FrameConfig, kind: ChannelKind, seed: u64) -> Result<ChannelProfile> {
    match kind {
        ChannelKind::Awgn => Ok(ChannelProfile::unit()),
        ChannelKind::ExpPdp => {
            cfg.validate()?;
            let mut rng = rng_from_seed(derive_seed(seed, &[TAG_CHANNEL]));
            let mut taps = vec![Complex64::new(0.0, 0.0); cfg.cp_len];
            complex_gaussian_into(&mut rng, 1.0, &mut taps);
            let mut sigma = 0.0;
            for (l, tap) in taps.iter_mut().enumerate() {
                let amp = (-(l as f64)).exp();
                *tap *= amp;
                sigma += amp * amp;
            }
            ChannelProfile::new(taps, sigma)
        }
    }
}

/// Rotates sample `n` by `exp(j 2 pi (cfo_hz / sample_rate) n)`. Zero offset
/// returns the input bit-exactly; magnitudes are always preserved.
pub fn apply_cfo(buf: &IqBuffer, cfo_hz: f64) -> Result<IqBuffer> {
    if !cfo_hz.is_finite() {
        return Err(Error::domain(format!("cfo_hz must be finite, got {cfo_hz}")));
    }
    if cfo_hz == 0.0 {
        return Ok(buf.clone());
    }
    let step = 2.0 * std::f64::consts::PI * cfo_hz / buf.sample_rate;
    let samples = buf
        .samples
        .iter()
        .enumerate()
        .map(|(n, &z)| z * Complex64::from_polar(1.0, step * n as f64))
        .collect();
    IqBuffer::new(samples, buf.sample_rate)
}

/// Resamples the buffer at rate factor `1 + sfo_ppm * 1e-6`, modelling a
/// receiver ADC that runs slightly fast or slow. Zero offset returns the
/// input bit-exactly; the output may be a few samples shorter because the
/// resampler only emits points interior to the input.
pub fn apply_sfo(buf: &IqBuffer, sfo_ppm: f64) -> Result<IqBuffer> {
    if !sfo_ppm.is_finite() || sfo_ppm.abs() > 1000.0 {
        return Err(Error::domain(format!(
            "sfo_ppm must lie in [-1000, 1000], got {sfo_ppm}"
        )));
    }
    let samples = fractional_resample(&buf.samples, 1.0 + sfo_ppm * 1e-6)?;
    IqBuffer::new(samples, buf.sample_rate)
}

/// Linear convolution with the channel taps, truncated to the input length.
/// An identity profile passes through bit-exactly.
pub fn apply_channel(buf: &IqBuffer, ch: &ChannelProfile) -> Result<IqBuffer> {
    if ch.taps.is_empty() {
        return Err(Error::config("channel profile needs at least one tap"));
    }
    if ch.is_identity() {
        return Ok(buf.clone());
    }
    let x = &buf.samples;
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    for (l, &h) in ch.taps.iter().enumerate() {
        if h == Complex64::new(0.0, 0.0) {
            continue;
        }
        for n in l..x.len() {
            y[n] += h * x[n - l];
        }
    }
    IqBuffer::new(y, buf.sample_rate)
}

/// Combines the secondary and primary waveforms at every receive antenna and
/// applies the impairment chain.
///
/// Per antenna `r` with channel pair `(h_ss, h_ps)`:
///
/// 1. fading: `y = h_ss * su + h_ps * pu` (linear convolutions),
/// 2. receiver CFO on the combined signal,
/// 3. receiver SFO on the combined signal,
/// 4. complex white Gaussian noise, independent across antennas, with
///    per-sample variance `ov * h_ss.sigma_h_sq / 10^(snr_db/10)` where
///    `ov = sample_rate / cfg.sample_rate_hz` — the SNR is defined per used
///    carrier at the receiver DFT, where every active carrier has unit
///    constellation energy and expected channel gain `sigma_h_sq`; white
///    noise occupies the whole sampled band, so its per-sample variance
///    grows with the rate while the per-carrier SNR stays at `snr_db` for
///    any oversampling factor (and the primary-to-noise ratio is
///    `snr_db - spr_db`),
/// 5. optional narrowband tones at sub-carrier spacing `cfg.delta_f_hz()`,
///    with a random phase per tone per antenna.
///
/// `cfg` supplies the sub-carrier spacing for NBI placement; `seed` drives
/// the noise and NBI draws. Buffers must be equally long and share a sample
/// rate. With every stage bypassed the output equals `su + pu` bit-exactly.
pub fn mix_scene(
    su: &IqBuffer,
    pu: &IqBuffer,
    spec: &ImpairmentSpec,
    channels: &[(ChannelProfile, ChannelProfile)],
    cfg: &FrameConfig,
    seed: u64,
) -> Result<Vec<IqBuffer>> {
    spec.validate()?;
    if su.len() != pu.len() {
        return Err(Error::Size {
            what: "primary buffer length",
            expected: su.len(),
            got: pu.len(),
        });
    }
    if su.sample_rate != pu.sample_rate {
        return Err(Error::config(format!(
            "sample-rate mismatch: secondary {} Hz, primary {} Hz",
            su.sample_rate, pu.sample_rate
        )));
    }
    if channels.len() != spec.n_rx {
        return Err(Error::Size {
            what: "channel pairs",
            expected: spec.n_rx,
            got: channels.len(),
        });
    }

    let pu_silent = pu.samples.iter().all(|z| *z == Complex64::new(0.0, 0.0));
    let mut out = Vec::with_capacity(spec.n_rx);
    for (r, (h_ss, h_ps)) in channels.iter().enumerate() {
        // Fading, per transmitter; skip the primary leg when it is silent.
        let mut y = apply_channel(su, h_ss)?;
        if !pu_silent {
            let pu_faded = apply_channel(pu, h_ps)?;
            for (a, b) in y.samples.iter_mut().zip(&pu_faded.samples) {
                *a += b;
            }
        }

        y = apply_cfo(&y, spec.cfo_hz)?;
        y = apply_sfo(&y, spec.sfo_ppm)?;

        if let Some(snr_db) = spec.snr_db {
            let ov = y.sample_rate / cfg.sample_rate_hz;
            let variance = ov * h_ss.sigma_h_sq / 10f64.powf(snr_db / 10.0);
            let mut rng = rng_from_seed(derive_seed(seed, &[TAG_NOISE, r as u64]));
            let mut noise = vec![Complex64::new(0.0, 0.0); y.len()];
            complex_gaussian_into(&mut rng, variance, &mut noise);
            for (a, b) in y.samples.iter_mut().zip(&noise) {
                *a += b;
            }
        }

        if let Some(nbi) = &spec.nbi {
            if nbi.power > 0.0 {
                add_nbi(&mut y, nbi, cfg.delta_f_hz(), seed, r as u64)?;
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Adds the NBI tone cluster in place: `width_bins` tones centered on
/// `center_bin`, each carrying `power / width_bins`.
fn add_nbi(buf: &mut IqBuffer, nbi: &NbiSpec, delta_f_hz: f64, seed: u64, antenna: u64) -> Result<()> {
    nbi.validate()?;
    let mut rng = rng_from_seed(derive_seed(seed, &[TAG_NBI, antenna]));
    let amp = (nbi.power / nbi.width_bins as f64).sqrt();
    let first = nbi.center_bin - (nbi.width_bins as f64 - 1.0) / 2.0;
    for t in 0..nbi.width_bins {
        let freq = (first + t as f64) * delta_f_hz;
        let step = 2.0 * std::f64::consts::PI * freq / buf.sample_rate;
        let phase0 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        for (n, z) in buf.samples.iter_mut().enumerate() {
            *z += Complex64::from_polar(amp, phase0 + step * n as f64);
        }
    }
    Ok(())
}
