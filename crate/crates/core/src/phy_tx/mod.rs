//! Secondary-user OFDM transmitter: frame configuration, constellation
//! mapping, reserved-tone scheduling, frequency grids, waveform synthesis,
//! and the primary-user interferer waveform.
//!
//! A frame is `n_preambles` training symbols followed by `n_data_symbols`
//! payload symbols. Every data symbol leaves `n_reserved` scheduled
//! sub-carriers empty — the reserved tones the monitoring receiver watches —
//! and the schedule advances by `delta_r` positions per symbol so the tones
//! sweep the band instead of sitting on (possibly impaired) fixed carriers.
//!
//! Carrier indexing conventions used throughout:
//!
//! * **shifted index** `s` in `[0, N_s)`: spectral order, lowest frequency
//!   first, DC at `N_s/2`. Grids are stored this way.
//! * **used-band index** `u` in `[0, n_used)`: shifted index minus the low
//!   guard, i.e. position within the band that actually carries energy.
//!   Schedules, pilots, and `disabled_tones` use this.
//! * **signed carrier** `k = u - n_used/2`: the index that appears in
//!   synchronization math (phase slopes are linear in `k`).

mod frame;
mod schedule;
mod synth;

pub use frame::{build_frame, random_payload, symbol_roles};
pub use schedule::{pilot_positions, schedule_reserved_tones};
pub use synth::{generate_primary, generate_primary_oversampled, synthesize, synthesize_oversampled};

use crate::error::{Error, Result};
use crate::iq::fnv1a_hex;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::PI;

/// Constellation used for payload (and primary-user) data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mapper {
    Bpsk,
    Qpsk,
    /// 16-ary phase-shift keying (unit modulus).
    Psk16,
    /// 4-QAM: the axis-aligned unit-circle points {1, j, -1, -j}. Same
    /// statistics as QPSK (which uses the diagonal points); both are listed
    /// because experiment write-ups name either for the same setting.
    Qam4,
    Qam16,
}

impl Mapper {
    /// Number of constellation points.
    pub fn arity(&self) -> usize {
        match self {
            Mapper::Bpsk => 2,
            Mapper::Qpsk | Mapper::Qam4 => 4,
            Mapper::Psk16 | Mapper::Qam16 => 16,
        }
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.arity().trailing_zeros()
    }

    /// The `idx`-th constellation point. All constellations have unit mean
    /// energy; the PSK family has unit modulus point-wise.
    pub fn point(&self, idx: usize) -> Result<Complex64> {
        if idx >= self.arity() {
            return Err(Error::domain(format!(
                "constellation index {idx} out of range for a {}-point mapper",
                self.arity()
            )));
        }
        let s = 0.5_f64.sqrt();
        Ok(match self {
            Mapper::Bpsk => Complex64::new(if idx == 0 { 1.0 } else { -1.0 }, 0.0),
            Mapper::Qpsk => {
                let re = if idx & 1 == 0 { s } else { -s };
                let im = if idx & 2 == 0 { s } else { -s };
                Complex64::new(re, im)
            }
            Mapper::Qam4 => Complex64::from_polar(1.0, PI / 2.0 * idx as f64),
            Mapper::Psk16 => Complex64::from_polar(1.0, 2.0 * PI * idx as f64 / 16.0),
            Mapper::Qam16 => {
                // Per-axis levels {-3, -1, 1, 3} scaled to unit mean energy.
                let level = |b: usize| (2.0 * b as f64 - 3.0) / 10f64.sqrt();
                Complex64::new(level(idx & 3), level(idx >> 2))
            }
        })
    }
}

/// Role of one sub-carrier within one OFDM symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CarrierRole {
    /// Payload-bearing (zero-valued on preamble symbols, which carry no
    /// payload).
    Data,
    /// Known BPSK reference: training carriers on preamble symbols,
    /// scattered pilots on data symbols.
    Pilot,
    /// Scheduled null tone watched by the monitor.
    Reserved,
    /// Band-edge guard, always zero.
    Guard,
    /// Administratively nulled carrier (e.g. to sidestep known
    /// narrow-band interference), always zero.
    Disabled,
}

/// Static description of the OFDM frame: numerology, overheads, and
/// constellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    /// DFT size `N_s`; must be a power of two.
    pub n_subcarriers: usize,
    /// Total guard carriers, split evenly between the band edges.
    pub n_guard_total: usize,
    /// Scattered pilots per data symbol.
    pub n_pilots: usize,
    /// Reserved (null) tones per data symbol.
    pub n_reserved: usize,
    /// Cyclic-prefix length `N_g` in samples.
    pub cp_len: usize,
    /// Baseband sample rate in Hz.
    pub sample_rate_hz: f64,
    /// Reserved-tone advance per data symbol, in carriers.
    pub delta_r: usize,
    /// Leading identical training symbols.
    pub n_preambles: usize,
    pub n_data_symbols: usize,
    pub mapper: Mapper,
    /// Used-band indices forced to zero in every symbol.
    #[serde(default)]
    pub disabled_tones: BTreeSet<usize>,
}

impl FrameConfig {
    /// Carriers that may carry energy: everything outside the guards.
    pub fn n_used(&self) -> usize {
        self.n_subcarriers - self.n_guard_total
    }

    /// Guard carriers below the used band (same count sits above).
    pub fn guard_low(&self) -> usize {
        self.n_guard_total / 2
    }

    /// Sub-carrier spacing in Hz.
    pub fn delta_f_hz(&self) -> f64 {
        self.sample_rate_hz / self.n_subcarriers as f64
    }

    /// Samples per transmitted symbol (CP + body).
    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }

    pub fn symbol_duration_s(&self) -> f64 {
        self.symbol_len() as f64 / self.sample_rate_hz
    }

    pub fn n_symbols_total(&self) -> usize {
        self.n_preambles + self.n_data_symbols
    }

    /// Samples in the whole frame at the base rate.
    pub fn frame_len(&self) -> usize {
        self.n_symbols_total() * self.symbol_len()
    }

    /// Payload carriers per data symbol.
    pub fn data_capacity_per_symbol(&self) -> usize {
        self.n_used() - self.n_pilots - self.n_reserved - self.disabled_tones.len()
    }

    /// Payload carriers in the whole frame.
    pub fn frame_capacity(&self) -> usize {
        self.n_data_symbols * self.data_capacity_per_symbol()
    }

    /// Energy-bearing carriers per data symbol (data + pilots).
    pub fn n_active_per_data_symbol(&self) -> usize {
        self.n_used() - self.n_reserved - self.disabled_tones.len()
    }

    /// Converts a used-band index to the signed carrier index centered on DC.
    pub fn used_to_signed(&self, u: usize) -> i64 {
        u as i64 - (self.n_used() / 2) as i64
    }

    /// Converts a used-band index to the shifted (spectral-order) index.
    pub fn used_to_shifted(&self, u: usize) -> usize {
        u + self.guard_low()
    }

    /// Stable hex digest of the configuration, recorded in waveform
    /// sidecars so captures can be traced back to their exact setup.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        fnv1a_hex(json.as_bytes())
    }

    /// Checks the structural invariants; every constructor of derived
    /// artifacts (schedules, grids, waveforms) calls this first.
    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers == 0 || !self.n_subcarriers.is_power_of_two() {
            return Err(Error::config(format!(
                "n_subcarriers must be a power of two, got {}",
                self.n_subcarriers
            )));
        }
        if self.cp_len == 0 || self.cp_len >= self.n_subcarriers {
            return Err(Error::config(format!(
                "cp_len must satisfy 0 < N_g < N_s, got {}",
                self.cp_len
            )));
        }
        if self.n_guard_total % 2 != 0 || self.n_guard_total >= self.n_subcarriers {
            return Err(Error::config(format!(
                "n_guard_total must be even and below N_s, got {}",
                self.n_guard_total
            )));
        }
        if self.n_reserved == 0 {
            return Err(Error::config(
                "at least one reserved tone is required for monitoring",
            ));
        }
        let overhead = self.n_pilots + self.n_reserved + self.disabled_tones.len();
        if overhead >= self.n_used() {
            return Err(Error::config(format!(
                "pilots + reserved + disabled ({overhead}) must leave data room in the {} used carriers",
                self.n_used()
            )));
        }
        if self.delta_r == 0 {
            return Err(Error::config("delta_r must be at least 1"));
        }
        if self.n_data_symbols == 0 {
            return Err(Error::config("a frame needs at least one data symbol"));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::config(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if let Some(&bad) = self.disabled_tones.iter().find(|&&u| u >= self.n_used()) {
            return Err(Error::config(format!(
                "disabled tone {bad} lies outside the used band of {} carriers",
                self.n_used()
            )));
        }
        Ok(())
    }
}

/// Reserved-tone placement for one data symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToneSchedule {
    /// Symbol index within the frame (preambles included in the count).
    pub symbol_index: usize,
    /// Used-band indices of the reserved tones, ascending.
    pub reserved_indices: Vec<usize>,
}

impl ToneSchedule {
    /// The schedule in shifted (spectral-order) indices.
    pub fn shifted_indices(&self, cfg: &FrameConfig) -> Vec<usize> {
        self.reserved_indices
            .iter()
            .map(|&u| cfg.used_to_shifted(u))
            .collect()
    }
}

/// One symbol of the frequency grid: value and role per sub-carrier, in
/// shifted (spectral) order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSymbol {
    pub values: Vec<Complex64>,
    pub roles: Vec<CarrierRole>,
}

/// The frame in the frequency domain: one [`GridSymbol`] per OFDM symbol,
/// preambles first.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub n_subcarriers: usize,
    pub symbols: Vec<GridSymbol>,
}

impl FrequencyGrid {
    pub fn n_symbols(&self) -> usize {
        self.symbols.len()
    }

    /// Verifies the structural grid invariants: reserved/guard/disabled
    /// entries exactly zero, pilots unit-magnitude, and per-symbol role
    /// sets consistent with the configuration.
    pub fn check_invariants(&self, cfg: &FrameConfig) -> Result<()> {
        if self.n_subcarriers != cfg.n_subcarriers {
            return Err(Error::Size {
                what: "grid width",
                expected: cfg.n_subcarriers,
                got: self.n_subcarriers,
            });
        }
        for (m, sym) in self.symbols.iter().enumerate() {
            if sym.values.len() != self.n_subcarriers || sym.roles.len() != self.n_subcarriers {
                return Err(Error::Size {
                    what: "grid symbol width",
                    expected: self.n_subcarriers,
                    got: sym.values.len().min(sym.roles.len()),
                });
            }
            for (s, (&v, &role)) in sym.values.iter().zip(&sym.roles).enumerate() {
                match role {
                    CarrierRole::Reserved | CarrierRole::Guard | CarrierRole::Disabled => {
                        if v != Complex64::new(0.0, 0.0) {
                            return Err(Error::domain(format!(
                                "symbol {m}, carrier {s}: {role:?} entry must be exactly zero, got {v}"
                            )));
                        }
                    }
                    CarrierRole::Pilot => {
                        if (v.norm() - 1.0).abs() > 1e-12 || v.im != 0.0 {
                            return Err(Error::domain(format!(
                                "symbol {m}, carrier {s}: pilot must be unit-magnitude BPSK, got {v}"
                            )));
                        }
                    }
                    CarrierRole::Data => {}
                }
            }
        }
        Ok(())
    }
}
