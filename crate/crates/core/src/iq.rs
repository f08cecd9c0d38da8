//! Complex baseband buffers.
//!
//! [`IqBuffer`] is the unit of exchange between the transmitter, the channel,
//! and the receiver: a vector of complex samples annotated with the sample
//! rate they were produced at. Waveforms can be exported as interleaved
//! 32-bit float I/Q with a small JSON sidecar describing the recording.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One complex baseband sample. Public interfaces require both components
/// to be finite.
pub type ComplexSample = Complex64;

/// A complex baseband waveform plus the sample rate it is valid at.
#[derive(Debug, Clone, PartialEq)]
pub struct IqBuffer {
    /// Complex samples in time order.
    pub samples: Vec<ComplexSample>,
    /// Sample rate in Hz. Strictly positive.
    pub sample_rate: f64,
}

impl IqBuffer {
    /// Creates a buffer, validating the sample rate.
    pub fn new(samples: Vec<ComplexSample>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::domain(format!(
                "sample rate must be finite and positive, got {sample_rate}"
            )));
        }
        Ok(IqBuffer {
            samples,
            sample_rate,
        })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// True when the buffer holds no samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean per-sample power `E[|x|^2]`. Zero for an empty buffer.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Returns an error naming `what` if any sample has a non-finite part.
    pub fn check_finite(&self, what: &str) -> Result<()> {
        for (i, z) in self.samples.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(format!("{what}[{i}] = {z}")));
            }
        }
        Ok(())
    }
}

/// Sidecar metadata written next to an exported I/Q recording.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IqSidecar {
    /// Sample rate of the binary recording, Hz.
    pub sample_rate_hz: f64,
    /// Number of complex samples in the recording.
    pub n_samples: usize,
    /// Sample format; always interleaved little-endian `f32` pairs.
    pub format: String,
    /// FNV-1a hash (hex) of the generating configuration, if supplied.
    pub config_hash: Option<String>,
}

/// 64-bit FNV-1a over a byte string; used to fingerprint configurations in
/// export sidecars.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    format!("{h:016x}")
}

/// Writes `buf` as interleaved little-endian `f32` I/Q pairs to `path` and a
/// JSON sidecar to `path` + `.json`.
///
/// `config_hash` typically comes from [`fnv1a_hex`] over the serialized
/// frame configuration so a recording can be traced back to its settings.
pub fn write_iq_f32(buf: &IqBuffer, path: &Path, config_hash: Option<String>) -> Result<()> {
    buf.check_finite("export buffer")?;
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut raw = Vec::with_capacity(buf.len() * 8);
    for z in &buf.samples {
        raw.extend_from_slice(&(z.re as f32).to_le_bytes());
        raw.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    f.write_all(&raw).map_err(io_err)?;

    let sidecar = IqSidecar {
        sample_rate_hz: buf.sample_rate,
        n_samples: buf.len(),
        format: "interleaved f32 le".to_string(),
        config_hash,
    };
    let sidecar_path = {
        let mut s = path.as_os_str().to_owned();
        s.push(".json");
        std::path::PathBuf::from(s)
    };
    let text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::config(format!("sidecar serialization failed: {e}")))?;
    std::fs::write(&sidecar_path, text).map_err(|source| Error::Io {
        path: sidecar_path.display().to_string(),
        source,
    })?;
    Ok(())
}

/// Reads a recording written by [`write_iq_f32`] back into an [`IqBuffer`],
/// taking the sample rate from the sidecar.
pub fn read_iq_f32(path: &Path) -> Result<IqBuffer> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let raw = std::fs::read(path).map_err(io_err)?;
    if raw.len() % 8 != 0 {
        return Err(Error::Size {
            what: "iq f32 recording (bytes)",
            expected: raw.len() / 8 * 8,
            got: raw.len(),
        });
    }
    let sidecar_path = {
        let mut s = path.as_os_str().to_owned();
        s.push(".json");
        std::path::PathBuf::from(s)
    };
    let sidecar: IqSidecar = serde_json::from_str(
        &std::fs::read_to_string(&sidecar_path).map_err(|source| Error::Io {
            path: sidecar_path.display().to_string(),
            source,
        })?,
    )
    .map_err(|e| Error::config(format!("sidecar parse failed: {e}")))?;

    let samples = raw
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64;
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]) as f64;
            Complex64::new(re, im)
        })
        .collect();
    IqBuffer::new(samples, sidecar.sample_rate_hz)
}
