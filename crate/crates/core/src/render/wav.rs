//! Minimal RIFF/WAVE writer: 16-byte `fmt ` chunk followed by `data`, so the
//! header is always 44 bytes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    #[default]
    Float32,
    Pcm16,
}

impl SampleFormat {
    fn format_code(self) -> u16 {
        match self {
            SampleFormat::Pcm16 => 1,
            SampleFormat::Float32 => 3,
        }
    }

    pub fn bytes_per_sample(self) -> usize {
        match self {
            SampleFormat::Pcm16 => 2,
            SampleFormat::Float32 => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavSpec {
    pub channels: u16,
    pub sample_rate: u32,
    pub format: SampleFormat,
}

pub const HEADER_LEN: usize = 44;

/// Clamps to `[-1, 1]`, scales by 32768 and rounds half away from zero; the
/// top of the range saturates at `i16::MAX`.
pub fn quantize_pcm16(sample: f32) -> i16 {
    let scaled = (f64::from(sample).clamp(-1.0, 1.0) * 32768.0).round();
    scaled.clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16
}

/// Encodes interleaved samples as a complete WAV file.
///
/// # Panics
/// If the payload does not fit the 32-bit RIFF size fields or the sample
/// count is not a multiple of the channel count.
pub fn write_wav(spec: &WavSpec, interleaved: &[f32]) -> Vec<u8> {
    let channels = usize::from(spec.channels);
    assert!(channels > 0 && interleaved.len().is_multiple_of(channels));
    let bytes_per_sample = spec.format.bytes_per_sample();
    let data_len = u32::try_from(interleaved.len() * bytes_per_sample)
        .ok()
        .filter(|len| *len <= u32::MAX - 36)
        .expect("WAV payload exceeds the RIFF size limit");
    let block_align = spec.channels * bytes_per_sample as u16;
    let byte_rate = spec.sample_rate * u32::from(block_align);

    let mut out = Vec::with_capacity(HEADER_LEN + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&spec.format.format_code().to_le_bytes());
    out.extend_from_slice(&spec.channels.to_le_bytes());
    out.extend_from_slice(&spec.sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&(8 * bytes_per_sample as u16).to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    match spec.format {
        SampleFormat::Float32 => {
            for s in interleaved {
                out.extend_from_slice(&s.to_le_bytes());
            }
        }
        SampleFormat::Pcm16 => {
            for s in interleaved {
                out.extend_from_slice(&quantize_pcm16(*s).to_le_bytes());
            }
        }
    }
    out
}
