//! Turning a probability density into looped audio material.
//!
//! The density `|Ψ|²` over `[0, 2π)` is read as one period of a waveform.
//! A phase accumulator walks the table at `n·f/f_s` entries per sample with
//! linear interpolation and wraps around the end. Stereo is produced either
//! by panning the whole table by the mass in each half, or by weighting the
//! table with a smootherstep ramp so each channel hears its own side.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SonifyError {
    #[error("table length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{0}")]
    Domain(String),
}

/// `6u⁵ - 15u⁴ + 10u³`, with `u` clamped to `[0, 1]`.
///
/// Evaluated about the midpoint as `½ + t·(15/8 - 5t² + 6t⁴)`, `t = u - ½`,
/// which keeps `f(u) + f(1 - u) = 1` to within one rounding.
#[inline]
pub fn smootherstep(u: f64) -> f64 {
    let t = u.clamp(0.0, 1.0) - 0.5;
    let t2 = t * t;
    0.5 + t * (1.875 + t2 * (-5.0 + 6.0 * t2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StereoMode {
    Mono,
    #[serde(alias = "pan")]
    PanVolume,
    #[default]
    Weighted,
}

impl StereoMode {
    pub fn from_index(index: u32) -> Option<Self> {
        match index {
            0 => Some(StereoMode::Mono),
            1 => Some(StereoMode::PanVolume),
            2 => Some(StereoMode::Weighted),
            _ => None,
        }
    }

    pub fn index(self) -> u32 {
        match self {
            StereoMode::Mono => 0,
            StereoMode::PanVolume => 1,
            StereoMode::Weighted => 2,
        }
    }
}

/// Per-sample channel weights `right_j = f(j/n)`, `left_j = 1 - right_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoWeights {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl StereoWeights {
    pub fn new(n: usize) -> Self {
        let right: Vec<f64> = (0..n).map(|j| smootherstep(j as f64 / n as f64)).collect();
        let left = right.iter().map(|r| 1.0 - r).collect();
        Self { left, right }
    }

    pub fn len(&self) -> usize {
        self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.right.is_empty()
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }
}

/// One period of a tone.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavetable {
    values: Vec<f64>,
}

impl Wavetable {
    pub fn new(values: Vec<f64>) -> Result<Self, SonifyError> {
        if values.is_empty() {
            return Err(SonifyError::Domain("wavetable must not be empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SonifyError::Domain(
                "wavetable values must be finite".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Table entries advanced per output sample for a note at `note_freq`.
pub fn phase_increment(note_freq: f64, sample_rate: f64, n: usize) -> Result<f64, SonifyError> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(SonifyError::Domain(format!(
            "sample rate must be positive, got {sample_rate}"
        )));
    }
    if !(note_freq > 0.0 && note_freq < sample_rate / 2.0) {
        return Err(SonifyError::Domain(format!(
            "note frequency {note_freq} Hz must lie in (0, {}) Hz",
            sample_rate / 2.0
        )));
    }
    Ok(n as f64 * note_freq / sample_rate)
}

/// Linear interpolation between `values[i]` and `values[(i+1) mod n]`.
#[inline]
pub fn sample_table(values: &[f64], phase: f64) -> f64 {
    let n = values.len();
    let base = phase.floor();
    let frac = phase - base;
    let i = (base as u64 % n as u64) as usize;
    let next = if i + 1 == n { 0 } else { i + 1 };
    values[i] * (1.0 - frac) + values[next] * frac
}

pub fn sample_wavetable(table: &Wavetable, phase: f64) -> f64 {
    sample_table(&table.values, phase)
}

/// Splits `d` into `(left, right)` with `left + right == d` exactly.
///
/// The right share is snapped onto the ulp grid of `d` so the complement is
/// exact; the snap moves it by at most one ulp of `d`.
#[inline]
fn split_exact(d: f64, right_weight: f64) -> (f64, f64) {
    let right = (d + d * right_weight) - d;
    (d - right, right)
}

pub fn weighted_stereo_into(
    density: &[f64],
    weights: &StereoWeights,
    left: &mut [f64],
    right: &mut [f64],
) -> Result<(), SonifyError> {
    let n = density.len();
    for len in [weights.len(), left.len(), right.len()] {
        if len != n {
            return Err(SonifyError::LengthMismatch(n, len));
        }
    }
    for j in 0..n {
        let (l, r) = split_exact(density[j], weights.right[j]);
        left[j] = l;
        right[j] = r;
    }
    Ok(())
}

pub fn apply_weighted_stereo(
    density: &[f64],
    weights: &StereoWeights,
) -> Result<(Wavetable, Wavetable), SonifyError> {
    let mut left = vec![0.0; density.len()];
    let mut right = vec![0.0; density.len()];
    weighted_stereo_into(density, weights, &mut left, &mut right)?;
    Ok((Wavetable { values: left }, Wavetable { values: right }))
}

/// Linear pan gains from the mean density in each half, normalized so the
/// gains sum to 2. An all-zero density pans to the center.
pub fn pan_gains(density: &[f64]) -> (f64, f64) {
    let half = density.len() / 2;
    if half == 0 {
        return (1.0, 1.0);
    }
    let a_left = density[..half].iter().sum::<f64>() / half as f64;
    let a_right = density[half..].iter().sum::<f64>() / (density.len() - half) as f64;
    let total = a_left + a_right;
    if total == 0.0 {
        return (1.0, 1.0);
    }
    (2.0 * a_left / total, 2.0 * a_right / total)
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn remove_dc_in_place(values: &mut [f64]) {
    let m = mean(values);
    for v in values.iter_mut() {
        *v -= m;
    }
}

pub fn remove_dc(table: &Wavetable) -> Wavetable {
    let mut values = table.values.clone();
    remove_dc_in_place(&mut values);
    Wavetable { values }
}

/// Output gain of the weighted mode. The weights split the density between
/// the channels, so a centered state would play at half the per-channel level
/// of mono; doubling restores parity and makes `(L + R)/2` equal the mono signal.
pub const WEIGHTED_CHANNEL_GAIN: f64 = 2.0;

/// How a density becomes a pair of channel tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    pub mode: StereoMode,
    pub dc_removal: bool,
    pub normalize_peak: bool,
}

/// Builds the left/right tables a voice plays from `density`. Writes into the
/// provided buffers and never allocates.
pub fn build_channel_tables(
    density: &[f64],
    weights: &StereoWeights,
    options: TableOptions,
    left: &mut [f64],
    right: &mut [f64],
) -> Result<(), SonifyError> {
    match options.mode {
        StereoMode::Mono | StereoMode::PanVolume => {
            let n = density.len();
            for len in [left.len(), right.len()] {
                if len != n {
                    return Err(SonifyError::LengthMismatch(n, len));
                }
            }
            left.copy_from_slice(density);
            if options.dc_removal {
                remove_dc_in_place(left);
            }
            let (g_left, g_right) = if options.mode == StereoMode::PanVolume {
                pan_gains(density)
            } else {
                (1.0, 1.0)
            };
            for (r, l) in right.iter_mut().zip(left.iter_mut()) {
                *r = *l * g_right;
                *l *= g_left;
            }
        }
        StereoMode::Weighted => {
            weighted_stereo_into(density, weights, left, right)?;
            if options.dc_removal {
                remove_dc_in_place(left);
                remove_dc_in_place(right);
            }
            for v in left.iter_mut().chain(right.iter_mut()) {
                *v *= WEIGHTED_CHANNEL_GAIN;
            }
        }
    }
    if options.normalize_peak {
        let offset = if options.dc_removal {
            mean(density)
        } else {
            0.0
        };
        let peak = density
            .iter()
            .fold(0.0f64, |acc, d| acc.max((d - offset).abs()));
        if peak > 0.0 {
            let scale = peak.recip();
            for v in left.iter_mut().chain(right.iter_mut()) {
                *v *= scale;
            }
        }
    }
    Ok(())
}
