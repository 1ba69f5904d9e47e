use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::sim::{GaussianParams, PotentialKind};
use crate::sonify::StereoMode;

pub const MIN_SAMPLE_RATE: u32 = 22_050;
pub const MAX_SAMPLE_RATE: u32 = 192_000;
pub const MAX_VOICES_LIMIT: usize = 64;
pub const MAX_ENVELOPE_SECONDS: f64 = 60.0;
pub const MAX_SIM_SPEED: f64 = 100_000.0;
pub const MIN_DT: f64 = 1e-6;
pub const MAX_DT: f64 = 0.1;
pub const MAX_MASTER_GAIN: f64 = 2.0;

/// Engine-wide settings.
///
/// `dt` controls accuracy of the simulation and `sim_speed` (timesteps per
/// second of audio) controls how fast it runs; `sim_speed = 0` freezes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub sample_rate: u32,
    pub n: usize,
    pub dt: f64,
    pub sim_speed: f64,
    pub stereo_mode: StereoMode,
    pub max_voices: usize,
    pub dc_removal: bool,
    pub master_gain: f64,
    pub normalize_peak: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            sample_rate: 48_000,
            n: 128,
            dt: 1e-3,
            sim_speed: 2000.0,
            stereo_mode: StereoMode::Weighted,
            max_voices: 16,
            dc_removal: true,
            master_gain: 0.5,
            normalize_peak: false,
        }
    }
}

impl EngineConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(MIN_SAMPLE_RATE..=MAX_SAMPLE_RATE).contains(&self.sample_rate) {
            out.push(format!(
                "sample_rate must be in [{MIN_SAMPLE_RATE}, {MAX_SAMPLE_RATE}], got {}",
                self.sample_rate
            ));
        }
        if self.n < crate::sim::MIN_GRID_SIZE || !self.n.is_power_of_two() {
            out.push(format!(
                "n must be a power of two and at least 8, got {}",
                self.n
            ));
        }
        if !(self.dt.is_finite() && (MIN_DT..=MAX_DT).contains(&self.dt)) {
            out.push(format!(
                "dt must be in [{MIN_DT}, {MAX_DT}], got {}",
                self.dt
            ));
        }
        if !(self.sim_speed.is_finite() && (0.0..=MAX_SIM_SPEED).contains(&self.sim_speed)) {
            out.push(format!(
                "sim_speed must be in [0, {MAX_SIM_SPEED}], got {}",
                self.sim_speed
            ));
        }
        if !(1..=MAX_VOICES_LIMIT).contains(&self.max_voices) {
            out.push(format!(
                "max_voices must be in [1, {MAX_VOICES_LIMIT}], got {}",
                self.max_voices
            ));
        }
        if !(self.master_gain.is_finite() && (0.0..=MAX_MASTER_GAIN).contains(&self.master_gain)) {
            out.push(format!(
                "master_gain must be in [0, {MAX_MASTER_GAIN}], got {}",
                self.master_gain
            ));
        }
        out
    }
}

/// Linear ADSR envelope. Times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeParams {
    pub attack: f64,
    pub decay: f64,
    pub sustain: f64,
    pub release: f64,
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        Self {
            attack: 0.01,
            decay: 0.1,
            sustain: 0.8,
            release: 0.2,
        }
    }
}

impl EnvelopeParams {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, value) in [
            ("attack", self.attack),
            ("decay", self.decay),
            ("release", self.release),
        ] {
            if !(value.is_finite() && (0.0..=MAX_ENVELOPE_SECONDS).contains(&value)) {
                out.push(format!(
                    "{name} must be in [0, {MAX_ENVELOPE_SECONDS}] seconds, got {value}"
                ));
            }
        }
        if !(self.sustain.is_finite() && (0.0..=1.0).contains(&self.sustain)) {
            out.push(format!("sustain must be in [0, 1], got {}", self.sustain));
        }
        out
    }
}

/// Everything needed to create an engine. This is also the JSON document
/// accepted by the boundary API.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSettings {
    pub engine: EngineConfig,
    pub envelope: EnvelopeParams,
    pub initial: GaussianParams,
    pub potential: PotentialKind,
}

impl SynthSettings {
    pub fn validate(&self) -> Result<(), EngineError> {
        let mut violations = self.engine.violations();
        violations.extend(self.envelope.violations());
        if let Err(e) = self.initial.validate() {
            violations.push(format!("initial: {e}"));
        }
        if let Err(e) = self.potential.validate() {
            violations.push(format!("potential: {e}"));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(EngineError::Config(violations.join("; ")))
        }
    }
}
