//! TOML schema for offline renders.
//!
//! ```toml
//! out_path = "out.wav"
//! format = "float32"        # or "pcm16"
//! duration = 2.5            # optional; defaults to last note end + release
//!
//! [engine]                  # any EngineConfig field
//! sim_speed = 2000
//!
//! [envelope]
//! release = 0.3
//!
//! [initial]
//! center = 3.64
//! sigma = 0.35
//! momentum = 0
//!
//! [potential]
//! kind = "barrier"
//! height = 20
//! left = 3.14
//! right = 3.44
//!
//! [[notes]]
//! start = 0.0
//! duration = 1.0
//! note = 69
//! velocity = 100            # optional
//!
//! [dump]                    # optional
//! path = "frames.csv"
//! every_steps = 100
//! ```

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::wav::SampleFormat;
use super::RenderError;
use crate::engine::{midi_to_freq, EngineConfig, EnvelopeParams, SynthSettings};
use crate::sim::{GaussianParams, Grid, Potential, PotentialKind};
use crate::sonify::phase_increment;

fn default_velocity() -> u8 {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoteEvent {
    /// Seconds from the start of the render.
    pub start: f64,
    /// Seconds the key is held; the release tail follows.
    pub duration: f64,
    pub note: u8,
    #[serde(default = "default_velocity")]
    pub velocity: u8,
}

impl NoteEvent {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpConfig {
    pub path: String,
    pub every_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub envelope: EnvelopeParams,
    #[serde(default)]
    pub initial: GaussianParams,
    #[serde(default)]
    pub potential: PotentialKind,
    #[serde(default)]
    pub notes: Vec<NoteEvent>,
    /// Total seconds rendered. Filled in by [`parse_config`] when absent.
    #[serde(default)]
    pub duration: Option<f64>,
    #[serde(default = "default_out_path")]
    pub out_path: String,
    #[serde(default)]
    pub format: SampleFormat,
    #[serde(default)]
    pub dump: Option<DumpConfig>,
}

fn default_out_path() -> String {
    "out.wav".to_string()
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            envelope: EnvelopeParams::default(),
            initial: GaussianParams::default(),
            potential: PotentialKind::default(),
            notes: Vec::new(),
            duration: None,
            out_path: default_out_path(),
            format: SampleFormat::default(),
            dump: None,
        }
    }
}

impl RenderConfig {
    pub fn settings(&self) -> SynthSettings {
        SynthSettings {
            engine: self.engine.clone(),
            envelope: self.envelope,
            initial: self.initial,
            potential: self.potential.clone(),
        }
    }

    /// Seconds needed for every note to finish its release.
    pub fn required_duration(&self) -> f64 {
        self.notes
            .iter()
            .map(|n| n.end() + self.envelope.release)
            .fold(0.0, f64::max)
    }

    /// Resolved render length in seconds.
    pub fn duration_seconds(&self) -> f64 {
        self.duration.unwrap_or_else(|| self.required_duration())
    }

    pub fn total_frames(&self) -> usize {
        (self.duration_seconds() * f64::from(self.engine.sample_rate)).ceil() as usize
    }

    /// Sorts notes, fills the duration and checks every bound. Idempotent.
    pub fn normalize(&mut self) -> Result<(), RenderError> {
        self.notes.sort_by(|a, b| a.start.total_cmp(&b.start));
        let mut problems = Vec::new();
        if let Err(e) = self.settings().validate() {
            problems.push(e.to_string());
        } else if let Err(e) =
            Grid::new(self.engine.n).and_then(|grid| Potential::new(grid, self.potential.clone()))
        {
            problems.push(format!("potential: {e}"));
        }
        for (i, note) in self.notes.iter().enumerate() {
            problems.extend(note_problems(i, note, &self.engine));
        }
        if let Some(dump) = &self.dump {
            if dump.every_steps == 0 {
                problems.push("dump.every_steps must be at least 1".to_string());
            }
        }
        let required = self.required_duration();
        match self.duration {
            Some(d) if !(d.is_finite() && d >= 0.0) => {
                problems.push(format!("duration must be finite and non-negative, got {d}"))
            }
            Some(d) if d < required => problems.push(format!(
                "duration {d} s is shorter than the last note end plus release ({required} s)"
            )),
            Some(_) => {}
            None => self.duration = Some(required),
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(RenderError::Validation(problems.join("; ")))
        }
    }
}

fn note_problems(index: usize, note: &NoteEvent, engine: &EngineConfig) -> Vec<String> {
    let mut out = Vec::new();
    let at = format!("notes[{index}]");
    if !(note.start.is_finite() && note.start >= 0.0) {
        out.push(format!(
            "{at}.start must be finite and non-negative, got {}",
            note.start
        ));
    }
    if !(note.duration.is_finite() && note.duration >= 0.0) {
        out.push(format!(
            "{at}.duration must be finite and non-negative, got {}",
            note.duration
        ));
    }
    if !(1..=127).contains(&note.velocity) {
        out.push(format!(
            "{at}.velocity must be in [1, 127], got {}",
            note.velocity
        ));
    }
    match midi_to_freq(i32::from(note.note)) {
        Err(_) => out.push(format!("{at}.note must be in [0, 127], got {}", note.note)),
        Ok(freq) => {
            if phase_increment(freq, f64::from(engine.sample_rate), engine.n).is_err() {
                out.push(format!(
                    "{at}.note {} ({freq:.1} Hz) is at or above the Nyquist frequency",
                    note.note
                ));
            }
        }
    }
    out
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |nl| before.len() - nl - 1)
        + 1;
    (line, column)
}

/// Parses and validates a render config.
pub fn parse_config(text: &str) -> Result<RenderConfig, RenderError> {
    let mut config: RenderConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map_or((0, 0), |Range { start, .. }| line_column(text, start));
        RenderError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    config.normalize()?;
    Ok(config)
}
