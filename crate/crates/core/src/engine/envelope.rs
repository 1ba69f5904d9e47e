//! Piecewise-linear ADSR.
//!
//! Levels are evaluated in closed form from elapsed time rather than by
//! accumulating per-sample increments, so the per-sample path in the voice
//! and [`envelope_level`] agree exactly.

use super::EnvelopeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeStage {
    Attack,
    Decay,
    Sustain,
    Release,
    Done,
}

/// Level while the key is held, `t` seconds after note-on.
#[inline]
pub fn held_level(env: &EnvelopeParams, t: f64) -> f64 {
    if t < env.attack {
        t / env.attack
    } else if t < env.attack + env.decay {
        1.0 - (1.0 - env.sustain) * (t - env.attack) / env.decay
    } else {
        env.sustain
    }
}

/// Level `elapsed` seconds into a release that started at `start_level`.
#[inline]
pub fn release_level(start_level: f64, release: f64, elapsed: f64) -> f64 {
    if elapsed >= release {
        0.0
    } else {
        start_level * (1.0 - elapsed / release)
    }
}

pub fn held_stage(env: &EnvelopeParams, t: f64) -> EnvelopeStage {
    if t < env.attack {
        EnvelopeStage::Attack
    } else if t < env.attack + env.decay {
        EnvelopeStage::Decay
    } else {
        EnvelopeStage::Sustain
    }
}

/// Envelope level at time `t` after note-on, for a note released at
/// `released_at` (if it has been).
pub fn envelope_level(env: &EnvelopeParams, released_at: Option<f64>, t: f64) -> f64 {
    match released_at {
        Some(release_start) if t >= release_start => release_level(
            held_level(env, release_start),
            env.release,
            t - release_start,
        ),
        _ => held_level(env, t),
    }
}

pub fn envelope_stage(env: &EnvelopeParams, released_at: Option<f64>, t: f64) -> EnvelopeStage {
    match released_at {
        Some(release_start) if t >= release_start => {
            if t - release_start >= env.release {
                EnvelopeStage::Done
            } else {
                EnvelopeStage::Release
            }
        }
        _ => held_stage(env, t),
    }
}
