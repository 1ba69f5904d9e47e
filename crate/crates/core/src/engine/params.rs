//! Live-adjustable parameters and their published bounds.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::config::{MAX_DT, MAX_ENVELOPE_SECONDS, MAX_MASTER_GAIN, MAX_SIM_SPEED, MIN_DT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamId {
    SimSpeed,
    Dt,
    StereoMode,
    DcRemoval,
    MasterGain,
    Attack,
    Decay,
    Sustain,
    Release,
    GaussianCenter,
    GaussianSigma,
    GaussianMomentum,
    PotentialKind,
    PotentialP1,
    PotentialP2,
    PotentialP3,
}

impl ParamId {
    pub const ALL: [ParamId; 16] = [
        ParamId::SimSpeed,
        ParamId::Dt,
        ParamId::StereoMode,
        ParamId::DcRemoval,
        ParamId::MasterGain,
        ParamId::Attack,
        ParamId::Decay,
        ParamId::Sustain,
        ParamId::Release,
        ParamId::GaussianCenter,
        ParamId::GaussianSigma,
        ParamId::GaussianMomentum,
        ParamId::PotentialKind,
        ParamId::PotentialP1,
        ParamId::PotentialP2,
        ParamId::PotentialP3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamId::SimSpeed => "sim_speed",
            ParamId::Dt => "dt",
            ParamId::StereoMode => "stereo_mode",
            ParamId::DcRemoval => "dc_removal",
            ParamId::MasterGain => "master_gain",
            ParamId::Attack => "attack",
            ParamId::Decay => "decay",
            ParamId::Sustain => "sustain",
            ParamId::Release => "release",
            ParamId::GaussianCenter => "gaussian_center",
            ParamId::GaussianSigma => "gaussian_sigma",
            ParamId::GaussianMomentum => "gaussian_momentum",
            ParamId::PotentialKind => "potential_kind",
            ParamId::PotentialP1 => "potential_p1",
            ParamId::PotentialP2 => "potential_p2",
            ParamId::PotentialP3 => "potential_p3",
        }
    }

    pub fn spec(self) -> ParamSpec {
        let (min, max, integer) = match self {
            ParamId::SimSpeed => (0.0, MAX_SIM_SPEED, false),
            ParamId::Dt => (MIN_DT, MAX_DT, false),
            ParamId::StereoMode => (0.0, 2.0, true),
            ParamId::DcRemoval => (0.0, 1.0, true),
            ParamId::MasterGain => (0.0, MAX_MASTER_GAIN, false),
            ParamId::Attack | ParamId::Decay | ParamId::Release => {
                (0.0, MAX_ENVELOPE_SECONDS, false)
            }
            ParamId::Sustain => (0.0, 1.0, false),
            ParamId::GaussianCenter => (0.0, TAU, false),
            ParamId::GaussianSigma => (0.01, TAU, false),
            ParamId::GaussianMomentum => (-256.0, 256.0, false),
            ParamId::PotentialKind => (0.0, 3.0, true),
            ParamId::PotentialP1 => (0.0, 10_000.0, false),
            ParamId::PotentialP2 | ParamId::PotentialP3 => (0.0, TAU, false),
        };
        ParamSpec {
            id: self,
            name: self.as_str(),
            min,
            max,
            integer,
        }
    }

    /// Checks `value` against the published bounds.
    pub fn check(self, value: f64) -> Result<(), ParamError> {
        let spec = self.spec();
        if !value.is_finite() || value < spec.min || value > spec.max {
            return Err(ParamError::OutOfBounds {
                id: spec.name,
                value,
                min: spec.min,
                max: spec.max,
            });
        }
        if spec.integer && value.fract() != 0.0 {
            return Err(ParamError::NotInteger {
                id: spec.name,
                value,
            });
        }
        Ok(())
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamId {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ParamError::UnknownId(s.to_string()))
    }
}

/// Published bounds of one parameter. Integer parameters encode enums:
/// `stereo_mode` 0 mono / 1 pan_volume / 2 weighted; `potential_kind`
/// 0 free / 1 harmonic / 2 barrier / 3 well. `potential_p1..p3` are
/// (strength, center, unused) for harmonic and (height, left, right) for
/// barrier and well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSpec {
    #[serde(skip)]
    pub id: ParamId,
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
}

pub fn param_specs() -> Vec<ParamSpec> {
    ParamId::ALL.iter().map(|id| id.spec()).collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("unknown parameter id {0:?}")]
    UnknownId(String),
    #[error("{id} = {value} is outside [{min}, {max}]")]
    OutOfBounds {
        id: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{id} expects an integer value, got {value}")]
    NotInteger { id: &'static str, value: f64 },
    #[error("{id} = {value} rejected: {reason}")]
    Rejected {
        id: &'static str,
        value: f64,
        reason: String,
    },
}
