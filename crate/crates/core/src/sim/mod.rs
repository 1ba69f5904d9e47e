//! Discretized 1-D Schrödinger simulation on a periodic grid over `[0, 2π)`.
//!
//! Time evolution is split into a potential phase multiplication in position
//! space followed by a kinetic phase multiplication in momentum space. Both
//! factors have unit modulus, so the norm of the state is conserved up to
//! floating-point error.

mod grid;
mod potential;
mod propagator;
mod wavefunction;

pub use grid::{make_grid, Grid, MIN_GRID_SIZE};
pub use potential::{make_potential, Potential, PotentialKind};
pub use propagator::{
    kinetic_multiplier, potential_multiplier, signed_frequency, step_kinetic, step_potential,
    timestep, Propagator, SimParams,
};
pub use wavefunction::{gaussian_initial, norm, probability_density, GaussianParams, WaveFunction};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid grid size {0}: n must be a power of two and at least 8")]
    InvalidGridSize(usize),
    #[error("transform length {0} is not a power of two")]
    TransformLength(usize),
    #[error("grid mismatch: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },
    #[error("{0}")]
    Domain(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> SimError {
    SimError::Domain(msg.into())
}
