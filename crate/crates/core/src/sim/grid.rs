use std::f64::consts::TAU;

use super::SimError;

pub const MIN_GRID_SIZE: usize = 8;

/// Uniform periodic grid with `x_j = 2π·j/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, SimError> {
        if n < MIN_GRID_SIZE || !n.is_power_of_two() {
            return Err(SimError::InvalidGridSize(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        TAU / self.n as f64
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<(), SimError> {
        if self.n != other.n {
            return Err(SimError::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }
}

pub fn make_grid(n: usize) -> Result<Grid, SimError> {
    Grid::new(n)
}
