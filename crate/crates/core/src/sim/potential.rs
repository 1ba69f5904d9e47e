use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{domain, Grid, SimError};

/// Shape of the potential energy landscape.
///
/// Harmonic wells are plain `strength·(x - center)²` with no periodic
/// wrapping, so there is a jump at the domain edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialKind {
    Free,
    Harmonic { strength: f64, center: f64 },
    Barrier { height: f64, left: f64, right: f64 },
    Well { depth: f64, left: f64, right: f64 },
    Custom { values: Vec<f64> },
}

impl Default for PotentialKind {
    fn default() -> Self {
        PotentialKind::Harmonic {
            strength: 1.0,
            center: std::f64::consts::PI,
        }
    }
}

impl PotentialKind {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::Free => "free",
            PotentialKind::Harmonic { .. } => "harmonic",
            PotentialKind::Barrier { .. } => "barrier",
            PotentialKind::Well { .. } => "well",
            PotentialKind::Custom { .. } => "custom",
        }
    }

    /// Checks parameter bounds. Custom values are checked against the grid
    /// when the potential is built.
    pub fn validate(&self) -> Result<(), SimError> {
        fn finite(values: &[f64]) -> Result<(), SimError> {
            if values.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(domain("potential parameters must be finite"))
            }
        }
        fn interval(left: f64, right: f64) -> Result<(), SimError> {
            if !(0.0 <= left && left < right && right <= TAU) {
                return Err(domain(format!(
                    "interval [{left}, {right}] must satisfy 0 <= left < right <= 2π"
                )));
            }
            Ok(())
        }
        match *self {
            PotentialKind::Free => Ok(()),
            PotentialKind::Harmonic { strength, center } => {
                finite(&[strength, center])?;
                if strength < 0.0 {
                    return Err(domain(format!(
                        "harmonic strength must be >= 0, got {strength}"
                    )));
                }
                Ok(())
            }
            PotentialKind::Barrier {
                height,
                left,
                right,
            } => {
                finite(&[height, left, right])?;
                if height < 0.0 {
                    return Err(domain(format!("barrier height must be >= 0, got {height}")));
                }
                interval(left, right)
            }
            PotentialKind::Well { depth, left, right } => {
                finite(&[depth, left, right])?;
                if depth < 0.0 {
                    return Err(domain(format!(
                        "well wall height must be >= 0, got {depth}"
                    )));
                }
                interval(left, right)
            }
            PotentialKind::Custom { ref values } => finite(values),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    grid: Grid,
    v: Vec<f64>,
    kind: PotentialKind,
}

impl Potential {
    pub fn new(grid: Grid, kind: PotentialKind) -> Result<Self, SimError> {
        let mut potential = Self {
            grid,
            v: vec![0.0; grid.len()],
            kind: PotentialKind::Free,
        };
        potential.rebuild(kind)?;
        Ok(potential)
    }

    pub fn free(grid: Grid) -> Self {
        Self {
            grid,
            v: vec![0.0; grid.len()],
            kind: PotentialKind::Free,
        }
    }

    /// Replaces the samples in place. On error the potential is unchanged.
    /// Analytic kinds never allocate.
    pub fn rebuild(&mut self, kind: PotentialKind) -> Result<(), SimError> {
        kind.validate()?;
        let grid = self.grid;
        match kind {
            PotentialKind::Free => self.v.fill(0.0),
            PotentialKind::Harmonic { strength, center } => {
                for (j, v) in self.v.iter_mut().enumerate() {
                    *v = strength * (grid.x(j) - center).powi(2);
                }
            }
            PotentialKind::Barrier {
                height,
                left,
                right,
            } => {
                for (j, v) in self.v.iter_mut().enumerate() {
                    let x = grid.x(j);
                    *v = if left <= x && x <= right { height } else { 0.0 };
                }
            }
            PotentialKind::Well { depth, left, right } => {
                for (j, v) in self.v.iter_mut().enumerate() {
                    let x = grid.x(j);
                    *v = if left <= x && x <= right { 0.0 } else { depth };
                }
            }
            PotentialKind::Custom { ref values } => {
                if values.len() != grid.len() {
                    return Err(domain(format!(
                        "custom potential needs {} values, got {}",
                        grid.len(),
                        values.len()
                    )));
                }
                self.v.copy_from_slice(values);
            }
        }
        self.kind = match kind {
            // the samples already carry the data
            PotentialKind::Custom { .. } => PotentialKind::Custom { values: Vec::new() },
            other => other,
        };
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Index-mirrored potential, `v'_j = v_{(n-j) mod n}`.
    pub fn mirrored(&self) -> Self {
        let n = self.v.len();
        let v = (0..n).map(|j| self.v[(n - j) % n]).collect();
        Self {
            grid: self.grid,
            v,
            kind: PotentialKind::Custom { values: Vec::new() },
        }
    }
}

pub fn make_potential(grid: Grid, kind: PotentialKind) -> Result<Potential, SimError> {
    Potential::new(grid, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn free_is_zero() {
        let p = make_potential(make_grid(8).unwrap(), PotentialKind::Free).unwrap();
        assert_eq!(p.values(), &[0.0; 8]);
    }

    #[test]
    fn harmonic_direct_evaluation() {
        let p = make_potential(
            make_grid(128).unwrap(),
            PotentialKind::Harmonic {
                strength: 1.0,
                center: PI,
            },
        )
        .unwrap();
        assert_eq!(p.values()[64], 0.0);
        assert!((p.values()[0] - PI * PI).abs() < 1e-14);
    }

    #[test]
    fn barrier_inclusive_edges() {
        let p = make_potential(
            make_grid(8).unwrap(),
            PotentialKind::Barrier {
                height: 5.0,
                left: PI,
                right: 3.0 * PI / 2.0,
            },
        )
        .unwrap();
        assert_eq!(p.values(), &[0.0, 0.0, 0.0, 0.0, 5.0, 5.0, 5.0, 0.0]);
    }

    #[test]
    fn well_walls_outside_interval() {
        let p = make_potential(
            make_grid(8).unwrap(),
            PotentialKind::Well {
                depth: 3.0,
                left: PI / 2.0,
                right: PI,
            },
        )
        .unwrap();
        assert_eq!(p.values(), &[3.0, 3.0, 0.0, 0.0, 0.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn custom_accepts_any_finite_values() {
        let grid = make_grid(8).unwrap();
        let values = vec![-3.0, 1e6, 0.0, 2.0, 2.0, -1.0, 0.5, 7.0];
        let p = make_potential(
            grid,
            PotentialKind::Custom {
                values: values.clone(),
            },
        )
        .unwrap();
        assert_eq!(p.values(), values.as_slice());
        assert!(make_potential(
            grid,
            PotentialKind::Custom {
                values: vec![0.0; 7]
            }
        )
        .is_err());
        let mut bad = values;
        bad[2] = f64::INFINITY;
        assert!(make_potential(grid, PotentialKind::Custom { values: bad }).is_err());
    }

    #[test]
    fn rejects_malformed_parameters() {
        let grid = make_grid(8).unwrap();
        let cases = [
            PotentialKind::Barrier {
                height: 1.0,
                left: 2.0,
                right: 2.0,
            },
            PotentialKind::Barrier {
                height: -1.0,
                left: 1.0,
                right: 2.0,
            },
            PotentialKind::Well {
                depth: 1.0,
                left: 3.0,
                right: 1.0,
            },
            PotentialKind::Well {
                depth: 1.0,
                left: 1.0,
                right: 7.0,
            },
            PotentialKind::Harmonic {
                strength: -0.5,
                center: 1.0,
            },
            PotentialKind::Harmonic {
                strength: f64::NAN,
                center: 1.0,
            },
        ];
        for kind in cases {
            assert!(matches!(
                make_potential(grid, kind),
                Err(SimError::Domain(_))
            ));
        }
    }

    #[test]
    fn failed_rebuild_leaves_potential_unchanged() {
        let grid = make_grid(8).unwrap();
        let mut p = make_potential(grid, PotentialKind::default()).unwrap();
        let before = p.clone();
        assert!(p
            .rebuild(PotentialKind::Barrier {
                height: 1.0,
                left: 3.0,
                right: 1.0
            })
            .is_err());
        assert_eq!(p, before);
    }
}
