use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{domain, Grid, Potential, SimError, WaveFunction};
use crate::fft::Fft;

/// Simulation timestep `Δt` in arbitrary units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    dt: f64,
}

impl SimParams {
    pub fn new(dt: f64) -> Result<Self, SimError> {
        check_dt(dt)?;
        Ok(Self { dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

fn check_dt(dt: f64) -> Result<(), SimError> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("dt must be positive and finite, got {dt}")))
    }
}

/// Frequency index of FFT bin `k`: `k` for `k <= n/2`, `k - n` above.
#[inline]
pub fn signed_frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// `exp(-i·v·dt)`.
#[inline]
pub fn potential_multiplier(v: f64, dt: f64) -> Complex64 {
    Complex64::from_polar(1.0, -v * dt)
}

/// `exp(-i·(2π·s(k)/n)²·dt)` for bin `k` of an `n`-point transform.
#[inline]
pub fn kinetic_multiplier(k: usize, n: usize, dt: f64) -> Complex64 {
    let w = TAU * signed_frequency(k, n) as f64 / n as f64;
    Complex64::from_polar(1.0, -w * w * dt)
}

pub fn step_potential(
    psi: &WaveFunction,
    potential: &Potential,
    dt: f64,
) -> Result<WaveFunction, SimError> {
    psi.grid().ensure_same(&potential.grid())?;
    check_dt(dt)?;
    let mut out = psi.clone();
    for (a, v) in out.amplitudes_mut().iter_mut().zip(potential.values()) {
        *a *= potential_multiplier(*v, dt);
    }
    Ok(out)
}

pub fn step_kinetic(psi: &WaveFunction, dt: f64) -> Result<WaveFunction, SimError> {
    check_dt(dt)?;
    let n = psi.grid().len();
    let fft = Fft::new(n)?;
    let mut out = psi.clone();
    let amp = out.amplitudes_mut();
    fft.forward(amp);
    for (k, a) in amp.iter_mut().enumerate() {
        *a *= kinetic_multiplier(k, n, dt);
    }
    fft.inverse(amp);
    Ok(out)
}

/// One split-step update: potential phase, then kinetic phase.
pub fn timestep(
    psi: &WaveFunction,
    potential: &Potential,
    dt: f64,
) -> Result<WaveFunction, SimError> {
    step_kinetic(&step_potential(psi, potential, dt)?, dt)
}

/// Cached split-step propagator for repeated in-place stepping.
///
/// Produces bit-identical results to [`timestep`] for the same potential and
/// `dt`. Stepping does not allocate.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid,
    dt: f64,
    fft: Fft,
    potential_phase: Vec<Complex64>,
    kinetic_phase: Vec<Complex64>,
}

impl Propagator {
    pub fn new(potential: &Potential, dt: f64) -> Result<Self, SimError> {
        check_dt(dt)?;
        let grid = potential.grid();
        let n = grid.len();
        let mut propagator = Self {
            grid,
            dt,
            fft: Fft::new(n)?,
            potential_phase: vec![Complex64::default(); n],
            kinetic_phase: vec![Complex64::default(); n],
        };
        propagator.refresh_kinetic();
        propagator.set_potential(potential)?;
        Ok(propagator)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Changes `dt`; the potential phases are recomputed from `potential`.
    pub fn set_dt(&mut self, dt: f64, potential: &Potential) -> Result<(), SimError> {
        check_dt(dt)?;
        self.grid.ensure_same(&potential.grid())?;
        self.dt = dt;
        self.refresh_kinetic();
        self.set_potential(potential)
    }

    pub fn set_potential(&mut self, potential: &Potential) -> Result<(), SimError> {
        self.grid.ensure_same(&potential.grid())?;
        let dt = self.dt;
        for (m, v) in self.potential_phase.iter_mut().zip(potential.values()) {
            *m = potential_multiplier(*v, dt);
        }
        Ok(())
    }

    fn refresh_kinetic(&mut self) {
        let n = self.grid.len();
        for (k, m) in self.kinetic_phase.iter_mut().enumerate() {
            *m = kinetic_multiplier(k, n, self.dt);
        }
    }

    pub fn step(&self, psi: &mut WaveFunction) -> Result<(), SimError> {
        self.grid.ensure_same(&psi.grid())?;
        self.step_amplitudes(psi.amplitudes_mut());
        Ok(())
    }

    pub(crate) fn step_amplitudes(&self, amp: &mut [Complex64]) {
        for (a, m) in amp.iter_mut().zip(&self.potential_phase) {
            *a *= m;
        }
        self.fft.forward(amp);
        for (a, m) in amp.iter_mut().zip(&self.kinetic_phase) {
            *a *= m;
        }
        self.fft.inverse(amp);
    }

    pub fn run(&self, psi: &mut WaveFunction, steps: usize) -> Result<(), SimError> {
        self.grid.ensure_same(&psi.grid())?;
        for _ in 0..steps {
            self.step_amplitudes(psi.amplitudes_mut());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{gaussian_initial, make_grid, make_potential, PotentialKind};
    use std::f64::consts::PI;

    #[test]
    fn zero_potential_is_identity() {
        let grid = make_grid(16).unwrap();
        let psi = gaussian_initial(grid, 1.0, 0.4, 3.0).unwrap();
        let out = step_potential(&psi, &Potential::free(grid), 0.3).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn potential_phase_quarter_turn() {
        let grid = make_grid(8).unwrap();
        let psi = WaveFunction::from_amplitudes(grid, vec![Complex64::new(1.0, 0.0); 8]).unwrap();
        let v = make_potential(
            grid,
            PotentialKind::Custom {
                values: vec![PI; 8],
            },
        )
        .unwrap();
        let out = step_potential(&psi, &v, 0.5).unwrap();
        for a in out.amplitudes() {
            assert!((a - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn potential_step_preserves_modulus() {
        let grid = make_grid(32).unwrap();
        let psi = gaussian_initial(grid, 2.0, 0.5, 1.5).unwrap();
        let v = make_potential(
            grid,
            PotentialKind::Harmonic {
                strength: 3.0,
                center: 1.0,
            },
        )
        .unwrap();
        let out = step_potential(&psi, &v, 0.7).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let psi = gaussian_initial(make_grid(16).unwrap(), 1.0, 0.4, 0.0).unwrap();
        let v = Potential::free(make_grid(32).unwrap());
        assert_eq!(
            step_potential(&psi, &v, 0.1).unwrap_err(),
            SimError::GridMismatch {
                left: 16,
                right: 32
            }
        );
        assert!(timestep(&psi, &v, 0.1).is_err());
        assert!(Propagator::new(&v, 0.1)
            .unwrap()
            .step(&mut psi.clone())
            .is_err());
    }

    #[test]
    fn bad_dt_is_rejected() {
        let grid = make_grid(8).unwrap();
        let psi = WaveFunction::plane_wave(grid, 1);
        for dt in [0.0, -1e-3, f64::NAN] {
            assert!(step_kinetic(&psi, dt).is_err());
            assert!(SimParams::new(dt).is_err());
        }
    }

    #[test]
    fn kinetic_leaves_constant_state_alone() {
        let grid = make_grid(16).unwrap();
        let psi = WaveFunction::from_amplitudes(grid, vec![Complex64::new(0.3, 0.1); 16]).unwrap();
        let out = step_kinetic(&psi, 0.25).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn kinetic_single_bin_picks_up_phase() {
        let grid = make_grid(16).unwrap();
        let dt = 0.4;
        let psi = WaveFunction::plane_wave(grid, 1);
        let out = step_kinetic(&psi, dt).unwrap();
        let w = TAU / 16.0;
        let phase = Complex64::from_polar(1.0, -w * w * dt);
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b * phase).norm() < 1e-12);
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_frequency_mapping() {
        let s: Vec<_> = (0..8).map(|k| signed_frequency(k, 8)).collect();
        assert_eq!(s, vec![0, 1, 2, 3, 4, -3, -2, -1]);
    }

    #[test]
    fn cached_propagator_matches_timestep_bitwise() {
        let grid = make_grid(64).unwrap();
        let v = make_potential(
            grid,
            PotentialKind::Barrier {
                height: 8.0,
                left: 3.0,
                right: 3.5,
            },
        )
        .unwrap();
        let mut fast = gaussian_initial(grid, 1.5, 0.3, 5.0).unwrap();
        let mut slow = fast.clone();
        let propagator = Propagator::new(&v, 2e-3).unwrap();
        for _ in 0..50 {
            propagator.step(&mut fast).unwrap();
            slow = timestep(&slow, &v, 2e-3).unwrap();
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn free_evolution_composes() {
        let grid = make_grid(32).unwrap();
        let free = Potential::free(grid);
        let psi = gaussian_initial(grid, 2.0, 0.3, 4.0).unwrap();
        let twice = timestep(&timestep(&psi, &free, 0.05).unwrap(), &free, 0.05).unwrap();
        let once = timestep(&psi, &free, 0.1).unwrap();
        for (a, b) in twice.amplitudes().iter().zip(once.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn splitting_does_not_compose_with_potential() {
        let grid = make_grid(32).unwrap();
        let v = make_potential(
            grid,
            PotentialKind::Harmonic {
                strength: 4.0,
                center: PI,
            },
        )
        .unwrap();
        let psi = gaussian_initial(grid, 2.5, 0.3, 3.0).unwrap();
        let twice = timestep(&timestep(&psi, &v, 0.05).unwrap(), &v, 0.05).unwrap();
        let once = timestep(&psi, &v, 0.1).unwrap();
        let max_diff = twice
            .amplitudes()
            .iter()
            .zip(once.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(
            max_diff > 1e-6,
            "operator splitting unexpectedly commuted: {max_diff}"
        );
    }
}
