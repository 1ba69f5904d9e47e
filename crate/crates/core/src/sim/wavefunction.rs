use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{domain, Grid, SimError};

/// Parameters of a Gaussian wave packet `exp(-(x-c)²/(2σ²))·exp(i·p·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianParams {
    pub center: f64,
    pub sigma: f64,
    #[serde(default)]
    pub momentum: f64,
}

impl Default for GaussianParams {
    fn default() -> Self {
        Self {
            center: std::f64::consts::PI,
            sigma: 0.4,
            momentum: 0.0,
        }
    }
}

impl GaussianParams {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(domain(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if !self.center.is_finite() || !self.momentum.is_finite() {
            return Err(domain("gaussian center and momentum must be finite"));
        }
        Ok(())
    }
}

/// Complex probability amplitudes sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    amp: Vec<Complex64>,
}

impl WaveFunction {
    /// Wraps caller-supplied amplitudes. Any finite array is accepted; no
    /// normalization is imposed.
    pub fn from_amplitudes(grid: Grid, amp: Vec<Complex64>) -> Result<Self, SimError> {
        if amp.len() != grid.len() {
            return Err(domain(format!(
                "expected {} amplitudes, got {}",
                grid.len(),
                amp.len()
            )));
        }
        if amp.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(domain("amplitudes must be finite"));
        }
        Ok(Self { grid, amp })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            amp: vec![Complex64::default(); grid.len()],
        }
    }

    /// `e^{i·m·x_j}` for integer `m`.
    pub fn plane_wave(grid: Grid, m: i64) -> Self {
        let amp = (0..grid.len())
            .map(|j| Complex64::from_polar(1.0, m as f64 * grid.x(j)))
            .collect();
        Self { grid, amp }
    }

    pub fn gaussian(grid: Grid, params: GaussianParams) -> Result<Self, SimError> {
        let mut psi = Self::zeros(grid);
        psi.fill_gaussian(params)?;
        Ok(psi)
    }

    /// Overwrites the state with a normalized Gaussian packet without
    /// reallocating.
    pub fn fill_gaussian(&mut self, params: GaussianParams) -> Result<(), SimError> {
        params.validate()?;
        let grid = self.grid;
        let two_sigma_sq = 2.0 * params.sigma * params.sigma;
        for (j, a) in self.amp.iter_mut().enumerate() {
            let x = grid.x(j);
            let envelope = (-(x - params.center).powi(2) / two_sigma_sq).exp();
            *a = Complex64::from_polar(envelope, params.momentum * x);
        }
        let norm = self.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(domain(format!(
                "gaussian with sigma {} vanishes on the grid",
                params.sigma
            )));
        }
        let scale = norm.sqrt().recip();
        for a in self.amp.iter_mut() {
            *a *= scale;
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn copy_from(&mut self, other: &WaveFunction) -> Result<(), SimError> {
        self.grid.ensure_same(&other.grid)?;
        self.amp.copy_from_slice(&other.amp);
        Ok(())
    }

    pub fn probability_density(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.amp.len()];
        self.density_into(&mut out);
        out
    }

    /// Writes `|Ψ_j|²` into `out`, which must have length `n`.
    pub fn density_into(&self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.amp.len());
        for (d, a) in out.iter_mut().zip(&self.amp) {
            *d = a.re * a.re + a.im * a.im;
        }
    }

    /// `∑ |Ψ_j|²·dx`.
    pub fn norm(&self) -> f64 {
        self.amp
            .iter()
            .map(|a| a.re * a.re + a.im * a.im)
            .sum::<f64>()
            * self.grid.dx()
    }

    /// Expectation of position, `∑ x_j·|Ψ_j|²·dx`, without periodic unwrapping.
    pub fn mean_position(&self) -> f64 {
        let grid = self.grid;
        self.amp
            .iter()
            .enumerate()
            .map(|(j, a)| grid.x(j) * (a.re * a.re + a.im * a.im))
            .sum::<f64>()
            * grid.dx()
    }

    /// Probability mass on grid points with `x_j` strictly inside `(lo, hi)`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let grid = self.grid;
        self.amp
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let x = grid.x(*j);
                x > lo && x < hi
            })
            .map(|(_, a)| a.re * a.re + a.im * a.im)
            .sum::<f64>()
            * grid.dx()
    }
}

pub fn gaussian_initial(
    grid: Grid,
    center: f64,
    sigma: f64,
    momentum: f64,
) -> Result<WaveFunction, SimError> {
    WaveFunction::gaussian(
        grid,
        GaussianParams {
            center,
            sigma,
            momentum,
        },
    )
}

pub fn probability_density(psi: &WaveFunction) -> Vec<f64> {
    psi.probability_density()
}

pub fn norm(psi: &WaveFunction) -> f64 {
    psi.norm()
}
