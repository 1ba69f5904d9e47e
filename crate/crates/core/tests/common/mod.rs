//! Shared helpers for integration tests: an O(n²) direct-summation
//! propagator used as an independent oracle, plus random inputs.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use psisynth::sim::{GaussianParams, Grid, PotentialKind, WaveFunction};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// One split-step update computed with explicit sums instead of an FFT.
pub fn direct_timestep(psi: &[Complex64], v: &[f64], dt: f64) -> Vec<Complex64> {
    let n = psi.len();
    let phi: Vec<Complex64> = psi
        .iter()
        .zip(v)
        .map(|(a, v)| a * Complex64::from_polar(1.0, -v * dt))
        .collect();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for (k, out) in spectrum.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, a) in phi.iter().enumerate() {
            let angle = -TAU * ((k * l) % n) as f64 / n as f64;
            acc += a * Complex64::from_polar(1.0, angle);
        }
        let s = if k <= n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        let w = TAU * s / n as f64;
        *out = acc * Complex64::from_polar(1.0, -w * w * dt);
    }
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, a) in spectrum.iter().enumerate() {
                let angle = TAU * ((j * k) % n) as f64 / n as f64;
                acc += a * Complex64::from_polar(1.0, angle);
            }
            acc / n as f64
        })
        .collect()
}

pub fn random_state(rng: &mut StdRng, grid: Grid) -> WaveFunction {
    let amp: Vec<Complex64> = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = (amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
    let amp = amp.into_iter().map(|a| a / norm).collect();
    WaveFunction::from_amplitudes(grid, amp).unwrap()
}

pub fn random_potential(rng: &mut StdRng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..scale)).collect()
}

/// `x -> 2π - x` on the periodic grid: index `j` maps to `(n - j) mod n`.
pub fn mirror<T: Copy>(values: &[T]) -> Vec<T> {
    let n = values.len();
    (0..n).map(|j| values[(n - j) % n]).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Offset packet in a unit-strength harmonic well centered at π.
pub fn harmonic_setup() -> (GaussianParams, PotentialKind) {
    (
        GaussianParams {
            center: PI + 0.5,
            sigma: 0.35,
            momentum: 0.0,
        },
        PotentialKind::Harmonic {
            strength: 1.0,
            center: PI,
        },
    )
}

pub const BARRIER_LEFT: f64 = PI;
pub const BARRIER_RIGHT: f64 = PI + 0.3;

/// Packet launched at a height-20, width-0.3 barrier.
pub fn tunneling_setup() -> (GaussianParams, PotentialKind) {
    (
        GaussianParams {
            center: PI / 2.0,
            sigma: 0.25,
            momentum: 4.0,
        },
        PotentialKind::Barrier {
            height: 20.0,
            left: BARRIER_LEFT,
            right: BARRIER_RIGHT,
        },
    )
}

/// Probability mass strictly to the right of the barrier.
pub fn transmitted_mass(psi: &WaveFunction) -> f64 {
    psi.mass_between(BARRIER_RIGHT, TAU)
}

/// Time of the first local maximum of `<x>` after its first minimum, refined
/// by a parabola through the three samples around the peak. `<x>` is sampled
/// every `stride` steps.
pub fn first_return_time(dt: f64, stride: usize, max_time: f64) -> f64 {
    use psisynth::sim::{Potential, Propagator};
    let (initial, kind) = harmonic_setup();
    let grid = Grid::new(128).unwrap();
    let potential = Potential::new(grid, kind).unwrap();
    let propagator = Propagator::new(&potential, dt).unwrap();
    let mut psi = WaveFunction::gaussian(grid, initial).unwrap();
    let sample_dt = dt * stride as f64;
    let mut samples = vec![psi.mean_position()];
    let max_samples = (max_time / sample_dt) as usize;
    let mut seen_minimum = false;
    while samples.len() < max_samples {
        propagator.run(&mut psi, stride).unwrap();
        samples.push(psi.mean_position());
        let m = samples.len();
        if m < 3 {
            continue;
        }
        let (a, b, c) = (samples[m - 3], samples[m - 2], samples[m - 1]);
        if !seen_minimum && b < a && b <= c {
            seen_minimum = true;
        } else if seen_minimum && b > a && b >= c {
            let shift = 0.5 * (a - c) / (a - 2.0 * b + c);
            return ((m - 2) as f64 + shift) * sample_dt;
        }
    }
    panic!("no return within {max_time}");
}

/// Settings for a steady tone: frozen simulation, instant attack, full
/// sustain.
pub fn frozen_tone_settings() -> psisynth::engine::SynthSettings {
    let mut settings = psisynth::engine::SynthSettings::default();
    settings.engine.sim_speed = 0.0;
    settings.envelope.attack = 0.0;
    settings.envelope.decay = 0.0;
    settings.envelope.sustain = 1.0;
    settings
}

/// Frequency of the largest magnitude bin of a zero-padded `fft_len`-point
/// transform, with the bin width.
pub fn dominant_frequency(signal: &[f32], sample_rate: f64, fft_len: usize) -> (f64, f64) {
    let fft = psisynth::fft::Fft::new(fft_len).unwrap();
    let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
    for (b, s) in buf.iter_mut().zip(signal) {
        b.re = f64::from(*s);
    }
    fft.forward(&mut buf);
    let (bin, _) = buf[1..fft_len / 2]
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c.norm_sqr()))
        .fold(
            (0, f64::MIN),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    let width = sample_rate / fft_len as f64;
    (bin as f64 * width, width)
}

/// Lag in `[min_lag, max_lag]` maximizing the autocorrelation, refined with
/// a parabola through the neighbouring lags.
pub fn autocorrelation_peak(signal: &[f32], min_lag: usize, max_lag: usize) -> f64 {
    let x: Vec<f64> = signal.iter().map(|s| f64::from(*s)).collect();
    let r = |lag: usize| -> f64 {
        x[..x.len() - lag]
            .iter()
            .zip(&x[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
    };
    let values: Vec<f64> = (min_lag - 1..=max_lag + 1).map(r).collect();
    let (i, _) =
        values[1..values.len() - 1]
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (i, v)| if *v > best.1 { (i, *v) } else { best },
            );
    let (a, b, c) = (values[i], values[i + 1], values[i + 2]);
    let shift = 0.5 * (a - c) / (a - 2.0 * b + c);
    (min_lag + i) as f64 + shift
}
