//! In-place radix-2 Cooley-Tukey FFT.
//!
//! Forward transform uses the `exp(-2πi·jk/n)` kernel with no scaling; the
//! inverse uses `exp(+2πi·jk/n)` and scales by `1/n`, so `inverse(forward(a)) = a`.
//! A plan precomputes twiddles and the bit-reversal permutation so the
//! transforms themselves never allocate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::sim::SimError;

/// Precomputed tables for transforms of one power-of-two length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    /// `exp(-2πi·k/n)` for `k < n/2`.
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self, SimError> {
        if n == 0 || !n.is_power_of_two() {
            return Err(SimError::TransformLength(n));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        let bits = n.trailing_zeros();
        let bit_reverse = (0..n)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        Ok(Self {
            n,
            twiddles,
            bit_reverse,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.n as f64;
        for value in data.iter_mut() {
            *value *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.n, "buffer length does not match FFT plan");
        let n = self.n;

        for i in 0..n {
            let j = self.bit_reverse[i];
            if i < j {
                data.swap(i, j);
            }
        }

        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Forward DFT of `input` into a new vector.
pub fn dft(input: &[Complex64]) -> Result<Vec<Complex64>, SimError> {
    let plan = Fft::new(input.len())?;
    let mut out = input.to_vec();
    plan.forward(&mut out);
    Ok(out)
}

/// Inverse DFT (scaled by `1/n`) of `input` into a new vector.
pub fn idft(input: &[Complex64]) -> Result<Vec<Complex64>, SimError> {
    let plan = Fft::new(input.len())?;
    let mut out = input.to_vec();
    plan.inverse(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    fn direct_dft(input: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        let angle = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                        a * Complex64::new(angle.cos(), angle.sin())
                    })
                    .sum()
            })
            .collect()
    }

    fn random_vec(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn constant_input_lands_in_zero_bin() {
        let c = Complex64::new(0.7, -0.2);
        let out = dft(&[c; 8]).unwrap();
        assert!((out[0] - c * 8.0).norm() < 1e-14);
        for value in &out[1..] {
            assert!(value.norm() < 1e-14);
        }
    }

    #[test]
    fn single_harmonic_lands_in_its_bin() {
        let n = 8;
        let input: Vec<_> = (0..n)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
            .collect();
        let out = dft(&input).unwrap();
        for (k, value) in out.iter().enumerate() {
            let expected = if k == 1 { n as f64 } else { 0.0 };
            assert!((value - expected).norm() < 1e-13, "bin {k}: {value}");
        }
    }

    #[test]
    fn matches_direct_summation() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [1, 2, 4, 8, 16, 64] {
            let input = random_vec(&mut rng, n);
            let fast = dft(&input).unwrap();
            let slow = direct_dft(&input, -1.0);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12);
            }
            let back = idft(&fast).unwrap();
            let slow_back: Vec<_> = direct_dft(&fast, 1.0)
                .iter()
                .map(|v| v / n as f64)
                .collect();
            for ((a, b), c) in back.iter().zip(&slow_back).zip(&input) {
                assert!((a - b).norm() < 1e-12);
                assert!((a - c).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_n16() {
        let mut rng = StdRng::seed_from_u64(11);
        let input = random_vec(&mut rng, 16);
        let back = idft(&dft(&input).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&input) {
            assert!((a.re - b.re).abs() <= 1e-12 && (a.im - b.im).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            dft(&[Complex64::default(); 12]),
            Err(SimError::TransformLength(12))
        ));
        assert!(Fft::new(0).is_err());
    }
}
