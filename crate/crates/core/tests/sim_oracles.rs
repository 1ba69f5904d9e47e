mod common;

use std::f64::consts::PI;

use common::{direct_timestep, max_abs_diff, mirror, random_potential, random_state, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use psisynth::sim::{
    timestep, GaussianParams, Grid, Potential, PotentialKind, Propagator, WaveFunction,
};

fn custom(grid: Grid, values: Vec<f64>) -> Potential {
    Potential::new(grid, PotentialKind::Custom { values }).unwrap()
}

#[test]
fn matches_direct_summation_on_small_grids() {
    let mut rng = rng(7);
    for n in [8, 16, 32] {
        let grid = Grid::new(n).unwrap();
        for case in 0..40 {
            let psi = random_state(&mut rng, grid);
            let v = random_potential(&mut rng, n, 50.0);
            let dt = 1e-4 + 0.05 * case as f64 / 40.0;
            let fast = timestep(&psi, &custom(grid, v.clone()), dt).unwrap();
            let slow = direct_timestep(psi.amplitudes(), &v, dt);
            let err = max_abs_diff(fast.amplitudes(), &slow);
            assert!(err <= 1e-12, "n={n} case={case}: {err:e}");
        }
    }
}

#[test]
fn plane_waves_keep_their_density() {
    let grid = Grid::new(64).unwrap();
    let propagator = Propagator::new(&Potential::free(grid), 1e-3).unwrap();
    for m in [-5, 0, 1, 3, 32] {
        let mut psi = WaveFunction::plane_wave(grid, m);
        let start = psi.probability_density();
        for _ in 0..200 {
            propagator.step(&mut psi).unwrap();
        }
        let drift = psi
            .probability_density()
            .iter()
            .zip(&start)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-12, "m={m}: {drift:e}");
    }
}

#[test]
fn plane_wave_gains_the_kinetic_phase() {
    let n = 32;
    let grid = Grid::new(n).unwrap();
    let m = 3;
    let dt = 0.01;
    let psi = WaveFunction::plane_wave(grid, m);
    let next = timestep(&psi, &Potential::free(grid), dt).unwrap();
    let w = 2.0 * PI * m as f64 / n as f64;
    let phase = Complex64::from_polar(1.0, -w * w * dt);
    let expected: Vec<Complex64> = psi.amplitudes().iter().map(|a| a * phase).collect();
    assert!(max_abs_diff(next.amplitudes(), &expected) < 1e-14);
}

#[test]
fn free_gaussian_mean_drifts_with_momentum() {
    // group velocity of s = momentum in these units is 2·(2π/n)²·momentum
    let grid = Grid::new(128).unwrap();
    let initial = GaussianParams {
        center: 2.0,
        sigma: 0.3,
        momentum: 6.0,
    };
    let mut psi = WaveFunction::gaussian(grid, initial).unwrap();
    let dt = 1e-2;
    let steps = 500;
    Propagator::new(&Potential::free(grid), dt)
        .unwrap()
        .run(&mut psi, steps)
        .unwrap();
    let k = 2.0 * PI / 128.0;
    let expected = 2.0 + 2.0 * k * k * 6.0 * steps as f64 * dt;
    let mean = psi.mean_position();
    assert!(
        (mean - expected).abs() < 0.02 * (expected - 2.0),
        "mean {mean} expected {expected}"
    );
}

#[test]
fn barrier_potential_reflects_most_of_the_packet() {
    let (initial, kind) = common::tunneling_setup();
    let grid = Grid::new(128).unwrap();
    let potential = Potential::new(grid, kind).unwrap();
    let propagator = Propagator::new(&potential, 1e-3).unwrap();
    let mut psi = WaveFunction::gaussian(grid, initial).unwrap();
    let before = common::transmitted_mass(&psi);
    propagator.run(&mut psi, 20_000).unwrap();
    let after = common::transmitted_mass(&psi);
    assert!(before < 1e-20);
    assert!(after > before && after < 1e-3, "{after:e}");
    assert!((psi.norm() - 1.0).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_preserved(seed in any::<u64>(), log_n in 3u32..8, dt in 1e-5f64..0.1, scale in 0.0f64..100.0) {
        let n = 1usize << log_n;
        let grid = Grid::new(n).unwrap();
        let mut rng = rng(seed);
        let psi = random_state(&mut rng, grid);
        let potential = custom(grid, random_potential(&mut rng, n, scale));
        let mut out = psi.clone();
        let propagator = Propagator::new(&potential, dt).unwrap();
        propagator.run(&mut out, 20).unwrap();
        prop_assert!((out.norm() - psi.norm()).abs() < 1e-12);
    }

    #[test]
    fn propagator_is_bitwise_timestep(seed in any::<u64>(), log_n in 3u32..8, dt in 1e-5f64..0.1) {
        let n = 1usize << log_n;
        let grid = Grid::new(n).unwrap();
        let mut rng = rng(seed);
        let psi = random_state(&mut rng, grid);
        let potential = custom(grid, random_potential(&mut rng, n, 30.0));
        let mut cached = psi.clone();
        Propagator::new(&potential, dt).unwrap().step(&mut cached).unwrap();
        let free = timestep(&psi, &potential, dt).unwrap();
        prop_assert_eq!(cached.amplitudes(), free.amplitudes());
    }

    #[test]
    fn evolution_commutes_with_mirroring(seed in any::<u64>(), log_n in 3u32..8, dt in 1e-4f64..0.05) {
        let n = 1usize << log_n;
        let grid = Grid::new(n).unwrap();
        let mut rng = rng(seed);
        let psi = random_state(&mut rng, grid);
        let v = random_potential(&mut rng, n, 40.0);
        let potential = custom(grid, v.clone());
        let mirrored_potential = custom(grid, mirror(&v));
        let mut evolved = psi.clone();
        Propagator::new(&potential, dt).unwrap().run(&mut evolved, 10).unwrap();
        let mut mirrored = WaveFunction::from_amplitudes(grid, mirror(psi.amplitudes())).unwrap();
        Propagator::new(&mirrored_potential, dt).unwrap().run(&mut mirrored, 10).unwrap();
        let err = max_abs_diff(&mirror(evolved.amplitudes()), mirrored.amplitudes());
        prop_assert!(err <= 1e-10, "{:e}", err);
    }

    #[test]
    fn timestep_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let grid = Grid::new(16).unwrap();
        let mut rng = rng(seed);
        let p = random_state(&mut rng, grid);
        let q = random_state(&mut rng, grid);
        let potential = custom(grid, random_potential(&mut rng, 16, 10.0));
        let combo: Vec<Complex64> = p.amplitudes().iter().zip(q.amplitudes()).map(|(x, y)| x * a + y * b).collect();
        let combo = WaveFunction::from_amplitudes(grid, combo).unwrap();
        let lhs = timestep(&combo, &potential, 0.01).unwrap();
        let tp = timestep(&p, &potential, 0.01).unwrap();
        let tq = timestep(&q, &potential, 0.01).unwrap();
        let rhs: Vec<Complex64> = tp.amplitudes().iter().zip(tq.amplitudes()).map(|(x, y)| x * a + y * b).collect();
        prop_assert!(max_abs_diff(lhs.amplitudes(), &rhs) < 1e-12);
    }

    #[test]
    fn mirrored_potential_is_an_involution(left in 0.0f64..3.0, width in 0.05f64..3.0, height in 0.0f64..100.0) {
        let grid = Grid::new(64).unwrap();
        let potential = Potential::new(grid, PotentialKind::Barrier { height, left, right: left + width }).unwrap();
        let once = potential.mirrored();
        let twice = once.mirrored();
        prop_assert_eq!(twice.values(), potential.values());
        prop_assert_eq!(once.values().to_vec(), mirror(potential.values()));
    }
}
