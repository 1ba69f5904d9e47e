use super::envelope::{held_level, release_level, EnvelopeStage};
use super::{EnvelopeParams, StepObserver};
use crate::sim::{GaussianParams, Grid, Propagator, WaveFunction};
use crate::sonify::{build_channel_tables, sample_table, StereoWeights, TableOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ReleaseState {
    pub start_age: u64,
    pub start_level: f64,
}

/// One sounding note with its own simulation. All buffers are allocated once
/// and reused across notes.
#[derive(Debug, Clone)]
pub(crate) struct Voice {
    pub active: bool,
    pub id: u64,
    pub note: u8,
    pub note_freq: f64,
    pub velocity_gain: f64,
    pub increment: f64,
    pub phase: f64,
    pub age: u64,
    pub release: Option<ReleaseState>,
    pub psi: WaveFunction,
    pub owed_steps: f64,
    pub steps_taken: u64,
    pub density: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl Voice {
    pub fn new(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            active: false,
            id: 0,
            note: 0,
            note_freq: 0.0,
            velocity_gain: 0.0,
            increment: 0.0,
            phase: 0.0,
            age: 0,
            release: None,
            psi: WaveFunction::zeros(grid),
            owed_steps: 0.0,
            steps_taken: 0,
            density: vec![0.0; n],
            left: vec![0.0; n],
            right: vec![0.0; n],
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn start(
        &mut self,
        id: u64,
        note: u8,
        velocity: u8,
        note_freq: f64,
        increment: f64,
        initial: GaussianParams,
        weights: &StereoWeights,
        options: TableOptions,
    ) {
        self.active = true;
        self.id = id;
        self.note = note;
        self.note_freq = note_freq;
        self.velocity_gain = f64::from(velocity) / 127.0;
        self.increment = increment;
        self.phase = 0.0;
        self.age = 0;
        self.release = None;
        self.owed_steps = 0.0;
        self.steps_taken = 0;
        // initial params are validated before they reach the engine
        self.psi
            .fill_gaussian(initial)
            .expect("validated initial state");
        self.rebuild_tables(weights, options);
    }

    pub fn is_held(&self) -> bool {
        self.active && self.release.is_none()
    }

    pub fn release_elapsed(&self) -> Option<u64> {
        self.release.map(|r| self.age - r.start_age)
    }

    pub fn note_off(&mut self, env: &EnvelopeParams, sample_rate: f64) {
        if self.is_held() {
            self.release = Some(ReleaseState {
                start_age: self.age,
                start_level: held_level(env, self.age as f64 / sample_rate),
            });
        }
    }

    pub fn stage(&self, env: &EnvelopeParams, sample_rate: f64) -> EnvelopeStage {
        if !self.active {
            return EnvelopeStage::Done;
        }
        match self.release {
            Some(_) => EnvelopeStage::Release,
            None => super::envelope::held_stage(env, self.age as f64 / sample_rate),
        }
    }

    /// Runs the timesteps owed for `seconds` of audio.
    pub fn advance<O: StepObserver>(
        &mut self,
        steps_per_second: f64,
        seconds: f64,
        propagator: &Propagator,
        observer: &mut O,
    ) {
        self.owed_steps += steps_per_second * seconds;
        let due = self.owed_steps.floor();
        self.owed_steps -= due;
        for _ in 0..due as u64 {
            propagator.step_amplitudes(self.psi.amplitudes_mut());
            self.steps_taken += 1;
            observer.on_step(self.id, self.steps_taken, &self.psi);
        }
    }

    pub fn rebuild_tables(&mut self, weights: &StereoWeights, options: TableOptions) {
        self.psi.density_into(&mut self.density);
        build_channel_tables(
            &self.density,
            weights,
            options,
            &mut self.left,
            &mut self.right,
        )
        .expect("voice buffers sized to the grid");
    }

    /// Adds this voice into the mix buffers. Deactivates the voice when its
    /// release finishes.
    pub fn render(
        &mut self,
        env: &EnvelopeParams,
        sample_rate: f64,
        mix_left: &mut [f64],
        mix_right: &mut [f64],
    ) {
        let n = self.left.len() as f64;
        for (out_l, out_r) in mix_left.iter_mut().zip(mix_right.iter_mut()) {
            let level = match self.release {
                Some(r) => {
                    let elapsed = (self.age - r.start_age) as f64 / sample_rate;
                    if elapsed >= env.release {
                        self.active = false;
                        return;
                    }
                    release_level(r.start_level, env.release, elapsed)
                }
                None => held_level(env, self.age as f64 / sample_rate),
            };
            let gain = level * self.velocity_gain;
            *out_l += sample_table(&self.left, self.phase) * gain;
            *out_r += sample_table(&self.right, self.phase) * gain;
            self.phase += self.increment;
            if self.phase >= n {
                self.phase -= n;
            }
            self.age += 1;
        }
    }
}
