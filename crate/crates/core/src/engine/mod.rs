//! Polyphonic voice engine.
//!
//! Every note-on starts a fresh simulation from the current initial-state
//! settings. Once per block each voice runs the timesteps it owes
//! (`sim_speed · frames / sample_rate`, fractional remainder carried), its
//! tables are rebuilt from the new density, and then it is played back
//! through a phase accumulator under a linear ADSR.
//!
//! ## Real-time contract
//!
//! After [`Engine::new`] nothing on the [`Engine::process_block`] path
//! allocates or blocks: voices, tables, mix buffers and the pending-event
//! list are sized up front, commands arrive over a lock-free queue, and the
//! display snapshot is published with `try_lock`.
//!
//! ## Determinism
//!
//! Output is a pure function of the configuration and the schedule of notes
//! and parameter changes. Voices are summed in slot order.

mod config;
mod control;
mod envelope;
mod params;
mod voice;

use std::sync::{Arc, Mutex};

use crossbeam_queue::ArrayQueue;
use thiserror::Error;

pub use config::{
    EngineConfig, EnvelopeParams, SynthSettings, MAX_DT, MAX_ENVELOPE_SECONDS, MAX_MASTER_GAIN,
    MAX_SAMPLE_RATE, MAX_SIM_SPEED, MAX_VOICES_LIMIT, MIN_DT, MIN_SAMPLE_RATE,
};
pub use control::{Controller, VisualFrame};
pub use envelope::{envelope_level, envelope_stage, EnvelopeStage};
pub use params::{param_specs, ParamError, ParamId, ParamSpec};

use control::{Command, SnapshotSlot, QUEUE_CAPACITY};
use voice::Voice;

use crate::sim::{
    GaussianParams, Grid, Potential, PotentialKind, Propagator, SimError, WaveFunction,
};
use crate::sonify::{phase_increment, StereoMode, StereoWeights, TableOptions};

/// Largest block `process_block` accepts.
pub const MAX_BLOCK_FRAMES: usize = 8192;
/// Note events that may be queued ahead of a block.
pub const MAX_PENDING_EVENTS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
    #[error("block of {0} frames is outside [1, {MAX_BLOCK_FRAMES}]")]
    BlockSize(usize),
    #[error("event queue is full")]
    EventQueueFull,
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Standard 12-TET mapping with A4 (note 69) at 440 Hz.
pub fn midi_to_freq(note_number: i32) -> Result<f64, EngineError> {
    if !(0..=127).contains(&note_number) {
        return Err(EngineError::Domain(format!(
            "note number {note_number} is outside [0, 127]"
        )));
    }
    Ok(440.0 * 2f64.powf(f64::from(note_number - 69) / 12.0))
}

pub(crate) fn check_note(note: u8) -> Result<(), EngineError> {
    midi_to_freq(i32::from(note)).map(|_| ())
}

pub(crate) fn check_velocity(velocity: u8) -> Result<(), EngineError> {
    if !(1..=127).contains(&velocity) {
        return Err(EngineError::Domain(format!(
            "velocity {velocity} is outside [1, 127]"
        )));
    }
    Ok(())
}

/// Hook called after every simulation timestep of every voice.
pub trait StepObserver {
    fn on_step(&mut self, voice_id: u64, step: u64, psi: &WaveFunction);
}

/// Observer that does nothing.
pub struct NoObserver;

impl StepObserver for NoObserver {
    #[inline]
    fn on_step(&mut self, _voice_id: u64, _step: u64, _psi: &WaveFunction) {}
}

impl<F: FnMut(u64, u64, &WaveFunction)> StepObserver for F {
    fn on_step(&mut self, voice_id: u64, step: u64, psi: &WaveFunction) {
        self(voice_id, step, psi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    pub ignored_note_offs: u64,
    pub rejected_params: u64,
    pub stolen_voices: u64,
    pub skipped_snapshots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VoiceSelector {
    /// The voice started last.
    #[default]
    MostRecent,
    Id(u64),
    /// Most recent voice playing this note.
    Note(u8),
}

/// Read-only view of one active voice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoiceInfo {
    pub id: u64,
    pub slot: usize,
    pub note: u8,
    pub note_freq: f64,
    pub stage: EnvelopeStage,
    pub steps_taken: u64,
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    On { velocity: u8 },
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PendingEvent {
    offset: usize,
    seq: u64,
    note: u8,
    kind: EventKind,
}

pub struct Engine {
    config: EngineConfig,
    envelope: EnvelopeParams,
    initial: GaussianParams,
    potential_params: [f64; 4],
    grid: Grid,
    potential: Potential,
    propagator: Propagator,
    weights: StereoWeights,
    voices: Vec<Voice>,
    next_voice_id: u64,
    pending: Vec<PendingEvent>,
    next_event_seq: u64,
    mix_left: Vec<f64>,
    mix_right: Vec<f64>,
    out_left: Vec<f32>,
    out_right: Vec<f32>,
    preview_psi: WaveFunction,
    preview_density: Vec<f64>,
    commands: Arc<ArrayQueue<Command>>,
    snapshot: SnapshotSlot,
    controller_taken: bool,
    diagnostics: Diagnostics,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("config", &self.config)
            .field("envelope", &self.envelope)
            .field("initial", &self.initial)
            .field("potential", self.potential.kind())
            .field("active_voices", &self.active_voices())
            .field("diagnostics", &self.diagnostics)
            .finish_non_exhaustive()
    }
}

impl Engine {
    pub fn new(
        config: EngineConfig,
        envelope: EnvelopeParams,
        initial: GaussianParams,
        potential: PotentialKind,
    ) -> Result<Self, EngineError> {
        let settings = SynthSettings {
            engine: config,
            envelope,
            initial,
            potential,
        };
        Self::from_settings(&settings)
    }

    pub fn from_settings(settings: &SynthSettings) -> Result<Self, EngineError> {
        settings.validate()?;
        let config = settings.engine.clone();
        let grid = Grid::new(config.n)?;
        let potential = Potential::new(grid, settings.potential.clone())?;
        let propagator = Propagator::new(&potential, config.dt)?;
        let preview_psi = WaveFunction::gaussian(grid, settings.initial)?;
        let preview_density = preview_psi.probability_density();
        let snapshot = Arc::new(Mutex::new(VisualFrame {
            density: preview_density.clone(),
            potential: potential.values().to_vec(),
            voice_id: None,
            steps: 0,
        }));
        Ok(Self {
            potential_params: potential_params_of(&settings.potential),
            envelope: settings.envelope,
            initial: settings.initial,
            grid,
            weights: StereoWeights::new(grid.len()),
            voices: (0..config.max_voices).map(|_| Voice::new(grid)).collect(),
            next_voice_id: 0,
            pending: Vec::with_capacity(MAX_PENDING_EVENTS),
            next_event_seq: 0,
            mix_left: vec![0.0; MAX_BLOCK_FRAMES],
            mix_right: vec![0.0; MAX_BLOCK_FRAMES],
            out_left: vec![0.0; MAX_BLOCK_FRAMES],
            out_right: vec![0.0; MAX_BLOCK_FRAMES],
            preview_psi,
            preview_density,
            commands: Arc::new(ArrayQueue::new(QUEUE_CAPACITY)),
            snapshot,
            controller_taken: false,
            diagnostics: Diagnostics::default(),
            potential,
            propagator,
            config,
        })
    }

    /// Hands out the control-context handle. Only one exists per engine.
    pub fn take_controller(&mut self) -> Option<Controller> {
        if self.controller_taken {
            return None;
        }
        self.controller_taken = true;
        Some(Controller::new(
            self.commands.clone(),
            self.snapshot.clone(),
        ))
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn envelope(&self) -> &EnvelopeParams {
        &self.envelope
    }

    pub fn initial_state(&self) -> GaussianParams {
        self.initial
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    pub fn active_voices(&self) -> usize {
        self.voices.iter().filter(|v| v.active).count()
    }

    pub fn voices(&self) -> Vec<VoiceInfo> {
        let sample_rate = f64::from(self.config.sample_rate);
        self.voices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.active)
            .map(|(slot, v)| VoiceInfo {
                id: v.id,
                slot,
                note: v.note,
                note_freq: v.note_freq,
                stage: v.stage(&self.envelope, sample_rate),
                steps_taken: v.steps_taken,
                phase: v.phase,
            })
            .collect()
    }

    fn push_event(&mut self, offset: usize, note: u8, kind: EventKind) -> Result<(), EngineError> {
        if self.pending.len() >= MAX_PENDING_EVENTS {
            return Err(EngineError::EventQueueFull);
        }
        self.pending.push(PendingEvent {
            offset,
            seq: self.next_event_seq,
            note,
            kind,
        });
        self.next_event_seq += 1;
        Ok(())
    }

    /// Schedules a note-on `sample_offset` frames into the next block.
    /// Offsets past the end of that block carry into later blocks.
    pub fn note_on(
        &mut self,
        note: u8,
        velocity: u8,
        sample_offset: usize,
    ) -> Result<(), EngineError> {
        check_note(note)?;
        check_velocity(velocity)?;
        let freq = midi_to_freq(i32::from(note))?;
        phase_increment(freq, f64::from(self.config.sample_rate), self.grid.len())
            .map_err(|e| EngineError::Domain(e.to_string()))?;
        self.push_event(sample_offset, note, EventKind::On { velocity })
    }

    /// Schedules a note-off. A note-off that finds no held voice is ignored
    /// and counted in [`Diagnostics::ignored_note_offs`].
    pub fn note_off(&mut self, note: u8, sample_offset: usize) -> Result<(), EngineError> {
        check_note(note)?;
        self.push_event(sample_offset, note, EventKind::Off)
    }

    pub fn set_parameter(&mut self, id: ParamId, value: f64) -> Result<(), EngineError> {
        let result = self.apply_param(id, value);
        if result.is_err() {
            self.diagnostics.rejected_params += 1;
        }
        result.map_err(EngineError::from)
    }

    pub fn set_parameter_by_name(&mut self, name: &str, value: f64) -> Result<(), EngineError> {
        match name.parse::<ParamId>() {
            Ok(id) => self.set_parameter(id, value),
            Err(e) => {
                self.diagnostics.rejected_params += 1;
                Err(e.into())
            }
        }
    }

    /// Replaces the potential for running and future voices.
    pub fn set_potential(&mut self, kind: PotentialKind) -> Result<(), EngineError> {
        let params = potential_params_of(&kind);
        match self.rebuild_potential(kind) {
            Ok(()) => {
                self.potential_params = params;
                Ok(())
            }
            Err(e) => {
                self.diagnostics.rejected_params += 1;
                Err(e.into())
            }
        }
    }

    /// Initial state used by voices started from now on.
    pub fn set_initial_state(&mut self, params: GaussianParams) -> Result<(), EngineError> {
        let previous = self.initial;
        if let Err(e) = self.preview_psi.fill_gaussian(params) {
            self.preview_psi
                .fill_gaussian(previous)
                .expect("previous initial state was valid");
            self.diagnostics.rejected_params += 1;
            return Err(e.into());
        }
        self.initial = params;
        self.preview_psi.density_into(&mut self.preview_density);
        Ok(())
    }

    fn apply_param(&mut self, id: ParamId, value: f64) -> Result<(), ParamError> {
        id.check(value)?;
        let reject = |reason: String| ParamError::Rejected {
            id: id.as_str(),
            value,
            reason,
        };
        match id {
            ParamId::SimSpeed => self.config.sim_speed = value,
            ParamId::Dt => {
                self.propagator
                    .set_dt(value, &self.potential)
                    .map_err(|e| reject(e.to_string()))?;
                self.config.dt = value;
            }
            ParamId::StereoMode => {
                self.config.stereo_mode =
                    StereoMode::from_index(value as u32).expect("bounds checked")
            }
            ParamId::DcRemoval => self.config.dc_removal = value != 0.0,
            ParamId::MasterGain => self.config.master_gain = value,
            ParamId::Attack => self.envelope.attack = value,
            ParamId::Decay => self.envelope.decay = value,
            ParamId::Sustain => self.envelope.sustain = value,
            ParamId::Release => self.envelope.release = value,
            ParamId::GaussianCenter | ParamId::GaussianSigma | ParamId::GaussianMomentum => {
                let mut params = self.initial;
                match id {
                    ParamId::GaussianCenter => params.center = value,
                    ParamId::GaussianSigma => params.sigma = value,
                    _ => params.momentum = value,
                }
                let previous = self.initial;
                if let Err(e) = self.preview_psi.fill_gaussian(params) {
                    self.preview_psi
                        .fill_gaussian(previous)
                        .expect("previous initial state was valid");
                    return Err(reject(e.to_string()));
                }
                self.initial = params;
                self.preview_psi.density_into(&mut self.preview_density);
            }
            ParamId::PotentialKind
            | ParamId::PotentialP1
            | ParamId::PotentialP2
            | ParamId::PotentialP3 => {
                let slot = match id {
                    ParamId::PotentialKind => 0,
                    ParamId::PotentialP1 => 1,
                    ParamId::PotentialP2 => 2,
                    _ => 3,
                };
                let mut params = self.potential_params;
                params[slot] = value;
                // a custom potential keeps its samples; the parameters are
                // only remembered for a later kind switch
                if let Some(kind) = potential_from_params(params) {
                    self.rebuild_potential(kind)
                        .map_err(|e| reject(e.to_string()))?;
                }
                self.potential_params = params;
            }
        }
        Ok(())
    }

    fn rebuild_potential(&mut self, kind: PotentialKind) -> Result<(), SimError> {
        kind.validate()?;
        self.potential.rebuild(kind)?;
        self.propagator.set_potential(&self.potential)
    }

    fn apply_command(&mut self, command: Command) {
        let result = match command {
            Command::NoteOn { note, velocity } => self.note_on(note, velocity, 0),
            Command::NoteOff { note } => self.note_off(note, 0),
            Command::SetParam { id, value } => self.set_parameter(id, value),
            Command::SetPotential(kind) => self.set_potential(kind),
            Command::SetInitial(params) => self.set_initial_state(params),
        };
        // rejected parameters are already counted; note events can only fail
        // when the pending list is full
        let _ = result;
    }

    fn table_options(&self) -> TableOptions {
        TableOptions {
            mode: self.config.stereo_mode,
            dc_removal: self.config.dc_removal,
            normalize_peak: self.config.normalize_peak,
        }
    }

    fn start_voice(&mut self, note: u8, velocity: u8, remaining_seconds: f64) {
        let sample_rate = f64::from(self.config.sample_rate);
        let slot = match self.voices.iter().position(|v| !v.active) {
            Some(slot) => slot,
            None => {
                self.diagnostics.stolen_voices += 1;
                self.steal_slot()
            }
        };
        let freq = midi_to_freq(i32::from(note)).expect("validated note");
        let increment =
            phase_increment(freq, sample_rate, self.grid.len()).expect("validated note frequency");
        let id = self.next_voice_id;
        self.next_voice_id += 1;
        let options = self.table_options();
        self.voices[slot].start(
            id,
            note,
            velocity,
            freq,
            increment,
            self.initial,
            &self.weights,
            options,
        );
        self.voices[slot].owed_steps = self.config.sim_speed * remaining_seconds;
    }

    /// Deepest into release first, otherwise the oldest voice.
    fn steal_slot(&self) -> usize {
        let mut best: Option<(usize, u64, u64)> = None;
        for (slot, v) in self.voices.iter().enumerate() {
            if let Some(elapsed) = v.release_elapsed() {
                let better = match best {
                    None => true,
                    Some((_, e, id)) => elapsed > e || (elapsed == e && v.id < id),
                };
                if better {
                    best = Some((slot, elapsed, v.id));
                }
            }
        }
        if let Some((slot, _, _)) = best {
            return slot;
        }
        self.voices
            .iter()
            .enumerate()
            .min_by_key(|(_, v)| v.id)
            .map(|(slot, _)| slot)
            .expect("at least one voice slot")
    }

    fn release_note(&mut self, note: u8) {
        let sample_rate = f64::from(self.config.sample_rate);
        let target = self
            .voices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_held() && v.note == note)
            .max_by_key(|(_, v)| v.id)
            .map(|(slot, _)| slot);
        match target {
            Some(slot) => self.voices[slot].note_off(&self.envelope, sample_rate),
            None => self.diagnostics.ignored_note_offs += 1,
        }
    }

    /// `remaining_seconds` is the audio left in the current block; a voice
    /// started now owes timesteps for that much.
    fn apply_event(&mut self, event: PendingEvent, remaining_seconds: f64) {
        match event.kind {
            EventKind::On { velocity } => self.start_voice(event.note, velocity, remaining_seconds),
            EventKind::Off => self.release_note(event.note),
        }
    }

    /// Renders `num_frames` frames of stereo audio.
    pub fn process_block(&mut self, num_frames: usize) -> Result<(&[f32], &[f32]), EngineError> {
        self.process_block_observed(num_frames, &mut NoObserver)
    }

    /// [`process_block`](Self::process_block) with a hook that sees every
    /// timestep taken by every voice.
    pub fn process_block_observed<O: StepObserver>(
        &mut self,
        num_frames: usize,
        observer: &mut O,
    ) -> Result<(&[f32], &[f32]), EngineError> {
        if !(1..=MAX_BLOCK_FRAMES).contains(&num_frames) {
            return Err(EngineError::BlockSize(num_frames));
        }
        while let Some(command) = self.commands.pop() {
            self.apply_command(command);
        }

        let sample_rate = f64::from(self.config.sample_rate);
        let block_seconds = num_frames as f64 / sample_rate;
        let options = self.table_options();
        for voice in self.voices.iter_mut().filter(|v| v.active) {
            voice.advance(
                self.config.sim_speed,
                block_seconds,
                &self.propagator,
                observer,
            );
            voice.rebuild_tables(&self.weights, options);
        }

        self.pending.sort_unstable_by_key(|e| (e.offset, e.seq));
        let mix_left = &mut self.mix_left[..num_frames];
        let mix_right = &mut self.mix_right[..num_frames];
        mix_left.fill(0.0);
        mix_right.fill(0.0);

        let mut cursor = 0;
        let mut next_event = 0;
        while cursor < num_frames {
            while next_event < self.pending.len() && self.pending[next_event].offset <= cursor {
                let event = self.pending[next_event];
                self.apply_event(event, (num_frames - cursor) as f64 / sample_rate);
                next_event += 1;
            }
            let segment_end = self
                .pending
                .get(next_event)
                .map_or(num_frames, |e| e.offset.min(num_frames));
            let envelope = self.envelope;
            for voice in self.voices.iter_mut().filter(|v| v.active) {
                voice.render(
                    &envelope,
                    sample_rate,
                    &mut self.mix_left[cursor..segment_end],
                    &mut self.mix_right[cursor..segment_end],
                );
            }
            cursor = segment_end;
        }

        self.pending.drain(..next_event);
        for event in self.pending.iter_mut() {
            event.offset -= num_frames;
        }

        let gain = self.config.master_gain;
        for (out, mix) in self.out_left[..num_frames]
            .iter_mut()
            .zip(&self.mix_left[..num_frames])
        {
            *out = (mix * gain) as f32;
        }
        for (out, mix) in self.out_right[..num_frames]
            .iter_mut()
            .zip(&self.mix_right[..num_frames])
        {
            *out = (mix * gain) as f32;
        }
        self.publish_snapshot();
        Ok((&self.out_left[..num_frames], &self.out_right[..num_frames]))
    }

    fn publish_snapshot(&mut self) {
        let Ok(mut frame) = self.snapshot.try_lock() else {
            self.diagnostics.skipped_snapshots += 1;
            return;
        };
        frame.potential.copy_from_slice(self.potential.values());
        match self.select(VoiceSelector::MostRecent) {
            Some(slot) => {
                let voice = &self.voices[slot];
                voice.psi.density_into(&mut frame.density);
                frame.voice_id = Some(voice.id);
                frame.steps = voice.steps_taken;
            }
            None => {
                frame.density.copy_from_slice(&self.preview_density);
                frame.voice_id = None;
                frame.steps = 0;
            }
        }
    }

    fn select(&self, selector: VoiceSelector) -> Option<usize> {
        let active = self.voices.iter().enumerate().filter(|(_, v)| v.active);
        match selector {
            VoiceSelector::MostRecent => active.max_by_key(|(_, v)| v.id).map(|(s, _)| s),
            VoiceSelector::Id(id) => active.filter(|(_, v)| v.id == id).map(|(s, _)| s).next(),
            VoiceSelector::Note(note) => active
                .filter(|(_, v)| v.note == note)
                .max_by_key(|(_, v)| v.id)
                .map(|(s, _)| s),
        }
    }

    /// Density and potential of the selected voice, or the initial-state
    /// preview when no voice matches.
    pub fn visual_frame(&self, selector: VoiceSelector) -> VisualFrame {
        match self.select(selector) {
            Some(slot) => {
                let voice = &self.voices[slot];
                VisualFrame {
                    density: voice.psi.probability_density(),
                    potential: self.potential.values().to_vec(),
                    voice_id: Some(voice.id),
                    steps: voice.steps_taken,
                }
            }
            None => VisualFrame {
                density: self.preview_density.clone(),
                potential: self.potential.values().to_vec(),
                voice_id: None,
                steps: 0,
            },
        }
    }

    /// Current wave function of the selected voice.
    pub fn voice_state(&self, selector: VoiceSelector) -> Option<&WaveFunction> {
        self.select(selector).map(|slot| &self.voices[slot].psi)
    }
}

fn potential_params_of(kind: &PotentialKind) -> [f64; 4] {
    use std::f64::consts::PI;
    match *kind {
        PotentialKind::Free => [0.0, 1.0, PI, 1.5 * PI],
        PotentialKind::Harmonic { strength, center } => [1.0, strength, center, 1.5 * PI],
        PotentialKind::Barrier {
            height,
            left,
            right,
        } => [2.0, height, left, right],
        PotentialKind::Well { depth, left, right } => [3.0, depth, left, right],
        PotentialKind::Custom { .. } => [4.0, 1.0, PI, 1.5 * PI],
    }
}

fn potential_from_params(params: [f64; 4]) -> Option<PotentialKind> {
    let [kind, p1, p2, p3] = params;
    match kind as u32 {
        0 => Some(PotentialKind::Free),
        1 => Some(PotentialKind::Harmonic {
            strength: p1,
            center: p2,
        }),
        2 => Some(PotentialKind::Barrier {
            height: p1,
            left: p2,
            right: p3,
        }),
        3 => Some(PotentialKind::Well {
            depth: p1,
            left: p2,
            right: p3,
        }),
        _ => None,
    }
}
