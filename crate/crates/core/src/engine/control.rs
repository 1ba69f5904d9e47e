//! Control-context handle for an engine running in an audio callback.
//!
//! Commands travel over a bounded lock-free queue that the render context
//! drains at each block start. Visual snapshots come back through a slot that
//! both sides only ever `try_lock`, so neither side waits on the other; when
//! the slot is busy the writer skips a publish and the reader keeps its last
//! copy.

use std::sync::{Arc, Mutex};

use crossbeam_queue::ArrayQueue;

use super::params::{ParamError, ParamId};
use super::EngineError;
use crate::sim::{GaussianParams, PotentialKind};

pub(crate) const QUEUE_CAPACITY: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Command {
    NoteOn { note: u8, velocity: u8 },
    NoteOff { note: u8 },
    SetParam { id: ParamId, value: f64 },
    SetPotential(PotentialKind),
    SetInitial(GaussianParams),
}

/// Snapshot of one voice's simulation for display.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VisualFrame {
    pub density: Vec<f64>,
    pub potential: Vec<f64>,
    /// Voice the density came from; `None` for the initial-state preview.
    pub voice_id: Option<u64>,
    /// Timesteps the voice has taken.
    pub steps: u64,
}

pub(crate) type SnapshotSlot = Arc<Mutex<VisualFrame>>;

/// Sends notes and parameter changes to an [`Engine`](super::Engine) owned by
/// another thread.
pub struct Controller {
    queue: Arc<ArrayQueue<Command>>,
    snapshot: SnapshotSlot,
    last_frame: VisualFrame,
}

impl Controller {
    pub(crate) fn new(queue: Arc<ArrayQueue<Command>>, snapshot: SnapshotSlot) -> Self {
        let last_frame = snapshot.lock().map(|f| f.clone()).unwrap_or_default();
        Self {
            queue,
            snapshot,
            last_frame,
        }
    }

    fn push(&self, command: Command) -> Result<(), EngineError> {
        self.queue
            .push(command)
            .map_err(|_| EngineError::EventQueueFull)
    }

    pub fn note_on(&self, note: u8, velocity: u8) -> Result<(), EngineError> {
        super::check_note(note)?;
        super::check_velocity(velocity)?;
        self.push(Command::NoteOn { note, velocity })
    }

    pub fn note_off(&self, note: u8) -> Result<(), EngineError> {
        super::check_note(note)?;
        self.push(Command::NoteOff { note })
    }

    /// Bounds are checked here; combination checks (e.g. an empty barrier
    /// interval) happen when the engine applies the change and show up in its
    /// diagnostics.
    pub fn set_param(&self, id: ParamId, value: f64) -> Result<(), EngineError> {
        id.check(value)?;
        self.push(Command::SetParam { id, value })
    }

    pub fn set_param_by_name(&self, name: &str, value: f64) -> Result<(), EngineError> {
        self.set_param(name.parse()?, value)
    }

    /// Replaces the potential in one step. Custom potentials are not accepted
    /// over the channel.
    pub fn set_potential(&self, kind: PotentialKind) -> Result<(), EngineError> {
        if matches!(kind, PotentialKind::Custom { .. }) {
            return Err(ParamError::Rejected {
                id: "potential_kind",
                value: f64::NAN,
                reason: "custom potentials cannot be sent to a running engine".into(),
            }
            .into());
        }
        kind.validate()?;
        self.push(Command::SetPotential(kind))
    }

    pub fn set_initial_state(&self, params: GaussianParams) -> Result<(), EngineError> {
        params.validate()?;
        self.push(Command::SetInitial(params))
    }

    /// Latest published snapshot, or the previous one if the engine is
    /// writing right now.
    pub fn visual_frame(&mut self) -> &VisualFrame {
        if let Ok(frame) = self.snapshot.try_lock() {
            self.last_frame.clone_from(&frame);
        }
        &self.last_frame
    }
}
