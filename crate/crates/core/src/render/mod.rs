//! Offline rendering: a note list in, a WAV file (and optionally a density
//! dump) out.
//!
//! The engine runs in fixed 512-frame blocks. Note boundaries are rounded to
//! the nearest sample and injected at their offset inside the block, so the
//! result does not depend on the block size. Output is a pure function of
//! the config.

mod config;
pub mod dump;
pub mod wav;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{parse_config, DumpConfig, NoteEvent, RenderConfig};
pub use dump::{read_dump, DumpRow, DumpWriter, POTENTIAL_ROW};
pub use wav::{quantize_pcm16, write_wav, SampleFormat, WavSpec};

use crate::engine::{Engine, EngineError, StepObserver};
use crate::sim::{Grid, Potential, Propagator, WaveFunction};

pub const BLOCK_FRAMES: usize = 512;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Validation(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl RenderError {
    /// Process exit status: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RenderError::Io { .. } => 2,
            _ => 1,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        RenderError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RenderConfig, RenderError> {
    let text = std::fs::read_to_string(path).map_err(|e| RenderError::io(path, e))?;
    parse_config(&text)
}

/// Rendered stereo audio.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub sample_rate: u32,
    pub left: Vec<f32>,
    pub right: Vec<f32>,
}

impl Rendered {
    pub fn frames(&self) -> usize {
        self.left.len()
    }

    pub fn interleaved(&self) -> Vec<f32> {
        self.left
            .iter()
            .zip(&self.right)
            .flat_map(|(l, r)| [*l, *r])
            .collect()
    }

    pub fn to_wav(&self, format: SampleFormat) -> Vec<u8> {
        let spec = WavSpec {
            channels: 2,
            sample_rate: self.sample_rate,
            format,
        };
        write_wav(&spec, &self.interleaved())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ScheduledEvent {
    frame: usize,
    /// Orders events sharing a frame: releases of earlier notes, then
    /// note-ons, then releases of zero-length notes starting at that frame.
    class: u8,
    note: u8,
    velocity: Option<u8>,
}

fn schedule(config: &RenderConfig) -> Vec<ScheduledEvent> {
    let sr = f64::from(config.engine.sample_rate);
    let to_frame = |seconds: f64| (seconds * sr).round() as usize;
    let mut events = Vec::with_capacity(2 * config.notes.len());
    for note in &config.notes {
        let on = to_frame(note.start);
        let off = to_frame(note.end());
        events.push(ScheduledEvent {
            frame: on,
            class: 1,
            note: note.note,
            velocity: Some(note.velocity),
        });
        events.push(ScheduledEvent {
            frame: off,
            class: if off == on { 2 } else { 0 },
            note: note.note,
            velocity: None,
        });
    }
    // stable sort keeps config order among equal keys
    events.sort_by_key(|e| (e.frame, e.class));
    events
}

/// Renders the audio, reporting every simulation step to `observer`.
pub fn render_audio<O: StepObserver>(
    config: &RenderConfig,
    observer: &mut O,
) -> Result<Rendered, RenderError> {
    let mut engine = Engine::from_settings(&config.settings())?;
    let total = config.total_frames();
    let events = schedule(config);
    let mut left = Vec::with_capacity(total);
    let mut right = Vec::with_capacity(total);
    let mut next = 0;
    let mut block_start = 0;
    while block_start < total {
        let frames = BLOCK_FRAMES.min(total - block_start);
        while next < events.len() && events[next].frame < block_start + frames {
            let event = events[next];
            let offset = event.frame - block_start;
            match event.velocity {
                Some(velocity) => engine.note_on(event.note, velocity, offset)?,
                None => engine.note_off(event.note, offset)?,
            }
            next += 1;
        }
        let (l, r) = engine.process_block_observed(frames, observer)?;
        left.extend_from_slice(l);
        right.extend_from_slice(r);
        block_start += frames;
    }
    Ok(Rendered {
        sample_rate: config.engine.sample_rate,
        left,
        right,
    })
}

/// Renders the audio and, if given, dumps the density of the first voice
/// (id 0) at every `every_steps`-th timestep it takes.
pub fn render_with_dump<W: Write>(
    config: &RenderConfig,
    dump: Option<(&mut DumpWriter<W>, u64)>,
) -> Result<(Rendered, io::Result<()>), RenderError> {
    let Some((writer, every)) = dump else {
        return Ok((
            render_audio(config, &mut crate::engine::NoObserver)?,
            Ok(()),
        ));
    };
    let grid = Grid::new(config.engine.n).map_err(EngineError::from)?;
    let potential = Potential::new(grid, config.potential.clone()).map_err(EngineError::from)?;
    let mut status = writer.write_potential(potential.values());
    let mut density = vec![0.0; grid.len()];
    let every = every.max(1);
    let mut observer = |voice_id: u64, step: u64, psi: &WaveFunction| {
        if voice_id == 0 && step.is_multiple_of(every) && status.is_ok() {
            psi.density_into(&mut density);
            status = writer.write_row(step as i64, &density);
        }
    };
    let rendered = render_audio(config, &mut observer)?;
    Ok((rendered, status))
}

fn create(path: &Path) -> Result<BufWriter<File>, RenderError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| RenderError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderSummary {
    pub frames: usize,
    pub out_path: PathBuf,
    pub dump_rows: Option<usize>,
}

/// Renders `config` to its `out_path`, writing the dump if one is configured.
pub fn render(config: &RenderConfig) -> Result<RenderSummary, RenderError> {
    let out_path = PathBuf::from(&config.out_path);
    let (rendered, dump_rows) = match &config.dump {
        None => (render_audio(config, &mut crate::engine::NoObserver)?, None),
        Some(dump) => {
            let path = Path::new(&dump.path);
            let mut writer = DumpWriter::new(create(path)?);
            let (rendered, status) =
                render_with_dump(config, Some((&mut writer, dump.every_steps)))?;
            status.map_err(|e| RenderError::io(path, e))?;
            let rows = writer.rows();
            writer.finish().map_err(|e| RenderError::io(path, e))?;
            (rendered, Some(rows))
        }
    };
    std::fs::write(&out_path, rendered.to_wav(config.format))
        .map_err(|e| RenderError::io(&out_path, e))?;
    Ok(RenderSummary {
        frames: rendered.frames(),
        out_path,
        dump_rows,
    })
}

/// Evolves the configured initial state for `steps` timesteps with no
/// audio, writing the potential and then the density after every
/// `every_steps`-th step. Returns the number of rows written.
pub fn simulate<W: Write>(
    config: &RenderConfig,
    steps: u64,
    every_steps: u64,
    writer: &mut DumpWriter<W>,
) -> Result<usize, RenderError> {
    if every_steps == 0 {
        return Err(RenderError::Validation(
            "every_steps must be at least 1".to_string(),
        ));
    }
    let grid = Grid::new(config.engine.n).map_err(EngineError::from)?;
    let potential = Potential::new(grid, config.potential.clone()).map_err(EngineError::from)?;
    let propagator = Propagator::new(&potential, config.engine.dt).map_err(EngineError::from)?;
    let mut psi = WaveFunction::gaussian(grid, config.initial).map_err(EngineError::from)?;
    let mut density = vec![0.0; grid.len()];
    let io_err = |e| RenderError::Io {
        path: PathBuf::from("<dump>"),
        source: e,
    };
    writer.write_potential(potential.values()).map_err(io_err)?;
    for step in 1..=steps {
        propagator.step(&mut psi).map_err(EngineError::from)?;
        if step.is_multiple_of(every_steps) {
            psi.density_into(&mut density);
            writer.write_row(step as i64, &density).map_err(io_err)?;
        }
    }
    Ok(writer.rows())
}

/// [`simulate`] writing to a file.
pub fn simulate_to_path(
    config: &RenderConfig,
    steps: u64,
    every_steps: u64,
    path: &Path,
) -> Result<usize, RenderError> {
    let mut writer = DumpWriter::new(create(path)?);
    let rows = simulate(config, steps, every_steps, &mut writer).map_err(|e| match e {
        RenderError::Io { source, .. } => RenderError::io(path, source),
        other => other,
    })?;
    writer.finish().map_err(|e| RenderError::io(path, e))?;
    Ok(rows)
}
