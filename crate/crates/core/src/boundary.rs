//! Handle-based API shared by the CLI and foreign hosts (browser, plugins).
//!
//! The Rust functions here are the contract; [`ffi`] exposes the same calls
//! with a C ABI under the same names.

use serde::Serialize;
use thiserror::Error;

use crate::engine::{param_specs, Engine, EngineError, ParamSpec, SynthSettings, VoiceSelector};

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("invalid config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Argument(String),
}

/// Owned engine behind the boundary.
pub struct EngineHandle {
    engine: Engine,
    interleaved: Vec<f32>,
}

impl EngineHandle {
    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn engine_mut(&mut self) -> &mut Engine {
        &mut self.engine
    }
}

/// Creates an engine from a [`SynthSettings`] JSON document. Missing fields
/// take their defaults, so `"{}"` is a valid config.
pub fn engine_create(config_json: &str) -> Result<EngineHandle, BoundaryError> {
    let settings: SynthSettings = serde_json::from_str(config_json)?;
    let engine = Engine::from_settings(&settings)?;
    Ok(EngineHandle {
        engine,
        interleaved: vec![0.0; 2 * crate::engine::MAX_BLOCK_FRAMES],
    })
}

fn note_arg(value: i32, what: &str) -> Result<u8, BoundaryError> {
    u8::try_from(value)
        .ok()
        .filter(|v| *v <= 127)
        .ok_or_else(|| BoundaryError::Argument(format!("{what} {value} is outside [0, 127]")))
}

pub fn engine_note_on(
    handle: &mut EngineHandle,
    note: i32,
    velocity: i32,
) -> Result<(), BoundaryError> {
    let note = note_arg(note, "note")?;
    let velocity = note_arg(velocity, "velocity")?;
    handle.engine.note_on(note, velocity, 0)?;
    Ok(())
}

pub fn engine_note_off(handle: &mut EngineHandle, note: i32) -> Result<(), BoundaryError> {
    let note = note_arg(note, "note")?;
    handle.engine.note_off(note, 0)?;
    Ok(())
}

pub fn engine_set_param(
    handle: &mut EngineHandle,
    param_id: &str,
    value: f32,
) -> Result<(), BoundaryError> {
    handle
        .engine
        .set_parameter_by_name(param_id, f64::from(value))?;
    Ok(())
}

/// Renders `num_frames` frames as interleaved `(left, right)` pairs. The
/// returned slice borrows a buffer owned by the handle.
pub fn engine_process(
    handle: &mut EngineHandle,
    num_frames: usize,
) -> Result<&[f32], BoundaryError> {
    let (left, right) = handle.engine.process_block(num_frames)?;
    let out = &mut handle.interleaved[..2 * num_frames];
    for (frame, (l, r)) in out.chunks_exact_mut(2).zip(left.iter().zip(right)) {
        frame[0] = *l;
        frame[1] = *r;
    }
    Ok(&handle.interleaved[..2 * num_frames])
}

/// `(density, potential)` of the most recent voice, or the initial-state
/// preview when nothing is playing.
pub fn engine_visual_frame(handle: &EngineHandle) -> (Vec<f64>, Vec<f64>) {
    let frame = handle.engine.visual_frame(VoiceSelector::MostRecent);
    (frame.density, frame.potential)
}

pub fn engine_destroy(handle: EngineHandle) {
    drop(handle);
}

#[derive(Serialize)]
struct ParamTable {
    params: Vec<ParamSpec>,
}

/// Published parameter bounds as JSON, for UIs that mirror them.
pub fn engine_param_specs_json() -> String {
    serde_json::to_string(&ParamTable {
        params: param_specs(),
    })
    .expect("param table serializes")
}

/// C ABI over the boundary functions. Status codes are `0` on success and
/// `-1` on any error; pointers returned by `engine_create` must be released
/// with `engine_destroy`.
pub mod ffi {
    use std::ffi::{c_char, CStr};
    use std::ptr;

    use super::EngineHandle;

    /// # Safety
    /// `config_json` must be null or a valid NUL-terminated string.
    #[no_mangle]
    pub unsafe extern "C" fn engine_create(config_json: *const c_char) -> *mut EngineHandle {
        if config_json.is_null() {
            return ptr::null_mut();
        }
        let Ok(text) = CStr::from_ptr(config_json).to_str() else {
            return ptr::null_mut();
        };
        match super::engine_create(text) {
            Ok(handle) => Box::into_raw(Box::new(handle)),
            Err(_) => ptr::null_mut(),
        }
    }

    fn status<T, E>(result: Result<T, E>) -> i32 {
        if result.is_ok() {
            0
        } else {
            -1
        }
    }

    /// # Safety
    /// `handle` must come from [`engine_create`] and not be destroyed.
    #[no_mangle]
    pub unsafe extern "C" fn engine_note_on(
        handle: *mut EngineHandle,
        note: i32,
        velocity: i32,
    ) -> i32 {
        match handle.as_mut() {
            Some(h) => status(super::engine_note_on(h, note, velocity)),
            None => -1,
        }
    }

    /// # Safety
    /// `handle` must come from [`engine_create`] and not be destroyed.
    #[no_mangle]
    pub unsafe extern "C" fn engine_note_off(handle: *mut EngineHandle, note: i32) -> i32 {
        match handle.as_mut() {
            Some(h) => status(super::engine_note_off(h, note)),
            None => -1,
        }
    }

    /// # Safety
    /// `handle` must come from [`engine_create`]; `param_id` must be a valid
    /// NUL-terminated string.
    #[no_mangle]
    pub unsafe extern "C" fn engine_set_param(
        handle: *mut EngineHandle,
        param_id: *const c_char,
        value: f32,
    ) -> i32 {
        let (Some(h), false) = (handle.as_mut(), param_id.is_null()) else {
            return -1;
        };
        match CStr::from_ptr(param_id).to_str() {
            Ok(id) => status(super::engine_set_param(h, id, value)),
            Err(_) => -1,
        }
    }

    /// Writes `2 * num_frames` interleaved samples to `out`.
    ///
    /// # Safety
    /// `handle` must come from [`engine_create`]; `out` must be valid for
    /// `2 * num_frames` writes.
    #[no_mangle]
    pub unsafe extern "C" fn engine_process(
        handle: *mut EngineHandle,
        num_frames: u32,
        out: *mut f32,
    ) -> i32 {
        let (Some(h), false) = (handle.as_mut(), out.is_null()) else {
            return -1;
        };
        match super::engine_process(h, num_frames as usize) {
            Ok(samples) => {
                ptr::copy_nonoverlapping(samples.as_ptr(), out, samples.len());
                0
            }
            Err(_) => -1,
        }
    }

    /// Grid size `n` of the engine, or 0 for a null handle.
    ///
    /// # Safety
    /// `handle` must be null or come from [`engine_create`].
    #[no_mangle]
    pub unsafe extern "C" fn engine_grid_size(handle: *const EngineHandle) -> u32 {
        handle.as_ref().map_or(0, |h| h.engine.grid().len() as u32)
    }

    /// Copies the current visual frame into two caller buffers of length `n`.
    ///
    /// # Safety
    /// `handle` must come from [`engine_create`]; both output pointers must
    /// be valid for `n` writes.
    #[no_mangle]
    pub unsafe extern "C" fn engine_visual_frame(
        handle: *const EngineHandle,
        density_out: *mut f64,
        potential_out: *mut f64,
        n: usize,
    ) -> i32 {
        let Some(h) = handle.as_ref() else {
            return -1;
        };
        if density_out.is_null() || potential_out.is_null() || n != h.engine.grid().len() {
            return -1;
        }
        let (density, potential) = super::engine_visual_frame(h);
        ptr::copy_nonoverlapping(density.as_ptr(), density_out, n);
        ptr::copy_nonoverlapping(potential.as_ptr(), potential_out, n);
        0
    }

    /// # Safety
    /// `handle` must be null or come from [`engine_create`], and must not be
    /// used afterwards.
    #[no_mangle]
    pub unsafe extern "C" fn engine_destroy(handle: *mut EngineHandle) {
        if !handle.is_null() {
            drop(Box::from_raw(handle));
        }
    }
}
