//! Polyphonic synthesizer driven by a split-step simulation of the 1-D
//! time-dependent Schrödinger equation.
//!
//! Each note starts its own simulation; the evolving probability density is
//! looped as a wavetable at the note's pitch.

pub mod boundary;
pub mod engine;
pub mod fft;
pub mod render;
pub mod sim;
pub mod sonify;
