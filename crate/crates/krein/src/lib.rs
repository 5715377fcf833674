//! Spectral DtN maps and harmonic extension, coefficient files, the
//! invariant suite and the `krein` command line, on top of [`krein_core`].

pub mod cli;
pub mod extension;
pub mod formats;
pub mod random;
pub mod verify;

pub use krein_core;
