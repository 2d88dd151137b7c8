//! Continuous wavelets on the two-sphere: admissibility, frame spectra, voice
//! transforms and asymptotic checks.

pub mod admissibility;
pub mod asymptotics;
pub mod cli;
pub mod config;
pub mod error;
pub mod expr;
pub mod frame;
pub mod harmonic;
pub mod specfun;
pub mod sphere;
pub mod stereo;
pub mod voice;
pub mod wavelet;

pub use error::{Error, Result};
