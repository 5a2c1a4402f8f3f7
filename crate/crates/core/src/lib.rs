//! Simulation and analysis library for a photonic vector network analyzer.
//!
//! The instrument stimulates a two-port object under test with a swept
//! single tone, undersamples the reference and response waves with an
//! optical pulse train (one electro-optic modulator plus optical intensity
//! digitizer per receiver branch) and recovers scattering parameters in the
//! digital domain.
//!
//! Module map:
//!
//! * [`model`] - frequency grids, S-parameters, object-under-test models, Touchstone I/O
//! * [`photonic`] - pulse train, modulator and digitizer models; fast and dense sampling paths
//! * [`dsp`] - alias mapping, phase-reversal correction, tone estimation, spectra
//! * [`sweep`] - test set, instrument and two-port sweep engine
//! * [`calibration`] - 12-term error model and SOLT calibration
//! * [`analysis`] - VSWR, group delay, band parameters, compression and dynamic-range studies

pub mod analysis;
pub mod calibration;
pub mod dsp;
mod error;
pub mod model;
pub mod photonic;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
