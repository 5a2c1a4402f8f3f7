//! Undersampling signal processing: Nyquist-zone alias mapping, phase
//! reversal correction, known-frequency tone estimation and periodogram
//! noise floors.

mod alias;
mod spectrum;
mod tone;

pub use alias::{alias_map, AliasResult};
pub use spectrum::{dynamic_range, power_spectrum, SpectrumEstimate};
pub use tone::{correct_phase, estimate_tone, remove_dc, Phasor};
