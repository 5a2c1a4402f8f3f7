//! One receiver branch: optical pulse train, Mach-Zehnder modulator and
//! optical intensity digitizer (photodiode + ADC).
//!
//! Two sampling paths are provided. [`sample_branch`] evaluates each sample
//! analytically through the equivalent channel response; it is what the
//! sweep engine uses. [`simulate_dense_oracle`] builds the optical waveform
//! on a dense time grid around every pulse and convolves with the digitizer
//! impulse response, and exists to check the fast path.

mod bessel;
mod branch;
mod dense;
mod eom;
mod oid;
mod pulse;

pub use bessel::{bessel_j, bessel_j_all};
pub use branch::{sample_branch, sample_branch_with_rng, BranchModel, BranchRecord, HarmonicResponse};
pub use dense::{dense_waveform, simulate_dense_oracle};
pub use eom::{mzm_transmission, EomModel};
pub use oid::{interference_factor, OidModel};
pub use pulse::{pulse_spectrum, PulseTrain};
