//! Derived measurements and the figure-level studies: VSWR, group delay,
//! band parameters, compression, system response, phase reversal and
//! noise floor versus FFT length.

mod band;
mod compression;
mod noise;
mod response;

pub use band::{band_params, group_delay, unwrap_phase, vswr, BandSummary};
pub use compression::{
    compression_root, compression_sweep, theoretical_compression, tune_pd_nonlin, CompressionResult, PD_NONLIN_MEASURED,
};
pub use noise::{bin_centered_tone, calibrate_noise_sigma, noise_floor_study, FloorPoint, FLOOR_TARGET_DBC};
pub use response::{phase_reversal_sweep, system_response, PhaseReversal, SystemResponse};
