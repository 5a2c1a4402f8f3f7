//! Two-port sweep engine: test-set signal flow, four receiver branches and
//! raw (uncalibrated) S-parameter assembly.

mod engine;
mod instrument;

pub use engine::{
    guard_detune, measure_point, raw_sparams, run_sweep, run_sweep_on_grid, DrivePort, PointDiagnostics,
    PointMeasurement, RawSweep, SweepConfig,
};
pub use instrument::{BranchTracking, InstrumentModel, TestSetModel, MEAS_REFL, MEAS_TRANS, REF1, REF2};
