//! Frequency grids, two-port S-parameters, object-under-test models and
//! Touchstone file I/O.

mod grid;
mod out_model;
mod sparams;
pub mod touchstone;

pub use grid::FrequencyGrid;
pub use out_model::{BandpassSpec, OffsetReflect, OutModel, ReflectKind};
pub use sparams::{SMatrix, TwoPortSParams};
pub use touchstone::{parse_touchstone, write_touchstone, TouchstoneFormat};
