//! Twelve-term (SOLT) error model: per-frequency error terms, solvers from
//! standard measurements, correction of raw sweeps and a text file format.

mod solve;
mod terms;

pub use solve::{apply_correction, correct_point, run_solt, solve_one_port, solve_transmission, OnePortTerms, StandardsKit};
pub use terms::{parse_error_terms, write_error_terms, DirectionTerms, ErrorTerms12};
