use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::AliasResult;
use crate::{Error, Result};

/// Complex amplitude of one tone: `magnitude * cos(2 pi f k + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phasor {
    pub magnitude: f64,
    /// Radians in (-pi, pi].
    pub phase: f64,
}

impl Phasor {
    pub fn new(magnitude: f64, phase: f64) -> Self {
        Self { magnitude, phase }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let mut phase = z.arg();
        if phase <= -PI {
            phase += TAU;
        }
        Self { magnitude: z.norm(), phase }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Subtracts the record mean (the unmodulated component).
pub fn remove_dc(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Domain("remove_dc on an empty record".into()));
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    Ok(samples.iter().map(|s| s - mean).collect())
}

/// Least-squares fit of `a cos(2 pi f k) + b sin(2 pi f k) + c` at a known
/// normalized frequency. Returns `sqrt(a^2 + b^2)` and `atan2(-b, a)`.
pub fn estimate_tone(samples: &[f64], f_norm: f64) -> Result<Phasor> {
    if !(f_norm > 0.0 && f_norm < 0.5) {
        return Err(Error::Domain(format!("normalized frequency {f_norm} outside (0, 0.5)")));
    }
    if samples.len() < 8 {
        return Err(Error::Domain(format!("{} samples, need at least 8", samples.len())));
    }
    let n = samples.len();
    let design = DMatrix::from_fn(n, 3, |k, col| {
        let th = TAU * (f_norm * k as f64).fract();
        match col {
            0 => th.cos(),
            1 => th.sin(),
            _ => 1.0,
        }
    });
    let y = DVector::from_column_slice(samples);
    let qr = design.qr();
    let qty = qr.q().transpose() * y;
    let x = qr
        .r()
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Domain("tone fit is rank deficient".into()))?;
    Ok(Phasor::from_complex(Complex64::new(x[0], -x[1])))
}

/// Undoes the phase reversal of even-zone aliases.
pub fn correct_phase(p: Phasor, a: &AliasResult) -> Phasor {
    if a.flipped && p.phase != PI {
        Phasor { magnitude: p.magnitude, phase: -p.phase }
    } else {
        p
    }
}
