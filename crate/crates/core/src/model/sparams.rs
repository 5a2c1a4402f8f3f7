use num_complex::Complex64;

use super::FrequencyGrid;
use crate::{Error, Result};

/// Two-port scattering matrix at one frequency, `[[s11, s12], [s21, s22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

impl SMatrix {
    pub fn new(s11: Complex64, s12: Complex64, s21: Complex64, s22: Complex64) -> Self {
        Self { s11, s12, s21, s22 }
    }

    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn det(&self) -> Complex64 {
        self.s11 * self.s22 - self.s12 * self.s21
    }

    pub fn max_abs_diff(&self, other: &SMatrix) -> f64 {
        [
            self.s11 - other.s11,
            self.s12 - other.s12,
            self.s21 - other.s21,
            self.s22 - other.s22,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }

    pub fn max_element_norm(&self) -> f64 {
        [self.s11, self.s12, self.s21, self.s22]
            .iter()
            .map(|s| s.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        [self.s11, self.s12, self.s21, self.s22].iter().all(|s| s.is_finite())
    }
}

/// S-parameters of a two-port over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortSParams {
    pub grid: FrequencyGrid,
    pub s11: Vec<Complex64>,
    pub s12: Vec<Complex64>,
    pub s21: Vec<Complex64>,
    pub s22: Vec<Complex64>,
}

impl TwoPortSParams {
    pub fn from_matrices(grid: FrequencyGrid, m: &[SMatrix]) -> Result<Self> {
        if m.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} matrices for {} frequencies",
                m.len(),
                grid.len()
            )));
        }
        if m.iter().any(|s| !s.is_finite()) {
            return Err(Error::Model("non-finite S-parameter".into()));
        }
        Ok(Self {
            grid,
            s11: m.iter().map(|s| s.s11).collect(),
            s12: m.iter().map(|s| s.s12).collect(),
            s21: m.iter().map(|s| s.s21).collect(),
            s22: m.iter().map(|s| s.s22).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn at(&self, i: usize) -> SMatrix {
        SMatrix::new(self.s11[i], self.s12[i], self.s21[i], self.s22[i])
    }

    pub fn matrices(&self) -> Vec<SMatrix> {
        (0..self.len()).map(|i| self.at(i)).collect()
    }

    /// Largest |S_a - S_b| over all elements and frequencies.
    pub fn max_abs_diff(&self, other: &TwoPortSParams) -> f64 {
        (0..self.len().min(other.len()))
            .map(|i| self.at(i).max_abs_diff(&other.at(i)))
            .fold(0.0, f64::max)
    }
}
