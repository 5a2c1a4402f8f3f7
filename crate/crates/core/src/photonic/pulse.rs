use crate::{Error, Result};

/// Mode-locked laser pulse train feeding one branch. Pulses are Gaussian in
/// power with the given full width at half maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    /// Average optical power in W.
    pub p_avg: f64,
    /// Repetition rate in Hz.
    pub f_rep: f64,
    /// Temporal FWHM of one pulse in s.
    pub pulse_fwhm: f64,
}

impl PulseTrain {
    pub fn new(p_avg: f64, f_rep: f64, pulse_fwhm: f64) -> Result<Self> {
        Self { p_avg, f_rep, pulse_fwhm }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.p_avg > 0.0 && self.f_rep > 0.0 && self.pulse_fwhm > 0.0) {
            return Err(Error::Model("pulse train needs p_avg, f_rep, pulse_fwhm > 0".into()));
        }
        if self.pulse_fwhm * self.f_rep >= 1e-3 {
            return Err(Error::Model(format!(
                "pulse width {} s is not short against the {} s period",
                self.pulse_fwhm,
                1.0 / self.f_rep
            )));
        }
        Ok(self)
    }

    pub fn period(&self) -> f64 {
        1.0 / self.f_rep
    }

    /// Standard deviation of the Gaussian power envelope.
    pub fn sigma(&self) -> f64 {
        self.pulse_fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    /// Frequency at which the pulse spectrum has fallen by 3 dB
    /// (`|P_s|^2 = 1/2`), `sqrt(2) ln 2 / (pi * fwhm)`: 624 GHz for 500 fs.
    pub fn bandwidth_3db(&self) -> f64 {
        std::f64::consts::SQRT_2 * std::f64::consts::LN_2 / (std::f64::consts::PI * self.pulse_fwhm)
    }
}

/// Fourier transform of one pulse's power shape, normalized to 1 at DC:
/// `exp(-pi^2 f^2 fwhm^2 / (4 ln 2))`.
pub fn pulse_spectrum(p: &PulseTrain, f: f64) -> f64 {
    let a = std::f64::consts::PI * f * p.pulse_fwhm;
    (-a * a / (4.0 * std::f64::consts::LN_2)).exp()
}
