use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{pulse_spectrum, PulseTrain};
use crate::{Error, Result};

/// Quadrature-biased Mach-Zehnder modulator (with its cables and
/// connectors). The small-signal response is an order-`response_order`
/// Butterworth magnitude with a linear phase of `delay` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct EomModel {
    /// Half-wave voltage in V.
    pub v_pi: f64,
    /// Small-signal 3 dB bandwidth in Hz.
    pub bw3db: f64,
    pub response_order: u32,
    pub delay: f64,
}

impl EomModel {
    pub fn new(v_pi: f64, bw3db: f64, response_order: u32) -> Result<Self> {
        Self { v_pi, bw3db, response_order, delay: 0.0 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.v_pi > 0.0 && self.bw3db > 0.0) || self.response_order == 0 {
            return Err(Error::Model("EOM needs v_pi > 0, bw3db > 0, order >= 1".into()));
        }
        Ok(self)
    }

    /// Picks the bandwidth that makes the modulator-plus-pulse envelope
    /// `|H_M * P_s|` fall by `atten_db` at `f_max`.
    pub fn fitted(v_pi: f64, response_order: u32, pulses: &PulseTrain, f_max: f64, atten_db: f64) -> Result<Self> {
        let pulse_db = -20.0 * pulse_spectrum(pulses, f_max).log10();
        let excess = 10f64.powf((atten_db - pulse_db) / 10.0) - 1.0;
        if excess <= 0.0 {
            return Err(Error::Model(format!(
                "pulses alone attenuate {pulse_db} dB at {f_max} Hz, more than {atten_db} dB"
            )));
        }
        let bw3db = f_max / excess.powf(1.0 / (2.0 * response_order as f64));
        Self::new(v_pi, bw3db, response_order)
    }

    /// Small-signal frequency response `H_M(f)`.
    pub fn response(&self, f: f64) -> Complex64 {
        let x = (f / self.bw3db).powi(2 * self.response_order as i32);
        Complex64::from_polar(1.0 / (1.0 + x).sqrt(), -TAU * f * self.delay)
    }
}

/// Optical power transmission of the quadrature-biased MZM at drive `v`:
/// `0.5 * (1 - sin(pi v / v_pi))`.
pub fn mzm_transmission(drive_voltage: f64, v_pi: f64) -> f64 {
    0.5 * (1.0 - (PI * drive_voltage / v_pi).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonic::bessel_j;

    #[test]
    fn transfer_extremes() {
        assert_eq!(mzm_transmission(0.0, 5.4), 0.5);
        assert!(mzm_transmission(2.7, 5.4).abs() < 1e-15);
        assert!((mzm_transmission(-2.7, 5.4) - 1.0).abs() < 1e-15);
        for i in -100..100 {
            let t = mzm_transmission(i as f64 * 0.37, 5.4);
            assert!((0.0..=1.0).contains(&t));
        }
    }

    #[test]
    fn three_db_point() {
        let eom = EomModel::new(5.4, 20e9, 1).unwrap();
        let r = eom.response(20e9).norm() / eom.response(0.0).norm();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn fundamental_is_bessel_j1() {
        // numerical Fourier coefficient of the transmitted intensity for a
        // sinusoidal drive, compared with J1(pi V / V_pi)
        let v_pi = 5.4;
        for &v in &[0.05, 0.52, 1.3, 3.0] {
            let n = 1024;
            let mut c1 = 0.0;
            for k in 0..n {
                let th = TAU * k as f64 / n as f64;
                c1 += mzm_transmission(v * th.cos(), v_pi) * th.cos();
            }
            c1 *= 2.0 / n as f64;
            let j1 = bessel_j(1, PI * v / v_pi);
            assert!((c1.abs() - j1).abs() < 1e-9, "v={v}: {c1} vs {j1}");
            assert!(c1 < 0.0);
        }
    }

    #[test]
    fn fitted_bandwidth_hits_attenuation() {
        let p = PulseTrain::new(5e-3, 36.456e6, 500e-15).unwrap();
        let eom = EomModel::fitted(5.4, 1, &p, 40e9, 7.5).unwrap();
        let total = eom.response(40e9).norm() * pulse_spectrum(&p, 40e9);
        assert!((-20.0 * total.log10() - 7.5).abs() < 1e-9);
        assert!(eom.bw3db > 18e9 && eom.bw3db < 19e9, "{}", eom.bw3db);
    }
}
