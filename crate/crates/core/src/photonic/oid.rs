use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::{Error, Result};

/// Optical intensity digitizer: photodiode and ADC with a combined causal
/// second-order low-pass response `h_E(t) = a^2 t exp(-a t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OidModel {
    /// Combined PD + ADC 3 dB bandwidth in Hz.
    pub bw3db: f64,
    /// Electrical output per optical power, V/W.
    pub responsivity: f64,
    pub adc_bits: u32,
    /// ADC full-scale voltage; `None` sizes it to twice the zero-drive level.
    pub adc_fullscale: Option<f64>,
    /// Additive Gaussian noise per sample, V rms.
    pub noise_sigma: f64,
    /// Cubic photodiode compression coefficient (0 = linear).
    pub pd_nonlin: f64,
    /// Sampling instant after each optical pulse, s.
    pub delay: f64,
}

impl OidModel {
    /// Linear, noiseless 16-bit digitizer sampled at the peak of its
    /// impulse response.
    pub fn new(bw3db: f64, responsivity: f64) -> Result<Self> {
        let mut oid = Self {
            bw3db,
            responsivity,
            adc_bits: 16,
            adc_fullscale: None,
            noise_sigma: 0.0,
            pd_nonlin: 0.0,
            delay: 0.0,
        };
        oid.delay = oid.peak_time();
        oid.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.bw3db > 0.0 && self.responsivity > 0.0) {
            return Err(Error::Model("OID needs bw3db > 0 and responsivity > 0".into()));
        }
        if !(8..=24).contains(&self.adc_bits) {
            return Err(Error::Model(format!("adc_bits {} outside 8..=24", self.adc_bits)));
        }
        if !(self.noise_sigma >= 0.0) || self.delay < 0.0 {
            return Err(Error::Model("noise_sigma and delay must be >= 0".into()));
        }
        if matches!(self.adc_fullscale, Some(fs) if !(fs > 0.0)) {
            return Err(Error::Model("adc_fullscale must be > 0".into()));
        }
        Ok(self)
    }

    /// Pole frequency of the double real pole giving `bw3db` at -3 dB.
    pub fn pole_hz(&self) -> f64 {
        self.bw3db / (std::f64::consts::SQRT_2 - 1.0).sqrt()
    }

    fn rate(&self) -> f64 {
        TAU * self.pole_hz()
    }

    pub fn peak_time(&self) -> f64 {
        1.0 / self.rate()
    }

    /// `H_E(f) = 1 / (1 + j f / f_p)^2`, unity at DC.
    pub fn response(&self, f: f64) -> Complex64 {
        let d = Complex64::new(1.0, f / self.pole_hz());
        1.0 / (d * d)
    }

    pub fn impulse(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let a = self.rate();
        a * a * t * (-a * t).exp()
    }

    /// Number of repetition periods after which `h_E` is below `1e-18` of
    /// its peak.
    pub fn memory_periods(&self, f_rep: f64) -> usize {
        let a = self.rate();
        let peak = self.impulse(self.peak_time());
        let t_rep = 1.0 / f_rep;
        let mut l = 0usize;
        // h is decreasing beyond its peak
        while l < 100_000 {
            let t = l as f64 * t_rep + self.delay;
            if t > 1.0 / a && self.impulse(t) < 1e-18 * peak {
                break;
            }
            l += 1;
        }
        l
    }

    /// `sum_l h_E(l T_s + d_E) exp(-j 2 pi f l T_s)`: the digitizer seen at
    /// the pulse rate, summed directly in the time domain. Equal to
    /// [`interference_factor`] by Poisson summation.
    pub fn aliased_response(&self, f_rep: f64, f: f64) -> Complex64 {
        let t_rep = 1.0 / f_rep;
        let frac = f / f_rep - (f / f_rep).floor();
        let l_max = self.memory_periods(f_rep);
        (0..=l_max)
            .rev()
            .map(|l| Complex64::from_polar(self.impulse(l as f64 * t_rep + self.delay), -TAU * ((frac * l as f64).fract())))
            .sum()
    }
}

/// Inter-pulse interference factor
/// `R(f) = f_rep * sum_n H_E(f + n f_rep) exp(j 2 pi (f + n f_rep) d_E)`,
/// with `d_E` the sampling instant after each pulse. Terms are kept while
/// `|H_E| >= 1e-8` of its peak; the kept set is chosen on absolute
/// frequency so that `R(f + f_rep) = R(f)`.
pub fn interference_factor(oid: &OidModel, f_rep: f64, f: f64) -> Complex64 {
    let fp = oid.pole_hz();
    let nu_max = fp * (1e8f64 - 1.0).sqrt();
    let n_lo = ((-nu_max - f) / f_rep).ceil() as i64;
    let n_hi = ((nu_max - f) / f_rep).floor() as i64;

    let phasor = |n: i64| {
        let cyc = (f + n as f64 * f_rep) * oid.delay;
        Complex64::from_polar(1.0, TAU * (cyc - cyc.floor()))
    };
    // sum each tail inward so small terms accumulate first; the delay
    // phasor is rotated incrementally and resynchronized every 256 terms
    let n0 = (-f / f_rep).round() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (from, to, step) in [(n_hi, n0, -1i64), (n_lo, n0 - 1, 1i64)] {
        if (step < 0 && from < to) || (step > 0 && from > to) {
            continue;
        }
        let rot = Complex64::from_polar(1.0, TAU * step as f64 * f_rep * oid.delay);
        let mut n = from;
        let mut ph = phasor(n);
        let mut k = 0u32;
        loop {
            let d = Complex64::new(1.0, (f + n as f64 * f_rep) / fp);
            acc += ph / (d * d);
            if n == to {
                break;
            }
            n += step;
            k += 1;
            ph = if k % 256 == 0 { phasor(n) } else { ph * rot };
        }
    }
    acc * f_rep
}
