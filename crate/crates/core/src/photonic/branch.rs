use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{bessel_j_all, pulse_spectrum, EomModel, OidModel, PulseTrain};
use crate::{Error, Result};

/// Relative size below which odd harmonics of the modulator output are dropped.
const HARMONIC_CUTOFF: f64 = 1e-13;
const MAX_HARMONIC: usize = 41;

/// One receiver branch: pulse train, modulator and digitizer in cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchModel {
    pub pulses: PulseTrain,
    pub eom: EomModel,
    pub oid: OidModel,
}

impl BranchModel {
    pub fn new(pulses: PulseTrain, eom: EomModel, oid: OidModel) -> Result<Self> {
        Ok(Self { pulses: pulses.validated()?, eom: eom.validated()?, oid: oid.validated()? })
    }

    /// Same branch clocked at a different repetition rate.
    pub fn with_f_rep(&self, f_rep: f64) -> Self {
        let mut b = self.clone();
        b.pulses.f_rep = f_rep;
        b
    }

    /// Equivalent channel response `H_A(f) = 0.5 P_A rho T_s H_M(f) P_s(f) R(f)`:
    /// the sample voltage produced per unit of modulator transmission at `f`.
    /// `T_s` converts the unit-DC pulse spectrum into pulse energy per watt.
    /// `R` is summed in the time domain, which needs only a few terms when
    /// the digitizer is fast against the pulse rate; see
    /// [`interference_factor`](super::interference_factor) for the spectral form.
    pub fn channel_response(&self, f: f64) -> Complex64 {
        let p = &self.pulses;
        let scale = 0.5 * p.p_avg * self.oid.responsivity * p.period();
        self.eom.response(f) * pulse_spectrum(p, f) * self.oid.aliased_response(p.f_rep, f) * scale
    }

    /// Sample voltage with no drive applied (the unmodulated component).
    pub fn dc_level(&self) -> f64 {
        self.channel_response(0.0).re
    }

    pub fn adc_fullscale(&self) -> f64 {
        self.oid.adc_fullscale.unwrap_or_else(|| 2.0 * self.dc_level())
    }

    pub fn lsb(&self) -> f64 {
        self.adc_fullscale() / (1u64 << self.oid.adc_bits) as f64
    }

    /// Channel response at the odd harmonics of `f` up to `max_order`.
    pub fn harmonic_response(&self, f: f64, max_order: usize) -> HarmonicResponse {
        let odd = (1..=max_order.max(1)).step_by(2);
        HarmonicResponse {
            f,
            f_rep: self.pulses.f_rep,
            dc: self.dc_level(),
            odd: odd.map(|h| self.channel_response(h as f64 * f)).collect(),
        }
    }

    /// Modulation depth `pi V / V_pi` for a drive of peak amplitude `amp`.
    pub fn drive_ratio(&self, amp: f64) -> f64 {
        PI * amp / self.eom.v_pi
    }

    /// Highest odd harmonic order that matters at drive ratio `x`.
    pub fn harmonics_needed(x: f64) -> usize {
        if x == 0.0 {
            return 1;
        }
        let j = bessel_j_all(MAX_HARMONIC, x);
        let mut h = 1;
        while h + 2 <= MAX_HARMONIC && j[h + 2].abs() > HARMONIC_CUTOFF * j[1].abs() {
            h += 2;
        }
        h
    }

    /// Noiseless photodiode output at the `n` sampling instants (before the
    /// ADC) for a drive `amp * cos(2 pi f t + phase)`.
    pub fn waveform(&self, f: f64, amp: f64, phase: f64, n: usize) -> Vec<f64> {
        let x = self.drive_ratio(amp);
        let hr = self.harmonic_response(f, Self::harmonics_needed(x));
        self.waveform_from(&hr, amp, phase, n)
    }

    /// As [`waveform`](Self::waveform) with precomputed channel responses.
    pub fn waveform_from(&self, hr: &HarmonicResponse, amp: f64, phase: f64, n: usize) -> Vec<f64> {
        let x = self.drive_ratio(amp);
        let order = Self::harmonics_needed(x).min(2 * hr.odd.len() - 1);
        let j = bessel_j_all(order, x);
        // transmission 0.5 - sum_k (-1)^k J_{2k+1}(x) cos((2k+1) theta)
        let terms: Vec<(f64, Complex64)> = (0..=(order - 1) / 2)
            .filter(|&k| j[2 * k + 1] != 0.0)
            .map(|k| {
                let h = 2 * k + 1;
                let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
                let coef = hr.odd[k] * (2.0 * sign * j[h]) * Complex64::from_polar(1.0, h as f64 * phase);
                ((h as f64 * hr.frac_cycles()).fract(), coef)
            })
            .collect();

        let mut out = vec![hr.dc; n];
        for (step, coef) in terms {
            let rot = Complex64::from_polar(1.0, TAU * step);
            let mut z = coef;
            for (k, v) in out.iter_mut().enumerate() {
                if k % 1024 == 0 {
                    z = coef * Complex64::from_polar(1.0, TAU * (step * k as f64).fract());
                }
                *v += z.re;
                z *= rot;
            }
        }
        self.apply_pd(&mut out, hr.dc);
        out
    }

    /// Cubic compression of the electrical pulse amplitude about its
    /// quiescent level.
    pub(crate) fn apply_pd(&self, v: &mut [f64], dc: f64) {
        let k = self.oid.pd_nonlin;
        if k == 0.0 {
            return;
        }
        for s in v.iter_mut() {
            let u = *s / dc - 1.0;
            *s = dc * (1.0 + u + k * u * u * u);
        }
    }

    /// Adds the analog noise (when an RNG is given) and quantizes.
    pub fn digitize<R: Rng + ?Sized>(&self, analog: &[f64], rng: Option<&mut R>) -> BranchRecord {
        let lsb = self.lsb();
        let max_code = ((1u64 << self.oid.adc_bits) - 1) as f64;
        let mut clipped = false;
        let mut quant = |v: f64| {
            let c = (v / lsb).round();
            if c < 0.0 || c > max_code {
                clipped = true;
            }
            c.clamp(0.0, max_code) as u32
        };
        let codes = match (rng, self.oid.noise_sigma > 0.0) {
            (Some(rng), true) => {
                let normal = Normal::new(0.0, self.oid.noise_sigma).expect("sigma checked >= 0");
                analog.iter().map(|&v| quant(v + normal.sample(rng))).collect()
            }
            _ => analog.iter().map(|&v| quant(v)).collect(),
        };
        BranchRecord { codes, clipped, lsb }
    }
}

/// Channel response of a branch at a tone and its odd harmonics.
#[derive(Debug, Clone)]
pub struct HarmonicResponse {
    pub f: f64,
    pub f_rep: f64,
    /// Zero-drive sample level, V.
    pub dc: f64,
    /// `H_A` at `f, 3f, 5f, ...`.
    pub odd: Vec<Complex64>,
}

impl HarmonicResponse {
    /// Fractional part of `f / f_rep`: the tone's advance per sample in cycles.
    fn frac_cycles(&self) -> f64 {
        let whole = (self.f / self.f_rep).floor();
        (-whole).mul_add(self.f_rep, self.f) / self.f_rep
    }
}

/// Quantized samples of one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    pub codes: Vec<u32>,
    /// Some sample hit the ADC rails.
    pub clipped: bool,
    /// Volts per code.
    pub lsb: f64,
}

impl BranchRecord {
    pub fn volts(&self) -> Vec<f64> {
        self.codes.iter().map(|&c| c as f64 * self.lsb).collect()
    }
}

/// Fast-path sampling of a drive tone through one branch: DC offset plus the
/// modulated tone and its odd harmonics, each weighted by the channel
/// response and aliased by the pulse-rate sampling, with additive Gaussian
/// noise and ADC quantization. Deterministic for a given `rng_seed`.
pub fn sample_branch(
    b: &BranchModel,
    tone_f: f64,
    tone_amp: f64,
    tone_phase: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<BranchRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_branch_with_rng(b, tone_f, tone_amp, tone_phase, n_samples, &mut rng)
}

pub fn sample_branch_with_rng<R: Rng + ?Sized>(
    b: &BranchModel,
    tone_f: f64,
    tone_amp: f64,
    tone_phase: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<BranchRecord> {
    if !(tone_f >= 0.0 && tone_amp >= 0.0 && tone_amp.is_finite()) {
        return Err(Error::Domain(format!("bad tone f = {tone_f}, amplitude = {tone_amp}")));
    }
    let analog = b.waveform(tone_f, tone_amp, tone_phase, n_samples);
    Ok(b.digitize(&analog, Some(rng)))
}
