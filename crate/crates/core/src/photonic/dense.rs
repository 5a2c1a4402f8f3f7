use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{mzm_transmission, BranchModel, BranchRecord};
use crate::{Error, Result};

/// Upper limit on stored dense-waveform points.
const MAX_POINTS: usize = 20_000_000;
/// Points per cycle used to expand the modulator output into harmonics.
const DFT_POINTS: usize = 256;
/// Half-width of the integration window around each pulse, in sigmas.
const WINDOW_SIGMAS: f64 = 8.0;

/// Brute-force reference for [`sample_branch`](super::sample_branch).
///
/// The modulator transmission `T(V cos theta)` is expanded numerically
/// (direct DFT), each harmonic is filtered by the modulator response, the
/// resulting optical intensity is multiplied by every Gaussian pulse on a
/// dense time grid, and the photocurrent is convolved with the causal
/// digitizer impulse response across the preceding pulses before being read
/// at `k T_s + d_E`. The grid step is the shorter of the pulse width and the
/// highest harmonic period, divided by `oversample_factor`. Noiseless.
pub fn simulate_dense_oracle(
    b: &BranchModel,
    tone_f: f64,
    tone_amp: f64,
    tone_phase: f64,
    n_samples: usize,
    oversample_factor: usize,
) -> Result<BranchRecord> {
    let analog = dense_waveform(b, tone_f, tone_amp, tone_phase, n_samples, oversample_factor)?;
    Ok(b.digitize::<rand_chacha::ChaCha8Rng>(&analog, None))
}

/// Analog samples (photodiode output before the ADC) of the dense model.
pub fn dense_waveform(
    b: &BranchModel,
    tone_f: f64,
    tone_amp: f64,
    tone_phase: f64,
    n_samples: usize,
    oversample_factor: usize,
) -> Result<Vec<f64>> {
    if oversample_factor < 10 {
        return Err(Error::Domain(format!("oversample factor {oversample_factor} < 10")));
    }
    if !(tone_f >= 0.0 && tone_amp >= 0.0) {
        return Err(Error::Domain(format!("bad tone f = {tone_f}, amplitude = {tone_amp}")));
    }
    let p = &b.pulses;
    let t_rep = p.period();

    // harmonics of T(V cos theta), filtered by the modulator
    let v_pi = b.eom.v_pi;
    let mut coef = vec![Complex64::new(0.0, 0.0); DFT_POINTS / 2];
    for (i, v) in (0..DFT_POINTS).map(|i| (i, mzm_transmission(tone_amp * (TAU * i as f64 / DFT_POINTS as f64).cos(), v_pi))) {
        for (h, c) in coef.iter_mut().enumerate() {
            *c += Complex64::from_polar(v, -TAU * ((h * i) % DFT_POINTS) as f64 / DFT_POINTS as f64);
        }
    }
    let c1 = coef[1].norm();
    let harmonics: Vec<(f64, Complex64)> = coef
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| c.norm() > 1e-15 * c1.max(1e-300) * DFT_POINTS as f64 && tone_amp > 0.0)
        .map(|(h, c)| {
            let hf = h as f64 * tone_f;
            (h as f64, 2.0 * c / DFT_POINTS as f64 * b.eom.response(hf) * Complex64::from_polar(1.0, h as f64 * tone_phase))
        })
        .collect();
    let dc = coef[0].re / DFT_POINTS as f64;
    let h_top = harmonics.iter().map(|h| h.0).fold(1.0, f64::max);

    let sigma = p.sigma();
    let mut step = p.pulse_fwhm;
    if tone_f > 0.0 {
        step = step.min(1.0 / (h_top * tone_f));
    }
    let step = step / oversample_factor as f64;
    let half = (WINDOW_SIGMAS * sigma / step).ceil() as usize;
    let per_pulse = 2 * half + 1;
    let memory = b.oid.memory_periods(p.f_rep);
    let n_pulses = n_samples + memory;
    let points = n_pulses.saturating_mul(per_pulse);
    if points > MAX_POINTS {
        return Err(Error::MemoryBound { points, limit: MAX_POINTS });
    }

    // optical energy weights per dense point: P_A T_s * p_s(tau) * T(t) * step
    let norm = p.p_avg * t_rep / (sigma * TAU.sqrt()) * step;
    let taus: Vec<f64> = (0..per_pulse).map(|i| (i as f64 - half as f64) * step).collect();
    let shape: Vec<f64> = taus.iter().map(|t| norm * (-0.5 * (t / sigma).powi(2)).exp()).collect();
    let mut optical = vec![0.0; points];
    // pulse index m is placed at time (m - memory) T_s
    for m in 0..n_pulses {
        let pulse_t = (m as f64 - memory as f64) * t_rep;
        let base_cycles = tone_f * pulse_t;
        let base_cycles = base_cycles - base_cycles.floor();
        let row = &mut optical[m * per_pulse..(m + 1) * per_pulse];
        for ((o, &tau), &w) in row.iter_mut().zip(&taus).zip(&shape) {
            let theta = TAU * (base_cycles + tone_f * tau);
            let mut tr = dc;
            for &(h, c) in &harmonics {
                tr += (c * Complex64::from_polar(1.0, h * theta)).re;
            }
            *o = w * tr;
        }
    }

    let rho = b.oid.responsivity;
    let d = b.oid.delay;
    let kernel: Vec<Vec<f64>> = (0..=memory)
        .map(|l| taus.iter().map(|&tau| b.oid.impulse(l as f64 * t_rep + d - tau)).collect())
        .collect();
    let level = |k: usize| -> f64 {
        let m_now = k + memory;
        let mut acc = 0.0;
        for l in (0..=memory).rev() {
            let row = &optical[(m_now - l) * per_pulse..(m_now - l + 1) * per_pulse];
            acc += row.iter().zip(&kernel[l]).map(|(o, h)| o * h).sum::<f64>();
        }
        rho * acc
    };
    let mut out: Vec<f64> = (0..n_samples).map(level).collect();

    // quiescent level: same integral with the transmission held at 1/2
    let quiescent = 0.5
        * rho
        * kernel.iter().map(|row| row.iter().zip(&shape).map(|(h, w)| h * w).sum::<f64>()).sum::<f64>();
    b.apply_pd(&mut out, quiescent);
    Ok(out)
}
