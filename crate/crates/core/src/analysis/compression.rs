use std::f64::consts::PI;

use crate::dsp::{alias_map, estimate_tone, remove_dc};
use crate::photonic::{bessel_j, BranchModel};
use crate::sweep::{guard_detune, InstrumentModel, REF1};
use crate::units::{db20, dbm_to_peak_volts, peak_volts_to_dbm};
use crate::{Error, Result};

/// Photodiode cubic coefficient that places the simulated 0.1 dB
/// compression of the reference branch at 2.8 dBm (35 GHz drive). Found
/// with [`tune_pd_nonlin`].
pub const PD_NONLIN_MEASURED: f64 = -0.342;

const SAMPLES: usize = 4096;
/// Points at the bottom of the sweep that set the linear reference.
const LINEAR_POINTS: usize = 3;

/// Modulation depth `x = pi V / V_pi` at which the fundamental
/// `2 J1(x)` is 0.1 dB below its small-signal value `x`.
pub fn compression_root() -> f64 {
    let target = -0.1;
    let g = |x: f64| db20(2.0 * bessel_j(1, x) / x) - target;
    let (mut lo, mut hi) = (1e-3, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Input power (dBm at 50 ohm) of the modulator's 0.1 dB compression.
pub fn theoretical_compression(v_pi: f64) -> f64 {
    peak_volts_to_dbm(compression_root() * v_pi / PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    /// Input power of 0.1 dB compression, dBm.
    pub p01: f64,
    /// `(input dBm, deviation from the linear reference dB)`.
    pub curve: Vec<(f64, f64)>,
    /// Fundamental output level per input, dB relative to one volt.
    pub output_db: Vec<f64>,
}

/// Steps the drive of one branch (the first reference branch, fed
/// directly) from `p_start` to `p_stop` and reports where the fundamental
/// falls 0.1 dB below a unit-slope line anchored on the lowest powers.
pub fn compression_sweep(inst: &InstrumentModel, f: f64, p_start: f64, p_stop: f64, step: f64) -> Result<CompressionResult> {
    branch_compression(&inst.branches[REF1], f, p_start, p_stop, step)
}

fn branch_compression(branch: &BranchModel, f: f64, p_start: f64, p_stop: f64, step: f64) -> Result<CompressionResult> {
    if !(p_start < p_stop && step > 0.0) {
        return Err(Error::Domain(format!("power sweep {p_start}..{p_stop} step {step}")));
    }
    let n = ((p_stop - p_start) / step + 1e-9).floor() as usize + 1;
    if n < LINEAR_POINTS + 1 {
        return Err(Error::Domain("power sweep too short for a linear reference".into()));
    }
    let f_rep = guard_detune(f, branch.pulses.f_rep, 1e-4);
    let b = branch.with_f_rep(f_rep);
    let f_norm = alias_map(f, f_rep)?.f_norm(f_rep);
    let top = b.drive_ratio(dbm_to_peak_volts(p_stop));
    let hr = b.harmonic_response(f, BranchModel::harmonics_needed(top));

    let powers: Vec<f64> = (0..n).map(|i| p_start + i as f64 * step).collect();
    let output_db = powers
        .iter()
        .map(|&p| {
            let analog = b.waveform_from(&hr, dbm_to_peak_volts(p), 0.0, SAMPLES);
            let rec = b.digitize::<rand_chacha::ChaCha8Rng>(&analog, None);
            Ok(db20(estimate_tone(&remove_dc(&rec.volts())?, f_norm)?.magnitude))
        })
        .collect::<Result<Vec<f64>>>()?;

    let intercept = (0..LINEAR_POINTS).map(|i| output_db[i] - powers[i]).sum::<f64>() / LINEAR_POINTS as f64;
    let curve: Vec<(f64, f64)> = powers.iter().zip(&output_db).map(|(&p, &o)| (p, o - p - intercept)).collect();
    let p01 = curve
        .windows(2)
        .find(|w| w[1].1 <= -0.1)
        .map(|w| {
            let ((p0, d0), (p1, d1)) = (w[0], w[1]);
            p0 + (-0.1 - d0) / (d1 - d0) * (p1 - p0)
        })
        .ok_or(Error::CompressionNotFound { p_stop })?;
    Ok(CompressionResult { p01, curve, output_db })
}

/// Bisects the photodiode cubic coefficient (in `[-2, 0]`) until the
/// simulated compression point reaches `target_dbm`.
pub fn tune_pd_nonlin(inst: &InstrumentModel, f: f64, target_dbm: f64) -> Result<f64> {
    let p01 = |k: f64| -> Result<f64> {
        let mut b = inst.branches[REF1].clone();
        b.oid.pd_nonlin = k;
        Ok(branch_compression(&b, f, -30.0, 10.0, 0.25)?.p01)
    };
    let (mut lo, mut hi) = (-2.0, 0.0);
    if p01(hi)? < target_dbm {
        return Err(Error::Domain(format!("modulator alone compresses below {target_dbm} dBm")));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if p01(mid)? > target_dbm {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_matches_series() {
        let x = compression_root();
        assert!((x - 0.3026).abs() < 1e-3, "{x}");
        // two-term series 1 - x^2/8 + x^4/192
        let series = 1.0 - x * x / 8.0 + x.powi(4) / 192.0;
        assert!((db20(series) + 0.1).abs() < 1e-4);
    }

    #[test]
    fn scales_with_half_wave_voltage() {
        let a = theoretical_compression(5.4);
        let b = theoretical_compression(10.8);
        assert!((b - a - 20.0 * 2f64.log10()).abs() < 1e-9);
        assert!((a - 4.32).abs() < 0.02, "{a}");
    }
}
