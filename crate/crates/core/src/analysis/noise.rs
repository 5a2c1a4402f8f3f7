use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsp::{dynamic_range, power_spectrum};
use crate::photonic::{sample_branch_with_rng, BranchModel};
use crate::sweep::{InstrumentModel, REF1};
use crate::units::dbm_to_peak_volts;
use crate::{Error, Result};

/// Floor below the signal bin targeted at the shortest record, dBc.
pub const FLOOR_TARGET_DBC: f64 = -102.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorPoint {
    pub n_fft: usize,
    /// Signal bin power, dB (volts squared).
    pub signal_db: f64,
    /// Noise floor relative to the signal bin, dBc.
    pub floor_dbc: f64,
    pub dynamic_range_db: f64,
}

/// Tone near `f` whose alias sits exactly on an FFT bin for every record
/// length that is a multiple of `n_base`: `f_rep (m + k / n_base)` with
/// `m = floor(f / f_rep)` and `k` the nearest bin to the alias of `f`.
pub fn bin_centered_tone(f: f64, f_rep: f64, n_base: usize) -> f64 {
    let m = (f / f_rep).floor();
    let k = ((f / f_rep - m) * n_base as f64).round().clamp(1.0, (n_base / 2 - 1) as f64);
    f_rep * (m + k / n_base as f64)
}

fn capture(branch: &BranchModel, f: f64, p_in: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_branch_with_rng(branch, f, dbm_to_peak_volts(p_in), 0.0, n, &mut rng)?.volts())
}

/// Records one capture of the longest length and analyzes its leading
/// `n_fft` samples for each requested length. The drive goes straight to
/// the first reference branch.
pub fn noise_floor_study(inst: &InstrumentModel, f: f64, p_in: f64, n_fft_list: &[usize], seed: u64) -> Result<Vec<FloorPoint>> {
    let n_max = *n_fft_list.iter().max().ok_or_else(|| Error::Domain("no FFT lengths".into()))?;
    let rec = capture(&inst.branches[REF1], f, p_in, n_max, seed)?;
    n_fft_list
        .iter()
        .map(|&n| {
            let s = power_spectrum(&rec, n)?;
            let floor_dbc = s.noise_floor_db - s.signal_db;
            Ok(FloorPoint { n_fft: n, signal_db: s.signal_db, floor_dbc, dynamic_range_db: dynamic_range(0.0, floor_dbc)? })
        })
        .collect()
}

/// Analog noise (V rms) that puts the floor of an `n_fft`-point spectrum
/// `target_dbc` below the signal bin. A white record of total variance
/// `s^2` has a median periodogram bin of `ln2 s^2 / N`, and quantization
/// contributes `lsb^2 / 12`; the closed form is refined once by
/// simulation.
pub fn calibrate_noise_sigma(inst: &InstrumentModel, f: f64, p_in: f64, n_fft: usize, target_dbc: f64, seed: u64) -> Result<f64> {
    let mut branch = inst.branches[REF1].clone();
    branch.oid.noise_sigma = 0.0;
    let clean = power_spectrum(&capture(&branch, f, p_in, n_fft, seed)?, n_fft)?;
    let signal = 10f64.powf(clean.signal_db / 10.0);
    let q = branch.lsb().powi(2) / 12.0;
    let total = 10f64.powf(target_dbc / 10.0) * signal * n_fft as f64 / LN_2;
    if total <= q {
        return Err(Error::Domain(format!("quantization alone exceeds a {target_dbc} dBc floor")));
    }
    branch.oid.noise_sigma = (total - q).sqrt();

    let trial = power_spectrum(&capture(&branch, f, p_in, n_fft, seed)?, n_fft)?;
    let miss = target_dbc - (trial.noise_floor_db - trial.signal_db);
    let total = (branch.oid.noise_sigma.powi(2) + q) * 10f64.powf(miss / 10.0);
    if total <= q {
        return Err(Error::Domain(format!("quantization alone exceeds a {target_dbc} dBc floor")));
    }
    Ok((total - q).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_centered_tone_lands_on_bins() {
        let f_rep = 36.456e6;
        let f = bin_centered_tone(35e9, f_rep, 62_500);
        assert!((f - 35e9).abs() < f_rep / 62_500.0);
        let frac = f / f_rep - (f / f_rep).floor();
        for n in [62_500.0, 250_000.0, 1e6, 4e6] {
            let bin = frac * n;
            assert!((bin - bin.round()).abs() < 1e-4, "{n}: {bin}");
        }
    }

    #[test]
    fn noiseless_study_runs() {
        let inst = InstrumentModel::ideal();
        let f = bin_centered_tone(35e9, inst.f_rep, 4096);
        let pts = noise_floor_study(&inst, f, 0.0, &[4096, 8192], 1).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.floor_dbc < -80.0), "{pts:?}");
    }
}
