use rustfft::FftPlanner;

use num_complex::Complex64;

use crate::{Error, Result};

/// Bins on each side of the signal bin left out of the floor estimate.
pub const SIGNAL_GUARD_BINS: usize = 3;

/// One-sided periodogram of a record with its noise floor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub n_fft: usize,
    /// Power per bin (bins `0..=n_fft/2`), dB relative to a unit-amplitude
    /// two-sided line: a tone of amplitude `A` reads `20 log10(A/2)`.
    pub power_db: Vec<f64>,
    /// Strongest non-DC bin.
    pub signal_bin: usize,
    pub signal_db: f64,
    /// Median bin power outside DC and the signal bin +/- guard.
    pub noise_floor_db: f64,
}

impl SpectrumEstimate {
    /// Bin spacing `f_s / N`.
    pub fn bin_hz(&self, f_s: f64) -> f64 {
        f_s / self.n_fft as f64
    }
}

/// Periodogram `|X_k|^2 / N^2` of the first `n_fft` samples. Any length is
/// accepted (mixed-radix FFT), since record lengths such as 62 500 are not
/// powers of two.
pub fn power_spectrum(samples: &[f64], n_fft: usize) -> Result<SpectrumEstimate> {
    if n_fft > samples.len() {
        return Err(Error::Domain(format!("n_fft {n_fft} exceeds record length {}", samples.len())));
    }
    if n_fft < 2 * SIGNAL_GUARD_BINS + 8 {
        return Err(Error::Domain(format!("n_fft {n_fft} too short for a floor estimate")));
    }
    let mut buf: Vec<Complex64> = samples[..n_fft].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);
    let scale = 1.0 / (n_fft as f64 * n_fft as f64);
    let power: Vec<f64> = buf[..=n_fft / 2].iter().map(|x| (x.norm_sqr() * scale).max(1e-300)).collect();
    drop(buf);

    let signal_bin = (1..power.len())
        .max_by(|&a, &b| power[a].total_cmp(&power[b]))
        .expect("at least one non-DC bin");
    let lo = signal_bin.saturating_sub(SIGNAL_GUARD_BINS);
    let hi = signal_bin + SIGNAL_GUARD_BINS;
    let mut rest: Vec<f64> = power
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != 0 && !(lo..=hi).contains(&k))
        .map(|(_, &p)| p)
        .collect();
    let mid = rest.len() / 2;
    let (_, median, _) = rest.select_nth_unstable_by(mid, f64::total_cmp);
    let noise_floor_db = 10.0 * median.log10();

    let power_db: Vec<f64> = power.iter().map(|p| 10.0 * p.log10()).collect();
    Ok(SpectrumEstimate { n_fft, signal_db: power_db[signal_bin], power_db, signal_bin, noise_floor_db })
}

/// Signal-to-floor ratio in dB.
pub fn dynamic_range(signal_db: f64, floor_db: f64) -> Result<f64> {
    if !(signal_db >= floor_db) {
        return Err(Error::Domain(format!("signal {signal_db} dB below floor {floor_db} dB")));
    }
    Ok(signal_db - floor_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::TAU;

    #[test]
    fn clean_bin_centered_tone() {
        let n = 4096;
        let x: Vec<f64> = (0..n).map(|k| (TAU * ((100 * k % n) as f64) / n as f64).cos()).collect();
        let s = power_spectrum(&x, n).unwrap();
        assert_eq!(s.signal_bin, 100);
        assert!((s.signal_db - 20.0 * 0.5f64.log10()).abs() < 1e-9);
        assert!(s.noise_floor_db - s.signal_db < -250.0, "{}", s.noise_floor_db);
    }

    #[test]
    fn floor_drops_6db_per_quadrupling() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..1 << 16).map(|_| normal.sample(&mut rng)).collect();
        let a = power_spectrum(&x, 1 << 12).unwrap().noise_floor_db;
        let b = power_spectrum(&x, 1 << 14).unwrap().noise_floor_db;
        let c = power_spectrum(&x, 1 << 16).unwrap().noise_floor_db;
        assert!((a - b - 6.02).abs() < 0.5, "{a} {b}");
        assert!((b - c - 6.02).abs() < 0.5, "{b} {c}");
    }

    #[test]
    fn record_too_short() {
        assert!(power_spectrum(&[0.0; 100], 128).is_err());
    }

    #[test]
    fn dynamic_range_arithmetic() {
        assert_eq!(dynamic_range(0.0, -120.0).unwrap(), 120.0);
        assert_eq!(dynamic_range(-3.0, -3.0).unwrap(), 0.0);
        assert_eq!(dynamic_range(-10.0, -70.0).unwrap(), 60.0);
        assert!(dynamic_range(-70.0, -10.0).is_err());
    }
}
