use std::f64::consts::{PI, TAU};

use crate::model::{FrequencyGrid, TwoPortSParams};
use crate::units::db20;
use crate::{Error, Result};

/// `(1 + |G|) / (1 - |G|)`.
pub fn vswr(gamma_mag: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma_mag) {
        return Err(Error::Domain(format!("|gamma| = {gamma_mag} outside [0, 1)")));
    }
    Ok((1.0 + gamma_mag) / (1.0 - gamma_mag))
}

/// Removes 2 pi jumps larger than pi between consecutive samples.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    for (i, &p) in phase.iter().enumerate() {
        if i > 0 {
            let d = p - phase[i - 1];
            if d > PI {
                offset -= TAU * ((d - PI) / TAU).ceil();
            } else if d < -PI {
                offset += TAU * ((-d - PI) / TAU).ceil();
            }
        }
        out.push(p + offset);
    }
    out
}

/// Group delay `-d phi / d omega` by central differences at the interior
/// grid points (`len - 2` values), after unwrapping.
pub fn group_delay(phase: &[f64], grid: &FrequencyGrid) -> Result<Vec<f64>> {
    if phase.len() != grid.len() || grid.len() < 3 {
        return Err(Error::Domain(format!("group delay needs >= 3 points ({} phases, {} frequencies)", phase.len(), grid.len())));
    }
    let p = unwrap_phase(phase);
    let f = grid.points();
    (1..f.len() - 1)
        .map(|i| {
            let df = f[i + 1] - f[i - 1];
            if !(df > 0.0) {
                return Err(Error::Domain(format!("zero grid spacing at {} Hz", f[i])));
            }
            Ok(-(p[i + 1] - p[i - 1]) / (TAU * df))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSummary {
    /// Midpoint of the two -3 dB crossings.
    pub f_center: f64,
    pub bw3db: f64,
    /// Mean group delay of `s21` over grid points inside the -3 dB band.
    pub delay_avg: f64,
    /// From `|s11|` interpolated at `f_center`.
    pub vswr_at_center: f64,
}

/// Passband of `s21`: -3 dB crossings either side of the maximum, found by
/// linear interpolation of the dB magnitude between grid points.
pub fn band_params(s: &TwoPortSParams) -> Result<BandSummary> {
    let f = s.grid.points();
    if f.len() < 3 {
        return Err(Error::Domain("band_params needs at least 3 points".into()));
    }
    let db: Vec<f64> = s.s21.iter().map(|z| db20(z.norm().max(1e-300))).collect();
    let peak = (0..db.len()).max_by(|&a, &b| db[a].total_cmp(&db[b])).expect("non-empty");
    let level = db[peak] - 3.0;
    let cross = |i: usize, j: usize| f[i] + (level - db[i]) / (db[j] - db[i]) * (f[j] - f[i]);
    let lo = (0..peak).rev().find(|&i| db[i] < level).map(|i| cross(i, i + 1)).ok_or(Error::BandEdge)?;
    let hi = (peak + 1..db.len()).find(|&i| db[i] < level).map(|i| cross(i - 1, i)).ok_or(Error::BandEdge)?;
    let f_center = 0.5 * (lo + hi);

    let phase: Vec<f64> = s.s21.iter().map(|z| z.arg()).collect();
    let gd = group_delay(&phase, &s.grid)?;
    let inside: Vec<f64> = (1..f.len() - 1).filter(|&i| f[i] >= lo && f[i] <= hi).map(|i| gd[i - 1]).collect();
    if inside.is_empty() {
        return Err(Error::Domain("passband narrower than the grid spacing".into()));
    }
    let delay_avg = inside.iter().sum::<f64>() / inside.len() as f64;

    let k = f.partition_point(|&x| x <= f_center).clamp(1, f.len() - 1);
    let w = (f_center - f[k - 1]) / (f[k] - f[k - 1]);
    let g = s.s11[k - 1].norm() * (1.0 - w) + s.s11[k].norm() * w;
    Ok(BandSummary { f_center, bw3db: hi - lo, delay_avg, vswr_at_center: vswr(g)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BandpassSpec, OutModel};

    #[test]
    fn vswr_values() {
        assert_eq!(vswr(0.0).unwrap(), 1.0);
        assert!((vswr(0.2).unwrap() - 1.5).abs() < 1e-15);
        assert!((vswr(0.5).unwrap() - 3.0).abs() < 1e-15);
        assert!(vswr(1.0).is_err());
    }

    #[test]
    fn linear_phase_delay() {
        let grid = FrequencyGrid::linear(30e9, 40e9, 201).unwrap();
        let tau = 900e-12;
        let wrapped: Vec<f64> = grid.points().iter().map(|f| crate::units::wrap_phase(-TAU * f * tau)).collect();
        let gd = group_delay(&wrapped, &grid).unwrap();
        assert_eq!(gd.len(), 199);
        assert!(gd.iter().all(|d| (d - tau).abs() < 1e-15 * 1e3), "{:?}", &gd[..3]);
        let zero = group_delay(&vec![0.0; 201], &grid).unwrap();
        assert!(zero.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn bandpass_summary() {
        let spec = BandpassSpec::new(34.725e9, 4.25e9, BandpassSpec::return_loss_for_vswr(1.5))
            .unwrap()
            .with_mean_delay(900e-12)
            .unwrap();
        let out = OutModel::ParametricBandpass(spec);
        let grid = FrequencyGrid::linear(30e9, 40e9, 2001).unwrap();
        let m: Vec<_> = grid.points().iter().map(|&f| out.response(f)).collect();
        let s = TwoPortSParams::from_matrices(grid, &m).unwrap();
        let b = band_params(&s).unwrap();
        assert!((b.f_center - 34.725e9).abs() < 1e6, "{}", b.f_center);
        assert!((b.bw3db - 4.25e9).abs() < 5e6, "{}", b.bw3db);
        assert!((b.vswr_at_center - 1.5).abs() < 1e-3, "{}", b.vswr_at_center);
        assert!((b.delay_avg - 900e-12).abs() < 2e-12, "{}", b.delay_avg);
    }

    #[test]
    fn flat_response_has_no_edges() {
        let grid = FrequencyGrid::linear(1e9, 2e9, 11).unwrap();
        let m = vec![OutModel::thru().response(1e9); 11];
        let s = TwoPortSParams::from_matrices(grid, &m).unwrap();
        assert!(matches!(band_params(&s), Err(Error::BandEdge)));
    }
}
