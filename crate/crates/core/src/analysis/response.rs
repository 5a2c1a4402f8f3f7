use num_complex::Complex64;

use super::unwrap_phase;
use crate::model::{FrequencyGrid, OutModel};
use crate::photonic::pulse_spectrum;
use crate::sweep::{measure_point, DrivePort, InstrumentModel, SweepConfig, MEAS_TRANS, REF1};
use crate::units::db20;
use crate::Result;

/// Uncalibrated thru response of the measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemResponse {
    pub grid: FrequencyGrid,
    /// `|meas_trans|` in dB relative to the first grid point.
    pub magnitude_db: Vec<f64>,
    /// Modulator and pulse rolloff `|H_M P_s|`, same normalization.
    pub envelope_db: Vec<f64>,
}

impl SystemResponse {
    pub fn max_attenuation_db(&self) -> f64 {
        -self.magnitude_db.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest departure from the smooth rolloff envelope, dB.
    pub fn ripple_db(&self) -> f64 {
        self.magnitude_db.iter().zip(&self.envelope_db).map(|(m, e)| (m - e).abs()).fold(0.0, f64::max)
    }

    /// Peak-to-peak of the departure from the envelope, dB.
    pub fn ripple_pp_db(&self) -> f64 {
        let d: Vec<f64> = self.magnitude_db.iter().zip(&self.envelope_db).map(|(m, e)| m - e).collect();
        d.iter().cloned().fold(f64::MIN, f64::max) - d.iter().cloned().fold(f64::MAX, f64::min)
    }
}

/// Ports connected directly, no calibration: the absolute level of the
/// transmission branch across the sweep. (The ratio to the reference
/// branch would cancel the channel response being measured.)
pub fn system_response(inst: &InstrumentModel, cfg: &SweepConfig) -> Result<SystemResponse> {
    let cfg = cfg.clone().validated()?;
    let grid = cfg.grid()?;
    let thru = OutModel::thru();
    let mag = grid
        .points()
        .iter()
        .map(|&f| Ok(measure_point(inst, &thru, f, DrivePort::Port1, &cfg)?.phasors[MEAS_TRANS].magnitude))
        .collect::<Result<Vec<f64>>>()?;
    let b = &inst.branches[MEAS_TRANS];
    let env: Vec<f64> = grid.points().iter().map(|&f| b.eom.response(f).norm() * pulse_spectrum(&b.pulses, f)).collect();
    Ok(SystemResponse {
        magnitude_db: mag.iter().map(|m| db20(m / mag[0])).collect(),
        envelope_db: env.iter().map(|e| db20(e / env[0])).collect(),
        grid,
    })
}

/// Raw transmission phase of a sweep before and after phase-reversal
/// correction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReversal {
    pub grid: FrequencyGrid,
    /// Phase of `trans/ref1` from the aliased phasors, degrees in (-180, 180].
    pub uncorrected_deg: Vec<f64>,
    /// Same after correction, unwrapped, degrees.
    pub corrected_deg: Vec<f64>,
    pub flipped: Vec<bool>,
    /// Zone boundaries crossed by the sweep, Hz.
    pub flip_frequencies: Vec<f64>,
    /// Largest deviation of `corrected_deg` from its least-squares line.
    pub max_residual_deg: f64,
}

impl PhaseReversal {
    pub fn flip_spacings(&self) -> Vec<f64> {
        self.flip_frequencies.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Forward-drive sweep of `out` over `grid`, keeping both phase views.
pub fn phase_reversal_sweep(inst: &InstrumentModel, out: &OutModel, grid: &FrequencyGrid, cfg: &SweepConfig) -> Result<PhaseReversal> {
    let mut unc = Vec::with_capacity(grid.len());
    let mut cor = Vec::with_capacity(grid.len());
    let mut flipped = Vec::with_capacity(grid.len());
    for &f in grid.points() {
        let m = measure_point(inst, out, f, DrivePort::Port1, cfg)?;
        let ratio = |p: &[crate::dsp::Phasor; 4]| -> Complex64 { p[MEAS_TRANS].to_complex() / p[REF1].to_complex() };
        unc.push(ratio(&m.uncorrected).arg().to_degrees());
        cor.push(ratio(&m.phasors).arg());
        flipped.push(m.alias.flipped);
    }
    let corrected_deg: Vec<f64> = unwrap_phase(&cor).iter().map(|p| p.to_degrees()).collect();

    let half = 0.5 * inst.f_rep;
    let f = grid.points();
    let flip_frequencies = (1..f.len()).filter(|&i| flipped[i] != flipped[i - 1]).map(|i| (f[i - 1] / half).ceil() * half).collect();

    let n = f.len() as f64;
    let (mx, my) = (f.iter().sum::<f64>() / n, corrected_deg.iter().sum::<f64>() / n);
    let sxy: f64 = f.iter().zip(&corrected_deg).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = f.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let max_residual_deg = f
        .iter()
        .zip(&corrected_deg)
        .map(|(x, y)| (y - my - slope * (x - mx)).abs())
        .fold(0.0, f64::max);
    Ok(PhaseReversal { grid: grid.clone(), uncorrected_deg: unc, corrected_deg, flipped, flip_frequencies, max_residual_deg })
}
