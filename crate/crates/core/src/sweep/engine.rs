use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{InstrumentModel, MEAS_REFL, MEAS_TRANS, REF1, REF2};
use crate::dsp::{alias_map, correct_phase, estimate_tone, remove_dc, AliasResult, Phasor};
use crate::model::{FrequencyGrid, OutModel, SMatrix, TwoPortSParams};
use crate::photonic::{sample_branch_with_rng, BranchModel};
use crate::units::dbm_to_peak_volts;
use crate::{Error, Result};

/// Detuning attempts before giving up on clearing a zone boundary.
const MAX_DETUNE_STEPS: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub f_start: f64,
    pub f_stop: f64,
    pub n_points: usize,
    pub samples_per_point: usize,
    pub rng_seed: u64,
    /// Minimum distance from a zone boundary, as a fraction of `f_rep`.
    pub detune_guard: f64,
}

impl SweepConfig {
    pub fn new(f_start: f64, f_stop: f64, n_points: usize) -> Result<Self> {
        Self { f_start, f_stop, n_points, samples_per_point: 4096, rng_seed: 0, detune_guard: 1e-4 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.f_start > 0.0 && self.f_start < self.f_stop) || self.n_points < 2 {
            return Err(Error::Grid(format!(
                "sweep needs 0 < f_start < f_stop and n_points >= 2 (got {} .. {}, {})",
                self.f_start, self.f_stop, self.n_points
            )));
        }
        if self.samples_per_point < 64 {
            return Err(Error::Domain(format!("samples_per_point {} < 64", self.samples_per_point)));
        }
        if !(self.detune_guard > 0.0 && self.detune_guard < 0.1) {
            return Err(Error::Domain(format!("detune guard {} outside (0, 0.1)", self.detune_guard)));
        }
        Ok(self)
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::linear(self.f_start, self.f_stop, self.n_points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrivePort {
    Port1,
    Port2,
}

impl DrivePort {
    pub fn index(self) -> usize {
        match self {
            DrivePort::Port1 => 0,
            DrivePort::Port2 => 1,
        }
    }
}

/// Distance from `f` to the nearest multiple of `f_rep / 2`.
fn boundary_distance(f: f64, f_rep: f64) -> f64 {
    let half = 0.5 * f_rep;
    let below = (-(f / half).floor()).mul_add(half, f);
    below.min(half - below)
}

/// Repetition rate to use at `f`: unchanged when `f` is at least
/// `guard * f_rep` from every multiple of `f_rep / 2`, otherwise
/// `f_rep (1 +/- n delta)` with `delta = 2 guard` and the smallest `n`
/// (tried in the order +1, -1, +2, -2, ...) that clears the boundary.
pub fn guard_detune(f: f64, f_rep: f64, guard: f64) -> f64 {
    let clear = |r: f64| boundary_distance(f, r) >= guard * r;
    if clear(f_rep) {
        return f_rep;
    }
    let delta = 2.0 * guard;
    for n in 1..=MAX_DETUNE_STEPS {
        for sign in [1.0, -1.0] {
            let r = f_rep * (1.0 + sign * n as f64 * delta);
            if clear(r) {
                return r;
            }
        }
    }
    unreachable!("no detuned rate clears {f} Hz")
}

/// One drive direction at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasurement {
    pub f: f64,
    pub drive: DrivePort,
    /// Repetition rate actually used.
    pub f_rep: f64,
    pub alias: AliasResult,
    /// Phasors after phase-reversal correction, per branch.
    pub phasors: [Phasor; 4],
    /// Phasors as estimated from the aliased records.
    pub uncorrected: [Phasor; 4],
    pub clipped: [bool; 4],
}

/// Seeds one RNG stream per (frequency, drive, slot); independent of the
/// sweep order.
fn stream_rng(seed: u64, f: f64, drive: usize, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = f.to_bits() ^ ((drive as u64) << 60) ^ slot.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    rng.set_stream(z ^ (z >> 31));
    rng
}

/// Drives the test set from one port at `f`, digitizes all four branches
/// and estimates their phasors at the alias frequency.
pub fn measure_point(
    inst: &InstrumentModel,
    out: &OutModel,
    f: f64,
    drive: DrivePort,
    cfg: &SweepConfig,
) -> Result<PointMeasurement> {
    let d = drive.index();
    let f_rep = guard_detune(f, inst.f_rep, cfg.detune_guard);
    let alias = alias_map(f, f_rep)?;
    let f_norm = alias.f_norm(f_rep);

    let s = out.response(f);
    let waves = inst.testset.branch_waves(&s, d, f);
    let v_src = dbm_to_peak_volts(inst.source_power_dbm);
    let src_phase = stream_rng(cfg.rng_seed, f, d, 4).random::<f64>() * TAU;

    let mut phasors = [Phasor::new(0.0, 0.0); 4];
    let mut uncorrected = phasors;
    let mut clipped = [false; 4];
    for (i, (branch, wave)) in inst.branches.iter().zip(&waves).enumerate() {
        let b: BranchModel = branch.with_f_rep(f_rep);
        let mut rng = stream_rng(cfg.rng_seed, f, d, i as u64);
        let rec =
            sample_branch_with_rng(&b, f, v_src * wave.norm(), wave.arg() + src_phase, cfg.samples_per_point, &mut rng)?;
        let p = estimate_tone(&remove_dc(&rec.volts())?, f_norm)?;
        uncorrected[i] = p;
        phasors[i] = correct_phase(p, &alias);
        clipped[i] = rec.clipped;
    }
    Ok(PointMeasurement { f, drive, f_rep, alias, phasors, uncorrected, clipped })
}

/// Ratios of measurement to reference phasors:
/// `s11 = refl/ref1`, `s21 = trans/ref1` (forward),
/// `s22 = trans/ref2`, `s12 = refl/ref2` (reverse).
/// References at or below `min_reference` are rejected.
pub fn raw_sparams(fwd: &[Phasor; 4], rev: &[Phasor; 4], min_reference: f64) -> Result<SMatrix> {
    for r in [fwd[REF1], rev[REF2]] {
        if !(r.magnitude > min_reference) {
            return Err(Error::InvalidReference { magnitude: r.magnitude });
        }
    }
    let c = |p: Phasor| p.to_complex();
    let r1 = c(fwd[REF1]);
    let r2 = c(rev[REF2]);
    Ok(SMatrix::new(c(fwd[MEAS_REFL]) / r1, c(rev[MEAS_REFL]) / r2, c(fwd[MEAS_TRANS]) / r1, c(rev[MEAS_TRANS]) / r2))
}

/// Per-point record kept alongside the raw S-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDiagnostics {
    pub forward: PointMeasurement,
    pub reverse: PointMeasurement,
}

impl PointDiagnostics {
    pub fn clipped(&self) -> bool {
        self.forward.clipped.iter().chain(&self.reverse.clipped).any(|&c| c)
    }

    pub fn detuned(&self, nominal_f_rep: f64) -> bool {
        self.forward.f_rep != nominal_f_rep
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawSweep {
    pub grid: FrequencyGrid,
    pub raw: TwoPortSParams,
    pub points: Vec<PointDiagnostics>,
}

impl RawSweep {
    pub fn any_clipped(&self) -> bool {
        self.points.iter().any(PointDiagnostics::clipped)
    }
}

/// Smallest reference phasor accepted: ten times the estimator's noise
/// standard deviation for the branch noise plus quantization.
fn reference_floor(inst: &InstrumentModel, n: usize) -> f64 {
    let b = &inst.branches[REF1];
    let lsb = b.lsb();
    let sigma = (b.oid.noise_sigma.powi(2) + lsb * lsb / 12.0).sqrt();
    10.0 * sigma * (2.0 / n as f64).sqrt()
}

/// Forward then reverse drive at every point of the configured grid.
pub fn run_sweep(inst: &InstrumentModel, out: &OutModel, cfg: &SweepConfig) -> Result<RawSweep> {
    let cfg = cfg.clone().validated()?;
    run_sweep_on_grid(inst, out, &cfg.grid()?, &cfg)
}

/// As [`run_sweep`] on an explicit grid (`f_start`, `f_stop` and `n_points`
/// of `cfg` are ignored).
pub fn run_sweep_on_grid(inst: &InstrumentModel, out: &OutModel, grid: &FrequencyGrid, cfg: &SweepConfig) -> Result<RawSweep> {
    let floor = reference_floor(inst, cfg.samples_per_point);
    let mut points = Vec::with_capacity(grid.len());
    let mut mats = Vec::with_capacity(grid.len());
    for &f in grid.points() {
        let forward = measure_point(inst, out, f, DrivePort::Port1, cfg)?;
        let reverse = measure_point(inst, out, f, DrivePort::Port2, cfg)?;
        mats.push(raw_sparams(&forward.phasors, &reverse.phasors, floor)?);
        points.push(PointDiagnostics { forward, reverse });
    }
    Ok(RawSweep { grid: grid.clone(), raw: TwoPortSParams::from_matrices(grid.clone(), &mats)?, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F_REP: f64 = 36.456e6;

    #[test]
    fn detune_cases() {
        assert_eq!(guard_detune(35e9, F_REP, 1e-4), F_REP);
        let r = guard_detune(960.0 * F_REP, F_REP, 1e-4);
        assert_ne!(r, F_REP);
        assert!(alias_map(960.0 * F_REP, r).is_ok());
        assert!(boundary_distance(960.0 * F_REP, r) >= 1e-4 * r);
        assert_ne!(guard_detune(0.5 * F_REP, F_REP, 1e-4), F_REP);
    }

    #[test]
    fn raw_ratio_identities() {
        let p = Phasor::new(0.7, 0.2);
        let s = raw_sparams(&[p; 4], &[p; 4], 0.0).unwrap();
        for v in [s.s11, s.s12, s.s21, s.s22] {
            assert!((v - 1.0).norm() < 1e-15);
        }
        let fwd = [p, Phasor::new(0.14, 0.2 + 0.5), p, p];
        assert!((raw_sparams(&fwd, &[p; 4], 0.0).unwrap().s11.norm() - 0.2).abs() < 1e-15);
        let dead = [Phasor::new(0.0, 0.0), p, p, p];
        assert!(matches!(raw_sparams(&dead, &[p; 4], 1e-9), Err(Error::InvalidReference { .. })));
    }

    #[test]
    fn ideal_thru_ratio() {
        let inst = InstrumentModel::ideal().with_adc_bits(24);
        let cfg = SweepConfig::new(1e9, 2e9, 2).unwrap();
        for f in [1.0e9, 35.0e9] {
            let m = measure_point(&inst, &OutModel::thru(), f, DrivePort::Port1, &cfg).unwrap();
            let r = m.phasors[MEAS_TRANS].to_complex() / m.phasors[REF1].to_complex();
            assert!((r.norm() - 1.0).abs() < 1e-6, "{f}: {r}");
            assert!(r.arg().abs() < 1e-6);
            let l = measure_point(&inst, &OutModel::IdealLoad, f, DrivePort::Port1, &cfg).unwrap();
            assert!(l.phasors[MEAS_REFL].magnitude < 1e-6 * l.phasors[REF1].magnitude);
        }
    }

    #[test]
    fn sweep_is_deterministic_and_order_free() {
        let inst = InstrumentModel::typical().with_noise_sigma(1e-4);
        let mut cfg = SweepConfig::new(34e9, 35e9, 4).unwrap();
        cfg.samples_per_point = 256;
        cfg.rng_seed = 7;
        let a = run_sweep(&inst, &OutModel::thru(), &cfg).unwrap();
        let b = run_sweep(&inst, &OutModel::thru(), &cfg).unwrap();
        assert_eq!(a, b);
        let mut rev: Vec<f64> = a.grid.points().to_vec();
        rev.reverse();
        let single = FrequencyGrid::new(vec![rev[0]]).unwrap();
        let c = run_sweep_on_grid(&inst, &OutModel::thru(), &single, &cfg).unwrap();
        assert_eq!(c.raw.at(0), a.raw.at(3));
    }
}
