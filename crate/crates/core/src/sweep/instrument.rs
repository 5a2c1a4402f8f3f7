use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::model::SMatrix;
use crate::photonic::{BranchModel, EomModel, OidModel, PulseTrain};
use crate::units::from_db20;
use crate::{Error, Result};

/// Branch indices (receiver wiring).
pub const REF1: usize = 0;
pub const MEAS_REFL: usize = 1;
pub const MEAS_TRANS: usize = 2;
pub const REF2: usize = 3;

/// Cable, coupler and amplifier response ahead of one branch's modulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTracking {
    pub gain_db: f64,
    pub delay: f64,
}

impl BranchTracking {
    pub const UNITY: Self = Self { gain_db: 0.0, delay: 0.0 };

    pub fn response(&self, f: f64) -> Complex64 {
        Complex64::from_polar(from_db20(self.gain_db), -TAU * f * self.delay)
    }
}

/// Microwave test set between the source, the two ports and the four
/// branches. Leakages are in dB (negative); `-inf` disables a path.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSetModel {
    /// Incident wave leaking into each port's reflection coupler output.
    pub coupler_directivity_db: [f64; 2],
    /// Reflection seen looking back into the driven port.
    pub source_match: [Complex64; 2],
    /// Reflection terminating the undriven port.
    pub load_match: [Complex64; 2],
    /// Incident wave leaking into the opposite port's coupler output.
    pub crosstalk_db: f64,
    /// Reference arm relative to the test arm of the power splitter.
    pub splitter_imbalance_db: f64,
    /// Source leakage through the open side of the port switch.
    pub switch_isolation_db: f64,
    /// Splitter loss into each arm.
    pub splitter_loss_db: f64,
    /// Coupling factor of the port couplers (the reference arm is padded to match).
    pub coupling_db: f64,
    pub tracking: [BranchTracking; 4],
}

impl TestSetModel {
    /// Perfect couplers, matched ports, no leakage, identical branches.
    pub fn ideal() -> Self {
        Self {
            coupler_directivity_db: [f64::NEG_INFINITY; 2],
            source_match: [Complex64::new(0.0, 0.0); 2],
            load_match: [Complex64::new(0.0, 0.0); 2],
            crosstalk_db: f64::NEG_INFINITY,
            splitter_imbalance_db: 0.0,
            switch_isolation_db: f64::NEG_INFINITY,
            splitter_loss_db: -3.0,
            coupling_db: -10.0,
            tracking: [BranchTracking::UNITY; 4],
        }
    }

    /// Imperfect test set: -30 dB directivity, -20 dB source/load match,
    /// -80 dB crosstalk, 0.3 dB splitter imbalance, -60 dB switch isolation
    /// and unequal branch cabling.
    pub fn typical() -> Self {
        let m = from_db20(-20.0);
        Self {
            coupler_directivity_db: [-30.0, -30.0],
            source_match: [Complex64::from_polar(m, 0.7), Complex64::from_polar(m, -1.9)],
            load_match: [Complex64::from_polar(m, 2.3), Complex64::from_polar(m, -0.4)],
            crosstalk_db: -80.0,
            splitter_imbalance_db: 0.3,
            switch_isolation_db: -60.0,
            splitter_loss_db: -3.0,
            coupling_db: -10.0,
            tracking: [
                BranchTracking { gain_db: 0.0, delay: 1.00e-9 },
                BranchTracking { gain_db: -0.6, delay: 1.37e-9 },
                BranchTracking { gain_db: -0.9, delay: 1.52e-9 },
                BranchTracking { gain_db: -0.2, delay: 1.11e-9 },
            ],
        }
    }

    pub fn validated(self) -> Result<Self> {
        let leak = [
            self.coupler_directivity_db[0],
            self.coupler_directivity_db[1],
            self.crosstalk_db,
            self.switch_isolation_db,
            self.splitter_loss_db,
            self.coupling_db,
        ];
        if leak.iter().any(|&d| !(d < 0.0) || d.is_nan()) {
            return Err(Error::Model("test-set leakages and losses must be < 0 dB".into()));
        }
        if self.source_match.iter().chain(&self.load_match).any(|g| !(g.norm() < 1.0)) {
            return Err(Error::Model("port match must satisfy |gamma| < 1".into()));
        }
        if self.tracking.iter().any(|t| !t.gain_db.is_finite() || !(t.delay >= 0.0)) {
            return Err(Error::Model("branch tracking needs finite gain and delay >= 0".into()));
        }
        Ok(self)
    }

    /// Complex wave amplitudes at the four branch inputs for a unit source
    /// wave, with `drive` = 0 for port 1 and 1 for port 2. The port
    /// interaction is solved exactly (all re-reflections).
    pub fn branch_waves(&self, s: &SMatrix, drive: usize, f: f64) -> [Complex64; 4] {
        let split = from_db20(self.splitter_loss_db);
        let c = from_db20(self.coupling_db);
        let a_inc = Complex64::new(split, 0.0);
        let reference = a_inc * c * from_db20(self.splitter_imbalance_db);
        let leak_ref = a_inc * c * from_db20(self.switch_isolation_db);

        // orient so that index 0 is the driven port
        let (s11, s12, s21, s22) = if drive == 0 { (s.s11, s.s12, s.s21, s.s22) } else { (s.s22, s.s21, s.s12, s.s11) };
        let gs = self.source_match[drive];
        let gl = self.load_match[1 - drive];
        // a1 = a_inc + gs b1, a2 = gl b2, b = S a
        let den = (1.0 - gs * s11) * (1.0 - s22 * gl) - gs * gl * s12 * s21;
        let a1 = a_inc * (1.0 - s22 * gl) / den;
        let b2 = s21 * a1 / (1.0 - s22 * gl);
        let b1 = s11 * a1 + s12 * gl * b2;

        let directivity = from_db20(self.coupler_directivity_db[drive]);
        let crosstalk = from_db20(self.crosstalk_db);
        let near = c * (b1 + directivity * a_inc);
        let far = c * b2 + crosstalk * a_inc;

        let mut w = [Complex64::new(0.0, 0.0); 4];
        if drive == 0 {
            w[REF1] = reference;
            w[REF2] = leak_ref;
            w[MEAS_REFL] = near;
            w[MEAS_TRANS] = far;
        } else {
            w[REF2] = reference;
            w[REF1] = leak_ref;
            w[MEAS_TRANS] = near;
            w[MEAS_REFL] = far;
        }
        for (wave, t) in w.iter_mut().zip(&self.tracking) {
            *wave *= t.response(f);
        }
        w
    }
}

/// The simulated analyzer: test set plus four photonic receiver branches
/// sharing one pulse train.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentModel {
    pub testset: TestSetModel,
    /// Indexed by [`REF1`], [`MEAS_REFL`], [`MEAS_TRANS`], [`REF2`].
    pub branches: [BranchModel; 4],
    pub f_rep: f64,
    pub source_power_dbm: f64,
}

impl InstrumentModel {
    pub fn new(testset: TestSetModel, branch: BranchModel, source_power_dbm: f64) -> Result<Self> {
        let f_rep = branch.pulses.f_rep;
        Self {
            testset,
            branches: [branch.clone(), branch.clone(), branch.clone(), branch],
            f_rep,
            source_power_dbm,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.branches.iter().any(|b| b.pulses.f_rep != self.f_rep) {
            return Err(Error::Model("all branches must share the instrument repetition rate".into()));
        }
        if !self.source_power_dbm.is_finite() {
            return Err(Error::Model("source power must be finite".into()));
        }
        Ok(Self { testset: self.testset.validated()?, ..self })
    }

    /// Branch settings of the reference configuration: 36.456 MHz, 500 fs
    /// pulses, a 5.4 V modulator whose rolloff (with the pulses) reaches
    /// 7.5 dB at 40 GHz, a 300 MHz digitizer.
    pub fn reference_branch() -> BranchModel {
        let pulses = PulseTrain::new(5e-3, 36.456e6, 500e-15).expect("valid pulses");
        let eom = EomModel::fitted(5.4, 1, &pulses, 40e9, 7.5).expect("valid modulator fit");
        let oid = OidModel::new(300e6, 10.0).expect("valid digitizer");
        BranchModel { pulses, eom, oid }
    }

    /// Reference branches behind an ideal test set, 0 dBm source, noiseless.
    pub fn ideal() -> Self {
        Self::new(TestSetModel::ideal(), Self::reference_branch(), 0.0).expect("valid instrument")
    }

    /// Reference branches behind [`TestSetModel::typical`], 0 dBm source, noiseless.
    pub fn typical() -> Self {
        Self::new(TestSetModel::typical(), Self::reference_branch(), 0.0).expect("valid instrument")
    }

    pub fn with_noise_sigma(mut self, sigma: f64) -> Self {
        for b in &mut self.branches {
            b.oid.noise_sigma = sigma;
        }
        self
    }

    pub fn with_adc_bits(mut self, bits: u32) -> Self {
        for b in &mut self.branches {
            b.oid.adc_bits = bits;
        }
        self
    }

    pub fn with_pd_nonlin(mut self, k: f64) -> Self {
        for b in &mut self.branches {
            b.oid.pd_nonlin = k;
        }
        self
    }
}
