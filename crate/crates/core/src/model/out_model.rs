use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{SMatrix, TwoPortSParams};
use crate::units::{from_db20, Z0};
use crate::{Error, Result};

/// Object under test (or calibration standard) as a two-port model.
#[derive(Debug, Clone, PartialEq)]
pub enum OutModel {
    ParametricBandpass(BandpassSpec),
    /// Measured or exported data, linearly interpolated in re/im and held
    /// constant beyond the table ends.
    TouchstoneTable(TwoPortSParams),
    /// The same one-port reflection `gamma` on both ports, no transmission.
    IdealReflect(Complex64),
    /// Lossless open or short with a polynomial reactance and offset delay.
    OffsetReflect(OffsetReflect),
    /// Matched lossless line of the given delay (zero for a flush thru).
    IdealThru { delay: f64 },
    IdealLoad,
}

impl OutModel {
    pub fn short() -> Self {
        OutModel::IdealReflect(Complex64::new(-1.0, 0.0))
    }

    pub fn open() -> Self {
        OutModel::IdealReflect(Complex64::new(1.0, 0.0))
    }

    pub fn thru() -> Self {
        OutModel::IdealThru { delay: 0.0 }
    }

    /// S-matrix at frequency `f` (Hz).
    pub fn response(&self, f: f64) -> SMatrix {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            OutModel::ParametricBandpass(bp) => bp.response(f),
            OutModel::TouchstoneTable(t) => interpolate(t, f),
            OutModel::IdealReflect(g) => SMatrix::new(*g, zero, zero, *g),
            OutModel::OffsetReflect(r) => {
                let g = r.gamma(f);
                SMatrix::new(g, zero, zero, g)
            }
            OutModel::IdealThru { delay } => {
                let t = Complex64::from_polar(1.0, -TAU * f * delay);
                SMatrix::new(zero, t, t, zero)
            }
            OutModel::IdealLoad => SMatrix::zero(),
        }
    }
}

fn interpolate(t: &TwoPortSParams, f: f64) -> SMatrix {
    let pts = t.grid.points();
    if f <= pts[0] {
        return t.at(0);
    }
    if f >= pts[pts.len() - 1] {
        return t.at(pts.len() - 1);
    }
    let hi = pts.partition_point(|&p| p <= f);
    let lo = hi - 1;
    let w = (f - pts[lo]) / (pts[hi] - pts[lo]);
    let lerp = |v: &[Complex64]| v[lo] * (1.0 - w) + v[hi] * w;
    SMatrix::new(lerp(&t.s11), lerp(&t.s12), lerp(&t.s21), lerp(&t.s22))
}

/// Analytic bandpass filter: a Butterworth low-pass prototype shifted to
/// `f0` with arithmetic symmetry, so the -3 dB points sit exactly at
/// `f0 +/- bw3db/2`. Reciprocal and symmetric (`s12 = s21`, `s22 = s11`).
#[derive(Debug, Clone, PartialEq)]
pub struct BandpassSpec {
    pub f0: f64,
    pub bw3db: f64,
    pub order: usize,
    pub insertion_loss_db: f64,
    pub rejection_floor_db: f64,
    pub return_loss_db: f64,
    pub group_delay_extra: f64,
}

impl BandpassSpec {
    /// Defaults: order 4, 1 dB insertion loss, 60 dB rejection floor.
    pub fn new(f0: f64, bw3db: f64, return_loss_db: f64) -> Result<Self> {
        Self {
            f0,
            bw3db,
            order: 4,
            insertion_loss_db: 1.0,
            rejection_floor_db: 60.0,
            return_loss_db,
            group_delay_extra: 0.0,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.bw3db > 0.0 && self.bw3db < self.f0) {
            return Err(Error::Model(format!(
                "bandpass needs 0 < bw3db < f0 (got bw3db = {}, f0 = {})",
                self.bw3db, self.f0
            )));
        }
        if self.order == 0 {
            return Err(Error::Model("bandpass order must be >= 1".into()));
        }
        if self.insertion_loss_db < 0.0 || self.rejection_floor_db <= 0.0 {
            return Err(Error::Model(
                "insertion loss must be >= 0 dB and the rejection floor > 0 dB".into(),
            ));
        }
        if self.group_delay_extra < 0.0 {
            return Err(Error::Model("group_delay_extra must be >= 0".into()));
        }
        let g = self.passband_gain();
        let r = self.gamma_at_center();
        if g * g + r * r > 1.0 + 1e-12 {
            return Err(Error::Model(format!(
                "insertion loss {} dB with return loss {} dB is not passive",
                self.insertion_loss_db, self.return_loss_db
            )));
        }
        Ok(self)
    }

    /// Return loss giving the requested VSWR at the center frequency.
    pub fn return_loss_for_vswr(vswr: f64) -> f64 {
        -20.0 * ((vswr - 1.0) / (vswr + 1.0)).log10()
    }

    fn passband_gain(&self) -> f64 {
        from_db20(-self.insertion_loss_db)
    }

    fn gamma_at_center(&self) -> f64 {
        from_db20(-self.return_loss_db)
    }

    /// Normalized Butterworth response at offset `omega` (band edges at +/-1).
    fn prototype(&self, omega: f64) -> Complex64 {
        let n = self.order as f64;
        let s = Complex64::new(0.0, omega);
        (1..=self.order).fold(Complex64::new(1.0, 0.0), |acc, k| {
            let theta = PI * (2.0 * k as f64 + n - 1.0) / (2.0 * n);
            let p = Complex64::from_polar(1.0, theta);
            acc * (-p) / (s - p)
        })
    }

    /// Transmission without the extra linear-phase delay.
    fn shaped_transmission(&self, f: f64) -> Complex64 {
        // scaled so the prototype is exactly 3.0 dB down at the band edges
        let edge = (10f64.powf(0.3) - 1.0).powf(0.5 / self.order as f64);
        let omega = edge * (f - self.f0) / (0.5 * self.bw3db);
        let floor = from_db20(-self.rejection_floor_db);
        // the floor adds in power so the band edges stay at -3.0 dB
        let h = self.prototype(omega);
        let mag = (floor * floor + (1.0 - floor * floor) * h.norm_sqr()).sqrt();
        Complex64::from_polar(mag * self.passband_gain(), h.arg())
    }

    pub fn response(&self, f: f64) -> SMatrix {
        let s21 = self.shaped_transmission(f) * Complex64::from_polar(1.0, -TAU * f * self.group_delay_extra);
        let g = self.passband_gain();
        let r = self.gamma_at_center();
        let refl_mag = (1.0 - s21.norm_sqr() * (1.0 - r * r) / (g * g)).max(0.0).sqrt();
        // lossless-symmetric phase relation: s11 in quadrature with s21
        let s11 = Complex64::from_polar(refl_mag, s21.arg() + 0.5 * PI);
        SMatrix::new(s11, s21, s21, s11)
    }

    /// Mean group delay of the filter shape alone across its -3 dB band.
    pub fn intrinsic_mean_delay(&self) -> f64 {
        let steps = 4000;
        let lo = self.f0 - 0.5 * self.bw3db;
        let df = self.bw3db / steps as f64;
        let mut phase = 0.0;
        let mut prev = self.shaped_transmission(lo);
        for i in 1..=steps {
            let cur = self.shaped_transmission(lo + df * i as f64);
            phase += (cur / prev).arg();
            prev = cur;
        }
        -phase / (TAU * self.bw3db)
    }

    /// Sets `group_delay_extra` so the mean passband group delay equals `target`.
    pub fn with_mean_delay(mut self, target: f64) -> Result<Self> {
        self.group_delay_extra = target - self.intrinsic_mean_delay();
        self.validated()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectKind {
    Open,
    Short,
}

/// Open or short standard: terminating reactance from a cubic polynomial in
/// frequency (capacitance in F for an open, inductance in H for a short)
/// behind a lossless offset line of one-way delay `offset_delay`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetReflect {
    pub kind: ReflectKind,
    pub poly: [f64; 4],
    pub offset_delay: f64,
}

impl OffsetReflect {
    pub fn gamma(&self, f: f64) -> Complex64 {
        let x = self.poly[0] + f * (self.poly[1] + f * (self.poly[2] + f * self.poly[3]));
        let w = TAU * f;
        let term = match self.kind {
            ReflectKind::Open => {
                let jwcz = Complex64::new(0.0, w * x * Z0);
                (1.0 - jwcz) / (1.0 + jwcz)
            }
            ReflectKind::Short => {
                let jwl = Complex64::new(0.0, w * x);
                (jwl - Z0) / (jwl + Z0)
            }
        };
        term * Complex64::from_polar(1.0, -2.0 * w * self.offset_delay)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::db20;

    fn ka_filter() -> BandpassSpec {
        BandpassSpec::new(34.725e9, 4.25e9, BandpassSpec::return_loss_for_vswr(1.5)).unwrap()
    }

    #[test]
    fn ideal_thru_and_open() {
        let m = OutModel::thru().response(12.3e9);
        assert_eq!(m.s21, Complex64::new(1.0, 0.0));
        assert_eq!(m.s11, Complex64::new(0.0, 0.0));
        let o = OutModel::open().response(1e9);
        assert_eq!(o.s11, Complex64::new(1.0, 0.0));
        assert_eq!(o.s21, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn bandpass_vswr_at_center() {
        let bp = ka_filter();
        let s11 = bp.response(bp.f0).s11.norm();
        assert!((s11 - 0.2).abs() < 1e-12);
        assert!(((1.0 + s11) / (1.0 - s11) - 1.5).abs() < 1e-10);
    }

    #[test]
    fn bandpass_three_db_edges() {
        let bp = ka_filter();
        let center = db20(bp.response(bp.f0).s21.norm());
        for f in [bp.f0 - bp.bw3db / 2.0, bp.f0 + bp.bw3db / 2.0] {
            let drop = center - db20(bp.response(f).s21.norm());
            assert!((drop - 3.0).abs() < 0.05, "drop {drop}");
        }
    }

    #[test]
    fn bandpass_passive_and_reciprocal() {
        let bp = ka_filter().with_mean_delay(900e-12).unwrap();
        for i in 0..2000 {
            let f = 1e9 + i as f64 * 30e6;
            let m = bp.response(f);
            assert_eq!(m.s12, m.s21);
            assert!(m.max_element_norm() <= 1.0 + 1e-12);
            assert!(m.s11.norm_sqr() + m.s21.norm_sqr() <= 1.0 + 1e-12);
        }
        // far out of band the filter reflects nearly everything
        assert!(bp.response(5e9).s11.norm() > 0.999);
    }

    #[test]
    fn mean_delay_helper() {
        let bp = ka_filter();
        let intrinsic = bp.intrinsic_mean_delay();
        assert!(intrinsic > 100e-12 && intrinsic < 500e-12, "{intrinsic}");
        let bp = bp.with_mean_delay(900e-12).unwrap();
        assert!((bp.intrinsic_mean_delay() + bp.group_delay_extra - 900e-12).abs() < 1e-15);
    }

    #[test]
    fn non_passive_config_rejected() {
        let mut bp = ka_filter();
        bp.insertion_loss_db = 0.0;
        assert!(bp.validated().is_err());
        assert!(BandpassSpec::new(1e9, 2e9, 20.0).is_err());
    }

    #[test]
    fn offset_reflect_is_lossless() {
        let open = OffsetReflect { kind: ReflectKind::Open, poly: [50e-15, 0.0, 0.0, 0.0], offset_delay: 30e-12 };
        let short = OffsetReflect { kind: ReflectKind::Short, poly: [20e-12, 0.0, 0.0, 0.0], offset_delay: 30e-12 };
        for f in [1e9, 10e9, 40e9] {
            assert!((open.gamma(f).norm() - 1.0).abs() < 1e-12);
            assert!((short.gamma(f).norm() - 1.0).abs() < 1e-12);
        }
        let zero = OffsetReflect { kind: ReflectKind::Short, poly: [0.0; 4], offset_delay: 0.0 };
        assert!((zero.gamma(5e9) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn table_interpolates_and_clamps() {
        use crate::model::FrequencyGrid;
        let grid = FrequencyGrid::new(vec![1e9, 2e9]).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let m = [SMatrix::new(one, one * 0.0, one * 0.0, one), SMatrix::new(one * 3.0, one, one, one)];
        let t = OutModel::TouchstoneTable(TwoPortSParams::from_matrices(grid, &m).unwrap());
        assert!((t.response(1.5e9).s11 - 2.0).norm() < 1e-12);
        assert_eq!(t.response(0.5e9).s11, one);
        assert_eq!(t.response(9e9).s11, one * 3.0);
    }
}
