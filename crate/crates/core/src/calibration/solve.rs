use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::{DirectionTerms, ErrorTerms12};
use crate::model::{OutModel, SMatrix, TwoPortSParams};
use crate::sweep::{run_sweep, InstrumentModel, RawSweep, SweepConfig};
use crate::{Error, Result};

/// Smallest separation allowed between the three known reflections.
const MIN_STANDARD_SPACING: f64 = 1e-6;
/// Correction denominators below this are singular.
const MIN_DENOMINATOR: f64 = 1e-12;

/// Three-term one-port error model
/// `G_m = ed + er G / (1 - es G)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnePortTerms {
    pub ed: Complex64,
    pub es: Complex64,
    pub er: Complex64,
}

impl OnePortTerms {
    pub fn measure(&self, gamma: Complex64) -> Complex64 {
        self.ed + self.er * gamma / (1.0 - self.es * gamma)
    }

    /// Inverse of [`measure`](Self::measure).
    pub fn actual(&self, measured: Complex64) -> Complex64 {
        let d = measured - self.ed;
        d / (self.er + self.es * d)
    }
}

/// Solves the one-port model from three standards. The bilinear model is
/// linear in `(ed, es, de)` with `de = ed es - er`:
/// `G_m = ed + G G_m es - G de`.
pub fn solve_one_port(measured: [Complex64; 3], known: [Complex64; 3]) -> Result<OnePortTerms> {
    for i in 0..3 {
        for j in i + 1..3 {
            if (known[i] - known[j]).norm() <= MIN_STANDARD_SPACING {
                return Err(Error::Conditioning(format!(
                    "standards {i} and {j} have equal reflection {}",
                    known[i]
                )));
            }
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let a = Matrix3::from_fn(|r, c| match c {
        0 => one,
        1 => known[r] * measured[r],
        _ => -known[r],
    });
    let b = Vector3::from_fn(|r, _| measured[r]);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Conditioning("one-port system is singular".into()))?;
    let (ed, es, de) = (x[0], x[1], x[2]);
    Ok(OnePortTerms { ed, es, er: ed * es - de })
}

/// Load match, transmission tracking and crosstalk of one direction from a
/// thru measurement. `fwd` selects the orientation: forward uses
/// `(s11m, s21m)` with the port-1 one-port terms, reverse uses `(s22m, s12m)`
/// with the port-2 terms; `isolation` is the crosstalk measured with both
/// ports terminated.
pub fn solve_transmission(
    thru_meas: &SMatrix,
    isolation: Complex64,
    one_port: &OnePortTerms,
    thru_model: &SMatrix,
    forward: bool,
) -> Result<DirectionTerms> {
    let (refl_m, trans_m, s11, s21, s12, s22) = if forward {
        (thru_meas.s11, thru_meas.s21, thru_model.s11, thru_model.s21, thru_model.s12, thru_model.s22)
    } else {
        (thru_meas.s22, thru_meas.s12, thru_model.s22, thru_model.s12, thru_model.s21, thru_model.s11)
    };
    if s21.norm() < 1e-6 || s12.norm() < 1e-6 {
        return Err(Error::Conditioning("thru standard does not transmit".into()));
    }
    let picked = trans_m - isolation;
    if !(picked.norm() > 1e-12) {
        return Err(Error::Conditioning(format!("thru transmission {} lost in crosstalk", trans_m.norm())));
    }
    let es = one_port.es;
    let g = one_port.actual(refl_m) - s11;
    let el = g / (s12 * s21 + s22 * g);
    let d = (1.0 - es * s11) * (1.0 - el * s22) - es * el * s21 * s12;
    Ok(DirectionTerms { ed: one_port.ed, es, er: one_port.er, el, et: picked * d / s21, ex: isolation })
}

/// Twelve-term correction of one measured S-matrix.
pub fn correct_point(m: &SMatrix, fw: &DirectionTerms, rv: &DirectionTerms, f: f64) -> Result<SMatrix> {
    let n11 = (m.s11 - fw.ed) / fw.er;
    let n21 = (m.s21 - fw.ex) / fw.et;
    let n12 = (m.s12 - rv.ex) / rv.et;
    let n22 = (m.s22 - rv.ed) / rv.er;
    let d = (1.0 + n11 * fw.es) * (1.0 + n22 * rv.es) - n21 * n12 * fw.el * rv.el;
    if !(d.norm() >= MIN_DENOMINATOR) || ![n11, n21, n12, n22].iter().all(|n| n.is_finite()) {
        return Err(Error::SingularCorrection { f });
    }
    Ok(SMatrix {
        s11: (n11 * (1.0 + n22 * rv.es) - fw.el * n21 * n12) / d,
        s21: n21 * (1.0 + n22 * (rv.es - fw.el)) / d,
        s12: n12 * (1.0 + n11 * (fw.es - rv.el)) / d,
        s22: (n22 * (1.0 + n11 * fw.es) - rv.el * n21 * n12) / d,
    })
}

pub fn apply_correction(raw: &TwoPortSParams, e: &ErrorTerms12) -> Result<TwoPortSParams> {
    if raw.grid != e.grid {
        return Err(Error::GridMismatch(format!(
            "measurement has {} points over {}..{} Hz, error terms {} points over {}..{} Hz",
            raw.grid.len(),
            raw.grid.first(),
            raw.grid.last(),
            e.grid.len(),
            e.grid.first(),
            e.grid.last()
        )));
    }
    let fixed = raw
        .matrices()
        .iter()
        .zip(raw.grid.points())
        .enumerate()
        .map(|(i, (m, &f))| correct_point(m, &e.forward[i], &e.reverse[i], f))
        .collect::<Result<Vec<_>>>()?;
    TwoPortSParams::from_matrices(raw.grid.clone(), &fixed)
}

/// Short, open, load and thru standards.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardsKit {
    pub short: OutModel,
    pub open: OutModel,
    pub load: OutModel,
    pub thru: OutModel,
}

impl StandardsKit {
    /// Flush short (-1), open (+1), perfect load and zero-length thru.
    pub fn ideal() -> Self {
        Self { short: OutModel::short(), open: OutModel::open(), load: OutModel::IdealLoad, thru: OutModel::thru() }
    }
}

fn standard_seed(seed: u64, k: u64) -> u64 {
    seed ^ (k + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Measures the kit (each reflection standard on both ports at once, the
/// thru, and the load pair for isolation) and solves all twelve terms at
/// every sweep point.
pub fn run_solt(inst: &InstrumentModel, kit: &StandardsKit, cfg: &SweepConfig) -> Result<ErrorTerms12> {
    let sweep = |out: &OutModel, k: u64| -> Result<RawSweep> {
        let mut c = cfg.clone();
        c.rng_seed = standard_seed(cfg.rng_seed, k);
        run_sweep(inst, out, &c)
    };
    let short = sweep(&kit.short, 0)?;
    let open = sweep(&kit.open, 1)?;
    let load = sweep(&kit.load, 2)?;
    let thru = sweep(&kit.thru, 3)?;

    let grid = short.grid.clone();
    let mut forward = Vec::with_capacity(grid.len());
    let mut reverse = Vec::with_capacity(grid.len());
    for (i, &f) in grid.points().iter().enumerate() {
        let at = |e: Error| match e {
            Error::Conditioning(msg) => Error::Calibration { f, msg },
            other => other,
        };
        let models = [kit.short.response(f), kit.open.response(f), kit.load.response(f)];
        let meas = [short.raw.at(i), open.raw.at(i), load.raw.at(i)];
        let p1 = solve_one_port(meas.map(|m| m.s11), models.map(|m| m.s11)).map_err(at)?;
        let p2 = solve_one_port(meas.map(|m| m.s22), models.map(|m| m.s22)).map_err(at)?;
        let t = thru.raw.at(i);
        let tm = kit.thru.response(f);
        let iso = load.raw.at(i);
        forward.push(solve_transmission(&t, iso.s21, &p1, &tm, true).map_err(at)?);
        reverse.push(solve_transmission(&t, iso.s12, &p2, &tm, false).map_err(at)?);
    }
    Ok(ErrorTerms12 { grid, forward, reverse })
}
