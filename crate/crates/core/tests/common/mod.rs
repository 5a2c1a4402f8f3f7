#![allow(dead_code)]

use num_complex::Complex64;
use pvna::calibration::DirectionTerms;
use pvna::model::{BandpassSpec, OutModel, SMatrix};
use rand::Rng;

/// Forward model of the twelve-term error box: what a raw sweep reads for
/// a DUT `s` behind terms `fw` (port 1 driven) and `rv` (port 2 driven).
pub fn embed(s: &SMatrix, fw: &DirectionTerms, rv: &DirectionTerms) -> SMatrix {
    let g1 = s.s11 + s.s12 * s.s21 * fw.el / (1.0 - s.s22 * fw.el);
    let g2 = s.s22 + s.s21 * s.s12 * rv.el / (1.0 - s.s11 * rv.el);
    let d_fw = (1.0 - fw.es * s.s11) * (1.0 - fw.el * s.s22) - fw.es * fw.el * s.s21 * s.s12;
    let d_rv = (1.0 - rv.es * s.s22) * (1.0 - rv.el * s.s11) - rv.es * rv.el * s.s12 * s.s21;
    SMatrix {
        s11: fw.ed + fw.er * g1 / (1.0 - fw.es * g1),
        s21: fw.ex + fw.et * s.s21 / d_fw,
        s22: rv.ed + rv.er * g2 / (1.0 - rv.es * g2),
        s12: rv.ex + rv.et * s.s12 / d_rv,
    }
}

pub fn rand_c<R: Rng>(rng: &mut R, max_mag: f64) -> Complex64 {
    Complex64::from_polar(max_mag * rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>())
}

/// Random passive two-port (every |s_ij| below 0.7).
pub fn rand_dut<R: Rng>(rng: &mut R) -> SMatrix {
    SMatrix::new(rand_c(rng, 0.7), rand_c(rng, 0.7), rand_c(rng, 0.7), rand_c(rng, 0.7))
}

/// Random error box: leakage and match terms below 0.3, tracking near 1.
pub fn rand_terms<R: Rng>(rng: &mut R) -> DirectionTerms {
    let track = |rng: &mut R| {
        Complex64::from_polar(0.7 + 0.6 * rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>())
    };
    DirectionTerms {
        ed: rand_c(rng, 0.3),
        es: rand_c(rng, 0.3),
        er: track(rng),
        el: rand_c(rng, 0.3),
        et: track(rng),
        ex: rand_c(rng, 0.3),
    }
}

/// The 35 GHz filter used as object under test: 4.25 GHz wide, VSWR 1.5 at
/// the center, 900 ps mean passband delay.
pub fn ka_filter() -> OutModel {
    let spec = BandpassSpec::new(34.725e9, 4.25e9, BandpassSpec::return_loss_for_vswr(1.5))
        .unwrap()
        .with_mean_delay(900e-12)
        .unwrap();
    OutModel::ParametricBandpass(spec)
}

/// Prints one result line and returns the verdict.
pub fn check(label: &str, pass: bool, detail: impl std::fmt::Display) -> bool {
    println!("{} {label}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
