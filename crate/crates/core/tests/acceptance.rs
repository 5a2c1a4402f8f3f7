//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! per checked quantity. Run with `--nocapture` to see the lines.

mod common;

use std::time::{Duration, Instant};

use common::{check, embed, ka_filter, rand_dut, rand_terms};
use pvna::analysis::*;
use pvna::calibration::*;
use pvna::dsp::*;
use pvna::model::*;
use pvna::photonic::*;
use pvna::sweep::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const F_REP: f64 = 36.456e6;

fn runtime(label: &str, start: Instant, limit_s: u64) -> bool {
    let took = start.elapsed();
    check(&format!("{label} runtime"), took < Duration::from_secs(limit_s), format!("{took:.2?} (limit {limit_s} s)"))
}

// 1. Phase reversal, 34.5 - 35 GHz, pure delay object.
#[test]
fn criterion_1_phase_reversal() {
    let start = Instant::now();
    let mut ts = TestSetModel::ideal();
    ts.tracking = TestSetModel::typical().tracking;
    let inst = InstrumentModel::new(ts, InstrumentModel::reference_branch(), 0.0).unwrap();
    let cfg = SweepConfig::new(34.5e9, 35e9, 501).unwrap();
    let grid = cfg.grid().unwrap();
    let pr = phase_reversal_sweep(&inst, &OutModel::IdealThru { delay: 2e-9 }, &grid, &cfg).unwrap();

    let spacing = pr.flip_spacings();
    let worst = spacing.iter().map(|s| (s - 18.228e6).abs()).fold(0.0, f64::max);
    let mut ok = check(
        "C1 flips every f_rep/2 = 18.228 MHz",
        !spacing.is_empty() && worst < 1.0,
        format!("{} flips, max spacing error {worst:.3e} Hz", pr.flip_frequencies.len()),
    );
    // raw phase is the negated true phase exactly where the zone is even
    let sign_ok = pr.uncorrected_deg.iter().zip(&pr.corrected_deg).zip(&pr.flipped).all(|((u, c), &fl)| {
        let c = pvna::units::wrap_phase(c.to_radians()).to_degrees();
        let expect = if fl { -c } else { c };
        pvna::units::wrap_phase((u - expect).to_radians()).abs() < 1e-6
    });
    ok &= check("C1 uncorrected phase reversed in even zones", sign_ok, "pointwise");
    ok &= check(
        "C1 corrected phase residual from line < 1 deg",
        pr.max_residual_deg < 1.0,
        format!("{:.4} deg", pr.max_residual_deg),
    );
    ok &= runtime("C1", start, 10);
    assert!(ok);
}

// 2. Dynamic range versus FFT length.
#[test]
fn criterion_2_dynamic_range() {
    let start = Instant::now();
    let inst = InstrumentModel::ideal().with_pd_nonlin(PD_NONLIN_MEASURED);
    let f = bin_centered_tone(35e9, inst.f_rep, 62_500);
    let sigma = calibrate_noise_sigma(&inst, f, 2.8, 62_500, FLOOR_TARGET_DBC, 1).unwrap();
    let noisy = inst.with_noise_sigma(sigma);
    let lengths = [62_500, 250_000, 1_000_000, 4_000_000];
    let targets = [-102.0, -108.0, -114.0, -120.0];

    let mut ok = true;
    let mut slopes = Vec::new();
    for seed in 0..10u64 {
        let pts = noise_floor_study(&noisy, f, 2.8, &lengths, 1000 + seed).unwrap();
        if seed == 0 {
            for (p, t) in pts.iter().zip(targets) {
                ok &= check(
                    &format!("C2 floor at N = {}", p.n_fft),
                    (p.floor_dbc - t).abs() <= 1.0,
                    format!("{:.2} dBc (target {t} +/- 1), dynamic range {:.2} dB", p.floor_dbc, p.dynamic_range_db),
                );
            }
            let sig: Vec<f64> = pts.iter().map(|p| p.signal_db).collect();
            let spread = sig.iter().cloned().fold(f64::MIN, f64::max) - sig.iter().cloned().fold(f64::MAX, f64::min);
            ok &= check("C2 signal bin unchanged across N", spread < 0.5, format!("spread {spread:.4} dB"));
        }
        slopes.extend(pts.windows(2).map(|w| w[1].floor_dbc - w[0].floor_dbc));
    }
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    ok &= check(
        "C2 floor change per quadrupling (10 seeds)",
        (mean + 6.0).abs() <= 0.5,
        format!("{mean:.3} dB (target -6 +/- 0.5)"),
    );
    ok &= check("C2 noise sigma", sigma > 0.0, format!("{sigma:.4e} V rms"));
    ok &= runtime("C2", start, 120);
    assert!(ok);
}

// 3. System response of the reference configuration.
#[test]
fn criterion_3_system_response() {
    let start = Instant::now();
    let inst = InstrumentModel::ideal();
    let b = &inst.branches[0];
    assert_eq!((b.pulses.pulse_fwhm, b.oid.bw3db, b.pulses.f_rep), (500e-15, 300e6, F_REP));
    let r = system_response(&inst, &SweepConfig::new(10e6, 40e9, 401).unwrap()).unwrap();
    let mut ok = check(
        "C3 max attenuation 0-40 GHz",
        (r.max_attenuation_db() - 7.5).abs() <= 0.5,
        format!("{:.3} dB (target 7.5 +/- 0.5)", r.max_attenuation_db()),
    );
    ok &= check("C3 ripple", r.ripple_db() < 0.2, format!("{:.2e} dB (limit 0.2)", r.ripple_db()));

    let mut narrow = inst.clone();
    for b in &mut narrow.branches {
        b.oid = OidModel::new(0.2 * F_REP, 10.0).unwrap();
    }
    // two periods, 40 points each
    let cfg = SweepConfig::new(10e9, 10e9 + 2.0 * F_REP, 81).unwrap();
    let r = system_response(&narrow, &cfg).unwrap();
    let dev: Vec<f64> = r.magnitude_db.iter().zip(&r.envelope_db).map(|(m, e)| m - e).collect();
    let period_err = (0..41).map(|i| (dev[i] - dev[i + 40]).abs()).fold(0.0, f64::max);
    let half_shift = (0..41).map(|i| (dev[i] - dev[i + 20]).abs()).fold(0.0, f64::max);
    ok &= check("C3 narrow OID ripple peak-to-peak", r.ripple_pp_db() > 1.0, format!("{:.2} dB", r.ripple_pp_db()));
    ok &= check(
        "C3 narrow OID ripple period f_rep",
        period_err < 0.01 && half_shift > 1.0,
        format!("repeat error {period_err:.2e} dB, half-period difference {half_shift:.2} dB"),
    );
    ok &= runtime("C3", start, 30);
    assert!(ok);
}

// 4. Compression.
#[test]
fn criterion_4_compression() {
    let start = Instant::now();
    let inst = InstrumentModel::ideal();
    let theory = theoretical_compression(5.4);
    let ideal = compression_sweep(&inst, 35e9, -30.0, 10.0, 0.25).unwrap();
    let mut ok = check(
        "C4 ideal PD vs Bessel theory",
        (ideal.p01 - theory).abs() <= 0.2,
        format!("{:.3} dBm vs {theory:.3} dBm; reference value 5.6 dBm differs from the Bessel root", ideal.p01),
    );
    let tuned = compression_sweep(&inst.with_pd_nonlin(PD_NONLIN_MEASURED), 35e9, -30.0, 10.0, 0.25).unwrap();
    ok &= check(
        "C4 with PD nonlinearity",
        (tuned.p01 - 2.8).abs() <= 0.3,
        format!("{:.3} dBm (measured target 2.8 +/- 0.3), k = {PD_NONLIN_MEASURED}", tuned.p01),
    );
    ok &= runtime("C4", start, 30);
    assert!(ok);
}

fn fig9_run(inst: &InstrumentModel, tol: f64, label: &str) -> bool {
    let out = ka_filter();
    let mut cfg = SweepConfig::new(30e9, 40e9, 201).unwrap();
    cfg.rng_seed = 11;
    let terms = run_solt(inst, &StandardsKit::ideal(), &cfg).unwrap();
    cfg.rng_seed = 12;
    let raw = run_sweep(inst, &out, &cfg).unwrap();
    let s = apply_correction(&raw.raw, &terms).unwrap();
    let err = s.grid.points().iter().enumerate().map(|(i, &f)| s.at(i).max_abs_diff(&out.response(f))).fold(0.0, f64::max);
    let b = band_params(&s).unwrap();
    let mut ok = check(&format!("C5 {label} clipping"), !raw.any_clipped(), "none");
    ok &= check(&format!("C5 {label} f_center"), (b.f_center - 34.725e9).abs() <= 10e6, format!("{:.4} GHz", b.f_center / 1e9));
    ok &= check(&format!("C5 {label} bw3db"), (b.bw3db - 4.25e9).abs() <= 50e6, format!("{:.4} GHz", b.bw3db / 1e9));
    ok &= check(&format!("C5 {label} vswr"), (b.vswr_at_center - 1.5).abs() <= 0.05, format!("{:.4}", b.vswr_at_center));
    ok &= check(
        &format!("C5 {label} delay"),
        (b.delay_avg - 900e-12).abs() <= 10e-12,
        format!("{:.2} ps", b.delay_avg * 1e12),
    );
    ok &= check(&format!("C5 {label} max |S - model|"), err < tol, format!("{err:.3e} (limit {tol})"));
    ok
}

// 5. Calibrated S-parameters of the bandpass filter.
#[test]
fn criterion_5_end_to_end() {
    let start = Instant::now();
    let inst = InstrumentModel::typical();
    let ts = &inst.testset;
    assert_eq!((ts.coupler_directivity_db, ts.crosstalk_db), ([-30.0, -30.0], -80.0));
    assert!(ts.source_match.iter().chain(&ts.load_match).all(|g| (g.norm() - 0.1).abs() < 1e-12));
    let mut ok = fig9_run(&inst, 0.01, "noiseless");

    let cal = InstrumentModel::ideal().with_pd_nonlin(PD_NONLIN_MEASURED);
    let f = bin_centered_tone(35e9, cal.f_rep, 62_500);
    let sigma = calibrate_noise_sigma(&cal, f, 2.8, 62_500, FLOOR_TARGET_DBC, 1).unwrap();
    ok &= fig9_run(&inst.with_noise_sigma(sigma), 0.03, "calibrated noise");
    ok &= runtime("C5", start, 120);
    assert!(ok);
}

// 6. Property suites.
#[test]
fn criterion_6_property_suites() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;

    // alias map against direct sampling
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = 1e6 + 40e9 * rng.random::<f64>();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let a = alias_map(f, F_REP).unwrap();
        let sign = if a.flipped { -1.0 } else { 1.0 };
        let ratio = f / F_REP;
        for k in 0..256u32 {
            let direct = (std::f64::consts::TAU * (ratio * k as f64).fract() + phi).cos();
            let folded = (std::f64::consts::TAU * (a.f_alias / F_REP * k as f64).fract() + sign * phi).cos();
            worst = worst.max((direct - folded).abs());
        }
    }
    ok &= check("C6 alias map vs direct sampling (100 tones)", worst < 1e-9, format!("{worst:.2e}"));

    // fast path against the dense oracle
    let b = InstrumentModel::reference_branch();
    let (mut dm, mut dp, mut dl) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..20 {
        let f = 1e6 * (40e3f64).powf(i as f64 / 19.0) * 0.99731;
        let fnorm = alias_map(f, F_REP).unwrap().f_norm(F_REP);
        let fast = b.waveform(f, 0.05, 0.3, 64);
        let dense = dense_waveform(&b, f, 0.05, 0.3, 64, 10).unwrap();
        let (pf, pd) = (estimate_tone(&fast, fnorm).unwrap(), estimate_tone(&dense, fnorm).unwrap());
        dm = dm.max((pf.magnitude / pd.magnitude - 1.0).abs());
        dp = dp.max(pvna::units::wrap_phase(pf.phase - pd.phase).abs());
        dl = dl.max(fast.iter().zip(&dense).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / b.lsb());
    }
    ok &= check(
        "C6 fast path vs dense oracle (20 tones, 1 MHz - 40 GHz)",
        dm < 1e-4 && dp < 1e-4 && dl < 1.0,
        format!("magnitude {dm:.2e}, phase {dp:.2e} rad, level {dl:.2e} LSB"),
    );

    // embed then correct
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dut = rand_dut(&mut rng);
        let (fw, rv) = (rand_terms(&mut rng), rand_terms(&mut rng));
        let back = correct_point(&embed(&dut, &fw, &rv), &fw, &rv, 1e9).unwrap();
        worst = worst.max(back.max_abs_diff(&dut));
    }
    ok &= check("C6 calibration round trip (100 cases)", worst < 1e-9, format!("{worst:.2e}"));

    // touchstone round trips
    let grid = FrequencyGrid::linear(1e9, 40e9, 50).unwrap();
    let mats: Vec<SMatrix> = (0..50).map(|_| rand_dut(&mut rng)).collect();
    let table = TwoPortSParams::from_matrices(grid, &mats).unwrap();
    let mut worst = 0.0f64;
    for fmt in [TouchstoneFormat::RI, TouchstoneFormat::MA, TouchstoneFormat::DB] {
        let back = parse_touchstone(&write_touchstone(&table, fmt).unwrap()).unwrap();
        for (a, b) in back.matrices().iter().zip(table.matrices()) {
            worst = worst.max(a.max_abs_diff(&b) / b.max_element_norm());
        }
    }
    ok &= check("C6 Touchstone round trip (RI, MA, DB)", worst < 1e-9, format!("{worst:.2e} relative"));

    // determinism
    let inst = InstrumentModel::typical().with_noise_sigma(1e-4);
    let mut cfg = SweepConfig::new(34e9, 36e9, 5).unwrap();
    cfg.rng_seed = 3;
    let a = run_sweep(&inst, &ka_filter(), &cfg).unwrap();
    let b2 = run_sweep(&inst, &ka_filter(), &cfg).unwrap();
    let r1 = sample_branch(&b, 35e9, 0.1, 0.0, 1024, 9).unwrap();
    let r2 = sample_branch(&b.clone(), 35e9, 0.1, 0.0, 1024, 9).unwrap();
    ok &= check("C6 determinism", a == b2 && r1 == r2, "bit-identical reruns");
    ok &= runtime("C6", start, 60);
    assert!(ok);
}
