//! Run configuration and standards-kit files (TOML, values may carry unit
//! suffixes such as `"36.456 MHz"` or `"-30 dB"`).

use std::path::{Path, PathBuf};

use pvna::analysis::{bin_centered_tone, calibrate_noise_sigma, FLOOR_TARGET_DBC, PD_NONLIN_MEASURED};
use pvna::calibration::StandardsKit;
use pvna::model::{parse_touchstone, BandpassSpec, OffsetReflect, OutModel, ReflectKind};
use pvna::photonic::{BranchModel, EomModel, OidModel, PulseTrain};
use pvna::sweep::{InstrumentModel, SweepConfig, TestSetModel};
use pvna::Complex64;
use toml::{Table, Value};

use crate::CliError;

/// Drive level and record length used when `noise_sigma = "calibrated"`.
const NOISE_CAL_DRIVE_DBM: f64 = 2.8;
const NOISE_CAL_FFT: usize = 62_500;
const NOISE_CAL_TONE: f64 = 35e9;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instrument: InstrumentModel,
    pub sweep: SweepConfig,
    pub out: OutModel,
    pub seed: u64,
}

fn bad(path: &Path, msg: impl Into<String>) -> CliError {
    CliError::Config { path: path.to_path_buf(), msg: msg.into() }
}

fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(path, e.to_string()))?;
    text.parse::<Table>().map_err(|e| bad(path, e.to_string()))
}

/// Typed access to one TOML section with unknown-key detection.
struct Section<'a> {
    path: &'a Path,
    name: &'a str,
    table: Table,
}

impl<'a> Section<'a> {
    fn new(path: &'a Path, root: &Table, name: &'a str) -> Result<Self, CliError> {
        let table = match root.get(name) {
            None => Table::new(),
            Some(Value::Table(t)) => t.clone(),
            Some(_) => return Err(bad(path, format!("[{name}] must be a table"))),
        };
        Ok(Self { path, name, table })
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        bad(self.path, format!("{}.{key}: {msg}", self.name))
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.table.remove(key)
    }

    fn quantity(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => value_quantity(&v).map(Some).ok_or_else(|| self.err(key, format!("not a quantity: {v}"))),
        }
    }

    fn quantity_or(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.quantity(key)?.unwrap_or(default))
    }

    fn integer(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            Some(v) => Err(self.err(key, format!("expected a non-negative integer, got {v}"))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(v) => Err(self.err(key, format!("expected a string, got {v}"))),
        }
    }

    fn poly(&mut self, key: &str) -> Result<[f64; 4], CliError> {
        let mut out = [0.0; 4];
        match self.take(key) {
            None => {}
            Some(Value::Array(a)) if a.len() <= 4 => {
                for (o, v) in out.iter_mut().zip(&a) {
                    *o = value_quantity(v).ok_or_else(|| self.err(key, format!("not a number: {v}")))?;
                }
            }
            Some(v) => return Err(self.err(key, format!("expected up to four coefficients, got {v}"))),
        }
        Ok(out)
    }

    fn finish(self) -> Result<(), CliError> {
        match self.table.keys().next() {
            None => Ok(()),
            Some(k) => Err(self.err(k, "unknown key")),
        }
    }
}

fn value_quantity(v: &Value) -> Option<f64> {
    match v {
        Value::Integer(i) => Some(*i as f64),
        Value::Float(f) => Some(*f),
        Value::String(s) => pvna::units::parse_quantity(s),
        _ => None,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let root = read_table(path)?;
        if let Some(k) = root.keys().find(|k| !["seed", "instrument", "testset", "sweep", "out"].contains(&k.as_str())) {
            return Err(bad(path, format!("unknown section or key `{k}`")));
        }
        let seed = match root.get("seed") {
            None => 0,
            Some(Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(v) => return Err(bad(path, format!("seed: expected a non-negative integer, got {v}"))),
        };
        let base = path.parent().unwrap_or(Path::new("."));
        let (mut instrument, calibrated) = instrument(path, &root)?;
        let sweep = sweep(path, &root, seed)?;
        let out = out_model(path, &root, base)?;
        if calibrated {
            instrument = with_calibrated_noise(instrument).map_err(CliError::Domain)?;
        }
        Ok(Self { instrument, sweep, out, seed })
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
            self.sweep.rng_seed = s;
        }
        self
    }
}

/// Sets every branch's noise so the first reference branch shows the
/// target floor at the calibration drive and record length.
pub fn with_calibrated_noise(inst: InstrumentModel) -> pvna::Result<InstrumentModel> {
    let f = bin_centered_tone(NOISE_CAL_TONE, inst.f_rep, NOISE_CAL_FFT);
    let sigma = calibrate_noise_sigma(&inst, f, NOISE_CAL_DRIVE_DBM, NOISE_CAL_FFT, FLOOR_TARGET_DBC, 1)?;
    Ok(inst.with_noise_sigma(sigma))
}

/// The instrument and whether its noise is to be calibrated.
fn instrument(path: &Path, root: &Table) -> Result<(InstrumentModel, bool), CliError> {
    let mut s = Section::new(path, root, "instrument")?;
    let preset = s.string("preset")?.unwrap_or_else(|| "ideal".into());
    let mut testset = match preset.as_str() {
        "ideal" => TestSetModel::ideal(),
        "typical" => TestSetModel::typical(),
        other => return Err(s.err("preset", format!("unknown preset `{other}` (ideal, typical)"))),
    };
    let reference = InstrumentModel::reference_branch();
    let source_power = s.quantity_or("source_power", 0.0)?;
    let f_rep = s.quantity_or("f_rep", reference.pulses.f_rep)?;
    let fwhm = s.quantity_or("pulse_fwhm", reference.pulses.pulse_fwhm)?;
    let p_avg = s.quantity_or("p_avg", reference.pulses.p_avg)?;
    let v_pi = s.quantity_or("v_pi", reference.eom.v_pi)?;
    let eom_bw = s.quantity("eom_bw")?;
    let eom_order = s.integer("eom_order")?.unwrap_or(reference.eom.response_order as u64) as u32;
    let fit_atten = s.quantity_or("eom_fit_attenuation", 7.5)?;
    let fit_freq = s.quantity_or("eom_fit_frequency", 40e9)?;
    let oid_bw = s.quantity_or("oid_bw", reference.oid.bw3db)?;
    let responsivity = s.quantity_or("responsivity", reference.oid.responsivity)?;
    let adc_bits = s.integer("adc_bits")?.unwrap_or(reference.oid.adc_bits as u64) as u32;
    let adc_fullscale = s.quantity("adc_fullscale")?;
    let (noise, calibrated) = match s.take("noise_sigma") {
        Some(Value::String(v)) if v == "calibrated" => (0.0, true),
        Some(v) => (
            value_quantity(&v)
                .ok_or_else(|| s.err("noise_sigma", format!("expected a voltage or \"calibrated\", got {v}")))?,
            false,
        ),
        None => (0.0, false),
    };
    let pd_nonlin = match s.take("pd_nonlin") {
        Some(Value::String(v)) if v == "measured" => PD_NONLIN_MEASURED,
        Some(v) => value_quantity(&v).ok_or_else(|| s.err("pd_nonlin", format!("not a number: {v}")))?,
        None => 0.0,
    };
    s.finish()?;

    let mut t = Section::new(path, root, "testset")?;
    if let Some(d) = t.quantity("directivity")? {
        testset.coupler_directivity_db = [d; 2];
    }
    if let Some(m) = t.quantity("source_match")? {
        testset.source_match = testset.source_match.map(|g| rescale(g, m));
    }
    if let Some(m) = t.quantity("load_match")? {
        testset.load_match = testset.load_match.map(|g| rescale(g, m));
    }
    if let Some(v) = t.quantity("crosstalk")? {
        testset.crosstalk_db = v;
    }
    if let Some(v) = t.quantity("splitter_imbalance")? {
        testset.splitter_imbalance_db = v;
    }
    if let Some(v) = t.quantity("switch_isolation")? {
        testset.switch_isolation_db = v;
    }
    t.finish()?;

    let build = || -> pvna::Result<InstrumentModel> {
        let pulses = PulseTrain::new(p_avg, f_rep, fwhm)?;
        let eom = match eom_bw {
            Some(bw) => EomModel::new(v_pi, bw, eom_order)?,
            None => EomModel::fitted(v_pi, eom_order, &pulses, fit_freq, fit_atten)?,
        };
        let mut oid = OidModel::new(oid_bw, responsivity)?;
        oid.adc_bits = adc_bits;
        oid.adc_fullscale = adc_fullscale;
        oid.noise_sigma = noise;
        oid.pd_nonlin = pd_nonlin;
        let branch = BranchModel::new(pulses, eom, oid.validated()?)?;
        InstrumentModel::new(testset, branch, source_power)
    };
    Ok((build().map_err(|e| bad(path, format!("[instrument]: {e}")))?, calibrated))
}

/// Keeps the phase of a match term and sets its magnitude from dB.
fn rescale(g: Complex64, db: f64) -> Complex64 {
    let arg = if g.norm() > 0.0 { g.arg() } else { 0.0 };
    Complex64::from_polar(pvna::units::from_db20(db), arg)
}

fn sweep(path: &Path, root: &Table, seed: u64) -> Result<SweepConfig, CliError> {
    let mut s = Section::new(path, root, "sweep")?;
    let start = s.quantity("start")?.ok_or_else(|| s.err("start", "missing"))?;
    let stop = s.quantity("stop")?.ok_or_else(|| s.err("stop", "missing"))?;
    let points = s.integer("points")?.ok_or_else(|| s.err("points", "missing"))? as usize;
    let spp = s.integer("samples_per_point")?;
    let guard = s.quantity("detune_guard")?;
    s.finish()?;
    let mut cfg = SweepConfig::new(start, stop, points).map_err(|e| bad(path, format!("[sweep]: {e}")))?;
    if let Some(n) = spp {
        cfg.samples_per_point = n as usize;
    }
    if let Some(g) = guard {
        cfg.detune_guard = g;
    }
    cfg.rng_seed = seed;
    cfg.validated().map_err(|e| bad(path, format!("[sweep]: {e}")))
}

fn out_model(path: &Path, root: &Table, base: &Path) -> Result<OutModel, CliError> {
    let mut s = Section::new(path, root, "out")?;
    let kind = s.string("kind")?.unwrap_or_else(|| "thru".into());
    let model = match kind.as_str() {
        "thru" => OutModel::IdealThru { delay: s.quantity_or("delay", 0.0)? },
        "load" => OutModel::IdealLoad,
        "short" => OutModel::short(),
        "open" => OutModel::open(),
        "bandpass" => {
            let f0 = s.quantity("f0")?.ok_or_else(|| s.err("f0", "missing"))?;
            let bw = s.quantity("bw")?.ok_or_else(|| s.err("bw", "missing"))?;
            let rl = match (s.quantity("vswr")?, s.quantity("return_loss")?) {
                (Some(v), None) => BandpassSpec::return_loss_for_vswr(v),
                (None, Some(rl)) => rl,
                (None, None) => 20.0,
                (Some(_), Some(_)) => return Err(s.err("vswr", "give either vswr or return_loss")),
            };
            let order = s.integer("order")?;
            let il = s.quantity("insertion_loss")?;
            let rej = s.quantity("rejection")?;
            let delay = s.quantity("delay")?;
            let build = || -> pvna::Result<OutModel> {
                let mut spec = BandpassSpec::new(f0, bw, rl)?;
                if let Some(o) = order {
                    spec.order = o as usize;
                }
                if let Some(il) = il {
                    spec.insertion_loss_db = il;
                }
                if let Some(r) = rej {
                    spec.rejection_floor_db = r;
                }
                let mut spec = spec.validated()?;
                if let Some(d) = delay {
                    spec = spec.with_mean_delay(d)?;
                }
                Ok(OutModel::ParametricBandpass(spec))
            };
            build().map_err(|e| bad(path, format!("[out]: {e}")))?
        }
        "touchstone" => {
            let file = s.string("path")?.ok_or_else(|| s.err("path", "missing"))?;
            let file = resolve(base, &file);
            let bytes = std::fs::read(&file).map_err(|e| bad(path, format!("out.path {}: {e}", file.display())))?;
            OutModel::TouchstoneTable(
                parse_touchstone(&bytes).map_err(|e| bad(path, format!("out.path {}: {e}", file.display())))?,
            )
        }
        other => return Err(s.err("kind", format!("unknown object `{other}`"))),
    };
    s.finish()?;
    Ok(model)
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Reads a standards kit. Every section is optional and defaults to the
/// ideal standard; `[short]` and `[open]` accept `poly` (up to four
/// coefficients of L in H or C in F, ascending powers of f) and
/// `offset_delay`, `[load]` accepts `gamma = [re, im]`, `[thru]` accepts
/// `delay`.
pub fn load_kit(path: &Path) -> Result<StandardsKit, CliError> {
    let root = read_table(path)?;
    if let Some(k) = root.keys().find(|k| !["short", "open", "load", "thru"].contains(&k.as_str())) {
        return Err(bad(path, format!("unknown standard `{k}`")));
    }
    let mut kit = StandardsKit::ideal();
    for (name, kind) in [("short", ReflectKind::Short), ("open", ReflectKind::Open)] {
        if !root.contains_key(name) {
            continue;
        }
        let mut s = Section::new(path, &root, name)?;
        let poly = s.poly("poly")?;
        let offset_delay = s.quantity_or("offset_delay", 0.0)?;
        s.finish()?;
        if !offset_delay.is_finite() || offset_delay < 0.0 || poly.iter().any(|c| !c.is_finite()) {
            return Err(bad(path, format!("[{name}]: coefficients and delay must be finite, delay non-negative")));
        }
        let model = OutModel::OffsetReflect(OffsetReflect { kind, poly, offset_delay });
        match kind {
            ReflectKind::Short => kit.short = model,
            ReflectKind::Open => kit.open = model,
        }
    }
    if root.contains_key("load") {
        let mut s = Section::new(path, &root, "load")?;
        let g = s.poly("gamma")?;
        s.finish()?;
        let gamma = Complex64::new(g[0], g[1]);
        if g[2] != 0.0 || g[3] != 0.0 || !(gamma.norm() < 1.0) {
            return Err(bad(path, "[load]: gamma must be [re, im] with |gamma| < 1"));
        }
        kit.load = if gamma == Complex64::new(0.0, 0.0) { OutModel::IdealLoad } else { OutModel::IdealReflect(gamma) };
    }
    if root.contains_key("thru") {
        let mut s = Section::new(path, &root, "thru")?;
        let delay = s.quantity_or("delay", 0.0)?;
        s.finish()?;
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(bad(path, "[thru]: delay must be finite and non-negative"));
        }
        kit.thru = OutModel::IdealThru { delay };
    }
    Ok(kit)
}
