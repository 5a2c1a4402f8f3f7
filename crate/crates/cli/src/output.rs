//! Result files. Every writer formats with fixed precision so reruns with
//! the same seed produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pvna::model::{write_touchstone, TouchstoneFormat, TwoPortSParams};
use pvna::units::db20;
use pvna::Complex64;

use crate::CliError;

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

/// Plain CSV table: one header line, then rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, self.text.as_bytes())
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.9e}")
}

pub fn deg(z: Complex64) -> f64 {
    z.arg().to_degrees()
}

/// `<stem>.s2p` and `<stem>.csv` next to each other.
pub fn sweep_paths(out: &Path) -> (PathBuf, PathBuf) {
    let stem = if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("s2p")) {
        out.with_extension("")
    } else {
        out.to_path_buf()
    };
    let with = |ext: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".s2p"), with(".csv"))
}

/// Touchstone file (real/imaginary) plus a CSV of dB magnitude and degrees.
pub fn write_sparams(s: &TwoPortSParams, out: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    let (s2p, csv_path) = sweep_paths(out);
    write_file(&s2p, &write_touchstone(s, TouchstoneFormat::RI).map_err(CliError::Domain)?)?;
    let mut csv = Csv::new(&[
        "freq_hz", "s11_db", "s11_deg", "s21_db", "s21_deg", "s12_db", "s12_deg", "s22_db", "s22_deg",
    ]);
    for (i, &f) in s.grid.points().iter().enumerate() {
        let m = s.at(i);
        let mut row = vec![num(f)];
        for z in [m.s11, m.s21, m.s12, m.s22] {
            row.push(format!("{:.6}", db20(z.norm())));
            row.push(format!("{:.6}", deg(z)));
        }
        csv.row(&row);
    }
    csv.save(&csv_path)?;
    Ok((s2p, csv_path))
}

/// Human-readable summary: one line per headline quantity.
#[derive(Default)]
pub struct Summary {
    text: String,
}

impl Summary {
    pub fn title(&mut self, t: &str) {
        let _ = writeln!(self.text, "{t}");
    }

    pub fn line(&mut self, name: &str, achieved: impl std::fmt::Display, target: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{name}: {achieved} (target {target})");
    }

    pub fn note(&mut self, n: &str) {
        let _ = writeln!(self.text, "note: {n}");
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, self.text.as_bytes())
    }
}
