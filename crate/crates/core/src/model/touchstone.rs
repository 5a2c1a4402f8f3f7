//! Touchstone v1 two-port (`.s2p`) reader and writer, 50 ohm reference.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{FrequencyGrid, SMatrix, TwoPortSParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TouchstoneFormat {
    /// Real / imaginary.
    RI,
    /// Linear magnitude / angle in degrees.
    MA,
    /// Magnitude in dB / angle in degrees.
    DB,
}

impl TouchstoneFormat {
    fn keyword(self) -> &'static str {
        match self {
            TouchstoneFormat::RI => "RI",
            TouchstoneFormat::MA => "MA",
            TouchstoneFormat::DB => "DB",
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            TouchstoneFormat::RI => Complex64::new(a, b),
            TouchstoneFormat::MA => Complex64::from_polar(a, b.to_radians()),
            TouchstoneFormat::DB => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, s: Complex64) -> (f64, f64) {
        match self {
            TouchstoneFormat::RI => (s.re, s.im),
            TouchstoneFormat::MA => (s.norm(), s.arg().to_degrees()),
            TouchstoneFormat::DB => (20.0 * s.norm().log10(), s.arg().to_degrees()),
        }
    }
}

struct OptionLine {
    scale: f64,
    format: TouchstoneFormat,
}

fn parse_option_line(text: &str, line: usize) -> Result<OptionLine> {
    let err = |msg: String| Error::Touchstone { line, msg };
    // v1 defaults: GHz S MA R 50
    let mut opts = OptionLine { scale: 1e9, format: TouchstoneFormat::MA };
    let mut tokens = text.trim_start_matches('#').split_whitespace();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => opts.scale = 1.0,
            "KHZ" => opts.scale = 1e3,
            "MHZ" => opts.scale = 1e6,
            "GHZ" => opts.scale = 1e9,
            "S" => {}
            "Y" | "Z" | "G" | "H" => return Err(err(format!("unsupported parameter type {tok}"))),
            "RI" => opts.format = TouchstoneFormat::RI,
            "MA" => opts.format = TouchstoneFormat::MA,
            "DB" => opts.format = TouchstoneFormat::DB,
            "R" => {
                let z = tokens
                    .next()
                    .and_then(|z| z.parse::<f64>().ok())
                    .ok_or_else(|| err("missing reference impedance after R".into()))?;
                if z != 50.0 {
                    return Err(err(format!("reference impedance {z} ohm unsupported (50 only)")));
                }
            }
            other => return Err(err(format!("unknown option token {other}"))),
        }
    }
    Ok(opts)
}

/// Parses a Touchstone v1 two-port file. Data values are converted to
/// complex form whatever the source format; `!` comments are ignored.
pub fn parse_touchstone(text: &[u8]) -> Result<TwoPortSParams> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Touchstone {
        line: 0,
        msg: format!("not UTF-8: {e}"),
    })?;
    let mut opts: Option<OptionLine> = None;
    let mut freqs = Vec::new();
    let mut mats = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('#') {
            if opts.is_some() {
                return Err(Error::Touchstone { line, msg: "duplicate option line".into() });
            }
            opts = Some(parse_option_line(content, line)?);
            continue;
        }
        let o = opts.as_ref().ok_or_else(|| Error::Touchstone {
            line,
            msg: "data before the # option line".into(),
        })?;
        let values = content
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Touchstone { line, msg: format!("bad number: {e}") })?;
        if values.len() != 9 {
            return Err(Error::Touchstone {
                line,
                msg: format!("expected 9 columns for a two-port row, found {}", values.len()),
            });
        }
        let f = values[0] * o.scale;
        if let Some(&prev) = freqs.last() {
            if f <= prev {
                return Err(Error::Touchstone {
                    line,
                    msg: format!("frequency {f} Hz not above previous {prev} Hz"),
                });
            }
        }
        let c = |k: usize| o.format.decode(values[1 + 2 * k], values[2 + 2 * k]);
        // v1 two-port column order: S11 S21 S12 S22
        mats.push(SMatrix::new(c(0), c(2), c(1), c(3)));
        freqs.push(f);
    }
    if freqs.is_empty() {
        return Err(Error::Touchstone { line: 0, msg: "no data rows".into() });
    }
    let grid = FrequencyGrid::new(freqs).map_err(|e| Error::Touchstone { line: 0, msg: e.to_string() })?;
    TwoPortSParams::from_matrices(grid, &mats)
}

/// Writes a Touchstone v1 two-port file with frequencies in GHz.
pub fn write_touchstone(s: &TwoPortSParams, format: TouchstoneFormat) -> Result<Vec<u8>> {
    let n = s.grid.len();
    if s.s11.is_empty() || [s.s11.len(), s.s12.len(), s.s21.len(), s.s22.len()].iter().any(|&l| l != n) {
        return Err(Error::Grid("nothing to write: empty or inconsistent S-parameter table".into()));
    }
    let mut out = String::new();
    out.push_str("! two-port S-parameters\n");
    let _ = writeln!(out, "# GHz S {} R 50", format.keyword());
    for (i, f) in s.grid.points().iter().enumerate() {
        let _ = write!(out, "{:.15e}", f / 1e9);
        for v in [s.s11[i], s.s21[i], s.s12[i], s.s22[i]] {
            let (a, b) = format.encode(v);
            let _ = write!(out, " {a:.17e} {b:.17e}");
        }
        out.push('\n');
    }
    Ok(out.into_bytes())
}
