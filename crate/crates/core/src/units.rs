//! Unit conversions shared across the crate.

/// System reference impedance in ohms.
pub const Z0: f64 = 50.0;

pub fn db20(x: f64) -> f64 {
    20.0 * x.log10()
}

pub fn db10(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn from_db20(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Peak voltage of a sinusoid delivering `dbm` into [`Z0`].
pub fn dbm_to_peak_volts(dbm: f64) -> f64 {
    let watts = 1e-3 * 10f64.powf(dbm / 10.0);
    (2.0 * Z0 * watts).sqrt()
}

pub fn peak_volts_to_dbm(v: f64) -> f64 {
    10.0 * (v * v / (2.0 * Z0) / 1e-3).log10()
}

/// Wraps a phase into (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut p = phi.rem_euclid(TAU);
    if p > PI {
        p -= TAU;
    }
    p
}

/// Parses a number with an optional unit suffix, returning the value in SI
/// base units ("36.456 MHz" -> 36.456e6, "500 fs" -> 5e-13). `dB`/`dBm`
/// values are returned unchanged.
pub fn parse_quantity(text: &str) -> Option<f64> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .map(|i| {
            // keep exponent markers that are part of the number, e.g. "1e9 Hz"
            let (n, u) = text.split_at(i);
            (n.trim(), u.trim())
        })
        .unwrap_or((text, ""));
    let (num, unit) = split;
    let value: f64 = num.parse().ok()?;
    let scale = match unit {
        "" | "dB" | "dBm" | "Hz" | "s" | "V" | "W" | "V/W" => 1.0,
        "THz" => 1e12,
        "GHz" => 1e9,
        "MHz" => 1e6,
        "kHz" => 1e3,
        "ms" => 1e-3,
        "us" => 1e-6,
        "ns" => 1e-9,
        "ps" => 1e-12,
        "fs" => 1e-15,
        "mW" => 1e-3,
        "mV" => 1e-3,
        _ => return None,
    };
    Some(value * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        for dbm in [-30.0, 0.0, 2.8, 13.0] {
            assert!((peak_volts_to_dbm(dbm_to_peak_volts(dbm)) - dbm).abs() < 1e-12);
        }
        // 0 dBm into 50 ohm is 0.316 V peak
        assert!((dbm_to_peak_volts(0.0) - 0.1f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn quantities() {
        assert_eq!(parse_quantity("36.456 MHz"), Some(36.456e6));
        assert_eq!(parse_quantity("500 fs"), Some(500.0 * 1e-15));
        assert_eq!(parse_quantity("-30 dB"), Some(-30.0));
        assert_eq!(parse_quantity("1e9"), Some(1e9));
        assert_eq!(parse_quantity("2.5e-3 s"), Some(2.5e-3));
        assert_eq!(parse_quantity("4 furlongs"), None);
    }

    #[test]
    fn wrap() {
        use std::f64::consts::PI;
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.3) - 0.3).abs() < 1e-15);
    }
}
