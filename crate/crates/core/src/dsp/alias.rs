use crate::{Error, Result};

/// Relative distance to a zone edge below which the mapping is refused.
pub const BOUNDARY_GUARD: f64 = 1e-6;

/// Where a tone lands after sampling at `f_rep`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasResult {
    /// Alias frequency in `[0, f_rep/2]`, Hz.
    pub f_alias: f64,
    /// Nyquist zone, starting at 1.
    pub zone: u64,
    /// Even zones fold with spectral (and phase) reversal.
    pub flipped: bool,
}

impl AliasResult {
    /// Alias frequency in cycles per sample.
    pub fn f_norm(&self, f_rep: f64) -> f64 {
        self.f_alias / f_rep
    }
}

/// Folds `f` into the first Nyquist zone of a sampler running at `f_rep`.
pub fn alias_map(f: f64, f_rep: f64) -> Result<AliasResult> {
    if !(f > 0.0 && f_rep > 0.0 && f.is_finite() && f_rep.is_finite()) {
        return Err(Error::Domain(format!("alias_map needs f, f_rep > 0 (got {f}, {f_rep})")));
    }
    let half = 0.5 * f_rep;
    let q = (f / half).floor();
    // distance to the nearest multiple of f_rep/2, computed with one rounding
    let below = (-q).mul_add(half, f);
    let dist = below.min(half - below);
    if dist < BOUNDARY_GUARD * f_rep {
        return Err(Error::ZoneBoundary { f, f_rep });
    }
    let zone = q as u64 + 1;
    let flipped = zone % 2 == 0;
    let f_alias = if flipped { half - below } else { below };
    Ok(AliasResult { f_alias, zone, flipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F_REP: f64 = 36.456e6;

    #[test]
    fn first_zone() {
        let a = alias_map(5e6, F_REP).unwrap();
        assert_eq!(a.zone, 1);
        assert!(!a.flipped);
        assert_eq!(a.f_alias, 5e6);
    }

    #[test]
    fn second_zone_flips() {
        let a = alias_map(20e6, F_REP).unwrap();
        assert_eq!(a.zone, 2);
        assert!(a.flipped);
        assert!((a.f_alias - 16.456e6).abs() < 1e-6);
    }

    #[test]
    fn ka_band_tone() {
        let a = alias_map(35e9, F_REP).unwrap();
        // 35 GHz = 960 f_rep + 2.24 MHz
        assert_eq!(a.zone, 1921);
        assert!(!a.flipped);
        assert!((a.f_alias - 2.24e6).abs() < 1e-3, "{}", a.f_alias);
        let r = a.f_norm(F_REP);
        assert!(r > 0.06 && r < 0.07);
    }

    #[test]
    fn boundaries_rejected() {
        for f in [F_REP, 0.5 * F_REP, 960.0 * F_REP, 1921.0 * 0.5 * F_REP] {
            assert!(matches!(alias_map(f, F_REP), Err(Error::ZoneBoundary { .. })), "{f}");
        }
        assert!(alias_map(0.0, F_REP).is_err());
    }
}
