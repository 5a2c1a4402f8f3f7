use std::fmt::Write as _;

use num_complex::Complex64;

use crate::model::FrequencyGrid;
use crate::{Error, Result};

const HEADER: &str = "pvna-error-terms 1";

/// Six error terms of one drive direction. For the forward direction the
/// driven port is port 1; for reverse it is port 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionTerms {
    /// Directivity.
    pub ed: Complex64,
    /// Source match of the driven port.
    pub es: Complex64,
    /// Reflection tracking.
    pub er: Complex64,
    /// Load match of the terminated port.
    pub el: Complex64,
    /// Transmission tracking.
    pub et: Complex64,
    /// Crosstalk.
    pub ex: Complex64,
}

impl DirectionTerms {
    pub fn identity() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Self { ed: z, es: z, er: one, el: z, et: one, ex: z }
    }

    fn as_array(&self) -> [Complex64; 6] {
        [self.ed, self.es, self.er, self.el, self.et, self.ex]
    }

    fn from_array(a: [Complex64; 6]) -> Self {
        Self { ed: a[0], es: a[1], er: a[2], el: a[3], et: a[4], ex: a[5] }
    }
}

/// Forward and reverse error terms on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTerms12 {
    pub grid: FrequencyGrid,
    pub forward: Vec<DirectionTerms>,
    pub reverse: Vec<DirectionTerms>,
}

impl ErrorTerms12 {
    pub fn identity(grid: FrequencyGrid) -> Self {
        let n = grid.len();
        Self { grid, forward: vec![DirectionTerms::identity(); n], reverse: vec![DirectionTerms::identity(); n] }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Text form: a header line `pvna-error-terms 1`, `#` comments, then one
/// row per frequency holding the frequency in Hz followed by the real and
/// imaginary parts of `ed es er el et ex` forward, then the same six
/// reverse (25 numbers).
pub fn write_error_terms(t: &ErrorTerms12) -> String {
    let mut s = String::new();
    s.push_str(HEADER);
    s.push('\n');
    s.push_str("# f_hz, then re im of: ed es er el et ex (forward), ed es er el et ex (reverse)\n");
    for (i, f) in t.grid.points().iter().enumerate() {
        write!(s, "{f:.17e}").unwrap();
        for c in t.forward[i].as_array().iter().chain(&t.reverse[i].as_array()) {
            write!(s, " {:.17e} {:.17e}", c.re, c.im).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn parse_error_terms(text: &str) -> Result<ErrorTerms12> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        _ => return Err(Error::TermsFile { line: 1, msg: format!("expected header '{HEADER}'") }),
    }
    let (mut freqs, mut fwd, mut rev) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let nums: Vec<f64> = body
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::TermsFile { line: line_no, msg: e.to_string() })?;
        if nums.len() != 25 {
            return Err(Error::TermsFile { line: line_no, msg: format!("expected 25 numbers, found {}", nums.len()) });
        }
        let c = |k: usize| Complex64::new(nums[1 + 2 * k], nums[2 + 2 * k]);
        freqs.push(nums[0]);
        fwd.push(DirectionTerms::from_array(std::array::from_fn(c)));
        rev.push(DirectionTerms::from_array(std::array::from_fn(|k| c(k + 6))));
    }
    let grid = FrequencyGrid::new(freqs).map_err(|e| Error::TermsFile { line: 0, msg: e.to_string() })?;
    Ok(ErrorTerms12 { grid, forward: fwd, reverse: rev })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_exact() {
        let grid = FrequencyGrid::linear(1e9, 2e9, 3).unwrap();
        let mut t = ErrorTerms12::identity(grid);
        t.forward[1].ed = Complex64::new(0.1 / 3.0, -1e-17);
        t.reverse[2].et = Complex64::new(std::f64::consts::PI, 1e300);
        let back = parse_error_terms(&write_error_terms(&t)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(parse_error_terms("nope\n"), Err(Error::TermsFile { line: 1, .. })));
        let bad = format!("{HEADER}\n1e9 1 2 3\n");
        assert!(matches!(parse_error_terms(&bad), Err(Error::TermsFile { line: 2, .. })));
        let bad = format!("{HEADER}\n# c\n1e9{}\n", " x".repeat(24));
        assert!(matches!(parse_error_terms(&bad), Err(Error::TermsFile { line: 3, .. })));
    }
}
