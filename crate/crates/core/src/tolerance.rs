//! Comparison policy for floating point complex values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that overrides the default tolerance.
///
/// Accepted forms: `<rtol>` or `<atol>,<rtol>`.
pub const TOLERANCE_ENV: &str = "WGS_TOLERANCE";

/// `a == b` iff `|a - b| <= atol + rtol * max(|a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            atol: 1e-12,
            rtol: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rtol: f64) -> Result<Self> {
        if !(atol.is_finite() && rtol.is_finite()) || atol < 0.0 || rtol < 0.0 {
            return Err(Error::Domain(format!(
                "tolerance must be finite and nonnegative (atol={atol}, rtol={rtol})"
            )));
        }
        Ok(Tolerance { atol, rtol })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parse_one = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Validation(format!("bad tolerance value {s:?}: {e}")))
        };
        match text.split_once(',') {
            Some((a, r)) => Tolerance::new(parse_one(a)?, parse_one(r)?),
            None => Tolerance::new(Tolerance::default().atol, parse_one(text)?),
        }
    }

    /// Reads [`TOLERANCE_ENV`]; `Ok(None)` when unset.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var(TOLERANCE_ENV) {
            Ok(v) => Tolerance::parse(&v).map(Some),
            Err(_) => Ok(None),
        }
    }

    pub fn eq_real(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.atol + self.rtol * a.abs().max(b.abs())
    }

    pub fn eq(&self, a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= self.atol + self.rtol * a.norm().max(b.norm())
    }

    pub fn is_zero(&self, a: Complex64) -> bool {
        a.norm() <= self.atol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_and_absolute_parts() {
        let t = Tolerance::default();
        assert!(t.eq(Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-10, 0.0)));
        assert!(!t.eq(Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-6, 0.0)));
        assert!(t.is_zero(Complex64::new(1e-13, 0.0)));
        assert!(!t.is_zero(Complex64::new(1e-3, 0.0)));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Tolerance::parse("1e-6").unwrap().rtol, 1e-6);
        let t = Tolerance::parse("1e-10, 1e-7").unwrap();
        assert_eq!((t.atol, t.rtol), (1e-10, 1e-7));
        assert!(Tolerance::parse("abc").is_err());
        assert!(Tolerance::parse("-1").is_err());
    }
}
