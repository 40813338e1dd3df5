//! Exact degrees in `[0, 1]`.
//!
//! Possibility and necessity values only ever go through `min`, `max` and
//! `1 - x`. Binary floating point does not survive `1 - (1 - x)` (for
//! instance `1.0 - (1.0 - 0.2) != 0.2`), so degrees are stored as
//! fixed-point decimals with [`Degree::DIGITS`] fractional digits. Every
//! operation the solver performs is then exact and comparisons need no
//! tolerance.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const SCALE: u64 = 1_000_000_000_000_000;

/// A value in `[0, 1]` with exactly [`Degree::DIGITS`] decimal places.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Degree(u64);

impl Degree {
    /// Number of exactly representable fractional decimal digits.
    pub const DIGITS: usize = 15;
    pub const ZERO: Degree = Degree(0);
    pub const ONE: Degree = Degree(SCALE);

    /// `1 - self`.
    #[inline]
    pub fn complement(self) -> Degree {
        Degree(SCALE - self.0)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == SCALE
    }

    /// Converts from a float, rounding to the nearest representable degree.
    pub fn from_f64(value: f64) -> Result<Degree> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::DegreeOutOfRange(value.to_string()));
        }
        Ok(Degree((value * SCALE as f64).round() as u64))
    }

    /// The float closest to this decimal value.
    pub fn to_f64(self) -> f64 {
        // Parsing the decimal text is correctly rounded; dividing the scaled
        // integer is not once it exceeds 2^53.
        self.to_string()
            .parse()
            .expect("degree text is a valid float")
    }

    /// Scaled integer representation, `self * 10^DIGITS`.
    pub fn raw(self) -> u64 {
        self.0
    }
}

impl FromStr for Degree {
    type Err = Error;

    /// Parses a plain decimal literal such as `0`, `1.0` or `0.25`.
    fn from_str(s: &str) -> Result<Degree> {
        let malformed = || Error::InvalidDegree(s.to_string());
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(malformed());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(malformed());
        }
        if s.ends_with('.') {
            return Err(malformed());
        }
        let int_value: u64 = if int_part.is_empty() {
            0
        } else {
            let trimmed = int_part.trim_start_matches('0');
            if trimmed.len() > 1 {
                return Err(Error::DegreeOutOfRange(s.to_string()));
            }
            trimmed.parse().unwrap_or(0)
        };
        let significant = frac_part.trim_end_matches('0');
        if significant.len() > Self::DIGITS {
            return Err(Error::InvalidDegree(format!(
                "{s} (more than {} decimal places)",
                Self::DIGITS
            )));
        }
        let mut frac_value = 0u64;
        for (i, b) in significant.bytes().enumerate() {
            frac_value += u64::from(b - b'0') * 10u64.pow((Self::DIGITS - 1 - i) as u32);
        }
        let raw = int_value
            .checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac_value))
            .ok_or_else(|| Error::DegreeOutOfRange(s.to_string()))?;
        if raw > SCALE {
            return Err(Error::DegreeOutOfRange(s.to_string()));
        }
        Ok(Degree(raw))
    }
}

impl fmt::Display for Degree {
    /// Shortest decimal form with at least one fractional digit (`0.8`, `1.0`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let int_part = self.0 / SCALE;
        let frac = self.0 % SCALE;
        let digits = format!("{:0width$}", frac, width = Self::DIGITS);
        let digits = digits.trim_end_matches('0');
        if digits.is_empty() {
            write!(f, "{int_part}.0")
        } else {
            write!(f, "{int_part}.{digits}")
        }
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

/// Shorthand for parsing a literal known to be valid; panics otherwise.
///
/// ```
/// use pcsp::deg;
/// assert_eq!(deg("0.8").complement(), deg("0.2"));
/// ```
pub fn deg(literal: &str) -> Degree {
    literal
        .parse()
        .unwrap_or_else(|e| panic!("bad degree literal `{literal}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_exact() {
        for lit in ["0.2", "0.3", "0.7", "0.9", "0.123456789012345"] {
            let d = deg(lit);
            assert_eq!(d.complement().complement(), d);
        }
        assert_eq!(deg("0.2").complement(), deg("0.8"));
        assert_eq!(deg("0.8").complement().to_string(), "0.2");
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(deg("1").to_string(), "1.0");
        assert_eq!(deg("1.000").to_string(), "1.0");
        assert_eq!(deg("0").to_string(), "0.0");
        assert_eq!(deg(".5").to_string(), "0.5");
        assert_eq!(deg("0.25").to_string(), "0.25");
        assert_eq!(deg("0.100000000000000000").to_string(), "0.1");
        assert_eq!(Degree::ONE, deg("1.0"));
    }

    #[test]
    fn parse_rejects() {
        for bad in ["", ".", "1.", "-0.1", "abc", "0.5e1", "0,5", " 0.5"] {
            assert!(bad.parse::<Degree>().is_err(), "{bad}");
        }
        assert!(matches!("1.5".parse::<Degree>(), Err(Error::DegreeOutOfRange(_))));
        assert!(matches!("2".parse::<Degree>(), Err(Error::DegreeOutOfRange(_))));
        assert!(matches!("10".parse::<Degree>(), Err(Error::DegreeOutOfRange(_))));
        assert!("0.1234567890123456".parse::<Degree>().is_err());
    }

    #[test]
    fn float_conversion() {
        assert_eq!(deg("0.8").to_f64(), 0.8);
        assert_eq!(Degree::from_f64(0.2).unwrap(), deg("0.2"));
        assert!(Degree::from_f64(1.1).is_err());
        assert!(Degree::from_f64(f64::NAN).is_err());
    }

    #[test]
    fn ordering() {
        assert!(deg("0.2") < deg("0.8"));
        assert_eq!(deg("0.2").min(deg("0.8")), deg("0.2"));
        assert!(Degree::ZERO.is_zero() && Degree::ONE.is_one());
    }
}
