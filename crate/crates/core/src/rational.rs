//! Exact rational numbers and their decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::fmt;

/// Arbitrary-precision rational. Populations times seat counts never overflow.
pub type Rational = num_rational::BigRational;

pub fn int(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn frac(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn half() -> Rational {
    frac(1, 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse {:?} as a rational number", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses `"5"`, `"5.5"`, `"-0.25"`, `"11/2"` or `"135/29"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n.trim()).ok_or_else(err)?;
        let d = parse_decimal(d.trim()).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mantissa: BigInt = format!("{whole}{fraction}").parse().ok()?;
    let scale = BigInt::from(10u32).pow(fraction.len() as u32);
    let value = Rational::new(mantissa, scale);
    Some(if negative { -value } else { value })
}

/// Rounds to `places` decimals, halves away from zero, and renders the result.
pub fn format_decimal(value: &Rational, places: u32) -> String {
    render(value, places, false)
}

/// Like [`format_decimal`] but groups the integer part in thousands: `852,106.8`.
pub fn format_grouped(value: &Rational, places: u32) -> String {
    render(value, places, true)
}

fn render(value: &Rational, places: u32, grouped: bool) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = value.abs() * Rational::from_integer(scale.clone());
    // half-up on the magnitude
    let doubled: BigInt = scaled.numer() * 2 + scaled.denom();
    let rounded = doubled.div_floor(&(scaled.denom() * 2));
    let (whole, fraction) = rounded.div_mod_floor(&scale);
    let mut out = String::new();
    if value.is_negative() && !rounded.is_zero() {
        out.push('-');
    }
    let whole = whole.to_string();
    if grouped {
        out.push_str(&group_thousands(&whole));
    } else {
        out.push_str(&whole);
    }
    if places > 0 {
        out.push('.');
        out.push_str(&format!("{:0>width$}", fraction.to_string(), width = places as usize));
    }
    out
}

pub fn group_thousands(digits: &str) -> String {
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_decimals_and_fractions() {
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert_eq!(parse_rational("5.5").unwrap(), frac(11, 2));
        assert_eq!(parse_rational(" 11/2 ").unwrap(), frac(11, 2));
        assert_eq!(parse_rational("135/29").unwrap(), frac(135, 29));
        assert_eq!(parse_rational("-0.25").unwrap(), frac(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), half());
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "5e3", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats_half_up_with_grouping() {
        let germany = Rational::new(BigInt::from(81_802_257u64), BigInt::from(96));
        assert_eq!(format_grouped(&germany, 1), "852,106.8");
        assert_eq!(format_decimal(&frac(1, 20), 1), "0.1");
        assert_eq!(format_decimal(&frac(-1, 20), 1), "-0.1");
        assert_eq!(format_decimal(&frac(-1, 100), 1), "0.0");
        assert_eq!(format_decimal(&int(7), 0), "7");
        assert_eq!(format_grouped(&int(761_342), 1), "761,342.0");
        assert_eq!(group_thousands("100"), "100");
        assert_eq!(group_thousands("1000"), "1,000");
    }
}
