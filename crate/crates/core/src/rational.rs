//! Exact rational scalars and their conversions.
//!
//! All perturbative arithmetic runs on [`ExactRational`], an arbitrary
//! precision rational kept in canonical form (reduced, positive denominator).

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ExactRational = BigRational;

pub fn rat(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(value))
}

/// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
pub fn from_f64_exact(value: f64) -> Result<ExactRational> {
    BigRational::from_float(value).ok_or_else(|| Error::InvalidArgument(format!("{value} is not a finite number")))
}

/// Nearest `f64`; `num` performs the big-integer division correctly even when
/// numerator and denominator individually overflow `f64`.
pub fn to_f64(value: &ExactRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Canonical `num/den` text, `den` omitted when it is one.
pub fn to_fraction_string(value: &ExactRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn parse_fraction(text: &str) -> Result<ExactRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::Parse(format!("bad numerator in `{text}`")))?;
    let den: BigInt = den.parse().map_err(|_| Error::Parse(format!("bad denominator in `{text}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    Ok(BigRational::new(num, den))
}

/// Scientific notation with `digits` significant digits, rounded half away from zero.
///
/// The rounding is done on exact integers, so the result is correctly rounded
/// regardless of the magnitude of the rational.
pub fn to_decimal_string(value: &ExactRational, digits: usize) -> String {
    let digits = digits.max(1);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let num = value.numer().abs();
    let den = value.denom().clone();

    // floor(log10(num/den)) is within one of the digit-count difference.
    let mut exponent = decimal_len(&num) as i64 - decimal_len(&den) as i64;
    if scaled_cmp(&num, &den, exponent) == std::cmp::Ordering::Less {
        exponent -= 1;
    }

    let mut mantissa = round_scaled(&num, &den, digits as i64 - 1 - exponent);
    if decimal_len(&mantissa) > digits {
        exponent += 1;
        mantissa = round_scaled(&num, &den, digits as i64 - 1 - exponent);
    }

    let text = mantissa.to_string();
    let (head, tail) = text.split_at(1);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(head);
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    out.push_str(&format!("e{exponent}"));
    out
}

fn decimal_len(value: &BigInt) -> usize {
    value.to_str_radix(10).trim_start_matches('-').len()
}

fn pow10(exp: u32) -> BigInt {
    num::pow(BigInt::from(10), exp as usize)
}

/// Compare num/den against 10^exponent.
fn scaled_cmp(num: &BigInt, den: &BigInt, exponent: i64) -> std::cmp::Ordering {
    if exponent >= 0 {
        num.cmp(&(den * pow10(exponent as u32)))
    } else {
        (num * pow10((-exponent) as u32)).cmp(den)
    }
}

/// round(num/den * 10^shift) half away from zero, for non-negative num.
fn round_scaled(num: &BigInt, den: &BigInt, shift: i64) -> BigInt {
    let (n, d) =
        if shift >= 0 { (num * pow10(shift as u32), den.clone()) } else { (num.clone(), den * pow10((-shift) as u32)) };
    let (q, r) = n.div_rem(&d);
    if (r * 2u32) >= d {
        q + 1u32
    } else {
        q
    }
}

/// JSON representation `{"num": "...", "den": "..."}` with decimal-digit strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&ExactRational> for RationalRepr {
    fn from(value: &ExactRational) -> Self {
        RationalRepr { num: value.numer().to_string(), den: value.denom().to_string() }
    }
}

impl RationalRepr {
    pub fn to_rational(&self) -> Result<ExactRational> {
        let num: BigInt = self.num.parse().map_err(|_| Error::Parse(format!("bad numerator `{}`", self.num)))?;
        let den: BigInt = self.den.parse().map_err(|_| Error::Parse(format!("bad denominator `{}`", self.den)))?;
        if den.sign() != Sign::Plus {
            return Err(Error::Parse(format!("denominator `{}` is not positive", self.den)));
        }
        Ok(BigRational::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let x = rat(6, -8);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(4));
        assert_eq!(to_fraction_string(&x), "-3/4");
        assert_eq!(to_fraction_string(&int(7)), "7");
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(to_decimal_string(&rat(1, 48), 6), "2.08333e-2");
        assert_eq!(to_decimal_string(&rat(-465, 256), 4), "-1.816e0");
        assert_eq!(to_decimal_string(&rat(2, 3), 3), "6.67e-1");
        assert_eq!(to_decimal_string(&rat(999_999, 1), 3), "1.00e6");
        assert_eq!(to_decimal_string(&int(0), 5), "0");
        assert_eq!(to_decimal_string(&int(1), 1), "1e0");
        assert_eq!(to_decimal_string(&rat(1, 1000), 2), "1.0e-3");
    }

    #[test]
    fn parse_and_repr() {
        let x = parse_fraction("-2441189/38220595200").unwrap();
        assert_eq!(x, rat(-2441189, 38220595200));
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("a/2").is_err());
        let repr = RationalRepr::from(&x);
        assert_eq!(repr.num, "-2441189");
        assert_eq!(repr.to_rational().unwrap(), x);
        let bad = RationalRepr { num: "1".into(), den: "-2".into() };
        assert!(bad.to_rational().is_err());
    }

    #[test]
    fn float_conversion() {
        assert_eq!(from_f64_exact(0.5).unwrap(), rat(1, 2));
        assert!(from_f64_exact(f64::NAN).is_err());
        // numerator and denominator both far beyond f64 range
        let big = BigRational::new(num::pow(BigInt::from(10), 400) * 3, num::pow(BigInt::from(10), 400));
        assert_eq!(to_f64(&big), 3.0);
    }
}
