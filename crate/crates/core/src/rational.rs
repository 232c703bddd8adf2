//! Exact rational helpers: parsing user-supplied numbers and rendering
//! fractions as decimals with a fixed number of significant digits.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Parses `"3/16"`, `"0.05"`, `"-1.5e-3"` or `"7"` into an exact rational.
///
/// Decimal input is taken at face value: `"0.7"` is exactly `7/10`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let err = || Error::ParseNumber(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    let mut all = String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let mut value = BigInt::parse_bytes(all.as_bytes(), 10).ok_or_else(err)?;
    if negative {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let magnitude = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        BigRational::from_integer(value * magnitude)
    } else {
        BigRational::new(value, magnitude)
    })
}

/// Exact conversion of a finite `f64` into the dyadic rational it denotes.
pub fn rational_from_f64(value: f64) -> Option<BigRational> {
    BigRational::from_float(value)
}

/// Lossy conversion for display and float comparisons.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Renders `value` with `digits` significant digits, rounding half away from
/// zero on the exact value.
///
/// Magnitudes in `[1e-4, 10^digits)` use positional notation with trailing
/// zeros kept (`3/16` at 6 digits is `0.187500`); everything else uses
/// scientific notation (`1.23457e-60`).
pub fn to_decimal(value: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if value.is_zero() {
        return String::from("0");
    }
    let negative = value.is_negative();
    let magnitude = value.abs();
    let numer = magnitude.numer().to_biguint().expect("positive");
    let denom = magnitude.denom().to_biguint().expect("positive");

    // Decimal exponent e with 10^e <= value < 10^(e+1).
    let mut exponent = decimal_len(&numer) as i64 - decimal_len(&denom) as i64;
    if compare_scaled(&numer, &denom, exponent) == core::cmp::Ordering::Less {
        exponent -= 1;
    }

    let mut mantissa = scaled_round(&numer, &denom, digits as i64 - 1 - exponent);
    if decimal_len(&mantissa) > digits {
        // Rounding carried into a new digit, e.g. 9.999995 -> 10.0000.
        exponent += 1;
        mantissa = scaled_round(&numer, &denom, digits as i64 - 1 - exponent);
    }
    let body = mantissa.to_str_radix(10);
    let sign = if negative { "-" } else { "" };

    if exponent < -4 || exponent >= digits as i64 {
        let (head, tail) = body.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exponent}")
        } else {
            format!("{sign}{head}.{tail}e{exponent}")
        }
    } else if exponent < 0 {
        let zeros = "0".repeat((-exponent - 1) as usize);
        format!("{sign}0.{zeros}{body}")
    } else {
        let split = exponent as usize + 1;
        let (head, tail) = body.split_at(split);
        if tail.is_empty() {
            format!("{sign}{head}")
        } else {
            format!("{sign}{head}.{tail}")
        }
    }
}

/// Renders an exact fraction as `num/den`, or just `num` for integers.
pub fn to_fraction(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub(crate) fn decimal_len(value: &BigUint) -> usize {
    if value.is_zero() {
        1
    } else {
        value.to_str_radix(10).len()
    }
}

fn pow10(exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(10u32), exp as usize)
}

// Compares numer/denom against 10^exp.
fn compare_scaled(numer: &BigUint, denom: &BigUint, exp: i64) -> core::cmp::Ordering {
    if exp >= 0 {
        numer.cmp(&(denom * pow10(exp as u64)))
    } else {
        (numer * pow10(exp.unsigned_abs())).cmp(denom)
    }
}

// round(numer/denom * 10^shift), half away from zero.
fn scaled_round(numer: &BigUint, denom: &BigUint, shift: i64) -> BigUint {
    let (n, d) = if shift >= 0 {
        (numer * pow10(shift as u64), denom.clone())
    } else {
        (numer.clone(), denom * pow10(shift.unsigned_abs()))
    };
    let (q, r) = n.div_rem(&d);
    if r * 2u32 >= d {
        q + BigUint::one()
    } else {
        q
    }
}

/// `numer/denom` as a rational; panics on a zero denominator.
pub(crate) fn ratio(numer: BigUint, denom: BigUint) -> BigRational {
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, numer),
        BigInt::from_biguint(Sign::Plus, denom),
    )
}
