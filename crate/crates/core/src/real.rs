//! Number types and the small conversions shared by every module.
//!
//! `PrecReal` is an MPFR float: it carries its own precision in bits and all
//! basic operations are correctly rounded to nearest. Every finite `PrecReal`
//! is a dyadic rational, so [`exact`] converts one to a `BigRational` without
//! loss.

use rug::float::Round;
use rug::{Float, Integer, Rational};

use crate::error::{MillsError, Result};

pub type BigInt = Integer;
pub type BigRational = Rational;
pub type PrecReal = Float;

/// Smallest working precision accepted by the public API.
pub const MIN_PRECISION: u32 = 64;

/// Default precision used by the command-line front-end.
pub const DEFAULT_PRECISION: u32 = 128;

pub fn check_precision(bits: u32) -> Result<()> {
    if bits < MIN_PRECISION {
        return Err(MillsError::Precision {
            min: MIN_PRECISION,
            got: bits,
        });
    }
    Ok(())
}

pub fn real(prec: u32, value: impl Into<f64>) -> Float {
    Float::with_val(prec, value.into())
}

/// Exact value of a finite float.
///
/// # Panics
///
/// Panics on NaN or infinity; callers never produce them.
pub fn exact(x: &Float) -> Rational {
    x.to_rational().expect("finite PrecReal")
}

/// Round a rational to `prec` bits in the given direction.
pub fn round_rational(q: &Rational, prec: u32, round: Round) -> Float {
    Float::with_val_round(prec, q, round).0
}

pub fn to_real(q: &Rational, prec: u32) -> Float {
    Float::with_val(prec, q)
}

/// `q / f` rounded once to `prec` bits.
pub fn rational_div(q: &Rational, f: &Float, prec: u32) -> Float {
    if f.is_zero() {
        return Float::with_val(prec, q) / f;
    }
    Float::with_val(prec, q / exact(f))
}

/// Unit in the last place of `x` at its own precision (for zero: the
/// smallest positive value at exponent 0).
pub fn ulp(x: &Float) -> Float {
    let prec = x.prec();
    let exp = x.get_exp().unwrap_or(0);
    let mut u = Float::with_val(prec, 1);
    u <<= exp - prec as i32;
    u
}

/// `2^e` at the given precision.
pub fn pow2(prec: u32, e: i32) -> Float {
    let mut u = Float::with_val(prec, 1);
    u <<= e;
    u
}

/// Parse `"7/3"`, `"-2"`, `"0.1"` or `"1e-3"` into an exact rational. Decimal
/// notation is read exactly, so `"0.1"` is `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let err = || MillsError::Parse(text.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num).ok_or_else(err)?;
        let den = parse_decimal(den).ok_or_else(err)?;
        if den == 0 {
            return Err(err());
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = Rational::from(joined.parse::<Integer>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten_pow = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        value *= ten_pow;
    } else {
        value /= ten_pow;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Render `x` with `digits` significant decimal digits, rounding to nearest.
///
/// Plain notation is used for magnitudes in `[1e-6, 1e21)`, scientific
/// (`1.25e-9`) otherwise. Trailing zeros of the fraction are dropped so the
/// output is stable across precisions that agree on the digits shown.
pub fn format_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.to_string();
    }
    let (negative, mut mant, exp) =
        x.to_sign_string_exp_round(10, Some(digits.max(1)), Round::Nearest);
    // mant is 0.DDDD * 10^exp
    let exp = exp.unwrap_or(0);
    while mant.len() > 1 && mant.ends_with('0') {
        mant.pop();
    }
    let sign = if negative { "-" } else { "" };
    let point = exp; // position of the decimal point inside mant
    let body = if (-5..=21).contains(&point) {
        if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), mant)
        } else if point as usize >= mant.len() {
            format!("{}{}", mant, "0".repeat(point as usize - mant.len()))
        } else {
            let (a, b) = mant.split_at(point as usize);
            format!("{a}.{b}")
        }
    } else {
        let (first, rest) = mant.split_at(1);
        if rest.is_empty() {
            format!("{}e{}", first, point - 1)
        } else {
            format!("{}.{}e{}", first, rest, point - 1)
        }
    };
    format!("{sign}{body}")
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        q.to_string()
    }
}
