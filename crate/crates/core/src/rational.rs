//! Exact rational scalar type plus parsing/formatting helpers.
//!
//! All LP, weighted-coverage, and gadget-verification arithmetic runs on
//! `Rat` (arbitrary-precision rationals) so feasibility and certificate
//! comparisons are exact.  Values cross the JSON boundary as strings in
//! either fraction form (`"3/7"`) or decimal form (`"0.25"`, `"1e-3"`);
//! both parse to the exact rational they denote.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use num::One;

pub type Rat = BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_usize(n: usize) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, integer, or decimal (optionally exponent) notation into
/// an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("bad rational literal {s:?}"));
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| bad())?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let mantissa_int: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| bad())?
    };
    let scale = frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = Rat::from_integer(mantissa_int * BigInt::from(sign));
    let net = exp - scale;
    if net > 0 {
        value *= Rat::from_integer(num::pow::pow(ten, net as usize));
    } else if net < 0 {
        value /= Rat::from_integer(num::pow::pow(ten, (-net) as usize));
    }
    Ok(value)
}

/// Accepts a JSON number or string as an exact rational.  Strings are the
/// lossless path; plain JSON numbers are read through their shortest
/// decimal representation.
pub fn rat_from_json(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::String(s) => parse_rat(s),
        serde_json::Value::Number(n) => parse_rat(&n.to_string()),
        other => Err(Error::Parse(format!(
            "expected rational (number or string), got {other}"
        ))),
    }
}

/// True when `r` is an integer (denominator one).
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn is_nonnegative(r: &Rat) -> bool {
    !r.is_negative()
}
