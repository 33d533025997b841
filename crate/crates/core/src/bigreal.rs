//! Helpers around `rug::Float`, the arbitrary-precision real used by the
//! coefficient tables and the oracles.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

pub type BigReal = Float;

/// Default oracle precision in significant decimal digits.
pub const DEFAULT_DIGITS: u32 = 60;

/// Working precision of the coefficient tables, in bits.
pub const TABLE_BITS: u32 = 256;

pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

pub fn big(prec: u32, x: f64) -> BigReal {
    Float::with_val(prec, x)
}

pub fn pi(prec: u32) -> BigReal {
    Float::with_val(prec, Constant::Pi)
}

pub fn to_f64(x: &BigReal) -> f64 {
    x.to_f64()
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &BigReal, digits: u32) -> String {
    x.to_string_radix(10, Some(digits as usize))
}

/// Pochhammer symbol (a)_k.
pub fn pochhammer(a: &BigReal, k: u64) -> BigReal {
    let mut r = Float::with_val(a.prec(), 1);
    for j in 0..k {
        r *= Float::with_val(a.prec(), a + j);
    }
    r
}

pub fn factorial(prec: u32, k: u64) -> BigReal {
    let mut r = Float::with_val(prec, 1);
    for j in 2..=k {
        r *= j;
    }
    r
}

pub fn powi(x: &BigReal, k: i32) -> BigReal {
    Float::with_val(x.prec(), x.pow(k))
}

/// Relative difference |a-b|/max(|a|,|b|), zero when both vanish.
pub fn rel_diff(a: &BigReal, b: &BigReal) -> BigReal {
    let prec = a.prec().max(b.prec());
    let d = Float::with_val(prec, a - b).abs();
    let m = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    if m.is_zero() {
        Float::with_val(prec, 0)
    } else {
        d / m
    }
}
