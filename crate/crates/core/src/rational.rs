//! Exact rational helpers: parsing, formatting, and dyadic approximations
//! of base-2 logarithms.

use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default number of fractional bits used when approximating logarithms.
pub const DEFAULT_PRECISION_BITS: u32 = 64;

static PRECISION_BITS: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_BITS);

/// Process-wide precision (fractional bits) for approximate entropy values.
pub fn precision_bits() -> u32 {
    PRECISION_BITS.load(Ordering::Relaxed)
}

/// Sets the process-wide precision. Values below 16 are clamped to 16.
pub fn set_precision_bits(bits: u32) {
    PRECISION_BITS.store(bits.max(16), Ordering::Relaxed);
}

/// Applies `ENTROLAB_PRECISION_BITS` when set; returns the precision in use.
pub fn precision_from_env() -> Result<u32> {
    if let Ok(v) = std::env::var("ENTROLAB_PRECISION_BITS") {
        let bits: u32 = v
            .trim()
            .parse()
            .map_err(|_| Error::parse("ENTROLAB_PRECISION_BITS", format!("expected a positive integer, got {v:?}")))?;
        set_precision_bits(bits);
    }
    Ok(precision_bits())
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-3/4"`, `"0.125"` or `"1.5e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::parse(format!("rational {t:?}"), "expected an integer, a/b, or a decimal");
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::parse(format!("rational {t:?}"), "zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// `"a/b"`, or `"a"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The dyadic rational `round(x * 2^bits) / 2^bits`.
pub fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}

/// Smallest dyadic `k / 2^bits` that is `>= x`.
pub fn ceil_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

/// Exact dyadic rational equal to a finite `f64`.
pub fn from_f64_exact(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// `Some(k)` when `x == 2^k` for an integer `k` (possibly negative).
pub fn exact_log2(x: &Rational) -> Option<i64> {
    if !x.is_positive() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let is_pow2 = |v: &BigInt| v.sign() == Sign::Plus && (v & (v - BigInt::one())).is_zero();
    if n.is_one() && is_pow2(d) {
        Some(-((d.bits() - 1) as i64))
    } else if d.is_one() && is_pow2(n) {
        Some((n.bits() - 1) as i64)
    } else {
        None
    }
}

/// Dyadic approximation of `log2(x)` for `x > 0`, within `2^-(bits-1)`.
///
/// Bit-by-bit squaring on a fixed-point mantissa; exact when `x` is a power
/// of two.
pub fn log2_approx(x: &Rational, bits: u32) -> Rational {
    assert!(x.is_positive(), "log2 of non-positive value");
    if let Some(k) = exact_log2(x) {
        return int(k);
    }
    let n = x.numer().clone();
    let d = x.denom().clone();
    // integer part: k with 2^k <= n/d < 2^(k+1)
    let mut k = n.bits() as i64 - d.bits() as i64;
    let shifted = |k: i64| -> (BigInt, BigInt) {
        if k >= 0 {
            (n.clone(), d.clone() << (k as usize))
        } else {
            (n.clone() << ((-k) as usize), d.clone())
        }
    };
    let (mut num, mut den) = shifted(k);
    if num < den {
        k -= 1;
        (num, den) = shifted(k);
    }
    let guard = 24 + 32 - bits.leading_zeros();
    let frac = bits + guard;
    let one = BigInt::one() << frac;
    let two = BigInt::one() << (frac + 1);
    // mantissa in [1, 2) as fixed point with `frac` fractional bits
    let mut m = (num << frac).div_floor(&den);
    let mut acc = BigInt::zero();
    for _ in 0..bits {
        m = (&m * &m) >> frac;
        acc <<= 1;
        if m >= two {
            acc += 1;
            m >>= 1;
        }
        debug_assert!(m >= one || m.is_zero());
    }
    Rational::from_integer(BigInt::from(k)) + Rational::new(acc, BigInt::one() << bits)
}

pub fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn deserialize_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let v = serde_json::Value::deserialize(d)?;
    match v {
        serde_json::Value::String(s) => parse_rational(&s).map_err(serde::de::Error::custom),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()).map_err(serde::de::Error::custom),
        other => Err(serde::de::Error::custom(format!("expected rational, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("1/8").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("1.5e-1").unwrap(), ratio(3, 20));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn log2_of_powers_is_exact() {
        assert_eq!(log2_approx(&ratio(1, 8), 64), int(-3));
        assert_eq!(log2_approx(&int(1024), 64), int(10));
        assert_eq!(exact_log2(&int(1)), Some(0));
        assert_eq!(exact_log2(&ratio(3, 8)), None);
    }

    #[test]
    fn log2_matches_float() {
        for (n, d) in [(3, 1), (1, 3), (10, 7), (999, 1000), (5, 2)] {
            let approx = to_f64(&log2_approx(&ratio(n, d), 64));
            let want = (n as f64 / d as f64).log2();
            assert!((approx - want).abs() < 1e-14, "{n}/{d}: {approx} vs {want}");
        }
    }

    #[test]
    fn log2_three_to_sixty_bits() {
        // log2(3) = 1.58496250072115618145373894394781650875981440769248...
        let l = log2_approx(&int(3), 80);
        let reference = parse_rational("1.584962500721156181453738943947816508759814407692").unwrap();
        let err = (l - reference).abs();
        assert!(err < Rational::new(BigInt::one(), BigInt::one() << 70u32));
    }
}
