//! Helpers around the arbitrary-precision rational scalar.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::KernelError;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `x^e` for any integer exponent. Negative exponents require `x != 0`.
pub fn pow(x: &Rational, e: i64) -> Result<Rational, KernelError> {
    if e >= 0 {
        Ok(num_traits::pow(x.clone(), e as usize))
    } else if x.is_zero() {
        Err(KernelError::DivisionByZero)
    } else {
        Ok(num_traits::pow(x.recip(), e.unsigned_abs() as usize))
    }
}

/// Parses `num`, `-num` or `num/den`. Decimal points and exponents are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, KernelError> {
    let s = s.trim();
    let bad = || KernelError::Parse(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
    };
    if !valid(n) {
        return Err(bad());
    }
    let num = BigInt::from_str(n.trim_start_matches('+')).map_err(|_| bad())?;
    let den = match d {
        Some(d) => {
            if !valid(d) {
                return Err(bad());
            }
            BigInt::from_str(d.trim_start_matches('+')).map_err(|_| bad())?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(KernelError::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

/// Renders as `num/den`, or `num` when the value is an integer.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

/// Exact square root if `x` is the square of a rational.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Lossy conversion used by the floating-point paths.
pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: scale both down first.
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Binomial coefficient `C(n, k)` for `n, k >= 0`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}
