//! Truncated formal power series with exact rational coefficients.
//!
//! Coefficients are stored plainly: `coeffs[k]` multiplies `x^k`, with no
//! factorial normalisation. Binary operations truncate to the smaller order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{factorial, format_rational, int, Rational};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    /// Series known up to and including `x^order`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        TruncSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        TruncSeries::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = TruncSeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `x`.
    pub fn variable(order: usize) -> Self {
        let mut s = TruncSeries::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        TruncSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Cauchy product truncated to `min(order(a), order(b))`.
    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let order = self.order().min(other.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncSeries { coeffs: out }
    }

    /// Quotient `q` with `q·b == a` up to `min(order(a), order(b))`.
    pub fn div(&self, b: &TruncSeries) -> Result<TruncSeries, KernelError> {
        let b0 = &b.coeffs[0];
        if b0.is_zero() {
            return Err(KernelError::ZeroLeadingCoefficient);
        }
        let order = self.order().min(b.order());
        let inv = b0.recip();
        let mut q: Vec<Rational> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                acc -= &b.coeffs[j] * &q[k - j];
            }
            q.push(acc * &inv);
        }
        Ok(TruncSeries { coeffs: q })
    }

    /// Term-wise derivative; the result is known to one order less.
    pub fn derivative(&self) -> TruncSeries {
        if self.order() == 0 {
            return TruncSeries::zero(0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
            .collect();
        TruncSeries { coeffs }
    }

    /// Coefficients multiplied by `k!`, i.e. the `x^k/k!` presentation.
    pub fn to_egf(&self) -> Vec<Rational> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Rational::from_integer(factorial(k as u64)))
            .collect()
    }

    /// Evaluate the truncated polynomial at a float point.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + super::rational::to_f64(c))
    }

    fn zip_with(&self, other: &TruncSeries, f: impl Fn(&Rational, &Rational) -> Rational) -> TruncSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|k| f(&self.coeffs[k], &other.coeffs[k])).collect();
        TruncSeries { coeffs }
    }
}

/// Coefficients of `e^{nx}`: `n^k / k!`.
pub fn series_exp_scaled(n: i64, order: usize) -> TruncSeries {
    let n = int(n);
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = Rational::one();
    for k in 0..=order {
        if k > 0 {
            c = c * &n / Rational::from_integer(BigInt::from(k));
        }
        coeffs.push(c.clone());
    }
    TruncSeries { coeffs }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        TruncSeries::mul(self, rhs)
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| match k {
                0 => format_rational(c),
                1 => format!("({})*x", format_rational(c)),
                _ => format!("({})*x^{}", format_rational(c), k),
            })
            .collect();
        write!(f, "{} + O(x^{})", parts.join(" + "), self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rational::rat;

    #[test]
    fn mul_examples() {
        let a = TruncSeries::from_ints(&[1, 1, 0]);
        let b = TruncSeries::from_ints(&[1, -1, 0]);
        assert_eq!(a.mul(&b), TruncSeries::from_ints(&[1, 0, -1]));

        let c = TruncSeries::from_ints(&[1, 1, 1]);
        assert_eq!(c.mul(&TruncSeries::constant(int(1), 2)), c);

        let x = TruncSeries::from_ints(&[0, 1, 0, 0]);
        assert_eq!(x.mul(&x), TruncSeries::from_ints(&[0, 0, 1, 0]));
    }

    #[test]
    fn mul_truncates_to_min_order() {
        let a = TruncSeries::from_ints(&[1, 2, 3, 4]);
        let b = TruncSeries::from_ints(&[1, 1]);
        assert_eq!(a.mul(&b).order(), 1);
        assert_eq!((&a + &b).order(), 1);
    }

    #[test]
    fn div_examples() {
        let one = TruncSeries::from_ints(&[1, 0, 0, 0]);
        let geo = one.div(&TruncSeries::from_ints(&[1, -1, 0, 0])).unwrap();
        assert_eq!(geo, TruncSeries::from_ints(&[1, 1, 1, 1]));

        let a = TruncSeries::from_coeffs(vec![rat(1, 2), rat(-3, 7), int(5)]);
        assert_eq!(a.div(&TruncSeries::constant(int(1), 2)).unwrap(), a);

        let num = TruncSeries::from_ints(&[0, 1, 1]);
        let den = TruncSeries::from_ints(&[1, 1, 0]);
        assert_eq!(num.div(&den).unwrap(), TruncSeries::from_ints(&[0, 1, 0]));

        let err = one.div(&TruncSeries::from_ints(&[0, 1, 0, 0])).unwrap_err();
        assert!(matches!(err, KernelError::ZeroLeadingCoefficient));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(series_exp_scaled(0, 3), TruncSeries::from_ints(&[1, 0, 0, 0]));
        assert_eq!(
            series_exp_scaled(1, 3),
            TruncSeries::from_coeffs(vec![int(1), int(1), rat(1, 2), rat(1, 6)])
        );
        assert_eq!(series_exp_scaled(2, 2), TruncSeries::from_ints(&[1, 2, 2]));
        assert_eq!(series_exp_scaled(-1, 2), TruncSeries::from_coeffs(vec![int(1), int(-1), rat(1, 2)]));
    }

    #[test]
    fn derivative_and_egf() {
        let e = series_exp_scaled(3, 5);
        assert_eq!(e.derivative(), e.truncate(4).scale(&int(3)));
        assert_eq!(e.to_egf(), vec![int(1), int(3), int(9), int(27), int(81), int(243)]);
    }
}
