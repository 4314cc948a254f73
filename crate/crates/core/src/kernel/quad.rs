//! Elements `a + b·√r` of a quadratic extension with a formal rational radicand.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::rational::{format_rational, rational_sqrt, Rational};
use super::KernelError;

/// `rat + rad·√radicand`.
///
/// The radicand is never simplified implicitly, even when it is a perfect
/// square; call [`QuadExt::canonicalize`] for that. Binary operations require
/// equal radicands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    rat: Rational,
    rad: Rational,
    radicand: Rational,
}

impl QuadExt {
    pub fn new(rat: Rational, rad: Rational, radicand: Rational) -> Self {
        QuadExt { rat, rad, radicand }
    }

    pub fn from_rational(x: Rational, radicand: &Rational) -> Self {
        QuadExt::new(x, Rational::zero(), radicand.clone())
    }

    /// `√r` itself.
    pub fn sqrt(radicand: &Rational) -> Self {
        QuadExt::new(Rational::zero(), Rational::one(), radicand.clone())
    }

    /// `x·√r`.
    pub fn radical(x: Rational, radicand: &Rational) -> Self {
        QuadExt::new(Rational::zero(), x, radicand.clone())
    }

    pub fn zero(radicand: &Rational) -> Self {
        QuadExt::from_rational(Rational::zero(), radicand)
    }

    pub fn one(radicand: &Rational) -> Self {
        QuadExt::from_rational(Rational::one(), radicand)
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn rad_part(&self) -> &Rational {
        &self.rad
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad.is_zero()
    }

    /// No `√r` component.
    pub fn is_rational(&self) -> bool {
        self.rad.is_zero()
    }

    /// No rational component.
    pub fn is_pure_radical(&self) -> bool {
        self.rat.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rat.clone())
    }

    /// `a² − b²r`; the product of the element with its conjugate.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - &self.rad * &self.rad * &self.radicand
    }

    pub fn conjugate(&self) -> Self {
        QuadExt::new(self.rat.clone(), -self.rad.clone(), self.radicand.clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadExt::new(&self.rat * k, &self.rad * k, self.radicand.clone())
    }

    /// Folds `b·√r` into the rational part when `r` is a rational square.
    pub fn canonicalize(&self) -> Self {
        match rational_sqrt(&self.radicand) {
            Some(s) => QuadExt::new(&self.rat + &self.rad * s, Rational::zero(), self.radicand.clone()),
            None => self.clone(),
        }
    }

    fn check(&self, other: &QuadExt) -> Result<(), KernelError> {
        if self.radicand == other.radicand {
            Ok(())
        } else {
            Err(KernelError::RadicandMismatch {
                left: format_rational(&self.radicand),
                right: format_rational(&other.radicand),
            })
        }
    }

    pub fn checked_add(&self, other: &QuadExt) -> Result<QuadExt, KernelError> {
        self.check(other)?;
        Ok(QuadExt::new(&self.rat + &other.rat, &self.rad + &other.rad, self.radicand.clone()))
    }

    pub fn checked_sub(&self, other: &QuadExt) -> Result<QuadExt, KernelError> {
        self.check(other)?;
        Ok(QuadExt::new(&self.rat - &other.rat, &self.rad - &other.rad, self.radicand.clone()))
    }

    /// `(a₁ + b₁√r)(a₂ + b₂√r) = (a₁a₂ + b₁b₂r) + (a₁b₂ + a₂b₁)√r`.
    pub fn checked_mul(&self, other: &QuadExt) -> Result<QuadExt, KernelError> {
        self.check(other)?;
        let rat = &self.rat * &other.rat + &self.rad * &other.rad * &self.radicand;
        let rad = &self.rat * &other.rad + &other.rat * &self.rad;
        Ok(QuadExt::new(rat, rad, self.radicand.clone()))
    }

    /// Division through the conjugate; fails when the divisor has zero norm.
    pub fn checked_div(&self, other: &QuadExt) -> Result<QuadExt, KernelError> {
        self.check(other)?;
        let norm = other.norm();
        if norm.is_zero() {
            return Err(KernelError::DivisionByZero);
        }
        let num = self.checked_mul(&other.conjugate())?;
        Ok(num.scale(&norm.recip()))
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}*sqrt({})",
            format_rational(&self.rat),
            format_rational(&self.rad),
            format_rational(&self.radicand)
        )
    }
}

// Operator forms panic on radicand mismatch; use the checked_* methods when
// the radicands are not known to agree.
impl Add for &QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        self.checked_add(rhs).expect("QuadExt addition")
    }
}

impl Sub for &QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        self.checked_sub(rhs).expect("QuadExt subtraction")
    }
}

impl Mul for &QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        self.checked_mul(rhs).expect("QuadExt multiplication")
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        &self + &rhs
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: QuadExt) -> QuadExt {
        &self - &rhs
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: QuadExt) -> QuadExt {
        &self * &rhs
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-self.rat, -self.rad, self.radicand)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -self.clone()
    }
}
