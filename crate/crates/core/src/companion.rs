//! First integral of Somos-4, the companion elliptic sequence, curve
//! invariants, subsequence coefficients and integer elliptic divisibility
//! sequences.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::kernel::rational::pow;
use crate::kernel::{int, QuadExt, Rational};
use crate::sequences::{lucas_d, OrbitWindow, SeqError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompanionError {
    #[error("alpha = 0: the curve invariants are undefined")]
    ZeroAlpha,
    #[error("Q = 0")]
    ZeroQ,
    #[error("vanishing W_{0}: the sequence cannot be continued through it")]
    VanishingW(i64),
    #[error("W2 = {w2} does not divide W4 = {w4}")]
    SeedDivisibility { w2: BigInt, w4: BigInt },
    #[error("W_{0} is not an integer")]
    NonIntegerTerm(i64),
    #[error("first integral changes between n = {lo} and n = {index}")]
    NotInvariant { lo: i64, index: i64 },
    #[error("W_{0} has an unexpected mixed rational/radical form")]
    ImpureTerm(i64),
    #[error(transparent)]
    Sequence(#[from] SeqError),
}

fn quotient(n: &Rational, d: &Rational, index: i64) -> Result<Rational, SeqError> {
    if d.is_zero() {
        Err(SeqError::VanishingTerm { index })
    } else {
        Ok(n / d)
    }
}

/// `H` evaluated on `t_n..t_{n+3}`.
pub fn compute_h_at(w: &OrbitWindow, alpha: &Rational, beta: &Rational, n: i64) -> Result<Rational, CompanionError> {
    if !w.contains(n) || !w.contains(n + 3) {
        return Err(SeqError::OutOfRange { lo: n, hi: n + 3 }.into());
    }
    let (t0, t1, t2, t3) = (&w[n], &w[n + 1], &w[n + 2], &w[n + 3]);
    for (k, t) in [t0, t1, t2, t3].into_iter().enumerate() {
        if t.is_zero() {
            return Err(SeqError::VanishingTerm { index: n + k as i64 }.into());
        }
    }
    let a = quotient(&(t0 * t3), &(t1 * t2), n)?;
    let b = alpha * quotient(&(t1 * t1), &(t0 * t2), n)?;
    let c = alpha * quotient(&(t2 * t2), &(t1 * t3), n)?;
    let d = beta * quotient(&(t1 * t2), &(t0 * t3), n)?;
    Ok(a + b + c + d)
}

/// `H` at the lowest index of the window.
pub fn compute_h(w: &OrbitWindow, alpha: &Rational, beta: &Rational) -> Result<Rational, CompanionError> {
    if w.len() < 4 {
        return Err(SeqError::WindowTooShort { needed: 4, got: w.len() }.into());
    }
    compute_h_at(w, alpha, beta, w.lo())
}

/// Recomputes `H` at every index of the window and checks that it is constant.
pub fn verify_h_invariant(w: &OrbitWindow, alpha: &Rational, beta: &Rational) -> Result<Rational, CompanionError> {
    let h = compute_h(w, alpha, beta)?;
    for n in w.lo() + 1..=w.hi() - 3 {
        if compute_h_at(w, alpha, beta, n)? != h {
            return Err(CompanionError::NotInvariant { lo: w.lo(), index: n });
        }
    }
    Ok(h)
}

/// `(g₂, g₃)` of the curve attached to `(H, α, β)`.
pub fn curve_invariants(h: &Rational, alpha: &Rational, beta: &Rational) -> Result<(Rational, Rational), CompanionError> {
    if alpha.is_zero() {
        return Err(CompanionError::ZeroAlpha);
    }
    let p = |x: &Rational, e: usize| num_traits::pow(x.clone(), e);
    let (a2, b2) = (p(alpha, 2), p(beta, 2));
    let g2 = (p(h, 4) - int(8) * beta * p(h, 2) - int(24) * &a2 * h + int(16) * &b2) / (int(12) * &a2);
    let g3_num = p(h, 6) - int(12) * beta * p(h, 4) - int(36) * &a2 * p(h, 3) + int(48) * &b2 * p(h, 2)
        + int(144) * &a2 * beta * h
        + int(216) * p(alpha, 4)
        - int(64) * p(beta, 3);
    let g3 = -g3_num / (int(216) * p(alpha, 3));
    Ok((g2, g3))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitInvariants {
    pub alpha: Rational,
    pub beta: Rational,
    pub h: Rational,
    /// `α² + βH`.
    pub i: Rational,
    /// `α²I − β³`.
    pub j: Rational,
    pub g2: Rational,
    pub g3: Rational,
}

impl OrbitInvariants {
    pub fn new(alpha: Rational, beta: Rational, h: Rational) -> Result<Self, CompanionError> {
        let (g2, g3) = curve_invariants(&h, &alpha, &beta)?;
        let a2 = &alpha * &alpha;
        let i = &a2 + &beta * &h;
        let j = &a2 * &i - &beta * &beta * &beta;
        Ok(OrbitInvariants { alpha, beta, h, i, j, g2, g3 })
    }

    pub fn from_orbit(w: &OrbitWindow, alpha: &Rational, beta: &Rational) -> Result<Self, CompanionError> {
        let h = compute_h(w, alpha, beta)?;
        OrbitInvariants::new(alpha.clone(), beta.clone(), h)
    }

    /// `g₂³ − 27g₃²`.
    pub fn discriminant(&self) -> Rational {
        num_traits::pow(self.g2.clone(), 3) - int(27) * &self.g3 * &self.g3
    }

    /// Closed forms of `W₅..W₉` in terms of `α, β, I, J`.
    pub fn closed_form_w(&self, n: i64) -> Option<QuadExt> {
        let r = &self.alpha;
        let (a2, b, b3) = (&self.alpha * &self.alpha, &self.beta, num_traits::pow(self.beta.clone(), 3));
        let (i, j) = (&self.i, &self.j);
        let i2j = i * i + j;
        let i3 = i * i * i;
        let v = match n {
            5 => QuadExt::from_rational(-j.clone(), r),
            6 => QuadExt::radical(b * &i2j, r),
            7 => QuadExt::from_rational(&a2 * &i3 + &b3 * j, r),
            8 => QuadExt::radical((j * j - &b3 * &i2j) * i, r),
            9 => QuadExt::from_rational(-(b * (&a2 * &i3 * &i2j + j * j * j)), r),
            _ => return None,
        };
        Some(v)
    }
}

/// `W_0..W_{n_max}` in `ℚ(√α)`; negative indices by anti-symmetry.
#[derive(Clone, Debug)]
pub struct CompanionSeq {
    invariants: OrbitInvariants,
    terms: Vec<QuadExt>,
}

impl CompanionSeq {
    pub fn generate(invariants: OrbitInvariants, n_max: usize) -> Result<Self, CompanionError> {
        let r = invariants.alpha.clone();
        let mut terms = vec![
            QuadExt::zero(&r),
            QuadExt::one(&r),
            QuadExt::sqrt(&r),
            QuadExt::from_rational(-invariants.beta.clone(), &r),
            QuadExt::radical(-invariants.i.clone(), &r),
        ];
        let w2sq = &terms[2] * &terms[2];
        let w1w3 = &terms[1] * &terms[3];
        while terms.len() <= n_max {
            let m = terms.len();
            let n = m - 4;
            let num = &(&w2sq * &(&terms[n + 1] * &terms[n + 3])) - &(&w1w3 * &(&terms[n + 2] * &terms[n + 2]));
            let next = num
                .checked_div(&terms[n])
                .map_err(|_| CompanionError::VanishingW(n as i64))?;
            terms.push(next);
        }
        terms.truncate(n_max.max(1) + 1);
        Ok(CompanionSeq { invariants, terms })
    }

    pub fn invariants(&self) -> &OrbitInvariants {
        &self.invariants
    }

    pub fn n_max(&self) -> i64 {
        self.terms.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<QuadExt> {
        let v = self.terms.get(n.unsigned_abs() as usize)?;
        Some(if n < 0 { -v } else { v.clone() })
    }

    /// Even index: pure `√α` part; odd index: pure rational part.
    pub fn check_parity(&self) -> Result<(), CompanionError> {
        for (n, w) in self.terms.iter().enumerate() {
            let ok = if n % 2 == 0 { w.is_pure_radical() } else { w.is_rational() };
            if !ok {
                return Err(CompanionError::ImpureTerm(n as i64));
            }
        }
        Ok(())
    }
}

pub fn companion_w(inv: &OrbitInvariants, n: i64) -> Result<QuadExt, CompanionError> {
    let seq = CompanionSeq::generate(inv.clone(), n.unsigned_abs() as usize)?;
    Ok(seq.get(n).expect("generated"))
}

/// `D_n / Q^{(n−1)/2}` with radicand `Q`.
pub fn linear_companion_w(n: i64, p: &Rational, q: &Rational) -> Result<QuadExt, CompanionError> {
    if q.is_zero() {
        return Err(CompanionError::ZeroQ);
    }
    let d = lucas_d(n, p, q)?;
    let half = |e: i64| pow(q, e).expect("Q is nonzero");
    Ok(if n.rem_euclid(2) == 1 {
        QuadExt::from_rational(d / half((n - 1) / 2), q)
    } else {
        QuadExt::radical(d / half(n / 2), q)
    })
}

/// `(α_d, β_d) = (W_{2d}²/W_d², −W_{3d}/W_d)`.
pub fn subsequence_coeffs(inv: &OrbitInvariants, d: i64) -> Result<(Rational, Rational), CompanionError> {
    if d < 1 {
        return Err(SeqError::InvalidParams(format!("step d = {d} must be positive")).into());
    }
    let seq = CompanionSeq::generate(inv.clone(), 3 * d as usize)?;
    subsequence_coeffs_from(&seq, d)
}

pub fn subsequence_coeffs_from(seq: &CompanionSeq, d: i64) -> Result<(Rational, Rational), CompanionError> {
    let (wd, w2d, w3d) = (seq.get(d), seq.get(2 * d), seq.get(3 * d));
    let (wd, w2d, w3d) = match (wd, w2d, w3d) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(SeqError::OutOfRange { lo: 0, hi: 3 * d }.into()),
    };
    if wd.is_zero() {
        return Err(CompanionError::VanishingW(d));
    }
    let ratio = w2d.checked_div(&wd).map_err(|_| CompanionError::VanishingW(d))?;
    let alpha_d = (&ratio * &ratio).to_rational().ok_or(CompanionError::ImpureTerm(2 * d))?;
    let beta_d = (-w3d).checked_div(&wd).map_err(|_| CompanionError::VanishingW(d))?;
    let beta_d = beta_d.to_rational().ok_or(CompanionError::ImpureTerm(3 * d))?;
    Ok((alpha_d, beta_d))
}

/// Integer elliptic divisibility sequence `W_0..W_{m_max}` with `W₁ = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerEds {
    terms: Vec<BigInt>,
}

impl IntegerEds {
    pub fn get(&self, n: i64) -> Option<BigInt> {
        let v = self.terms.get(n.unsigned_abs() as usize)?;
        Some(if n < 0 { -v } else { v.clone() })
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn seeds(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.terms[2], &self.terms[3], &self.terms[4])
    }

    /// Every pair `n | m ≤ limit` with `W_n ∤ W_m`; a zero `W_n` only divides zero.
    pub fn divisibility_failures(&self, limit: usize) -> Vec<(usize, usize)> {
        let top = limit.min(self.terms.len() - 1);
        let mut bad = Vec::new();
        for n in 1..=top {
            for m in (n..=top).step_by(n) {
                let (wn, wm) = (&self.terms[n], &self.terms[m]);
                let ok = if wn.is_zero() { wm.is_zero() } else { wm.is_multiple_of(wn) };
                if !ok {
                    bad.push((n, m));
                }
            }
        }
        bad
    }
}

/// Builds the sequence from its seeds.
///
/// Terms come from the doubling formulas, whose only divisor is `W₂`, so a
/// vanishing intermediate term does not stop the construction. Every term is
/// then checked against `W_nW_{n+4} = W₂²W_{n+1}W_{n+3} − W₃W_{n+2}²`.
pub fn ward_generate(w2: &BigInt, w3: &BigInt, w4: &BigInt, m_max: usize) -> Result<IntegerEds, CompanionError> {
    if w2.is_zero() {
        return Err(CompanionError::VanishingW(2));
    }
    if !w4.is_multiple_of(w2) {
        return Err(CompanionError::SeedDivisibility { w2: w2.clone(), w4: w4.clone() });
    }
    let mut w: Vec<BigInt> = vec![BigInt::zero(), BigInt::one(), w2.clone(), w3.clone(), w4.clone()];
    let at = |w: &[BigInt], k: i64| -> BigInt {
        if k < 0 {
            -w[(-k) as usize].clone()
        } else {
            w[k as usize].clone()
        }
    };
    while w.len() <= m_max {
        let m = w.len() as i64;
        let n = m / 2;
        let next = if m % 2 == 1 {
            at(&w, n + 2) * num_traits::pow(at(&w, n), 3) - at(&w, n - 1) * num_traits::pow(at(&w, n + 1), 3)
        } else {
            let num = at(&w, n)
                * (at(&w, n + 2) * num_traits::pow(at(&w, n - 1), 2)
                    - at(&w, n - 2) * num_traits::pow(at(&w, n + 1), 2));
            let (q, r) = num.div_rem(w2);
            if !r.is_zero() {
                return Err(CompanionError::NonIntegerTerm(m));
            }
            q
        };
        w.push(next);
    }
    let w2sq = w2 * w2;
    for n in 0..w.len().saturating_sub(4) {
        let lhs = &w[n] * &w[n + 4];
        let rhs = &w2sq * &w[n + 1] * &w[n + 3] - w3 * &w[n + 2] * &w[n + 2];
        if lhs != rhs {
            return Err(CompanionError::NonIntegerTerm(n as i64 + 4));
        }
    }
    w.truncate(m_max.max(1) + 1);
    Ok(IntegerEds { terms: w })
}

/// The elliptic relation
/// `W_mW_{m+s}W_{n−u}W_{n+u+s} + W_nW_{n+s}W_{u−m}W_{u+m+s} + W_uW_{u+s}W_{m−n}W_{m+n+s}`,
/// which vanishes identically on a companion sequence.
pub fn elliptic_relation(seq: &CompanionSeq, m: i64, u: i64, n: i64, s: i64) -> Option<QuadExt> {
    let w = |k: i64| seq.get(k);
    let term = |a: i64, b: i64, c: i64, d: i64| -> Option<QuadExt> { Some(&(&w(a)? * &w(b)?) * &(&w(c)? * &w(d)?)) };
    let x = term(m, m + s, n - u, n + u + s)?;
    let y = term(n, n + s, u - m, u + m + s)?;
    let z = term(u, u + s, m - n, m + n + s)?;
    Some(&(&x + &y) + &z)
}

/// Snapshot of `W_n` values keyed by index, used by reports.
pub fn companion_table(seq: &CompanionSeq) -> BTreeMap<i64, String> {
    (0..=seq.n_max()).map(|n| (n, seq.get(n).expect("in range").to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat;
    use crate::sequences::{gale_robinson_extend, linear_window, subsequence, fit_somos4_coeffs, GaleRobinsonParams, LinearParams};

    fn somos4_inv() -> OrbitInvariants {
        OrbitInvariants::new(int(1), int(1), int(4)).unwrap()
    }

    #[test]
    fn h_examples() {
        let w = gale_robinson_extend(&GaleRobinsonParams::classic_somos4(), 0, 10).unwrap();
        assert_eq!(compute_h(&w, &int(1), &int(1)).unwrap(), int(4));
        assert_eq!(verify_h_invariant(&w, &int(1), &int(1)).unwrap(), int(4));

        let fib = linear_window(&LinearParams::fibonacci(), 1, 6).unwrap();
        assert_eq!(compute_h(&fib, &int(-1), &int(2)).unwrap(), int(1));
    }

    #[test]
    fn invariants_examples() {
        assert_eq!(curve_invariants(&int(4), &int(1), &int(1)).unwrap(), (int(4), int(-1)));
        let fib = OrbitInvariants::new(int(-1), int(2), int(1)).unwrap();
        assert_eq!((fib.g2.clone(), fib.g3.clone()), (rat(25, 12), rat(125, 216)));
        assert!(fib.discriminant().is_zero());
        assert_eq!(somos4_inv().discriminant(), int(37));
        assert_eq!(curve_invariants(&int(1), &int(0), &int(1)), Err(CompanionError::ZeroAlpha));
    }

    #[test]
    fn companion_examples() {
        let inv = somos4_inv();
        assert_eq!((inv.i.clone(), inv.j.clone()), (int(5), int(4)));
        let seq = CompanionSeq::generate(inv.clone(), 9).unwrap();
        let one = int(1);
        assert_eq!(seq.get(2).unwrap(), QuadExt::sqrt(&one));
        assert_eq!(seq.get(3).unwrap(), QuadExt::from_rational(int(-1), &one));
        assert_eq!(seq.get(4).unwrap(), QuadExt::radical(int(-5), &one));
        assert_eq!(seq.get(5).unwrap(), QuadExt::from_rational(int(-4), &one));
        assert_eq!(seq.get(6).unwrap(), QuadExt::radical(int(29), &one));
        assert_eq!(seq.get(0).unwrap(), QuadExt::zero(&one));
        assert_eq!(seq.get(-3).unwrap(), QuadExt::from_rational(int(1), &one));
        for n in 5..=9 {
            assert_eq!(seq.get(n), inv.closed_form_w(n), "W_{n}");
        }
        seq.check_parity().unwrap();
    }

    #[test]
    fn closed_forms_generic() {
        let inv = OrbitInvariants::new(rat(3, 2), rat(-5, 7), rat(11, 3)).unwrap();
        let seq = CompanionSeq::generate(inv.clone(), 9).unwrap();
        for n in 5..=9 {
            assert_eq!(seq.get(n), inv.closed_form_w(n), "W_{n}");
        }
        seq.check_parity().unwrap();
    }

    #[test]
    fn linear_companion_examples() {
        let w2 = linear_companion_w(2, &int(1), &int(-1)).unwrap();
        assert!(w2.is_pure_radical());
        assert_eq!((w2.rad_part(), w2.radicand()), (&int(-1), &int(-1)));
        assert_eq!(linear_companion_w(1, &int(3), &int(2)).unwrap(), QuadExt::one(&int(2)));
        assert_eq!(linear_companion_w(4, &int(3), &int(2)).unwrap(), QuadExt::radical(rat(15, 4), &int(2)));
        assert_eq!(linear_companion_w(0, &int(3), &int(0)), Err(CompanionError::ZeroQ));
    }

    #[test]
    fn linear_companion_is_ward() {
        let (p, q) = (rat(5, 3), rat(-2, 7));
        let w = |n: i64| linear_companion_w(n, &p, &q).unwrap();
        let w2sq = &w(2) * &w(2);
        assert_eq!(w2sq, QuadExt::from_rational(&p * &p / &q, &q));
        for n in -6..6 {
            let lhs = &w(n) * &w(n + 4);
            let rhs = &(&w2sq * &(&w(n + 1) * &w(n + 3))) - &(&w(3) * &(&w(n + 2) * &w(n + 2)));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn subsequence_coefficient_examples() {
        let inv = somos4_inv();
        assert_eq!(subsequence_coeffs(&inv, 2).unwrap(), (int(25), int(-29)));
        assert_eq!(subsequence_coeffs(&inv, 1).unwrap(), (int(1), int(1)));
        let (a3, b3) = subsequence_coeffs(&inv, 3).unwrap();
        assert_eq!(a3, int(841));
        let orbit = gale_robinson_extend(&GaleRobinsonParams::classic_somos4(), 0, 24).unwrap();
        let sub = subsequence(&orbit, 3, 0).unwrap();
        assert_eq!(fit_somos4_coeffs(&sub).unwrap(), (a3, b3));
    }

    #[test]
    fn ward_examples() {
        let b = |x: i64| BigInt::from(x);
        let eds = ward_generate(&b(1), &b(2), &b(3), 30).unwrap();
        assert_eq!(eds.get(5), Some(b(-5)));
        assert_eq!(eds.get(6), Some(b(-28)));
        assert_eq!(eds.get(7), Some(b(-67)));
        assert!(eds.divisibility_failures(30).is_empty());

        let units = ward_generate(&b(1), &b(1), &b(1), 40).unwrap();
        assert_eq!(units.get(5), Some(b(0)));
        assert!(units.divisibility_failures(40).is_empty());

        assert!(matches!(ward_generate(&b(2), &b(1), &b(3), 10), Err(CompanionError::SeedDivisibility { .. })));
        let e = ward_generate(&b(2), &b(3), &b(4), 25).unwrap();
        assert!(e.divisibility_failures(25).is_empty());
    }

    #[test]
    fn elliptic_relation_small_grid() {
        let seq = CompanionSeq::generate(OrbitInvariants::new(rat(2, 3), rat(-1, 5), rat(7, 2)).unwrap(), 24).unwrap();
        for m in -2..=3 {
            for u in -2..=3 {
                for n in -2..=3 {
                    for s in -2..=3 {
                        let v = elliptic_relation(&seq, m, u, n, s).unwrap();
                        assert!(v.is_zero(), "({m},{u},{n},{s})");
                    }
                }
            }
        }
    }
}
