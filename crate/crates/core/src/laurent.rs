//! Laurent polynomials in `t₀..t_{N−1}` over `ℤ[α, β]`, exact division, and
//! symbolic iteration of three-term recurrences.
//!
//! Monomials are stored flat: the exponent vector of the `t` variables
//! followed by the degrees of `α` and `β`. The monomial order is a block
//! order, graded-lex on the `t` part first and graded-lex on `(α, β)` second.
//! On genuine polynomials (non-negative exponents) this is a monomial order,
//! which is what the division algorithm needs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::kernel::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaurentError {
    #[error("arity mismatch: {left} vs {right} variables")]
    ArityMismatch { left: usize, right: usize },
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("not divisible: nonzero remainder")]
    NotDivisible,
    #[error("Laurent property failed: division by t_{0} is not exact")]
    LaurentFailure(i64),
    #[error("evaluation point has a zero coordinate t_{0}")]
    ZeroSubstitution(usize),
    #[error("invalid recurrence shape: {0}")]
    InvalidShape(String),
    #[error("desk-scale guard exceeded: {0}")]
    GuardExceeded(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Monomial(Vec<i32>);

impl Monomial {
    fn t_part(&self, n: usize) -> &[i32] {
        &self.0[..n]
    }

    fn ab(&self, n: usize) -> (i32, i32) {
        (self.0[n], self.0[n + 1])
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn divisible_by(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

fn graded_lex(a: &[i32], b: &[i32]) -> Ordering {
    let da: i64 = a.iter().map(|&x| x as i64).sum();
    let db: i64 = b.iter().map(|&x| x as i64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len() - 2;
        graded_lex(&self.0[..n], &other.0[..n]).then_with(|| graded_lex(&self.0[n..], &other.0[n..]))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `α, β` with integer coefficients, keyed by `(deg_α, deg_β)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoeffPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl CoeffPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn evaluate(&self, alpha: &Rational, beta: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(&(i, j), c)| {
                Rational::from_integer(c.clone())
                    * num_traits::pow(alpha.clone(), i as usize)
                    * num_traits::pow(beta.clone(), j as usize)
            })
            .fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Laurent polynomial in `t₀..t_{N−1}` with coefficients in `ℤ[α, β]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(num_vars: usize) -> Self {
        LaurentPoly { num_vars, terms: BTreeMap::new() }
    }

    pub fn one(num_vars: usize) -> Self {
        LaurentPoly::term(num_vars, BigInt::one(), &vec![0; num_vars], 0, 0)
    }

    /// `coeff · α^a · β^b · Π tᵢ^{exps[i]}`.
    pub fn term(num_vars: usize, coeff: BigInt, exps: &[i32], a: u32, b: u32) -> Self {
        assert_eq!(exps.len(), num_vars, "exponent vector length");
        let mut p = LaurentPoly::zero(num_vars);
        if !coeff.is_zero() {
            let mut m = exps.to_vec();
            m.push(a as i32);
            m.push(b as i32);
            p.terms.insert(Monomial(m), coeff);
        }
        p
    }

    /// `tᵢ^e`.
    pub fn var_pow(num_vars: usize, i: usize, e: i32) -> Self {
        let mut exps = vec![0; num_vars];
        exps[i] = e;
        LaurentPoly::term(num_vars, BigInt::one(), &exps, 0, 0)
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        LaurentPoly::var_pow(num_vars, i, 1)
    }

    pub fn alpha(num_vars: usize) -> Self {
        LaurentPoly::term(num_vars, BigInt::one(), &vec![0; num_vars], 1, 0)
    }

    pub fn beta(num_vars: usize) -> Self {
        LaurentPoly::term(num_vars, BigInt::one(), &vec![0; num_vars], 0, 1)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct monomials in `α, β, t₀..t_{N−1}`.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms grouped by `t` exponent vector, each with its `ℤ[α, β]` coefficient.
    pub fn grouped_terms(&self) -> BTreeMap<Vec<i32>, CoeffPoly> {
        let n = self.num_vars;
        let mut out: BTreeMap<Vec<i32>, CoeffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (a, b) = m.ab(n);
            out.entry(m.t_part(n).to_vec())
                .or_default()
                .terms
                .insert((a as u32, b as u32), c.clone());
        }
        out
    }

    fn check_arity(&self, other: &LaurentPoly) -> Result<(), LaurentError> {
        if self.num_vars == other.num_vars {
            Ok(())
        } else {
            Err(LaurentError::ArityMismatch { left: self.num_vars, right: other.num_vars })
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.add(&other.neg())
    }

    /// Product with merged monomials and zero terms dropped.
    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_arity(other)?;
        let mut out = LaurentPoly::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    fn shift(&self, by: &[i32]) -> LaurentPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                for (x, s) in e.iter_mut().zip(by) {
                    *x += s;
                }
                (Monomial(e), c.clone())
            })
            .collect();
        LaurentPoly { num_vars: self.num_vars, terms }
    }

    /// Per-variable minimum `t` exponent (the monomial content).
    fn min_t_exponents(&self) -> Vec<i32> {
        let n = self.num_vars;
        let mut mins = vec![i32::MAX; n];
        for m in self.terms.keys() {
            for (lo, &e) in mins.iter_mut().zip(m.t_part(n)) {
                *lo = (*lo).min(e);
            }
        }
        mins
    }

    /// Exact quotient `q` with `q·b == self`, or [`LaurentError::NotDivisible`].
    ///
    /// The monomial content of `b` is removed by an exponent shift; the
    /// remaining division runs in the ordinary polynomial ring, where a zero
    /// remainder certifies divisibility.
    pub fn exact_div(&self, b: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_arity(b)?;
        if b.is_zero() {
            return Err(LaurentError::DivisionByZeroPoly);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(self.num_vars));
        }
        let n = self.num_vars;
        let pad = |v: Vec<i32>| -> Vec<i32> { v.into_iter().chain([0, 0]).collect() };

        let content = b.min_t_exponents();
        let neg_content: Vec<i32> = pad(content.iter().map(|e| -e).collect());
        let divisor = b.shift(&neg_content);
        let a = self.shift(&neg_content);
        let lift: Vec<i32> = pad(a.min_t_exponents().iter().map(|&e| (-e).max(0)).collect());
        let a = a.shift(&lift);

        let (lead_m, lead_c) = divisor.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = a.terms;
        let mut quot = LaurentPoly::zero(n);
        while let Some((m, c)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if !m.divisible_by(&lead_m) {
                return Err(LaurentError::NotDivisible);
            }
            let (k, r) = c.div_rem(&lead_c);
            if !r.is_zero() {
                return Err(LaurentError::NotDivisible);
            }
            let shift = m.div(&lead_m);
            for (dm, dc) in &divisor.terms {
                let key = dm.mul(&shift);
                let delta = -(dc * &k);
                use std::collections::btree_map::Entry;
                match rem.entry(key) {
                    Entry::Vacant(e) => {
                        e.insert(delta);
                    }
                    Entry::Occupied(mut e) => {
                        *e.get_mut() += delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
            quot.add_term(shift, k);
        }
        let unlift: Vec<i32> = lift.iter().map(|e| -e).collect();
        Ok(quot.shift(&unlift))
    }

    /// Exact value at `α, β` and a point with nonzero coordinates.
    pub fn evaluate(&self, alpha: &Rational, beta: &Rational, point: &[Rational]) -> Result<Rational, LaurentError> {
        if point.len() != self.num_vars {
            return Err(LaurentError::ArityMismatch { left: self.num_vars, right: point.len() });
        }
        if let Some(i) = point.iter().position(Zero::is_zero) {
            return Err(LaurentError::ZeroSubstitution(i));
        }
        let n = self.num_vars;
        let ipow = |x: &Rational, e: i32| -> Rational {
            if e >= 0 {
                num_traits::pow(x.clone(), e as usize)
            } else {
                num_traits::pow(x.recip(), e.unsigned_abs() as usize)
            }
        };
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let (a, b) = m.ab(n);
            let mut v = Rational::from_integer(c.clone()) * ipow(alpha, a) * ipow(beta, b);
            for (x, &e) in point.iter().zip(m.t_part(n)) {
                if e != 0 {
                    v *= ipow(x, e);
                }
            }
            acc += v;
        }
        Ok(acc)
    }
}

/// Free function form of [`LaurentPoly::mul`].
pub fn laurent_mul(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
    a.mul(b)
}

/// Free function form of [`LaurentPoly::exact_div`].
pub fn laurent_exact_div(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
    a.exact_div(b)
}

/// Canonical text: terms in descending block order, e.g.
/// `a^1*b^0*t0^-1*t1^1*t3^1 + a^0*b^1*t0^-1*t2^2`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.num_vars;
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let mag = c.abs();
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            let (a, b) = m.ab(n);
            write!(f, "a^{a}*b^{b}")?;
            for (k, &e) in m.t_part(n).iter().enumerate() {
                if e != 0 {
                    write!(f, "*t{k}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// `(N, p, q)` of a three-term recurrence with symbolic coefficients and seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecurrenceShape {
    pub order: usize,
    pub p: usize,
    pub q: usize,
}

impl RecurrenceShape {
    pub fn new(order: usize, p: usize, q: usize) -> Result<Self, LaurentError> {
        if order < 4 || !(0 < p && p < q && 2 * q <= order) {
            return Err(LaurentError::InvalidShape(format!(
                "need N >= 4 and 0 < p < q <= N/2, got ({order}, {p}, {q})"
            )));
        }
        Ok(RecurrenceShape { order, p, q })
    }

    pub fn somos4() -> Self {
        RecurrenceShape { order: 4, p: 1, q: 2 }
    }
}

/// Limits on symbolic iteration; monomial counts grow quickly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolicGuard {
    pub max_vars: usize,
    pub max_extra_terms: usize,
}

impl Default for SymbolicGuard {
    fn default() -> Self {
        SymbolicGuard { max_vars: 8, max_extra_terms: 10 }
    }
}

/// `t₀..t_{n_max}` as Laurent polynomials.
#[derive(Clone, Debug)]
pub struct SymbolicOrbit {
    pub shape: RecurrenceShape,
    pub terms: Vec<LaurentPoly>,
}

impl SymbolicOrbit {
    pub fn monomial_counts(&self) -> Vec<usize> {
        self.terms.iter().map(LaurentPoly::num_terms).collect()
    }

    pub fn term(&self, n: usize) -> &LaurentPoly {
        &self.terms[n]
    }
}

/// Iterates the recurrence symbolically; each division by `t_n` must be exact.
pub fn symbolic_iterate(
    shape: RecurrenceShape,
    n_max: usize,
    guard: SymbolicGuard,
) -> Result<SymbolicOrbit, LaurentError> {
    let big = shape.order;
    if big > guard.max_vars || n_max > big + guard.max_extra_terms {
        return Err(LaurentError::GuardExceeded(format!(
            "N = {big} (max {}), n_max = {n_max} (max N + {})",
            guard.max_vars, guard.max_extra_terms
        )));
    }
    if n_max < big {
        return Err(LaurentError::InvalidShape(format!("n_max = {n_max} must be at least N = {big}")));
    }
    let alpha = LaurentPoly::alpha(big);
    let beta = LaurentPoly::beta(big);
    let mut terms: Vec<LaurentPoly> = (0..big).map(|i| LaurentPoly::var(big, i)).collect();
    for n in 0..=(n_max - big) {
        let lhs = alpha.mul(&terms[n + shape.p].mul(&terms[n + big - shape.p])?)?;
        let rhs = beta.mul(&terms[n + shape.q].mul(&terms[n + big - shape.q])?)?;
        let num = lhs.add(&rhs)?;
        let next = num.exact_div(&terms[n]).map_err(|e| match e {
            LaurentError::NotDivisible => LaurentError::LaurentFailure(n as i64),
            other => other,
        })?;
        terms.push(next);
    }
    Ok(SymbolicOrbit { shape, terms })
}

/// Outcome of comparing a symbolic orbit against numeric orbits.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SpecializationReport {
    pub trials: usize,
    /// Draws discarded because a numeric divisor vanished.
    pub skipped: usize,
    pub mismatches: Vec<String>,
}

/// Evaluates every term of `orbit` at `cfg.trials` random nonzero `(α, β, t₀..t_{N−1})`
/// and compares with the numeric recurrence.
pub fn check_specializations(orbit: &SymbolicOrbit, cfg: &crate::identities::TrialConfig) -> SpecializationReport {
    use crate::identities::rand_nonzero;
    use crate::sequences::{gale_robinson_extend, GaleRobinsonParams};
    let shape = orbit.shape;
    let n_max = orbit.terms.len() - 1;
    let mut rng = crate::identities::rng_for(cfg, 0x1A0);
    let mut report = SpecializationReport { trials: 0, skipped: 0, mismatches: Vec::new() };
    while report.trials < cfg.trials && report.skipped <= cfg.trials * crate::identities::RESAMPLE_CAP {
        let (a, b) = (rand_nonzero(&mut rng, cfg.bound), rand_nonzero(&mut rng, cfg.bound));
        let init: Vec<Rational> = (0..shape.order).map(|_| rand_nonzero(&mut rng, cfg.bound)).collect();
        let params = GaleRobinsonParams::new(shape.order, shape.p, shape.q, a.clone(), b.clone(), init.clone())
            .expect("shape already validated");
        let Ok(w) = gale_robinson_extend(&params, 0, n_max as i64) else {
            report.skipped += 1;
            continue;
        };
        report.trials += 1;
        for (n, term) in orbit.terms.iter().enumerate() {
            match term.evaluate(&a, &b, &init) {
                Ok(v) if v == w[n as i64] => {}
                other => {
                    let seeds: Vec<String> = init.iter().map(ToString::to_string).collect();
                    report.mismatches.push(format!("t{n} at alpha={a}, beta={b}, init={}: {other:?} vs {}", seeds.join(","), w[n as i64]));
                }
            }
        }
    }
    report
}
