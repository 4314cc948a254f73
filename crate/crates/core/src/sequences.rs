//! Bi-infinite orbits of the linear, Lucas, Somos and Gale-Robinson recurrences.
//!
//! Every orbit is materialised as a finite [`Window`] over an explicit index
//! range; negative indices are reached by running the recurrence backwards.

use std::fmt;
use std::ops::Index;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::kernel::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error("Q = 0: the sequence cannot be extended to negative indices")]
    ZeroQ,
    #[error("vanishing term t_{index}: the orbit cannot be extended past it")]
    VanishingTerm { index: i64 },
    #[error("index range {lo}..{hi} is not available in the window")]
    OutOfRange { lo: i64, hi: i64 },
    #[error("invalid recurrence parameters: {0}")]
    InvalidParams(String),
    #[error("window too short: need {needed} terms, have {got}")]
    WindowTooShort { needed: usize, got: usize },
    #[error("the 2x2 system for (alpha, beta) is singular")]
    SingularSystem,
    #[error("no consistent Somos-4 fit: relation fails at n = {index}")]
    NoConsistentFit { index: i64 },
}

/// Contiguous slice `lo..=hi` of a bi-infinite sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Window<T> {
    lo: i64,
    values: Vec<T>,
}

/// Exact orbit slice.
pub type OrbitWindow = Window<Rational>;

impl<T> Window<T> {
    pub fn new(lo: i64, values: Vec<T>) -> Self {
        assert!(!values.is_empty(), "windows are never empty");
        Window { lo, values }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi()
    }

    pub fn get(&self, n: i64) -> Option<&T> {
        if self.contains(n) {
            self.values.get((n - self.lo) as usize)
        } else {
            None
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.lo + i as i64, v))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Window<U> {
        Window { lo: self.lo, values: self.values.iter().map(f).collect() }
    }

    /// Builds `lo..=hi` from an index function; `None` if the range is empty.
    pub fn try_from_fn<E>(lo: i64, hi: i64, mut f: impl FnMut(i64) -> Result<T, E>) -> Result<Option<Self>, E> {
        if hi < lo {
            return Ok(None);
        }
        let values = (lo..=hi).map(&mut f).collect::<Result<Vec<_>, _>>()?;
        Ok(Some(Window { lo, values }))
    }
}

impl<T: Clone> Window<T> {
    pub fn slice(&self, lo: i64, hi: i64) -> Result<Window<T>, SeqError> {
        if lo > hi || !self.contains(lo) || !self.contains(hi) {
            return Err(SeqError::OutOfRange { lo, hi });
        }
        let a = (lo - self.lo) as usize;
        let b = (hi - self.lo) as usize;
        Ok(Window { lo, values: self.values[a..=b].to_vec() })
    }

    /// Same values, first index moved to `lo`.
    pub fn reindexed(&self, lo: i64) -> Window<T> {
        Window { lo, values: self.values.clone() }
    }
}

impl<T> Index<i64> for Window<T> {
    type Output = T;
    fn index(&self, n: i64) -> &T {
        self.get(n)
            .unwrap_or_else(|| panic!("index {n} outside window {}..={}", self.lo, self.hi()))
    }
}

impl fmt::Display for Window<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(format_rational).collect();
        write!(f, "[{}..{}] ({})", self.lo, self.hi(), parts.join(", "))
    }
}

/// `D_n` with `D₀ = 0`, `D₁ = 1`, `D_{n+2} = P·D_{n+1} − Q·D_n`, `D_{−n} = −D_n/Qⁿ`.
pub fn lucas_d(n: i64, p: &Rational, q: &Rational) -> Result<Rational, SeqError> {
    if n < 0 {
        if q.is_zero() {
            return Err(SeqError::ZeroQ);
        }
        let m = n.unsigned_abs() as usize;
        let dm = lucas_d(m as i64, p, q)?;
        return Ok(-dm / num_traits::pow(q.clone(), m));
    }
    let (mut a, mut b) = (Rational::zero(), Rational::one());
    for _ in 0..n {
        let next = p * &b - q * &a;
        a = std::mem::replace(&mut b, next);
    }
    Ok(a)
}

/// Precomputed `D_{−radius..=radius}` for repeated lookups.
#[derive(Clone, Debug)]
pub struct LucasTable {
    p: Rational,
    q: Rational,
    values: Window<Rational>,
}

impl LucasTable {
    pub fn new(p: &Rational, q: &Rational, radius: i64) -> Result<Self, SeqError> {
        if q.is_zero() && radius > 0 {
            return Err(SeqError::ZeroQ);
        }
        let params = LinearParams::new(p.clone(), q.clone(), Rational::zero(), Rational::one());
        let values = linear_window(&params, -radius, radius.max(1))?;
        Ok(LucasTable { p: p.clone(), q: q.clone(), values })
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn radius(&self) -> i64 {
        self.values.hi().min(-self.values.lo())
    }

    /// Panics outside the precomputed radius.
    pub fn d(&self, n: i64) -> &Rational {
        &self.values[n]
    }
}

/// Second-order linear recurrence `T_{n+2} = P·T_{n+1} − Q·T_n` with `(T₀, T₁) = (t0, t1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearParams {
    pub p: Rational,
    pub q: Rational,
    pub t0: Rational,
    pub t1: Rational,
}

impl LinearParams {
    pub fn new(p: Rational, q: Rational, t0: Rational, t1: Rational) -> Self {
        LinearParams { p, q, t0, t1 }
    }

    /// Fibonacci numbers: `P = 1`, `Q = −1`, seeds `(0, 1)`.
    pub fn fibonacci() -> Self {
        use crate::kernel::int;
        LinearParams::new(int(1), int(-1), int(0), int(1))
    }

    /// `Qt₀² − Pt₀t₁ + t₁²`, the constant in the Vajda identity for `T`.
    pub fn vajda_constant(&self) -> Rational {
        &self.q * &self.t0 * &self.t0 - &self.p * &self.t0 * &self.t1 + &self.t1 * &self.t1
    }

    /// Somos-4 coefficients `(α, β) = (P²/Q, −(P² − Q)/Q)` satisfied by every `T`.
    pub fn somos4_coefficients(&self) -> Result<(Rational, Rational), SeqError> {
        if self.q.is_zero() {
            return Err(SeqError::ZeroQ);
        }
        let p2 = &self.p * &self.p;
        let alpha = &p2 / &self.q;
        let beta = -(&p2 - &self.q) / &self.q;
        Ok((alpha, beta))
    }
}

/// `T_n = −t₀Q·D_{n−1} + t₁·D_n`, valid for every integer `n`.
pub fn linear_t(n: i64, params: &LinearParams) -> Result<Rational, SeqError> {
    let d_prev = lucas_d(n - 1, &params.p, &params.q)?;
    let d = lucas_d(n, &params.p, &params.q)?;
    Ok(-&params.t0 * &params.q * d_prev + &params.t1 * d)
}

/// `T_lo..=T_hi` by forward and backward iteration.
pub fn linear_window(params: &LinearParams, lo: i64, hi: i64) -> Result<OrbitWindow, SeqError> {
    if lo > hi {
        return Err(SeqError::OutOfRange { lo, hi });
    }
    if lo < 0 && params.q.is_zero() {
        return Err(SeqError::ZeroQ);
    }
    let a = lo.min(0);
    let b = hi.max(1);
    let mut values = vec![Rational::zero(); (b - a + 1) as usize];
    let at = |n: i64| (n - a) as usize;
    values[at(0)] = params.t0.clone();
    values[at(1)] = params.t1.clone();
    for n in 2..=b {
        values[at(n)] = &params.p * &values[at(n - 1)] - &params.q * &values[at(n - 2)];
    }
    let qinv = if a < 0 { params.q.recip() } else { Rational::one() };
    for n in (a..0).rev() {
        values[at(n)] = (&params.p * &values[at(n + 1)] - &values[at(n + 2)]) * &qinv;
    }
    Window::new(a, values).slice(lo, hi)
}

/// Three-term Gale-Robinson recurrence
/// `t_n·t_{n+N} = α·t_{n+p}·t_{n+N−p} + β·t_{n+q}·t_{n+N−q}` seeded with `t₀..t_{N−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleRobinsonParams {
    order: usize,
    p: usize,
    q: usize,
    alpha: Rational,
    beta: Rational,
    init: Vec<Rational>,
}

impl GaleRobinsonParams {
    pub fn new(
        order: usize,
        p: usize,
        q: usize,
        alpha: Rational,
        beta: Rational,
        init: Vec<Rational>,
    ) -> Result<Self, SeqError> {
        if order < 4 {
            return Err(SeqError::InvalidParams(format!("N = {order} must be at least 4")));
        }
        if !(0 < p && p < q && 2 * q <= order) {
            return Err(SeqError::InvalidParams(format!(
                "need 0 < p < q <= N/2, got N = {order}, p = {p}, q = {q}"
            )));
        }
        if init.len() != order {
            return Err(SeqError::InvalidParams(format!(
                "expected {order} initial values, got {}",
                init.len()
            )));
        }
        if let Some(i) = init.iter().position(Zero::is_zero) {
            return Err(SeqError::InvalidParams(format!("initial value t_{i} is zero")));
        }
        Ok(GaleRobinsonParams { order, p, q, alpha, beta, init })
    }

    pub fn somos4(alpha: Rational, beta: Rational, init: Vec<Rational>) -> Result<Self, SeqError> {
        GaleRobinsonParams::new(4, 1, 2, alpha, beta, init)
    }

    pub fn somos_n(order: usize, alpha: Rational, beta: Rational, init: Vec<Rational>) -> Result<Self, SeqError> {
        GaleRobinsonParams::new(order, 1, 2, alpha, beta, init)
    }

    /// Somos(4): `α = β = 1`, unit seeds.
    pub fn classic_somos4() -> Self {
        let one = Rational::one();
        GaleRobinsonParams::somos4(one.clone(), one.clone(), vec![one; 4]).expect("valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }
    pub fn beta(&self) -> &Rational {
        &self.beta
    }
    pub fn init(&self) -> &[Rational] {
        &self.init
    }
}

/// Shape of a three-term recurrence whose `α` coefficient may depend on `n`.
pub(crate) struct ThreeTerm<'a> {
    pub order: usize,
    pub p: usize,
    pub q: usize,
    pub alpha: &'a dyn Fn(i64) -> Rational,
    pub beta: &'a Rational,
    pub init: &'a [Rational],
}

impl ThreeTerm<'_> {
    fn rhs<'b>(&self, n: i64, get: impl Fn(i64) -> &'b Rational) -> Rational {
        let (big, p, q) = (self.order as i64, self.p as i64, self.q as i64);
        (self.alpha)(n) * get(n + p) * get(n + big - p) + self.beta * get(n + q) * get(n + big - q)
    }

    /// Extends over `lo..=hi` (widened to cover the seed block). On a
    /// vanishing divisor, returns the contiguous part already computed.
    pub fn extend_partial(&self, lo: i64, hi: i64) -> (OrbitWindow, Option<SeqError>) {
        let big = self.order as i64;
        let mut fwd: Vec<Rational> = self.init.to_vec();
        let mut error = None;
        let mut n = 0;
        while n + big <= hi {
            if fwd[n as usize].is_zero() {
                error = Some(SeqError::VanishingTerm { index: n });
                break;
            }
            let next = self.rhs(n, |k| &fwd[k as usize]) / &fwd[n as usize];
            fwd.push(next);
            n += 1;
        }
        // Backward part is stored reversed: back[k] = t_{-1-k}.
        let mut back: Vec<Rational> = Vec::new();
        if error.is_none() {
            let mut n = -1;
            while n >= lo {
                let idx = n + big;
                let get = |k: i64| -> &Rational {
                    if k >= 0 {
                        &fwd[k as usize]
                    } else {
                        &back[(-1 - k) as usize]
                    }
                };
                if get(idx).is_zero() {
                    error = Some(SeqError::VanishingTerm { index: idx });
                    break;
                }
                let prev = self.rhs(n, get) / get(idx);
                back.push(prev);
                n -= 1;
            }
        }
        let start = -(back.len() as i64);
        let mut values: Vec<Rational> = back.into_iter().rev().collect();
        values.extend(fwd);
        let full = Window::new(start, values);
        let a = lo.max(full.lo());
        let b = hi.min(full.hi());
        let w = full.slice(a, b).unwrap_or(full);
        (w, error)
    }
}

/// `t_lo..=t_hi` of a Gale-Robinson orbit, exact.
pub fn gale_robinson_extend(params: &GaleRobinsonParams, lo: i64, hi: i64) -> Result<OrbitWindow, SeqError> {
    let (w, err) = gale_robinson_extend_partial(params, lo, hi)?;
    match err {
        Some(e) => Err(e),
        None => Ok(w),
    }
}

/// Like [`gale_robinson_extend`], but keeps whatever was computed before a
/// vanishing term.
pub fn gale_robinson_extend_partial(
    params: &GaleRobinsonParams,
    lo: i64,
    hi: i64,
) -> Result<(OrbitWindow, Option<SeqError>), SeqError> {
    if lo > hi {
        return Err(SeqError::OutOfRange { lo, hi });
    }
    let alpha = |_: i64| params.alpha.clone();
    let rec = ThreeTerm {
        order: params.order,
        p: params.p,
        q: params.q,
        alpha: &alpha,
        beta: &params.beta,
        init: &params.init,
    };
    Ok(rec.extend_partial(lo, hi))
}

/// `t_{d,n} = t_{dn+r}` for every `n` with `dn + r` inside the window.
pub fn subsequence<T: Clone>(w: &Window<T>, d: i64, r: i64) -> Result<Window<T>, SeqError> {
    if d < 1 {
        return Err(SeqError::InvalidParams(format!("step d = {d} must be positive")));
    }
    let n_lo = Integer::div_ceil(&(w.lo() - r), &d);
    let n_hi = Integer::div_floor(&(w.hi() - r), &d);
    if n_lo > n_hi {
        return Err(SeqError::OutOfRange { lo: w.lo(), hi: w.hi() });
    }
    let values = (n_lo..=n_hi).map(|n| w[d * n + r].clone()).collect();
    Ok(Window::new(n_lo, values))
}

/// Recovers `(α, β)` with `t_n t_{n+4} = α t_{n+1}t_{n+3} + β t_{n+2}²` from the
/// first two relations in the window, then checks the rest.
pub fn fit_somos4_coeffs(w: &OrbitWindow) -> Result<(Rational, Rational), SeqError> {
    if w.len() < 6 {
        return Err(SeqError::WindowTooShort { needed: 6, got: w.len() });
    }
    let row = |n: i64| {
        let a = &w[n + 1] * &w[n + 3];
        let b = &w[n + 2] * &w[n + 2];
        let c = &w[n] * &w[n + 4];
        (a, b, c)
    };
    let lo = w.lo();
    let (a1, b1, c1) = row(lo);
    let (a2, b2, c2) = row(lo + 1);
    let det = &a1 * &b2 - &a2 * &b1;
    if det.is_zero() {
        return Err(SeqError::SingularSystem);
    }
    let alpha = (&c1 * &b2 - &c2 * &b1) / &det;
    let beta = (&a1 * &c2 - &a2 * &c1) / &det;
    for n in lo + 2..=w.hi() - 4 {
        let (a, b, c) = row(n);
        if a * &alpha + b * &beta != c {
            return Err(SeqError::NoConsistentFit { index: n });
        }
    }
    Ok((alpha, beta))
}
