//! Somos-N first integrals and the discrete constraint compatible with the
//! Volterra lattice, in the variables `t`, `f` and `y`.
//!
//! `f_n = t_n t_{n+2} / t_{n+1}²` and `y_n = f_n f_{n+1} = t_n t_{n+3} / (t_{n+1} t_{n+2})`.
//! The product `α_{N,n}·α_{N,n+1}` of consecutive 2-integral values is a first
//! integral; see [`alpha_2integral`].

use num_traits::{Num, Zero};
use rand::Rng;

use crate::identities::{IdentityId, IdentityReport, TrialConfig};
use crate::kernel::{format_rational, Rational};
use crate::sequences::{gale_robinson_extend, GaleRobinsonParams, OrbitWindow, SeqError, ThreeTerm, Window};

fn ratio(num: Rational, den: Rational, index: i64) -> Result<Rational, SeqError> {
    if den.is_zero() {
        Err(SeqError::VanishingTerm { index })
    } else {
        Ok(num / den)
    }
}

fn need(w: &OrbitWindow, lo: i64, hi: i64) -> Result<(), SeqError> {
    if w.contains(lo) && w.contains(hi) {
        Ok(())
    } else {
        Err(SeqError::OutOfRange { lo, hi })
    }
}

/// First integral of the Somos-N equation at `n`, with possibly different
/// coefficients `α_{N,n}` and `α_{N,n+1}` on the two `α` terms.
pub fn h_n_at(
    w: &OrbitWindow,
    order: usize,
    alpha_n: &Rational,
    alpha_n1: &Rational,
    beta: &Rational,
    n: i64,
) -> Result<Rational, SeqError> {
    let big = order as i64;
    if big < 4 {
        return Err(SeqError::InvalidParams(format!("N = {big} must be at least 4")));
    }
    need(w, n, n + big - 1)?;
    let t = |k: i64| &w[n + k];
    let mut h = Rational::zero();
    for j in 0..=big - 4 {
        h += ratio(t(j) * t(j + 3), t(j + 1) * t(j + 2), n + j)?;
    }
    h += alpha_n * ratio(t(1) * t(big - 3), t(0) * t(big - 2), n)?;
    h += alpha_n1 * ratio(t(2) * t(big - 2), t(1) * t(big - 1), n)?;
    h += beta * ratio(t(2) * t(big - 3), t(0) * t(big - 1), n)?;
    Ok(h)
}

/// `H_N` of an autonomous Somos-N orbit at the window start.
pub fn h_n_of_orbit(w: &OrbitWindow, order: usize, alpha: &Rational, beta: &Rational) -> Result<Rational, SeqError> {
    h_n_at(w, order, alpha, alpha, beta, w.lo())
}

/// Recomputes `H_N` at every admissible index and returns it if constant.
pub fn verify_h_n_invariant(w: &OrbitWindow, order: usize, alpha: &Rational, beta: &Rational) -> Result<Option<Rational>, SeqError> {
    let h = h_n_of_orbit(w, order, alpha, beta)?;
    for n in w.lo() + 1..=w.hi() + 1 - order as i64 {
        if h_n_at(w, order, alpha, alpha, beta, n)? != h {
            return Ok(None);
        }
    }
    Ok(Some(h))
}

/// `f_n = t_n t_{n+2} / t_{n+1}²`; two shorter than `t`.
pub fn f_from_t(w: &OrbitWindow) -> Result<OrbitWindow, SeqError> {
    if w.len() < 3 {
        return Err(SeqError::WindowTooShort { needed: 3, got: w.len() });
    }
    let out = Window::try_from_fn(w.lo(), w.hi() - 2, |n| ratio(&w[n] * &w[n + 2], &w[n + 1] * &w[n + 1], n + 1))?;
    Ok(out.expect("non-empty range"))
}

/// `y_n = t_n t_{n+3} / (t_{n+1} t_{n+2})`; three shorter than `t`.
pub fn y_from_t(w: &OrbitWindow) -> Result<OrbitWindow, SeqError> {
    if w.len() < 4 {
        return Err(SeqError::WindowTooShort { needed: 4, got: w.len() });
    }
    let out = Window::try_from_fn(w.lo(), w.hi() - 3, |n| {
        ratio(&w[n] * &w[n + 3], &w[n + 1] * &w[n + 2], n + 1)
    })?;
    Ok(out.expect("non-empty range"))
}

/// `y_n = f_n f_{n+1}`.
pub fn y_from_f<T: Clone + Num>(f: &Window<T>) -> Window<T> {
    let values = (f.lo()..f.hi()).map(|n| f[n].clone() * f[n + 1].clone()).collect();
    Window::new(f.lo(), values)
}

fn sum_range<T: Clone + Num>(y: &Window<T>, from: i64, to: i64) -> T {
    (from..=to).fold(T::zero(), |acc, k| acc + y[k].clone())
}

fn prod_range<T: Clone + Num>(y: &Window<T>, from: i64, to: i64) -> T {
    (from..=to).fold(T::one(), |acc, k| acc * y[k].clone())
}

/// Residual `y_{n+1}(Σ_{j=0}^{N−3} y_{n+j} − H) − y_{n+N−2}(Σ_{j=0}^{N−3} y_{n+j+2} − H)`
/// at every `n` for which `y_n..y_{n+N−1}` are available.
pub fn constraint_residual<T: Clone + Num>(y: &Window<T>, order: usize, h: &T) -> Option<Window<T>> {
    let big = order as i64;
    let hi = y.hi() - (big - 1);
    if hi < y.lo() {
        return None;
    }
    let values = (y.lo()..=hi)
        .map(|n| {
            let a = y[n + 1].clone() * (sum_range(y, n, n + big - 3) - h.clone());
            let b = y[n + big - 2].clone() * (sum_range(y, n + 2, n + big - 1) - h.clone());
            a - b
        })
        .collect();
    Some(Window::new(y.lo(), values))
}

/// `β_N = Π_{j=1}^{N−3} y_{n+j} · (Σ_{j=0}^{N−2} y_{n+j} − H)`.
pub fn beta_n_integral<T: Clone + Num>(y: &Window<T>, order: usize, h: &T, n: i64) -> T {
    let big = order as i64;
    prod_range(y, n + 1, n + big - 3) * (sum_range(y, n, n + big - 2) - h.clone())
}

/// `I_N = Π_{j=0}^{N−2} y_{n+j} + (Σ_{j=1}^{N−3} y_{n+j})·(Σ_{j=0}^{N−2} y_{n+j} − H)·Π_{j=1}^{N−3} y_{n+j}`;
/// the two `j` in the middle term are independent.
pub fn i_n_integral<T: Clone + Num>(y: &Window<T>, order: usize, h: &T, n: i64) -> T {
    let big = order as i64;
    let s = sum_range(y, n, n + big - 2) - h.clone();
    prod_range(y, n, n + big - 2) + sum_range(y, n + 1, n + big - 3) * s * prod_range(y, n + 1, n + big - 3)
}

/// `(α_{N,n}, α_{N,n+1})`, the first from `Π_{j=0}^{N−2} f_{n+j} − β/Π_{j=1}^{N−3} f_{n+j}`
/// and the second from `Π_{j=1}^{N−3} f_{n+j}·(H − Σ_{j=0}^{N−3} f_{n+j}f_{n+j+1})`.
pub fn alpha_2integral(f: &OrbitWindow, order: usize, beta: &Rational, h: &Rational, n: i64) -> Result<(Rational, Rational), SeqError> {
    let big = order as i64;
    need(f, n, n + big - 2)?;
    let inner = prod_range(f, n + 1, n + big - 3);
    let a0 = prod_range(f, n, n + big - 2) - ratio(beta.clone(), inner.clone(), n)?;
    let pairs = (n..=n + big - 3).fold(Rational::zero(), |acc, k| acc + &f[k] * &f[k + 1]);
    let a1 = inner * (h - pairs);
    Ok((a0, a1))
}

/// Constants of one Somos-N orbit read off at its first index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeConstants {
    pub order: usize,
    pub h: Rational,
    pub beta: Rational,
    pub i: Rational,
}

impl LatticeConstants {
    pub fn from_y(y: &OrbitWindow, order: usize, h: Rational) -> Self {
        let n = y.lo();
        let beta = beta_n_integral(y, order, &h, n);
        let i = i_n_integral(y, order, &h, n);
        LatticeConstants { order, h, beta, i }
    }

    /// `I_N − H_N β_N`, which equals `α_{N,0}·α_{N,1}`.
    pub fn alpha_product(&self) -> Rational {
        &self.i - &self.h * &self.beta
    }
}

/// Somos-N with a 2-periodic `α`: `t_n t_{n+N} = α_{N,n} t_{n+1} t_{n+N−1} + β t_{n+2} t_{n+N−2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonAutoSomosParams {
    pub order: usize,
    pub alpha_even: Rational,
    pub alpha_odd: Rational,
    pub beta: Rational,
    pub init: Vec<Rational>,
}

impl NonAutoSomosParams {
    pub fn new(order: usize, alpha_even: Rational, alpha_odd: Rational, beta: Rational, init: Vec<Rational>) -> Result<Self, SeqError> {
        if order < 4 {
            return Err(SeqError::InvalidParams(format!("N = {order} must be at least 4")));
        }
        if init.len() != order {
            return Err(SeqError::InvalidParams(format!("need {order} initial values, got {}", init.len())));
        }
        if init.iter().any(Zero::is_zero) {
            return Err(SeqError::InvalidParams("initial values must be nonzero".into()));
        }
        Ok(NonAutoSomosParams { order, alpha_even, alpha_odd, beta, init })
    }

    pub fn alpha_at(&self, n: i64) -> &Rational {
        if n.rem_euclid(2) == 0 {
            &self.alpha_even
        } else {
            &self.alpha_odd
        }
    }
}

pub fn nonauto_extend(params: &NonAutoSomosParams, lo: i64, hi: i64) -> Result<OrbitWindow, SeqError> {
    if lo > hi {
        return Err(SeqError::OutOfRange { lo, hi });
    }
    let alpha = |n: i64| params.alpha_at(n).clone();
    let rec = ThreeTerm { order: params.order, p: 1, q: 2, alpha: &alpha, beta: &params.beta, init: &params.init };
    match rec.extend_partial(lo, hi) {
        (w, None) => Ok(w),
        (_, Some(e)) => Err(e),
    }
}

/// `H_N` of a nonautonomous orbit at `n = 0`.
pub fn nonauto_h(w: &OrbitWindow, params: &NonAutoSomosParams) -> Result<Rational, SeqError> {
    h_n_at(w, params.order, params.alpha_at(0), params.alpha_at(1), &params.beta, 0)
}

/// Random autonomous and nonautonomous Somos-N orbits (`4 ≤ N ≤ 8`): every
/// first integral is constant, `y` solves the constraint, the 2-integral
/// recovers the coefficients, and `α_{N,0}α_{N,1} = I_N − H_Nβ_N`.
pub fn verify_lattice_integrals(cfg: &TrialConfig) -> IdentityReport {
    use crate::identities::{rand_nonzero, rng_for, Recorder, RESAMPLE_CAP};
    let mut rec = Recorder::new(IdentityId::LatticeIntegrals);
    let mut rng = rng_for(cfg, IdentityId::LatticeIntegrals as u64 + 1);
    let zero = Rational::zero();
    'trials: for _ in 0..cfg.trials {
        let order = rng.random_range(4..=8usize);
        let mut drawn = None;
        for _ in 0..RESAMPLE_CAP {
            let a0 = rand_nonzero(&mut rng, cfg.bound);
            let a1 = if rng.random_bool(0.5) { a0.clone() } else { rand_nonzero(&mut rng, cfg.bound) };
            let beta = rand_nonzero(&mut rng, cfg.bound);
            let init = (0..order).map(|_| rand_nonzero(&mut rng, cfg.bound)).collect();
            let params = NonAutoSomosParams::new(order, a0, a1, beta, init).expect("valid");
            let len = (order + 12) as i64;
            if let Ok(t) = nonauto_extend(&params, 0, len) {
                if let (Ok(f), Ok(y)) = (f_from_t(&t), y_from_t(&t)) {
                    drawn = Some((params, t, f, y));
                    break;
                }
            }
        }
        let Some((params, t, f, y)) = drawn else {
            rec.error(format!("resample cap of {RESAMPLE_CAP} exceeded"));
            break 'trials;
        };
        rec.trial();
        let desc = || {
            let init: Vec<String> = params.init.iter().map(format_rational).collect();
            format!(
                "N={}, alpha=({}, {}), beta={}, init=({})",
                params.order,
                format_rational(&params.alpha_even),
                format_rational(&params.alpha_odd),
                format_rational(&params.beta),
                init.join(",")
            )
        };
        let Ok(h) = nonauto_h(&t, &params) else {
            rec.error("vanishing term while evaluating H_N");
            continue;
        };
        let big = order as i64;
        for n in 1..=t.hi() + 1 - big {
            let hn = h_n_at(&t, order, params.alpha_at(n), params.alpha_at(n + 1), &params.beta, n).unwrap_or_else(|_| zero.clone());
            rec.check("H_N", &desc, &[n], &hn, &h);
        }
        if let Some(res) = constraint_residual(&y, order, &h) {
            for (n, r) in res.iter() {
                rec.check("constraint", &desc, &[n], r, &zero);
            }
        }
        let c = LatticeConstants::from_y(&y, order, h.clone());
        rec.check("beta_N", &desc, &[0], &c.beta, &params.beta);
        for n in y.lo()..=y.hi() - (big - 2) {
            rec.check("beta_N", &desc, &[n], &beta_n_integral(&y, order, &h, n), &c.beta);
            rec.check("I_N", &desc, &[n], &i_n_integral(&y, order, &h, n), &c.i);
        }
        for n in f.lo()..=f.hi() - (big - 2) {
            match alpha_2integral(&f, order, &params.beta, &h, n) {
                Ok((a0, a1)) => {
                    rec.check("alpha_2integral", &desc, &[n], &a0, params.alpha_at(n));
                    rec.check("alpha_2integral", &desc, &[n + 1], &a1, params.alpha_at(n + 1));
                    rec.check("alpha_product", &desc, &[n], &(a0 * a1), &c.alpha_product());
                }
                Err(e) => rec.error(e.to_string()),
            }
        }
    }
    rec.finish()
}

/// Convenience: an autonomous Somos-N orbit as a nonautonomous one.
pub fn autonomous(params: &GaleRobinsonParams) -> Result<NonAutoSomosParams, SeqError> {
    if params.p() != 1 || params.q() != 2 {
        return Err(SeqError::InvalidParams("only (p, q) = (1, 2) has a lattice counterpart".into()));
    }
    NonAutoSomosParams::new(
        params.order(),
        params.alpha().clone(),
        params.alpha().clone(),
        params.beta().clone(),
        params.init().to_vec(),
    )
}

/// Exact orbit of an autonomous Somos-N equation; a thin wrapper for callers
/// that only hold a [`NonAutoSomosParams`] with equal coefficients.
pub fn somos_n_window(order: usize, alpha: &Rational, beta: &Rational, init: Vec<Rational>, lo: i64, hi: i64) -> Result<OrbitWindow, SeqError> {
    let params = GaleRobinsonParams::somos_n(order, alpha.clone(), beta.clone(), init)?;
    gale_robinson_extend(&params, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{int, rat};

    fn ones(n: usize) -> Vec<Rational> {
        vec![int(1); n]
    }

    #[test]
    fn h_examples() {
        let s4 = somos_n_window(4, &int(1), &int(1), ones(4), 0, 12).unwrap();
        assert_eq!(h_n_of_orbit(&s4, 4, &int(1), &int(1)).unwrap(), int(4));
        let s5 = somos_n_window(5, &int(1), &int(1), ones(5), 0, 14).unwrap();
        let firsts: Vec<_> = s5.values()[..10].to_vec();
        assert_eq!(firsts, [1, 1, 1, 1, 1, 2, 3, 5, 11, 37].map(int).to_vec());
        assert_eq!(h_n_of_orbit(&s5, 5, &int(1), &int(1)).unwrap(), int(5));
        assert_eq!(verify_h_n_invariant(&s5, 5, &int(1), &int(1)).unwrap(), Some(int(5)));
    }

    #[test]
    fn substitution_examples() {
        let s4 = somos_n_window(4, &int(1), &int(1), ones(4), 0, 8).unwrap();
        let y = y_from_t(&s4).unwrap();
        assert_eq!(y.len(), 6);
        assert_eq!(&y.values()[..5], &[int(1), int(2), rat(3, 2), rat(7, 6), rat(46, 21)]);
        let f = f_from_t(&s4).unwrap();
        assert_eq!(y_from_f(&f), y);
        let flat = Window::new(0, ones(8));
        assert_eq!(y_from_t(&flat).unwrap(), Window::new(0, ones(5)));
    }

    #[test]
    fn residual_examples() {
        let s4 = somos_n_window(4, &int(1), &int(1), ones(4), 0, 14).unwrap();
        let y = y_from_t(&s4).unwrap();
        let res = constraint_residual(&y, 4, &int(4)).unwrap();
        assert!(res.values().iter().all(Zero::is_zero));
        let c = Window::new(0, vec![rat(5, 3); 9]);
        assert!(constraint_residual(&c, 6, &int(17)).unwrap().values().iter().all(Zero::is_zero));
        let mut bumped = y.values().to_vec();
        bumped[4] += int(1);
        let res = constraint_residual(&Window::new(0, bumped), 4, &int(4)).unwrap();
        assert!(res.values().iter().any(|r| !r.is_zero()));
    }

    #[test]
    fn integral_examples() {
        let s4 = somos_n_window(4, &int(1), &int(1), ones(4), 0, 14).unwrap();
        let y = y_from_t(&s4).unwrap();
        for n in 0..5 {
            assert_eq!(beta_n_integral(&y, 4, &int(4), n), int(1));
            assert_eq!(i_n_integral(&y, 4, &int(4), n), int(5));
        }
        let s5 = somos_n_window(5, &int(1), &int(1), ones(5), 0, 16).unwrap();
        let y5 = y_from_t(&s5).unwrap();
        for n in 0..5 {
            assert_eq!(beta_n_integral(&y5, 5, &int(5), n), int(1));
        }
        let c = Window::new(0, vec![rat(2, 7); 5]);
        let h = rat(1, 3);
        assert_eq!(beta_n_integral(&c, 4, &h, 0), rat(2, 7) * (rat(6, 7) - &h));
        let one = Window::new(0, ones(5));
        assert_eq!(i_n_integral(&one, 4, &h, 0), int(4) - &h);
    }

    #[test]
    fn nonautonomous_examples() {
        let params = NonAutoSomosParams::new(4, int(1), int(2), int(1), ones(4)).unwrap();
        let t = nonauto_extend(&params, 0, 16).unwrap();
        assert_eq!((t[4].clone(), t[5].clone()), (int(2), int(5)));
        let h = nonauto_h(&t, &params).unwrap();
        let y = y_from_t(&t).unwrap();
        assert!(constraint_residual(&y, 4, &h).unwrap().values().iter().all(Zero::is_zero));
        let f = f_from_t(&t).unwrap();
        for n in 0..8 {
            let (a0, a1) = alpha_2integral(&f, 4, &int(1), &h, n).unwrap();
            assert_eq!((&a0, &a1), (params.alpha_at(n), params.alpha_at(n + 1)));
        }
        let c = LatticeConstants::from_y(&y, 4, h);
        assert_eq!(c.alpha_product(), int(2));

        let same = NonAutoSomosParams::new(5, int(3), int(3), int(-2), ones(5)).unwrap();
        let a = nonauto_extend(&same, -3, 12).unwrap();
        let b = somos_n_window(5, &int(3), &int(-2), ones(5), -3, 12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alpha_product_on_somos4() {
        let s4 = somos_n_window(4, &int(1), &int(1), ones(4), 0, 12).unwrap();
        let y = y_from_t(&s4).unwrap();
        let c = LatticeConstants::from_y(&y, 4, int(4));
        assert_eq!((c.beta.clone(), c.i.clone()), (int(1), int(5)));
        assert_eq!(c.alpha_product(), int(1));
    }

    #[test]
    fn random_suite_passes() {
        let r = verify_lattice_integrals(&TrialConfig::with_seed(5, 12));
        assert!(r.passed(), "{:?}", r);
    }
}
