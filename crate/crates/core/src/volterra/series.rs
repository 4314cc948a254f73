//! Exact Maclaurin series for `B`, `τ_n`, `Y_n` and `A`, the coefficients
//! `τ_{n,r}`, and the linear-recurrence checker for `(τ_{n,r})_n`.

use num_traits::{One, Zero};
use serde::Serialize;

use super::VolterraError;
use crate::kernel::rational::{binomial, int, pow};
use crate::kernel::{format_rational, series_exp_scaled, Rational, TruncSeries};
use crate::sequences::{linear_t, linear_window, LinearParams, OrbitWindow};

/// Largest series order accepted by the public entry points.
pub const MAX_SERIES_ORDER: usize = 40;

fn guard(order: usize) -> Result<(), VolterraError> {
    if order > MAX_SERIES_ORDER {
        Err(VolterraError::OrderTooLarge { order, max: MAX_SERIES_ORDER })
    } else {
        Ok(())
    }
}

/// Plain coefficients `b_k` of `B(x)`, from `(k+1)b_{k+1} = [x^k]((P/Q)(B² − PB) + P)`.
pub fn b_series(p: &Rational, q: &Rational, order: usize) -> Result<TruncSeries, VolterraError> {
    guard(order)?;
    if q.is_zero() {
        return Err(VolterraError::ZeroQ);
    }
    let k = p / q;
    let mut b = vec![Rational::zero(); order + 1];
    for m in 0..order {
        let sq: Rational = (0..=m).map(|i| &b[i] * &b[m - i]).sum();
        let mut rhs = &k * (sq - p * &b[m]);
        if m == 0 {
            rhs += p;
        }
        b[m + 1] = rhs / int(m as i64 + 1);
    }
    Ok(TruncSeries::from_coeffs(b))
}

fn t_at(params: &LinearParams, n: i64) -> Result<Rational, VolterraError> {
    Ok(linear_t(n, params)?)
}

/// `u_n = T_n − T_{n−1}B` as a series.
fn u_series(n: i64, params: &LinearParams, b: &TruncSeries) -> Result<TruncSeries, VolterraError> {
    let order = b.order();
    let tn = TruncSeries::constant(t_at(params, n)?, order);
    Ok(&tn - &b.scale(&t_at(params, n - 1)?))
}

fn tau_with(n: i64, params: &LinearParams, b: &TruncSeries) -> Result<TruncSeries, VolterraError> {
    Ok(u_series(n, params, b)?.mul(&series_exp_scaled(n, b.order())))
}

pub fn tau_series(n: i64, params: &LinearParams, order: usize) -> Result<TruncSeries, VolterraError> {
    tau_with(n, params, &b_series(&params.p, &params.q, order)?)
}

/// `τ_nτ'_{n+1} − τ_{n+1}τ'_n − τ_{n−1}τ_{n+2}` to `order`.
pub fn bilinear_residual_series(n: i64, params: &LinearParams, order: usize) -> Result<TruncSeries, VolterraError> {
    let b = b_series(&params.p, &params.q, order + 1)?;
    let tau = |k: i64| tau_with(k, params, &b);
    let (t0, t1, t2, t3) = (tau(n - 1)?, tau(n)?, tau(n + 1)?, tau(n + 2)?);
    let res = &(&t1.mul(&t2.derivative()) - &t2.mul(&t1.derivative())) - &t0.mul(&t3);
    Ok(res.truncate(order))
}

fn ratio4(a: &TruncSeries, d: &TruncSeries, b: &TruncSeries, c: &TruncSeries, n: i64) -> Result<TruncSeries, VolterraError> {
    a.mul(d).div(&b.mul(c)).map_err(|_| VolterraError::VanishingDenominator { n, x: 0.0 })
}

/// `Y_n = τ_nτ_{n+3}/(τ_{n+1}τ_{n+2})` with `τ` from [`tau_series`].
pub fn y_series_from_tau(n: i64, params: &LinearParams, order: usize) -> Result<TruncSeries, VolterraError> {
    let b = b_series(&params.p, &params.q, order)?;
    let tau = |k: i64| tau_with(k, params, &b);
    ratio4(&tau(n)?, &tau(n + 3)?, &tau(n + 1)?, &tau(n + 2)?, n)
}

fn y_closed_with(n: i64, params: &LinearParams, b: &TruncSeries) -> Result<TruncSeries, VolterraError> {
    let u = |k: i64| u_series(k, params, b);
    ratio4(&u(n)?, &u(n + 3)?, &u(n + 1)?, &u(n + 2)?, n)
}

/// `Y_n` from the four linear factors alone; the exponentials cancel.
pub fn y_series_closed(n: i64, params: &LinearParams, order: usize) -> Result<TruncSeries, VolterraError> {
    y_closed_with(n, params, &b_series(&params.p, &params.q, order)?)
}

/// `Y'_n − Y_n(Y_{n+1} − Y_{n−1})` to `order`.
pub fn volterra_residual_series(n: i64, params: &LinearParams, order: usize) -> Result<TruncSeries, VolterraError> {
    let b = b_series(&params.p, &params.q, order + 1)?;
    let y = |k: i64| y_closed_with(k, params, &b);
    let (down, mid, up) = (y(n - 1)?, y(n)?, y(n + 1)?);
    let res = &mid.derivative() - &mid.mul(&(&up - &down));
    Ok(res.truncate(order))
}

/// `A(z)` for `A = −(P/Q)B`, `z = −(P²/Q)x`: plain coefficients
/// `a_k = −(P/Q)·b_k·(−Q/P²)^k`.
pub fn a_series(p: &Rational, q: &Rational, order: usize) -> Result<TruncSeries, VolterraError> {
    if p.is_zero() {
        return Err(VolterraError::InvalidInput("the A transform needs P != 0".into()));
    }
    let b = b_series(p, q, order)?;
    let lead = -(p / q);
    let step = -(q / (p * p));
    let coeffs = b
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, bk)| &lead * bk * pow(&step, k as i64).expect("step is nonzero"))
        .collect();
    Ok(TruncSeries::from_coeffs(coeffs))
}

/// `A' − (1 + A + qA²)` to `order`, with `A` transformed from `B` at
/// `(P, Q) = (1, q)`. At `q = 0` there is no such `B` and `A = eᶻ − 1` is used.
pub fn a_residual(q: &Rational, order: usize) -> Result<TruncSeries, VolterraError> {
    let a = if q.is_zero() {
        &series_exp_scaled(1, order + 1) - &TruncSeries::constant(Rational::one(), order + 1)
    } else {
        a_series(&Rational::one(), q, order + 1)?
    };
    let rhs = &(&TruncSeries::constant(Rational::one(), order + 1) + &a) + &a.mul(&a).scale(q);
    Ok((&a.derivative() - &rhs).truncate(order))
}

/// Interpolating polynomial through `(xs[i], ys[i])`, ascending coefficients.
fn interpolate(xs: &[Rational], ys: &[Rational]) -> Vec<Rational> {
    let m = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..m {
        for i in (level..m).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner on the Newton form.
    let mut poly = vec![Rational::zero(); m];
    for i in (0..m).rev() {
        let mut next = vec![Rational::zero(); m];
        for (j, c) in poly.iter().enumerate() {
            if j + 1 < m {
                next[j + 1] += c;
            }
            next[j] -= c * &xs[i];
        }
        next[0] += &dd[i];
        poly = next;
    }
    while poly.len() > 1 && poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    poly
}

/// For `n = 1..=n_max`, the coefficient of `zⁿ/n!` in `A` as a polynomial in
/// `q` (ascending), recovered by interpolation from exact `B` series at
/// `q = 1, 2, …`. One point more than the expected degree is used.
pub fn a_egf_polynomials(n_max: usize) -> Result<Vec<Vec<Rational>>, VolterraError> {
    guard(n_max)?;
    let points = n_max.saturating_sub(1) / 2 + 2;
    let samples: Vec<(Rational, Vec<Rational>)> = (1..=points as i64)
        .map(|qi| Ok((int(qi), a_series(&Rational::one(), &int(qi), n_max)?.to_egf())))
        .collect::<Result<_, VolterraError>>()?;
    Ok((1..=n_max)
        .map(|n| {
            let m = (n - 1) / 2 + 2;
            let xs: Vec<Rational> = samples[..m].iter().map(|(q, _)| q.clone()).collect();
            let ys: Vec<Rational> = samples[..m].iter().map(|(_, a)| a[n].clone()).collect();
            interpolate(&xs, &ys)
        })
        .collect())
}

/// `B_k = k!·b_k` for `k = 0..=r`.
fn b_derivatives(p: &Rational, q: &Rational, r: usize) -> Result<Vec<Rational>, VolterraError> {
    Ok(b_series(p, q, r)?.to_egf())
}

fn tau_coeff_from(t: &OrbitWindow, bk: &[Rational], n: i64, r: usize) -> Rational {
    let nn = int(n);
    let npow = |e: usize| pow(&nn, e as i64).unwrap_or_else(|_| Rational::zero());
    let sum: Rational = (1..=r)
        .map(|k| Rational::from_integer(binomial(r as u64, k as u64)) * &bk[k] * npow(r - k))
        .sum();
    npow(r) * &t[n] - &t[n - 1] * sum
}

/// `τ_{n,r}`, the `r`-th derivative of `τ_n` at zero:
/// `nʳT_n − T_{n−1}Σ_{k=1}^r C(r,k)B_k n^{r−k}`.
pub fn tau_series_coeff(n: i64, r: usize, params: &LinearParams) -> Result<Rational, VolterraError> {
    if r > 12 {
        return Err(VolterraError::OrderTooLarge { order: r, max: 12 });
    }
    let bk = b_derivatives(&params.p, &params.q, r)?;
    let t = linear_window(params, n - 1, n)?;
    Ok(tau_coeff_from(&t, &bk, n, r))
}

/// Ascending coefficients of `(X² − PX + Q)^{r+1}`.
pub fn f_power_coeffs(p: &Rational, q: &Rational, r: usize) -> Vec<Rational> {
    let f = [q.clone(), -p, Rational::one()];
    let mut acc = vec![Rational::one()];
    for _ in 0..=r {
        let mut next = vec![Rational::zero(); acc.len() + 2];
        for (i, a) in acc.iter().enumerate() {
            for (j, c) in f.iter().enumerate() {
                next[i + j] += a * c;
            }
        }
        acc = next;
    }
    acc
}

/// The two hand-derived recurrences for `r = 1` and `r = 2`, moved to one side
/// and listed from `τ_{n,r}` upwards.
pub fn displayed_recurrence(r: usize, p: &Rational, q: &Rational) -> Option<Vec<Rational>> {
    let p2 = p * p;
    match r {
        1 => Some(vec![q * q, -(int(2) * q * p), &p2 + int(2) * q, -(int(2) * p), Rational::one()]),
        2 => Some(vec![
            q * q * q,
            -(int(3) * p * q * q),
            int(3) * (&p2 + q) * q,
            -(p * (&p2 + int(6) * q)),
            int(3) * (&p2 + q),
            -(int(3) * p),
            Rational::one(),
        ]),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub r: usize,
    pub coeffs: Vec<String>,
    pub checked: usize,
    /// Values of `n` with a nonzero residual.
    pub failures: Vec<i64>,
    /// Agreement with [`displayed_recurrence`] where one exists.
    pub matches_display: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub n_lo: i64,
    pub n_hi: i64,
    pub rows: Vec<ConjectureRow>,
    pub supported: bool,
    pub status: &'static str,
}

/// Checks `Σ_j f_{r,j}·τ_{n+j,r} = 0` for `r ≤ r_max` and `n_lo ≤ n ≤ n_hi`.
/// A failure is reported, not raised: the statement is a conjecture.
pub fn conjecture_check(r_max: usize, params: &LinearParams, n_lo: i64, n_hi: i64) -> Result<ConjectureReport, VolterraError> {
    if r_max > 6 {
        return Err(VolterraError::OrderTooLarge { order: r_max, max: 6 });
    }
    if params.q.is_zero() {
        return Err(VolterraError::ZeroQ);
    }
    let bk = b_derivatives(&params.p, &params.q, r_max)?;
    let top = n_hi.max(n_lo) + 2 * r_max as i64 + 2;
    let t = linear_window(params, n_lo - 1, top)?;
    let mut rows = Vec::new();
    for r in 0..=r_max {
        let f = f_power_coeffs(&params.p, &params.q, r);
        let tau: Vec<Rational> = (n_lo..=n_hi + 2 * r as i64 + 2).map(|n| tau_coeff_from(&t, &bk, n, r)).collect();
        let mut failures = Vec::new();
        for n in n_lo..=n_hi {
            let base = (n - n_lo) as usize;
            let res: Rational = f.iter().enumerate().map(|(j, c)| c * &tau[base + j]).sum();
            if !res.is_zero() {
                failures.push(n);
            }
        }
        rows.push(ConjectureRow {
            r,
            coeffs: f.iter().map(format_rational).collect(),
            checked: (n_hi - n_lo + 1).max(0) as usize,
            failures,
            matches_display: displayed_recurrence(r, &params.p, &params.q).map(|d| d == f),
        });
    }
    let supported = rows.iter().all(|r| r.failures.is_empty() && r.matches_display != Some(false));
    Ok(ConjectureReport {
        n_lo,
        n_hi,
        rows,
        supported,
        status: if supported { "conjecture: supported at desk scale" } else { "conjecture: counterexample found" },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rat;

    #[test]
    fn b_series_first_terms() {
        let b = b_series(&int(1), &int(-1), 3).unwrap();
        assert_eq!(b, TruncSeries::from_coeffs(vec![int(0), int(1), rat(1, 2), rat(-1, 6)]));
        let b = b_series(&int(3), &int(2), 2).unwrap();
        assert_eq!(b.to_egf()[2], rat(-27, 2));
        assert_eq!(b.coeff(2), rat(-27, 4));
        assert_eq!(b_series(&int(1), &int(0), 3), Err(VolterraError::ZeroQ));
        assert!(b_series(&int(1), &int(1), 41).is_err());
    }

    #[test]
    fn a_series_examples() {
        let q = rat(1, 4);
        let a = a_series(&int(2), &int(1), 5).unwrap().to_egf();
        assert_eq!(a[1..], [int(1), int(1), int(1) + int(2) * &q, int(1) + int(8) * &q, int(1) + int(22) * &q + int(16) * &q * &q]);
        assert!(a_residual(&Rational::zero(), 10).unwrap().is_zero());
        assert!(a_residual(&q, 12).unwrap().is_zero());
        let polys = a_egf_polynomials(5).unwrap();
        assert_eq!(polys[4], vec![int(1), int(22), int(16)]);
        assert_eq!(polys[0], vec![int(1)]);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let xs: Vec<Rational> = (0..4).map(int).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| int(2) - x + int(3) * x * x).collect();
        assert_eq!(interpolate(&xs, &ys), vec![int(2), int(-1), int(3)]);
    }

    #[test]
    fn tau_coefficients() {
        let params = LinearParams::new(rat(3, 2), rat(-2, 3), int(2), rat(-1, 5));
        let (p, q) = (&params.p, &params.q);
        for n in -3..6 {
            let t = |k| linear_t(k, &params).unwrap();
            assert_eq!(tau_series_coeff(n, 0, &params).unwrap(), t(n));
            assert_eq!(tau_series_coeff(n, 1, &params).unwrap(), int(n) * t(n) - p * t(n - 1));
            let c2 = int(n * n) * t(n) - (int(2) * p * int(n) - p * p * p / q) * t(n - 1);
            assert_eq!(tau_series_coeff(n, 2, &params).unwrap(), c2);
            let s = tau_series(n, &params, 6).unwrap().to_egf();
            for (r, sr) in s.iter().enumerate() {
                assert_eq!(&tau_series_coeff(n, r, &params).unwrap(), sr);
            }
        }
    }

    #[test]
    fn bilinear_and_volterra_series_vanish() {
        let params = LinearParams::new(rat(3, 2), rat(-2, 3), int(2), rat(-1, 5));
        for n in -2..4 {
            assert!(bilinear_residual_series(n, &params, 10).unwrap().is_zero());
            assert!(volterra_residual_series(n, &params, 8).unwrap().is_zero());
            assert_eq!(y_series_from_tau(n, &params, 8).unwrap(), y_series_closed(n, &params, 8).unwrap());
        }
        let fib = LinearParams::new(int(1), int(-1), int(1), int(1));
        assert_eq!(y_series_closed(0, &fib, 0).unwrap().coeff(0), rat(3, 2));
    }

    #[test]
    fn conjecture_small() {
        let params = LinearParams::new(rat(3, 2), rat(-2, 3), int(2), rat(-1, 5));
        let rep = conjecture_check(4, &params, -5, 15).unwrap();
        assert!(rep.supported, "{rep:?}");
        assert_eq!(rep.rows[1].matches_display, Some(true));
        assert_eq!(rep.rows[2].matches_display, Some(true));
        assert_eq!(rep.rows[3].matches_display, None);
        assert_eq!(f_power_coeffs(&int(1), &int(1), 0), vec![int(1), int(-1), int(1)]);
    }
}
