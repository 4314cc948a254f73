//! The `e`-triangle attached to `A' = 1 + A + qA²` and the Eulerian numbers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::series::a_egf_polynomials;
use super::VolterraError;
use crate::kernel::rational::binomial;
use crate::kernel::Rational;

/// `rows[n−1][j] = e_{n,j}` for `0 ≤ j ≤ ⌊(n−1)/2⌋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleE {
    pub rows: Vec<Vec<BigInt>>,
}

/// `rows[n−1][j] = E(n,j)` for `0 ≤ j ≤ n−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleEuler {
    pub rows: Vec<Vec<BigInt>>,
}

fn at(row: &[BigInt], j: i64) -> BigInt {
    if j < 0 {
        BigInt::zero()
    } else {
        row.get(j as usize).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// `e_{n,j} = (j+1)e_{n−1,j} + (2n−4j)e_{n−1,j−1}`, `e_{1,0} = 1`.
pub fn e_triangle(n_max: usize) -> TriangleE {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max);
    for n in 1..=n_max as i64 {
        if n == 1 {
            rows.push(vec![BigInt::one()]);
            continue;
        }
        let prev = &rows[(n - 2) as usize];
        let row = (0..=(n - 1) / 2)
            .map(|j| BigInt::from(j + 1) * at(prev, j) + BigInt::from(2 * n - 4 * j) * at(prev, j - 1))
            .collect();
        rows.push(row);
    }
    TriangleE { rows }
}

/// `E(n,j) = (j+1)E(n−1,j) + (n−j)E(n−1,j−1)`, `E(1,0) = 1`.
pub fn euler_triangle(n_max: usize) -> TriangleEuler {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max);
    for n in 1..=n_max as i64 {
        if n == 1 {
            rows.push(vec![BigInt::one()]);
            continue;
        }
        let prev = &rows[(n - 2) as usize];
        let row = (0..n).map(|j| BigInt::from(j + 1) * at(prev, j) + BigInt::from(n - j) * at(prev, j - 1)).collect();
        rows.push(row);
    }
    TriangleEuler { rows }
}

/// `xⁿ = Σ_j E(n,j)·C(x+j, n)` at `x = 0..=n`.
fn worpitzky_holds(n: usize, row: &[BigInt]) -> bool {
    (0..=n as u64).all(|x| {
        let lhs = BigInt::from(x).pow(n as u32);
        let rhs: BigInt = row.iter().enumerate().map(|(j, e)| e * binomial(x + j as u64, n as u64)).sum();
        lhs == rhs
    })
}

/// Coefficients of `Σ_j e_{n,j} x^j (1+x)^{n−1−2j}`.
fn e_to_euler(n: usize, row: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (j, e) in row.iter().enumerate() {
        let m = (n - 1 - 2 * j) as u64;
        for i in 0..=m {
            out[j + i as usize] += e * binomial(m, i);
        }
    }
    out
}

fn strings(rows: &[Vec<BigInt>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangleReport {
    pub n_max: usize,
    pub e_rows: Vec<Vec<String>>,
    pub euler_rows: Vec<Vec<String>>,
    pub row_sums_ok: bool,
    pub worpitzky_ok: bool,
    pub relation_ok: bool,
    /// `e` rows equal the `q`-coefficients of `A`.
    pub a_series_ok: bool,
    pub all_ok: bool,
}

pub const MAX_TRIANGLE_ROWS: usize = 25;

pub fn triangles(n_max: usize) -> Result<(TriangleE, TriangleEuler, TriangleReport), VolterraError> {
    if n_max > MAX_TRIANGLE_ROWS {
        return Err(VolterraError::OrderTooLarge { order: n_max, max: MAX_TRIANGLE_ROWS });
    }
    let e = e_triangle(n_max);
    let eu = euler_triangle(n_max);
    let mut fact = BigInt::one();
    let mut row_sums_ok = true;
    for (i, row) in eu.rows.iter().enumerate() {
        fact *= BigInt::from(i + 1);
        row_sums_ok &= row.iter().sum::<BigInt>() == fact;
    }
    let worpitzky_ok = eu.rows.iter().enumerate().all(|(i, row)| worpitzky_holds(i + 1, row));
    let relation_ok = e.rows.iter().zip(&eu.rows).enumerate().all(|(i, (er, eur))| &e_to_euler(i + 1, er) == eur);
    let polys = a_egf_polynomials(n_max)?;
    let a_series_ok = e.rows.iter().zip(&polys).all(|(er, poly)| {
        let as_rat: Vec<Rational> = er.iter().map(|x| Rational::from_integer(x.clone())).collect();
        &as_rat == poly
    });
    let report = TriangleReport {
        n_max,
        e_rows: strings(&e.rows),
        euler_rows: strings(&eu.rows),
        row_sums_ok,
        worpitzky_ok,
        relation_ok,
        a_series_ok,
        all_ok: row_sums_ok && worpitzky_ok && relation_ok && a_series_ok,
    };
    Ok((e, eu, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rows() {
        let e = e_triangle(5);
        assert_eq!(e.rows, vec![ints(&[1]), ints(&[1]), ints(&[1, 2]), ints(&[1, 8]), ints(&[1, 22, 16])]);
        let eu = euler_triangle(5);
        assert_eq!(eu.rows[2], ints(&[1, 4, 1]));
        assert_eq!(eu.rows[4], ints(&[1, 26, 66, 26, 1]));
        assert_eq!(e_to_euler(5, &e.rows[4]), eu.rows[4]);
    }

    #[test]
    fn report_to_fifteen() {
        let (_, _, rep) = triangles(15).unwrap();
        assert!(rep.all_ok, "{rep:?}");
        assert!(triangles(26).is_err());
    }
}
