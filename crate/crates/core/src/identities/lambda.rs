//! Search for index maps `λ` that turn the cyclic sum into a three-factor
//! identity `Σⱼ D_{b−a_{λⱼ}}D_{b+a_{λⱼ}}·D_{aⱼ−aⱼ₊₁}D_{aⱼ+aⱼ₊₁}/Q^{aⱼ} = 0`.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use super::{rand_index, rand_nonzero, rand_rational, rng_for, TrialConfig};
use crate::kernel::rational::pow;
use crate::kernel::Rational;
use crate::sequences::LucasTable;

/// `(λ_d + 1, λ₁ + 1, …, λ_{d−1} + 1)` with `d + 1` wrapping to `1`.
pub fn shift_lambda(lambda: &[usize]) -> Vec<usize> {
    let d = lambda.len();
    let wrap = |x: usize| if x + 1 > d { 1 } else { x + 1 };
    std::iter::once(wrap(lambda[d - 1])).chain(lambda[..d - 1].iter().map(|&x| wrap(x))).collect()
}

/// One random instance: the `d` outer factors and the `d` cyclic brackets.
struct Instance {
    outer: Vec<Rational>,
    brackets: Vec<Rational>,
}

impl Instance {
    fn residual(&self, lambda: &[usize]) -> Rational {
        lambda.iter().zip(&self.brackets).map(|(&l, b)| &self.outer[l - 1] * b).sum()
    }
}

fn build_instance(p: &Rational, q: &Rational, b: i64, a: &[i64]) -> Instance {
    let reach = a.iter().map(|x| x.abs()).max().unwrap_or(0) * 2 + b.abs() + 2;
    let t = LucasTable::new(p, q, reach).expect("Q is nonzero");
    let d = a.len();
    let outer = a.iter().map(|&ak| t.d(b - ak) * t.d(b + ak)).collect();
    let brackets = (0..d)
        .map(|j| {
            let (x, y) = (a[j], a[(j + 1) % d]);
            t.d(x - y) * t.d(x + y) / pow(q, x).expect("Q is nonzero")
        })
        .collect();
    Instance { outer, brackets }
}

/// Residual of the `λ` identity at explicit data.
pub fn lambda_residual(lambda: &[usize], p: &Rational, q: &Rational, b: i64, a: &[i64]) -> Rational {
    build_instance(p, q, b, a).residual(lambda)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaEnumeration {
    pub d: usize,
    pub trials: usize,
    pub candidates: usize,
    /// Non-constant classes, each listed from its lexicographically largest
    /// member along successive shifts.
    pub classes: Vec<Vec<Vec<usize>>>,
    /// Constant maps pass for the plain reason that the sum factors through the
    /// cyclic identity; they are kept apart.
    pub trivial_classes: Vec<Vec<Vec<usize>>>,
    pub closure_ok: bool,
    pub tag: &'static str,
}

/// Screens all `λ ∈ {1..d}ᵈ` against `cfg.trials` random exact instances.
pub fn enumerate_lambda_sets(d: usize, cfg: &TrialConfig) -> Result<LambdaEnumeration, String> {
    if !(3..=6).contains(&d) {
        return Err(format!("d = {d} outside 3..=6"));
    }
    let mut rng = rng_for(cfg, 0x1A3B_DA00 ^ d as u64);
    let instances: Vec<Instance> = (0..cfg.trials)
        .map(|_| {
            let p = rand_rational(&mut rng, cfg.bound);
            let q = rand_nonzero(&mut rng, cfg.bound);
            let b = rand_index(&mut rng, cfg);
            let a: Vec<i64> = (0..d).map(|_| rand_index(&mut rng, cfg)).collect();
            build_instance(&p, &q, b, &a)
        })
        .collect();

    let total = d.pow(d as u32);
    let mut passing: BTreeSet<Vec<usize>> = BTreeSet::new();
    for code in 0..total {
        let mut lambda = Vec::with_capacity(d);
        let mut c = code;
        for _ in 0..d {
            lambda.push(c % d + 1);
            c /= d;
        }
        lambda.reverse();
        if instances.iter().all(|inst| inst.residual(&lambda).is_zero()) {
            passing.insert(lambda);
        }
    }

    let closure_ok = passing.iter().all(|l| passing.contains(&shift_lambda(l)));
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let (mut classes, mut trivial) = (Vec::new(), Vec::new());
    for start in passing.iter().rev() {
        if seen.contains(start) {
            continue;
        }
        let mut class = vec![start.clone()];
        seen.insert(start.clone());
        let mut next = shift_lambda(start);
        while &next != start && !seen.contains(&next) {
            seen.insert(next.clone());
            class.push(next.clone());
            next = shift_lambda(&next);
        }
        if start.iter().all(|&x| x == start[0]) {
            trivial.push(class);
        } else {
            classes.push(class);
        }
    }
    Ok(LambdaEnumeration {
        d,
        trials: cfg.trials,
        candidates: total,
        classes,
        trivial_classes: trivial,
        closure_ok,
        tag: "verified-at-random",
    })
}
