//! Seeded randomized verification of the algebraic identities, in exact
//! arithmetic. A reported failure is always a genuine counterexample.

mod elliptic;
mod lambda;
mod linear;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::kernel::{format_rational, Rational};

pub use elliptic::{
    random_somos4, verify_elliptic_relation, verify_elliptic_relation_grid, verify_gale_robinson_identity,
    verify_gale_robinson_random, verify_subsequence_coeffs,
};
pub use lambda::{enumerate_lambda_sets, lambda_residual, shift_lambda, LambdaEnumeration};
pub use linear::{
    verify_convolution, verify_cyclic_sum, verify_four_linear, verify_linear_somos4, verify_lucas_identity,
    verify_vajda,
};

/// Deliberate bugs used to exercise the counterexample path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    VajdaSignFlip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    /// Free indices are drawn uniformly from `lo..=hi`.
    pub index_range: (i64, i64),
    /// Random rationals have `|num| <= bound` and `1 <= den <= bound`.
    pub bound: i64,
    pub fault: Option<Fault>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig { seed: 42, trials: 100, index_range: (-6, 6), bound: 7, fault: None }
    }
}

impl TrialConfig {
    pub fn with_seed(seed: u64, trials: usize) -> Self {
        TrialConfig { seed, trials, ..TrialConfig::default() }
    }
}

/// Maximum redraws of one trial when a divisor vanishes.
pub const RESAMPLE_CAP: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityId {
    Convolution,
    Vajda,
    CyclicSum,
    FourLinear,
    Lucas,
    LinearSomos4,
    EllipticRelation,
    GaleRobinson,
    Subsequence,
    LatticeIntegrals,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::Convolution,
        IdentityId::Vajda,
        IdentityId::CyclicSum,
        IdentityId::FourLinear,
        IdentityId::Lucas,
        IdentityId::LinearSomos4,
        IdentityId::EllipticRelation,
        IdentityId::GaleRobinson,
        IdentityId::Subsequence,
        IdentityId::LatticeIntegrals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Convolution => "convolution",
            IdentityId::Vajda => "vajda",
            IdentityId::CyclicSum => "cyclic-sum",
            IdentityId::FourLinear => "four-linear",
            IdentityId::Lucas => "lucas",
            IdentityId::LinearSomos4 => "linear-somos4",
            IdentityId::EllipticRelation => "elliptic-relation",
            IdentityId::GaleRobinson => "gale-robinson",
            IdentityId::Subsequence => "subsequence",
            IdentityId::LatticeIntegrals => "lattice-integrals",
        }
    }

    fn salt(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = IdentityId::ALL.iter().map(|i| i.name()).collect();
                format!("unknown identity `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub form: String,
    pub params: String,
    pub indices: Vec<i64>,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} at {:?}: {} != {}", self.form, self.params, self.indices, self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub trials_run: usize,
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub status: Status,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Collects checks for one verifier; failures are kept verbatim.
pub(crate) struct Recorder {
    id: IdentityId,
    trials_run: usize,
    checks: usize,
    failures: Vec<Failure>,
    notes: Vec<String>,
    error: Option<String>,
}

/// Only the first few failures are stored in full.
const MAX_STORED_FAILURES: usize = 20;

impl Recorder {
    pub(crate) fn new(id: IdentityId) -> Self {
        Recorder { id, trials_run: 0, checks: 0, failures: Vec::new(), notes: Vec::new(), error: None }
    }

    pub(crate) fn trial(&mut self) {
        self.trials_run += 1;
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub(crate) fn error(&mut self, s: impl Into<String>) {
        self.error.get_or_insert(s.into());
    }

    pub(crate) fn check<T: PartialEq + fmt::Display>(
        &mut self,
        form: &str,
        params: &dyn Fn() -> String,
        indices: &[i64],
        lhs: &T,
        rhs: &T,
    ) -> bool {
        self.checks += 1;
        if lhs == rhs {
            return true;
        }
        if self.failures.len() < MAX_STORED_FAILURES {
            self.failures.push(Failure {
                form: form.to_string(),
                params: params(),
                indices: indices.to_vec(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        false
    }

    pub(crate) fn finish(self) -> IdentityReport {
        let status = if !self.failures.is_empty() {
            Status::Fail
        } else if self.error.is_some() {
            Status::Error
        } else {
            Status::Pass
        };
        IdentityReport {
            identity: self.id,
            trials_run: self.trials_run,
            checks: self.checks,
            failures: self.failures,
            status,
            notes: self.notes,
            error: self.error,
        }
    }
}

/// Deterministic per-identity stream: the same `(seed, id)` always yields the
/// same draws, independent of which other verifiers ran.
pub(crate) fn rng_for(cfg: &TrialConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub(crate) fn rand_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let b = bound.max(1);
    let num = rng.random_range(-b..=b);
    let den = rng.random_range(1..=b);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn rand_nonzero(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    loop {
        let x = rand_rational(rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

pub(crate) fn rand_index(rng: &mut ChaCha8Rng, cfg: &TrialConfig) -> i64 {
    let (lo, hi) = cfg.index_range;
    rng.random_range(lo.min(hi)..=hi.max(lo))
}

pub(crate) fn pq_params(p: &Rational, q: &Rational) -> String {
    format!("P={}, Q={}", format_rational(p), format_rational(q))
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub reports: Vec<IdentityReport>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

/// Runs one verifier by id. Cyclic sums cover every `d` in `2..=6`.
pub fn verify_identity(id: IdentityId, cfg: &TrialConfig) -> IdentityReport {
    match id {
        IdentityId::Convolution => verify_convolution(cfg),
        IdentityId::Vajda => verify_vajda(cfg),
        IdentityId::CyclicSum => {
            let mut merged = Recorder::new(IdentityId::CyclicSum);
            for d in 2..=6 {
                let r = verify_cyclic_sum(d, cfg);
                merged.trials_run += r.trials_run;
                merged.checks += r.checks;
                merged.failures.extend(r.failures);
                merged.notes.extend(r.notes);
                if let Some(e) = r.error {
                    merged.error(e);
                }
            }
            merged.note("d = 2..6");
            merged.finish()
        }
        IdentityId::FourLinear => verify_four_linear(cfg),
        IdentityId::Lucas => verify_lucas_identity(cfg),
        IdentityId::LinearSomos4 => verify_linear_somos4(cfg),
        IdentityId::EllipticRelation => verify_elliptic_relation(cfg),
        IdentityId::GaleRobinson => verify_gale_robinson_random(cfg, 10),
        IdentityId::Subsequence => verify_subsequence_coeffs(cfg),
        IdentityId::LatticeIntegrals => crate::lattice::verify_lattice_integrals(cfg),
    }
}

/// Every verifier in a fixed order.
pub fn verify_all(cfg: &TrialConfig) -> SuiteReport {
    let reports: Vec<IdentityReport> = IdentityId::ALL.iter().map(|&id| verify_identity(id, cfg)).collect();
    let passed = reports.iter().filter(|r| r.passed()).count();
    let failed = reports.len() - passed;
    SuiteReport { seed: cfg.seed, trials: cfg.trials, all_pass: failed == 0, passed, failed, reports }
}
