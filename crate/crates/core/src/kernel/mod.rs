//! Exact scalar domains and truncated series shared by every other module.

pub mod quad;
pub mod rational;
pub mod series;

pub use quad::QuadExt;
pub use rational::{format_rational, int, parse_rational, rat, Rational};
pub use series::{series_exp_scaled, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("radicand mismatch: sqrt({left}) vs sqrt({right})")]
    RadicandMismatch { left: String, right: String },
    #[error("series divisor has a zero constant term")]
    ZeroLeadingCoefficient,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational `{0}` (expected num or num/den)")]
    Parse(String),
}
