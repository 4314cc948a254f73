//! Exact-arithmetic toolkit for Somos-4, Somos-N and Gale-Robinson recurrences,
//! their companion elliptic divisibility sequences, the identities connecting
//! them, and closed-form solutions of the Volterra lattice built from
//! second-order linear sequences.

pub mod companion;
pub mod identities;
pub mod kernel;
pub mod laurent;
pub mod lattice;
pub mod sequences;
pub mod volterra;

pub use kernel::{QuadExt, Rational, TruncSeries};
pub use sequences::{GaleRobinsonParams, LinearParams, OrbitWindow, Window};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
