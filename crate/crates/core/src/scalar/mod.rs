//! Exact scalars: rationals, roots of unity written as `e^{iπ r}`, their
//! rational spans, and truncated q-series.

mod phase;
mod qseries;
mod rational;
mod sum;

pub use phase::Phase;
pub(crate) use qseries::colored_partition_counts;
pub use qseries::{eta_inverse_series, QSeries};
pub use rational::{
    format_rational, parse_rational, rat, rational_from_f64_exact, rem_euclid, to_f64, Rational,
};
pub use sum::Scalar;

use thiserror::Error;

/// Tolerance below which a numerically evaluated scalar is treated as zero
/// when the symbolic merge could not decide.
pub const ZERO_CERTIFICATE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("InconclusiveCancellation: symbolic merge left {terms} terms of total magnitude {magnitude:e}")]
    InconclusiveCancellation { terms: usize, magnitude: f64 },
    #[error(
        "OffsetMismatch: q-series offsets {left} and {right} are on different exponent lattices"
    )]
    OffsetMismatch { left: String, right: String },
    #[error("MalformedRational: cannot parse {0:?}")]
    MalformedRational(String),
}

impl ScalarError {
    pub fn name(&self) -> &'static str {
        match self {
            ScalarError::InconclusiveCancellation { .. } => "InconclusiveCancellation",
            ScalarError::OffsetMismatch { .. } => "OffsetMismatch",
            ScalarError::MalformedRational(_) => "MalformedRational",
        }
    }
}
