//! Error type shared by every module, plus the configurable resource limits.

use thiserror::Error;

/// Every failure the library can report. The variant decides the CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PitError {
    /// Shapes, widths, moduli or ambient sizes that do not line up.
    #[error("structural error: {0}")]
    Structural(String),
    /// A configured ceiling (expansion, enumeration, determinant width) would be exceeded.
    #[error("capability error: {0}")]
    Capability(String),
    /// The field has too few elements for the requested point count.
    #[error("modulus too small: {0}")]
    ModulusTooSmall(String),
    /// Caller broke a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A guarantee that should hold by construction did not; this is a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
    /// Malformed input text.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed input that breaks a model invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Filesystem failure, message passed through verbatim.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, PitError>;

impl PitError {
    /// True for errors that mean "this instance is too big for the configured limits".
    pub fn is_capability(&self) -> bool {
        matches!(self, PitError::Capability(_) | PitError::ModulusTooSmall(_))
    }
}

/// Resource limits. Oracles refuse to run past these instead of thrashing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum estimated term count for a full expansion.
    pub expand_ceiling: u64,
    /// Largest width accepted by the symbolic determinant.
    pub det_width: usize,
    /// Maximum number of terms the symbolic determinant may accumulate.
    pub det_terms: u64,
    /// Maximum number of evaluations or enumerated items in a sweep.
    pub sweep_ceiling: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            expand_ceiling: 1_000_000,
            det_width: 4,
            det_terms: 1_000_000,
            sweep_ceiling: 10_000_000,
        }
    }
}
