use std::fmt;

/// Errors surfaced by the algebra layer and the constructions on top of it.
///
/// `Internal` is reserved for broken invariants that indicate a bug in this
/// crate (e.g. a ghost identity failing); callers are expected to treat it as
/// fatal rather than recoverable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An exponent (or a construction) needs a p-th root deeper than the
    /// configured truncation depth. Never silently rounded.
    PrecisionExceeded(String),
    /// A graded piece beyond the configured degree bound was requested.
    DegreeBoundExceeded(String),
    /// A generator image does not kill a defining relation.
    MapNotWellDefined(String),
    /// A presentation falls outside the supported rewrite shapes.
    UnsupportedPresentation(String),
    /// Caller error: mismatched parameters, out-of-envelope request, bad input.
    Usage(String),
    /// Broken internal invariant; indicates a bug, not a user error.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrecisionExceeded(m) => write!(f, "precision exceeded: {}", m),
            Error::DegreeBoundExceeded(m) => write!(f, "degree bound exceeded: {}", m),
            Error::MapNotWellDefined(m) => write!(f, "map not well-defined: {}", m),
            Error::UnsupportedPresentation(m) => write!(f, "unsupported presentation: {}", m),
            Error::Usage(m) => write!(f, "usage error: {}", m),
            Error::Internal(m) => write!(f, "internal invariant violated: {}", m),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
