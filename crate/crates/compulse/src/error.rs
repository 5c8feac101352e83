//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by sequence construction, jet arithmetic and solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument {
        /// Name of the offending argument.
        name: &'static str,
        /// Human-readable description of the violation.
        reason: String,
    },

    /// Jet division or square root with a singular constant term.
    #[error("singular jet: {0}")]
    SingularJet(String),

    /// Requested derivative order exceeds the truncation order of the jet.
    #[error("derivative order ({m},{n}) exceeds jet order {order}")]
    OrderExceedsJet {
        /// Requested order in the amplitude error.
        m: usize,
        /// Requested order in the detuning error.
        n: usize,
        /// Truncation order of the jet engine.
        order: usize,
    },

    /// Catalog lookup for an unknown sequence name.
    #[error("unknown sequence `{name}`{}", near_matches_help(.near))]
    UnknownSequence {
        /// The name that failed to resolve.
        name: String,
        /// Known names that are close to the requested one.
        near: Vec<String>,
    },

    /// A matrix that was required to be unitary is not.
    #[error("matrix is not unitary: max deviation {deviation:.3e}")]
    NotUnitary {
        /// Largest entry of |M†M − I|.
        deviation: f64,
    },
}

fn near_matches_help(near: &[String]) -> String {
    if near.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", near.join(", "))
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
