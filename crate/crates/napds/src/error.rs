//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by parsers, constructions and decision procedures.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller supplied malformed or inconsistent input (bad syntax,
    /// unknown symbols, discipline violations in a pushdown system, ...).
    #[error("input error: {0}")]
    Input(String),

    /// An operation was called outside its documented contract, e.g. a
    /// CYK query on a grammar that was never converted to normal form.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A semantic precondition of an algorithm does not hold for the given
    /// input, e.g. the worklist automaton construction detected that the
    /// grammar's language is not closed under the equivalence it relies on.
    #[error("precondition violation: {0}")]
    Precondition(String),

    /// A configurable resource limit was exceeded before an answer was found.
    #[error("resource limit exceeded: {what} (limit {limit})")]
    Limit {
        /// Which limit was hit.
        what: &'static str,
        /// The configured bound.
        limit: usize,
    },

    /// An internal invariant failed; always a bug in this crate.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
