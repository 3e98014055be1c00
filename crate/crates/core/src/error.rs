//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A structural law failed during validation; each violation names the
    /// law and the witnessing elements.
    #[error("validation failed:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),

    #[error("category is not a delta: {0}")]
    NotADelta(String),

    #[error("category is not a poset: {0}")]
    NotAPoset(String),

    /// A functor sends a nonidentity morphism to an identity, so it has no
    /// induced functor on subdivisions of nondegenerate simplices.
    #[error("degeneracy collapse: functor sends nonidentity morphism {morphism} to an identity")]
    DegeneracyCollapse { morphism: String },

    #[error("budget exceeded in {what}: required {required}, budget {budget} (raise with --budget or DIAGCOH_BUDGET)")]
    BudgetExceeded {
        what: String,
        required: usize,
        budget: usize,
    },

    #[error("size cap exceeded in {what}: {size} > cap {cap} (raise with --cap)")]
    CapExceeded {
        what: String,
        size: usize,
        cap: usize,
    },

    #[error("unknown reference {kind} {name:?}")]
    UnknownRef { kind: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),

    /// Hypothesis of a verified construction failed; reported with the
    /// offending square or identity.
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
