use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function form.
    #[error("argument {value} outside domain ({domain})")]
    Domain { value: f64, domain: String },

    /// A constructor or operation received parameters violating its contract.
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// A composition or summand leaves the closed power/log/exp family.
    #[error("not in the closed family: {0}")]
    NotClosed(String),

    /// Text could not be parsed as a function expression.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// An enumeration would exceed the configured size limit.
    #[error("resource cap exceeded: {requested} items requested, cap is {cap}")]
    ResourceCap { requested: u128, cap: u128 },

    /// A window, range or sample set is empty where a value is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An internal consistency check failed.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
