use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Adding the given relation would force `x < x`.
    #[error("cycle through element {0}")]
    Cycle(usize),
    /// An element index is out of range for the poset it was used with.
    #[error("element {index} out of range (poset has {n} elements)")]
    Index { index: usize, n: usize },
    /// A construction parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    Param(String),
    /// The operation is undefined on one-element co-trees.
    #[error("operation undefined on the singleton co-tree")]
    Singleton,
    /// `reconstruct` needs at least one grafted part.
    #[error("reconstruct requires at least one part")]
    EmptyParts,
    /// A map or table does not have the shape the operation expects.
    #[error("shape error: {0}")]
    Shape(String),
    /// The input is structurally valid but not of the kind the operation accepts.
    #[error("usage error: {0}")]
    Usage(String),
    /// Two multisets were built over different carriers.
    #[error("multisets are over different carriers")]
    CarrierMismatch,
    /// The request exceeds the exhaustive-scan bound.
    #[error("size error: {0}")]
    Size(String),
    /// The empty poset has no dual algebra.
    #[error("the empty poset has no dual algebra")]
    EmptyPoset,
    /// A valuation assigned something that is not an upset.
    #[error("valuation error: {0}")]
    Valuation(String),
    /// Formula or file syntax error, with a character position.
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// `run_check` was asked for a check name it does not know.
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    /// A serialized poset or algebra file is malformed.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
