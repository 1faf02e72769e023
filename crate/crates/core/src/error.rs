use thiserror::Error;

use crate::comb::CombViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid vertex label `{0}`: labels must be non-empty and must not contain '-'")]
    InvalidLabel(String),

    #[error("edge {0} joins two vertices of the same class")]
    SameClassEdge(String),

    #[error("edge {0} is not an edge of the instance")]
    MissingEdge(String),

    #[error("{field}: {message}")]
    InvalidField { field: String, message: String },

    #[error("instance has {vertices} vertices, above the enumeration cap of {cap}")]
    EnumerationCap { vertices: usize, cap: usize },

    #[error("tour enumeration supports at most {cap} vertices per class, got {n}")]
    TourCap { n: usize, cap: usize },

    #[error("instance has no Hamiltonian tours")]
    NoTours,

    #[error("invalid comb: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidComb(Vec<CombViolation>),

    #[error("builder {builder} does not apply: {reason}")]
    HypothesisNotMet { builder: String, reason: String },

    #[error("certificate member {index} is not a valid relaxation inequality: {reason}")]
    InvalidMember { index: usize, reason: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidField { field: field.into(), message: message.into() }
    }
}
