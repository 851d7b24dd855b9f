//! Crate-wide error type. Variant messages match the contracts callers test against.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no iterates")]
    NoIterates,
    #[error("point has no coordinates")]
    EmptyPoint,
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("LMO undefined on unbounded set")]
    LmoUnbounded,
    #[error("point outside decision set: {0}")]
    OutsideSet(String),
    #[error("entropy generator requires positive coordinates")]
    EntropyDomain,
    #[error("prox unavailable for this composite term")]
    ProxUnavailable,
    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),
    #[error("insufficient strong convexity: requested {requested}, problem has {available}")]
    InsufficientStrongConvexity { requested: f64, available: f64 },
    #[error("comparator unavailable")]
    ComparatorUnavailable,
    #[error("gap unavailable")]
    GapUnavailable,
    #[error("no closed-form leader for this loss/regularizer pair")]
    NoClosedFormLeader,
    #[error("weights not materialized for adaptive schedule")]
    AdaptiveWeightsUnavailable,
    #[error("invalid game spec: {0}")]
    InvalidSpec(String),
    #[error("dynamic aborted at round {round}: {reason}")]
    DynamicAborted { round: usize, reason: String },
    #[error("learner error: {0}")]
    Learner(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("unknown algorithm: {0}")]
    UnknownAlgorithm(String),
    #[error("unknown problem: {0}")]
    UnknownProblem(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not enough samples for rate fit: {0}")]
    RateFit(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
