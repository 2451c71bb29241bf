use thiserror::Error;

/// Errors shared across the crate.
///
/// Geometry predicates never fail silently: anything that would force a
/// guess (dimension mismatch, non-positive gauge, an oracle that cannot
/// classify a point) is surfaced here instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate interval on axis {axis}: lo = {lo} must be < hi = {hi}")]
    DegenerateInterval { axis: usize, lo: String, hi: String },

    #[error("empty interval list")]
    EmptyInput,

    #[error("gauge is not positive at {at:?}: delta = {value}")]
    NonPositiveGauge { at: Vec<f64>, value: f64 },

    #[error("bisection depth {depth} exceeded at cell {cell} (delta at center = {delta})")]
    DepthExceeded { depth: u32, cell: String, delta: f64 },

    #[error("region has empty interior")]
    EmptyInterior,

    #[error("division made no progress for {generations} consecutive generations")]
    DivisionStalled { generations: u32 },

    #[error("integrand evaluation failed at {at:?}: {reason}")]
    Evaluation { at: Vec<f64>, reason: String },

    #[error("membership of {at:?} could not be decided: {reason}")]
    UnknownMembership { at: Vec<f64>, reason: String },

    #[error("interval function evaluation failed on {interval}: {reason}")]
    IntervalFunction { interval: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
