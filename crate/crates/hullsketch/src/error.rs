//! Error type shared by every module in this crate.
//!
//! Variants are grouped by origin: input validation, numerical failure of an
//! operation, and failure of an iterative oracle to converge. Callers that
//! need to distinguish "the point was already inside" from real failures can
//! match on [`Error::InteriorPoint`], which is a control-flow signal rather
//! than a fault.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix had a different dimension than the state it was
    /// combined with.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An input contained NaN or an infinity.
    #[error("non-finite input in {context}")]
    NonFinite { context: &'static str },

    /// A rank-one update was requested for a point already inside the
    /// ellipsoid; the update formula is undefined there.
    #[error("point is interior (norm {norm}), no update defined")]
    InteriorPoint { norm: f64 },

    /// A matrix that must be invertible was singular or numerically
    /// indistinguishable from singular.
    #[error("singular matrix in {context} (condition estimate {cond:.3e})")]
    Singular { context: &'static str, cond: f64 },

    /// An operation produced a result that lost full rank.
    #[error("result of {context} is numerically singular")]
    ResultSingular { context: &'static str },

    /// A radius parameter was zero, negative, or non-finite.
    #[error("invalid radius {value}")]
    InvalidRadius { value: f64 },

    /// An aspect-ratio parameter was below 1 or non-finite.
    #[error("invalid aspect ratio {value}, must be finite and >= 1")]
    InvalidAspectRatio { value: f64 },

    /// The first stream point was zero, so no initial ellipsoid exists.
    #[error("first point of the stream is zero")]
    ZeroFirstPoint,

    /// A result was requested from a state that has seen no points.
    #[error("stream is empty, nothing to report")]
    EmptyStream,

    /// A sketch query or export was requested before any point was kept.
    #[error("coreset is empty, no sketch answer exists")]
    EmptyCoreset,

    /// A point set did not span the full space, so gauges are infinite in
    /// some directions.
    #[error("points span only {rank} of {dim} dimensions")]
    DegenerateSpan { rank: usize, dim: usize },

    /// An iterative oracle hit its iteration cap before reaching tolerance.
    #[error("{context} did not converge within {iterations} iterations")]
    NonConvergence { context: &'static str, iterations: usize },

    /// The LP solver failed structurally (infeasible where feasibility is
    /// guaranteed, unbounded, or a pivot breakdown).
    #[error("linear program failed: {reason}")]
    LpFailure { reason: String },

    /// A factor measurement was requested for an ellipsoid that does not
    /// cover all points, where the factor is meaningless.
    #[error("ellipsoid does not cover point {index} (norm {norm})")]
    NotCovering { index: usize, norm: f64 },

    /// A recorded potential trace is internally inconsistent.
    #[error("trace is inconsistent: {reason}")]
    TraceMismatch { reason: String },

    /// A Hadamard matrix was requested for an order that is not a power of
    /// two.
    #[error("order {order} is not a power of two")]
    NotPowerOfTwo { order: usize },

    /// A scalar or size parameter was outside its documented range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}
