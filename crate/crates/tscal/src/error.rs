use thiserror::Error;

/// Errors produced by the calculus and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TsError {
    #[error("point {0} is not in the time scale")]
    PointNotInScale(f64),
    #[error("integration endpoint not in the time scale")]
    EndpointsNotInScale,
    #[error("no derivative of the requested kind exists at {0}")]
    NotDifferentiableHere(f64),
    #[error("order {order} exceeds the context maximum {max_order}")]
    OrderExceedsContext { order: usize, max_order: usize },
    #[error("monomial ratio denominator within {tol} of zero at t = {at}")]
    DegenerateDenominator { at: f64, tol: f64 },
    #[error("no closed form is known for this scale tag")]
    UnsupportedScaleTag,
    #[error("{name} must be positive; worst value {worst} at {at}")]
    PositivityViolated { name: String, worst: f64, at: f64 },
    #[error("empty integration range (s = a gives 0/0)")]
    EmptyRange,
    #[error("monotonicity verdict needs at least 2 samples")]
    TooFewSamples,
    #[error("sign of {what} straddles the tolerance band; cannot pick a direction")]
    IndeterminateSign { what: String },
    #[error("truncation order {max_order} too short for start index {u0} (need u0 + 2)")]
    TruncationTooShort { u0: usize, max_order: usize },
    #[error("table-backed function has no value near {0}")]
    PointNotInTable(f64),
    #[error("expression error in {slot}: {msg}")]
    Expr { slot: String, msg: String },
}

pub type Result<T> = std::result::Result<T, TsError>;
