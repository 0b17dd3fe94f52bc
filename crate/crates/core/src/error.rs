use thiserror::Error;

/// Errors produced by the measurement, inequality and SQUID computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time interval must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("impossible measurement branch: state has zero norm")]
    ZeroNorm,

    #[error("outcome magnitudes differ ({0} vs {1})")]
    MagnitudeMismatch(f64, f64),

    #[error(
        "type III inequalities are ruled out by the experimental requirement that the \
         system is prepared in a definite state at the initial time"
    )]
    UnsupportedInequality,

    #[error("no violation region: the overlap integral vanishes even at xi = 2|X|")]
    NoViolationRegion,

    #[error("unknown resolution criterion `{0}` (expected half_width, unit or max)")]
    UnknownCriterion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not bistable: beta = {beta} lies outside (1, 5π/2); no double well")]
    NotBistable { beta: f64 },

    #[error(
        "domain truncation: mode {mode} has boundary amplitude {ratio:e} of its maximum; \
         widen the flux grid"
    )]
    DomainTruncation { mode: usize, ratio: f64 },

    #[error("two-level regime invalid: localization mass {mass} does not exceed 0.9")]
    TwoLevelInvalid { mass: f64 },

    #[error(
        "basis truncation: projection loses {leakage:e} of the prepared probability; increase the number of modes"
    )]
    BasisTruncation { leakage: f64 },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
