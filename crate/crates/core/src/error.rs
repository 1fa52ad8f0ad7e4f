//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulator components.
#[derive(Debug, Error)]
pub enum Error {
    /// A duration or step that must be non-negative was negative.
    #[error("negative duration: {what} = {value}")]
    NegativeDuration { what: &'static str, value: f64 },

    /// An interval with `end <= start` where a forward interval is required.
    #[error("malformed interval: [{start}, {end}]")]
    MalformedInterval { start: f64, end: f64 },

    /// A pulse whose steady contribution alone exceeds the power ceiling;
    /// no amount of cooling makes it schedulable.
    #[error("pulse infeasible: amplitude {amplitude} with t_x {t_x} ms exceeds p_max {p_max}")]
    InfeasiblePulse { amplitude: f64, t_x: f64, p_max: f64 },

    /// Selection was requested over an empty candidate set.
    #[error("empty candidate set")]
    EmptyCandidates,

    /// A rank fell outside 1..=Q; indicates a broken rank permutation.
    #[error("rank {rank} out of range 1..={q}")]
    RankOutOfRange { rank: usize, q: usize },

    /// A scenario or config file that could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Configuration value outside its documented domain.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
