//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An exponent outside its admissible range was supplied.
    #[error("invalid exponent {value}: {reason}")]
    InvalidExponent { value: f64, reason: &'static str },

    /// A weighted space was built from an empty or non-positive weight list.
    #[error("invalid weights: {0}")]
    InvalidWeights(&'static str),

    /// A value array had the wrong shape or contained non-finite entries.
    #[error("invalid values: {0}")]
    InvalidValues(&'static str),

    /// Two objects that must live on the same space do not.
    #[error("space mismatch: {0}")]
    SpaceMismatch(&'static str),

    /// A map that must be a permutation is not a bijection.
    #[error("forward map is not a permutation of the atom set")]
    NotAPermutation,

    /// Weights are not invariant under the forward map.
    #[error("weights are not invariant under the forward map (atom {atom})")]
    NonInvariantWeights { atom: usize },

    /// An atom index outside `0..n_atoms`.
    #[error("atom index {atom} out of range for {n_atoms} atoms")]
    AtomOutOfRange { atom: usize, n_atoms: usize },

    /// A sample window that does not satisfy `t_min <= 0 <= t_max`.
    #[error("sample window [{t_min}, {t_max}] must contain t = 0")]
    WindowMissingOrigin { t_min: i64, t_max: i64 },

    /// The input window is too short for the operator to produce any sample.
    #[error("input window of width {width} leaves no output sample (need at least {needed})")]
    EmptyWindow { width: usize, needed: usize },

    /// An evaluation window narrower than the operator requires.
    #[error("evaluation window halfwidth {given} too small, minimum is {minimum}")]
    WindowTooSmall { given: usize, minimum: usize },

    /// A level parameter that must be strictly positive.
    #[error("lambda must be strictly positive, got {0}")]
    NonPositiveLambda(f64),

    /// A weak-type computation needs at least one lambda level.
    #[error("lambda grid is empty")]
    EmptyLambdaGrid,

    /// Zero denominator: the input is (almost everywhere) zero.
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    /// A positive integer parameter was zero.
    #[error("parameter {name} must be at least 1")]
    ZeroParameter { name: &'static str },

    /// A compact text spec that could not be parsed.
    #[error("cannot parse spec `{input}`: {reason}")]
    InvalidSpec { input: String, reason: &'static str },
}
