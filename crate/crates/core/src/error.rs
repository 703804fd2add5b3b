use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite term at n = {n}, p = {p}; raise the working precision")]
    Overflow { n: usize, p: usize },

    #[error("series has {available} coefficients but order {requested} was requested")]
    SeriesTooShort { available: usize, requested: usize },

    #[error("lambda s0^(1/alpha) = {x} is beyond what P = {p} re-expansion terms resolve")]
    TruncationExceeded { x: f64, p: usize },

    #[error("no lambda grid point satisfies the sigma rule at alpha = {alpha}")]
    NoPassingLambda { alpha: f64 },

    #[error("curve is not monotonic even at the smallest alpha on the grid ({alpha})")]
    NoMonotonicAlpha { alpha: f64 },

    #[error("curve classification indeterminate: {0}")]
    Indeterminate(String),

    #[error("bracket not found: {0}")]
    BracketNotFound(String),

    #[error("accuracy unreachable: {0}")]
    AccuracyUnreachable(String),

    #[error("no oscillation detected")]
    NoOscillation,

    #[error("insufficient extrema: found {found}, need {needed}")]
    InsufficientExtrema { found: usize, needed: usize },

    #[error("linear extrapolation unstable (residual {residual:e})")]
    ExtrapolationUnstable { residual: f64 },

    #[error("pole correction {ratio:.3} of the raw value exceeds the single-pole model limit")]
    PoleDominates { ratio: f64 },

    #[error("sampling too coarse to resolve adjacent sign changes")]
    SampleTooCoarse,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
