use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive length l_{index} = {value}")]
    NonPositiveLength { index: usize, value: f64 },

    #[error("non-positive mass m_{index} = {value}")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("count mismatch: {lengths} lengths need {} masses, got {masses}", lengths.saturating_sub(1))]
    CountMismatch { lengths: usize, masses: usize },

    #[error("string must have at least one mass")]
    NoMasses,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate spectrum: relative gap {gap:e} between eigenvalues {index} and {}", index + 1)]
    DegenerateSpectrum { index: usize, gap: f64 },

    #[error("eigenvector {index} has first component {value:e}, cannot normalize")]
    EigenvectorNormalization { index: usize, value: f64 },

    #[error("grid too coarse: sqrt|lambda_max|*dt = {product} (limit {limit})")]
    Nyquist { product: f64, limit: f64 },

    #[error("time step unstable for stiffest mode: omega*dt = {product} (limit {limit})")]
    Stability { product: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("response covers [0, {available}] but [0, {required}] is needed")]
    ResponseTooShort { available: f64, required: f64 },

    #[error("connector has effective rank 0")]
    RankZero,

    #[error("Krein solve residual {residual:e} exceeds {limit:e}")]
    Residual { residual: f64, limit: f64 },

    #[error("step {step}: recovered mass {value} is not positive")]
    NegativeMass { step: usize, value: f64 },

    #[error("step {step}: coupling a_k = {value:e} below division guard")]
    SmallCoupling { step: usize, value: f64 },

    #[error("step {step}: recovery inconsistent with detected rank {rank}")]
    RankInconsistent { step: usize, rank: usize },

    #[error("need at least {required} grid nodes, got {got}")]
    TooFewNodes { required: usize, got: usize },

    #[error("truncation bound {bound:e} above tolerance {tol:e}")]
    Truncation { bound: f64, tol: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NonPositiveLength { .. }
            | NonPositiveMass { .. }
            | CountMismatch { .. }
            | NoMasses
            | Parse { .. }
            | InvalidArgument(_)
            | GridMismatch(_)
            | ResponseTooShort { .. }
            | OutOfRange(_)
            | TooFewNodes { .. } => ErrorKind::Config,
            Io(_) => ErrorKind::Io,
            _ => ErrorKind::Numerical,
        }
    }

    /// Stable snake_case identifier printed by the CLI.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            NonPositiveLength { .. } => "non_positive_length",
            NonPositiveMass { .. } => "non_positive_mass",
            CountMismatch { .. } => "count_mismatch",
            NoMasses => "no_masses",
            Parse { .. } => "parse",
            InvalidArgument(_) => "invalid_argument",
            DegenerateSpectrum { .. } => "degenerate_spectrum",
            EigenvectorNormalization { .. } => "eigenvector_normalization",
            Nyquist { .. } => "nyquist",
            Stability { .. } => "stability",
            GridMismatch(_) => "grid_mismatch",
            ResponseTooShort { .. } => "response_too_short",
            RankZero => "rank_zero",
            Residual { .. } => "residual",
            NegativeMass { .. } => "negative_mass",
            SmallCoupling { .. } => "small_coupling",
            RankInconsistent { .. } => "rank_inconsistent",
            TooFewNodes { .. } => "too_few_nodes",
            Truncation { .. } => "truncation",
            OutOfRange(_) => "out_of_range",
            Io(_) => "io",
        }
    }
}
