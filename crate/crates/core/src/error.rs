use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong inside the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Young function: {0}")]
    InvalidYoungFunction(String),

    #[error("complementary function unsupported: {0}")]
    UnsupportedComplementary(String),

    #[error("Luxemburg norm: no finite bracket after {steps} doublings (modular infinite)")]
    LuxemburgNoBracket { steps: usize },

    #[error("invalid sampled function: {0}")]
    InvalidSampledFunction(String),

    #[error("function is not integrable: {0}")]
    NonIntegrable(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid spectral vector: {0}")]
    InvalidVector(String),

    #[error("point {re}{im:+}i hits the spectrum at mode {mode}")]
    SpectrumHit { re: f64, im: f64, mode: usize },

    #[error("generator is not sectorial of angle < pi/2 (angle = {angle})")]
    NotSectorial { angle: f64 },

    #[error("multiplier is not finite at mode {mode}")]
    NonFiniteMultiplier { mode: usize },

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("subsequence rule violated at index {index}: {detail}")]
    SubsequenceRule { index: usize, detail: String },

    #[error("quadrature did not converge after {levels} refinement levels (estimate {estimate}, error {error})")]
    QuadratureNonConvergence {
        levels: usize,
        estimate: f64,
        error: f64,
    },

    #[error("route inapplicable: {0}")]
    RouteInapplicable(String),

    #[error("square-function integral diverges at mode {mode}")]
    DivergentSquareFunction { mode: usize },

    #[error("inconsistent bounds: lower {lower} > upper {upper}")]
    InconsistentBounds { lower: f64, upper: f64 },

    #[error("certificate violated: {0}")]
    CertificateViolation(Box<crate::certify::ViolationDump>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
