use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("degenerate geodesic: both endpoints coincide")]
    DegenerateGeodesic,

    #[error("geodesic of radius {radius} does not rise above height {height}")]
    NoArc { radius: f64, height: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),

    #[error("classification inconclusive after {iterations} iterations: {detail}")]
    ClassificationInconclusive { iterations: usize, detail: String },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("invalid configuration: {0}")]
    ConfigurationInvalid(String),

    #[error("malformed group element: {0}")]
    MalformedElement(String),

    #[error("element is not hyperbolic (classified {classification})")]
    NonHyperbolic { classification: String },

    #[error("axis too shallow: radius {radius} does not exceed 1")]
    AxisTooShallow { radius: f64 },

    #[error("expected an orientation-reversing glide element")]
    NotAGlide,

    #[error("invalid family plan: {0}")]
    InvalidPlan(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("config schema violation: {0}")]
    ConfigSchema(String),

    #[error("V is not orthogonal (residual {residual:e})")]
    NonOrthogonal { residual: f64 },

    #[error("B0 coincides with A0")]
    BaseAtOrigin,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
