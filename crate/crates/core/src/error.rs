use thiserror::Error;

use crate::exprdsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("laurent exponent {exponent} outside [-4, 4]")]
    LaurentRange { exponent: i32 },

    #[error("metric parameter must be positive and finite, got {0}")]
    NonPositiveL(f64),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("domain violation in {function}: argument {value}")]
    FunctionDomain { function: &'static str, value: f64 },

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("invalid group definition: {0}")]
    InvalidGroup(String),

    #[error("point ({x1}, {x2}, {x3}) violates domain predicate `{predicate}` of group `{group}`")]
    OutsideDomain {
        group: String,
        predicate: String,
        x1: f64,
        x2: f64,
        x3: f64,
    },

    #[error("degenerate plane: the two vectors do not span a 2-plane")]
    DegenerateSpan,

    #[error("curve is not regular at t = {t}")]
    NonRegular { t: f64 },

    #[error("vanishing denominator in the transition-branch limit at t = {t}")]
    DegenerateTransition { t: f64 },

    #[error("characteristic point: horizontal gradient {norm:e} below threshold {threshold:e}")]
    Characteristic { norm: f64, threshold: f64 },

    #[error("point is off the surface: |u| = {residual:e}")]
    OffSurface { residual: f64 },

    #[error("curve leaves the surface at t = {t}: residual {residual:e}")]
    CurveOffSurface { t: f64, residual: f64 },

    #[error("curve is not tangent to the surface at t = {t}: <gamma', v_L> = {residual:e}")]
    NotTangent { t: f64, residual: f64 },

    #[error("degenerate immersion at ({u1}, {u2})")]
    DegenerateImmersion { u1: f64, u2: f64 },

    #[error("no closed form for group `{0}`")]
    UnsupportedGroup(String),

    #[error("fit failure: {0}")]
    Fit(String),

    #[error("invalid quadrature setup: {0}")]
    QuadratureSetup(String),

    #[error("quadrature did not reach tolerance: estimate {value}, error {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("scenario error at {location}: {message}")]
    Scenario { location: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn scenario(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
