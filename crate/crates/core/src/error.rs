use core::fmt;

use crate::dissipation::RegionViolation;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Polynomial order outside `1..=max`.
    OrderOutOfRange { order: usize, max: usize },
    /// Requested derivative order exceeds the polynomial order.
    DegenerateOrder { derivative: usize, order: usize },
    /// A diffusion or dissipation coefficient is negative or not finite.
    InvalidCoefficient { index: usize, value: f64 },
    /// Constant-signed dissipation coefficients outside the positivity region.
    CoefficientRegion(RegionViolation),
    InvalidMesh(&'static str),
    DimensionMismatch { expected: usize, found: usize },
    /// Zero pivot during banded LU.
    Singular { row: usize },
    /// Operator that should be symmetric is not.
    Asymmetric { asymmetry: f64 },
    NonFinite { time: f64 },
    NewtonFailure { time: f64, halvings: usize },
    InvalidInput(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OrderOutOfRange { order, max } => {
                write!(f, "polynomial order {order} out of range 1..={max}")
            }
            Error::DegenerateOrder { derivative, order } => write!(
                f,
                "derivative order {derivative} exceeds polynomial order {order}"
            ),
            Error::InvalidCoefficient { index, value } => {
                write!(f, "invalid coefficient {value} at index {index}")
            }
            Error::CoefficientRegion(v) => write!(f, "coefficient region violated: {v}"),
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Singular { row } => write!(f, "singular matrix (zero pivot at row {row})"),
            Error::Asymmetric { asymmetry } => {
                write!(f, "operator is not symmetric (max asymmetry {asymmetry:e})")
            }
            Error::NonFinite { time } => write!(f, "non-finite state at t = {time}"),
            Error::NewtonFailure { time, halvings } => write!(
                f,
                "Newton iteration failed at t = {time} after {halvings} step halvings"
            ),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<RegionViolation> for Error {
    fn from(v: RegionViolation) -> Self {
        Error::CoefficientRegion(v)
    }
}
