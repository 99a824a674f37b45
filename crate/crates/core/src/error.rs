use thiserror::Error;

use crate::curves::PlanePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("sample {point} is within {min_dist:e} of basepoint {basepoint} (distance {distance:e})")]
    DistanceViolation {
        point: PlanePoint,
        basepoint: PlanePoint,
        distance: f64,
        min_dist: f64,
    },

    #[error("winding sum {value} is not within 0.1 of an integer")]
    NonIntegerWinding { value: f64 },

    #[error("refinement budget of {budget} inserted points exceeded")]
    RefinementBudgetExceeded { budget: usize },

    #[error("curve is not simple: segments {first} and {second} cross")]
    NotSimple { first: usize, second: usize },

    #[error("could not certify a point interior to the curve")]
    InteriorPointNotFound,

    #[error("equivariance violated at {point}: {detail}")]
    EquivarianceViolation { point: PlanePoint, detail: String },

    #[error("point {point} left the domain strip [{y_lo}, {y_hi}]")]
    DomainEscape { point: PlanePoint, y_lo: f64, y_hi: f64 },

    #[error("unknown zoo entry `{0}`")]
    UnknownZooEntry(String),

    #[error("parameter `{name}` out of range: {detail}")]
    ParamOutOfRange { name: String, detail: String },

    #[error("displacement {displacement:e} below {min_disp:e} at {point}: map has a fixed point on the curve")]
    FixedPointOnCurve {
        point: PlanePoint,
        displacement: f64,
        min_disp: f64,
    },

    #[error("boundary condition violated on {side} side at {point} (image {image})")]
    BoundaryConditionViolation {
        side: String,
        point: PlanePoint,
        image: PlanePoint,
    },

    #[error("configuration violated on arc {arc} at {point} (image {image})")]
    ConfigurationViolation {
        arc: String,
        point: PlanePoint,
        image: PlanePoint,
    },

    #[error("curves do not bound a quadrilateral: {0}")]
    NotAQuadrilateral(String),

    #[error("homotopy construction failed: {0}")]
    HomotopyConstructionFailure(String),

    #[error("index {got} differs from the expected {expected}")]
    IndexMismatch { expected: i64, got: i64 },

    #[error("fixed point on the region boundary after {retries} jitter retries")]
    BoundaryFixedPoint { retries: usize },

    #[error("subdivision budget of {cap} boxes exceeded")]
    BudgetExceeded { cap: usize },

    #[error("point is not periodic: defect {defect:e} exceeds {tolerance:e}")]
    NotPeriodic { defect: f64, tolerance: f64 },

    #[error("translation {value} is not within {tolerance:e} of an integer")]
    NonIntegerTranslation { value: f64, tolerance: f64 },

    #[error("residue modulus |d^n - 1| vanishes for degree {degree}")]
    DegenerateModulus { degree: i64 },

    #[error("no reports to evaluate")]
    EmptyReport,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(e.to_string())
    }
}
