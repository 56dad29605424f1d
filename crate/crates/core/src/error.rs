use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("map is indeterminate at this point")]
    IndeterminatePoint,

    #[error("eigenvalue function has a pole at this point")]
    PoleOfPsi,

    #[error("planar map has a pole at this point")]
    PoleOfMap,

    #[error("{0} is not a root of unity of the required order")]
    NotRootOfUnity(String),

    #[error("fiber coordinate z vanishes; ratio residuals are undefined")]
    DegenerateFiber,

    #[error("point ({0}, {1}) lies outside the sampling domain")]
    OutsideDomain(f64, f64),

    #[error("polyline refinement exceeded the point budget of {0}")]
    PointBudgetExceeded(usize),

    #[error("angle {0} is degenerate for this construction")]
    DegenerateAngle(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in input")]
    NonFinite,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}
