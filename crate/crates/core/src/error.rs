use thiserror::Error;

/// Errors raised anywhere in the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point {point} lies outside the domain of {field}")]
    DomainViolation { field: String, point: String },

    #[error("non-finite value produced while evaluating {0}")]
    NonFinite(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("metric entry g[{0}][{0}] is not real at the evaluation point")]
    NonHermitianSpec(usize),

    #[error("component {0} of the map is not holomorphic (uses conj or abs2)")]
    HolomorphyViolation(String),

    #[error("unknown metric '{0}'")]
    UnknownMetric(String),

    #[error("unknown map '{0}'")]
    UnknownMap(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear map is singular to working precision")]
    SingularLinearMap,

    #[error("metric is not positive definite at {0}")]
    NotPositiveDefinite(String),

    #[error("metric is ill-conditioned (condition number {0:.3e})")]
    IllConditionedMetric(f64),

    #[error("curvature routes disagree: relative mismatch {0:.3e}")]
    CrossCheckFailure(f64),

    #[error("vector argument must be nonzero")]
    ZeroVector,

    #[error("form argument must be nonzero")]
    ZeroForm,

    #[error("form is not positive semidefinite")]
    NotPsd,

    #[error("form is not positive definite")]
    NotPd,

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("second Chern Ricci curvature is not equal to the metric (mismatch {0:.3e})")]
    NotEinsteinNormalized(f64),

    #[error("map has no inverse")]
    MissingInverse,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("field '{0}' cannot be evaluated on jets")]
    JetsUnsupported(String),
}

/// Process exit-code classes used by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Domain,
    Numeric,
}

impl GeomError {
    pub fn class(&self) -> ErrorClass {
        use GeomError::*;
        match self {
            Syntax { .. }
            | DimensionMismatch(_)
            | HolomorphyViolation(_)
            | UnknownMetric(_)
            | UnknownMap(_)
            | InvalidParameter(_)
            | SingularLinearMap
            | MissingInverse
            | Config(_)
            | JetsUnsupported(_) => ErrorClass::Config,
            DomainViolation { .. } | NotPositiveDefinite(_) => ErrorClass::Domain,
            _ => ErrorClass::Numeric,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Domain => 3,
            ErrorClass::Numeric => 4,
        }
    }

    pub(crate) fn domain(field: &str, z: &[num_complex::Complex64]) -> Self {
        GeomError::DomainViolation {
            field: field.to_string(),
            point: crate::point::format_point(z),
        }
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
