use thiserror::Error;

/// Errors raised by the geometry, spinor and mass pipelines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("arithmetic domain error in `{op}` at {point:?}: {detail}")]
    Domain {
        op: &'static str,
        point: Vec<f64>,
        detail: String,
    },
    #[error("degenerate metric at {point:?}: {detail}")]
    DegenerateMetric { point: Vec<f64>, detail: String },
    #[error("point {point:?} lies outside the chart domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("insufficient jet order: need {needed}, have {have}")]
    JetOrder { needed: usize, have: usize },
    #[error("structure error ({invariant}): residual {residual:e}")]
    Structure { invariant: &'static str, residual: f64 },
    #[error("precondition failed ({what}): residual {residual:e}")]
    Precondition { what: &'static str, residual: f64 },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("calibration error ({what}): residual {residual:e}")]
    Calibration { what: &'static str, residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl GeomError {
    /// True for errors that come from evaluating numbers rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, GeomError::Usage(_) | GeomError::Dimension(_) | GeomError::Unsupported(_))
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
