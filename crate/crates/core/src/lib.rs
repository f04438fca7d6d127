//! Curvature, almost-Kähler, spin^c and ADM-mass computations on explicit
//! coordinate metrics.
//!
//! Geometry is evaluated pointwise from truncated Taylor jets of the metric
//! (and almost complex structure) components. Everything below the mass
//! pipelines is generic over [`Real`]; concrete `f64` aliases are exported here.

pub mod ale_mass;
pub mod almost_kahler;
pub mod catalog;
pub mod clifford;
pub mod error;
pub mod forms;
pub mod jet;
pub mod linalg;
pub mod quadrature;
pub mod riemann;
pub mod scalar;
pub mod tensor;

pub use error::{GeomError, Result};
pub use scalar::Real;

pub type Jet64 = jet::Jet<f64>;
pub type JetContext64 = jet::JetContext<f64>;
