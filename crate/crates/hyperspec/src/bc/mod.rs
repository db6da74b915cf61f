//! Boundary-control reconstruction on a rectangle with a conformal metric.

pub mod control;
pub mod eigen;
pub mod linalg;
pub mod metric;
pub mod oracle;
pub mod pipeline;
pub mod projection;
pub mod reconstruct;
pub mod recover;

pub use control::{blago_coeff, blago_inner, wave_coefficients, ControlFunction, ControlTerm, SpaceProfile, TimeProfile};
pub use eigen::{neumann_eigensolve, BoundarySpectralData, NeumannEigen};
pub use metric::{Boundary, ConformalMetric, GridSpec, MetricSpec};
