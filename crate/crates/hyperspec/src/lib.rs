//! Numerical spectral theory on the hyperbolic upper half-space.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: distances, geodesics, isometries, polar coordinates.
//! * [`special`]: Gamma, modified Bessel functions of complex order, J0/J1, quadrature helpers.
//! * [`kl`]: Kontorovich-Lebedev transform, zero-mode transform, Green operator, H^n transform.
//! * [`radon`]: modified Radon transform, wave propagator, kernel identity checks.
//! * [`eisenstein`]: modular group, Eisenstein series, zeta, scattering matrix.
//! * [`bc`]: boundary-control reconstruction on a conformally flat rectangle.
//! * [`io`], [`scene`] and [`suites`]: CSV/JSON output, bump scenes and the verification suites used by the CLI.

pub mod bc;
pub mod eisenstein;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kl;
pub mod radon;
pub mod scene;
pub mod special;
pub mod suites;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
