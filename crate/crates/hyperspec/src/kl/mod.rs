//! Kontorovich-Lebedev transform for the radial operator
//! L0(zeta) = y^2(-d_y^2 + zeta^2) + (n-2) y d_y - (n-1)^2/4 on L^2(R_+, dy/y^n),
//! the xi = 0 transform, the resolvent, and the transform on H^2.

pub mod green;
pub mod grid;
pub mod hn;
pub mod kernel;
pub mod transform;
pub mod zero_mode;

pub use green::{green_apply, green_bound_constant, green_kernel, green_residual};
pub use grid::{apply_l0_fd, KGrid, RadialGrid};
pub use hn::{hn_fourier_adjoint, hn_fourier_forward, hn_spectrum, HnFunction, HnSpectrum};
pub use kernel::{kl_kernel, KernelRow};
pub use transform::{kl_forward, kl_inverse, KlCoefficients, KlPlan};
pub use zero_mode::{zero_mode_forward, zero_mode_inverse, ZeroModeCoefficients};
