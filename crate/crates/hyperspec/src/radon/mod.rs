//! Modified Radon transform, wave propagation and kernel identities on H^n.

pub mod image;
pub mod kernel_identity;
pub mod sphere;
pub mod transform;
pub mod wave;

pub use image::RadonImage;
pub use transform::{omega, radon_explicit, radon_spectral};
pub use wave::{wave_energy, wave_propagate, wave_propagate_spectral, WaveOptions, WaveState};
pub use kernel_identity::{kernel_identity_check, kernel_identity_check_s, KernelIdentityResult, TestFunction};
pub use sphere::{wave_cos_mode_n3, wave_spherical_mean_n3};
pub use wave::asymptotic_profile_check;
