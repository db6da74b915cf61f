//! Special functions used by every transform kernel.

pub mod bessel;
pub mod gamma;
pub mod quad;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_j, bessel_j0, bessel_j1, bessel_k, bessel_k_analytic, bessel_k_ik,
    bessel_k_quadrature, bessel_k_scaled, bessel_k_series, j1_over_x, j2_over_x2,
};
pub use gamma::{gamma_complex, gamma_real, ln_gamma_complex, rgamma};
