//! Modular surface: fundamental domain, Eisenstein series, zeta, scattering matrix.

pub mod modular;
pub mod series;
pub mod smatrix;
pub mod zeta;

pub use modular::{apply_matrix, apply_word, in_fundamental_domain, reduce_to_fundamental_domain, Generator, LatticeTruncation, ModularPoint, Reduction};
pub use series::{box_tail_bound, constant_term_check, eisenstein_series, ConstantTermCheck, EisensteinValue};
pub use smatrix::{critical_line_sweep, smatrix, smatrix_direct, SMatrixValue};
pub use zeta::{riemann_zeta, xi};
