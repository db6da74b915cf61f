//! Scattering matrix of the modular surface,
//! S(s) = sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) / (Gamma(s) zeta(2s)) = s xi(2s-1) / ((s-1) xi(2s)).

use super::zeta::{riemann_zeta, xi};
use crate::error::{Error, Result};
use crate::special::gamma::gamma_complex;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMatrixValue {
    pub s: C64,
    pub value: C64,
}

/// S(s) through the completed zeta function. xi is entire, so the removable points
/// (s = 1/2 in particular, where S = -1) need no special casing beyond xi's own
/// Laurent branch at w = 1.
pub fn smatrix(s: C64) -> Result<SMatrixValue> {
    if (s - 1.0).norm() < 1e-14 {
        return Err(Error::Pole { location: "1".into(), detail: format!("S has a simple pole with residue {:.6e}", 3.0 / PI) });
    }
    let den = xi(2.0 * s);
    if den.norm() < 1e-300 {
        return Err(Error::Pole { location: format!("{s}"), detail: "zero of zeta(2s)".into() });
    }
    let value = s * xi(2.0 * s - 1.0) / ((s - 1.0) * den);
    Ok(SMatrixValue { s, value })
}

/// The product formula evaluated directly from Gamma and zeta (independent path).
pub fn smatrix_direct(s: C64) -> Result<C64> {
    Ok(PI.sqrt() * gamma_complex(s - 0.5)? * riemann_zeta(2.0 * s - 1.0)? / (gamma_complex(s)? * riemann_zeta(2.0 * s)?))
}

/// (t, S(1/2 + i t)) on `n` equispaced points of [t_min, t_max].
pub fn critical_line_sweep(t_min: f64, t_max: f64, n: usize) -> Result<Vec<(f64, SMatrixValue)>> {
    if n < 2 || !(t_max > t_min) {
        return crate::error::arg("sweep needs n >= 2 and t_max > t_min");
    }
    (0..n)
        .map(|j| {
            let t = t_min + (t_max - t_min) * j as f64 / (n - 1) as f64;
            Ok((t, smatrix(C64::new(0.5, t))?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn unitary_on_critical_line() {
        for &t in &[1.0, 5.0, 13.7] {
            let v = smatrix(C64::new(0.5, t)).unwrap().value;
            assert!((v.norm() - 1.0).abs() <= 1e-9);
        }
        for (_, v) in critical_line_sweep(0.5, 20.0, 50).unwrap() {
            assert!((v.value.norm() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn half_is_minus_one() {
        let v = smatrix(C64::new(0.5, 0.0)).unwrap().value;
        assert!((v + 1.0).norm() <= 1e-6, "{v}");
        let near = smatrix(C64::new(0.5 + 1e-7, 0.0)).unwrap().value;
        assert!((near + 1.0).norm() <= 1e-5);
    }

    #[test]
    fn functional_relation_and_direct_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut re: f64 = rng.gen_range(0.05..0.95);
            if (re - 0.5).abs() < 0.02 {
                re += 0.1;
            }
            let s = C64::new(re, rng.gen_range(-15.0..15.0));
            let a = smatrix(s).unwrap().value;
            let b = smatrix(1.0 - s).unwrap().value;
            assert!((a * b - 1.0).norm() <= 1e-8);
            let d = smatrix_direct(s).unwrap();
            assert!((a - d).norm() <= 1e-9 * a.norm(), "{s}: {a} {d}");
        }
        let p = smatrix(C64::new(0.3, 0.0)).unwrap().value * smatrix(C64::new(0.7, 0.0)).unwrap().value;
        assert!((p - 1.0).norm() < 1e-8);
    }

    #[test]
    fn pole_reported() {
        assert!(matches!(smatrix(C64::new(1.0, 0.0)), Err(Error::Pole { .. })));
    }
}
