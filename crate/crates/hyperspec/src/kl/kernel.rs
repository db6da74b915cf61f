//! The normalised Kontorovich-Lebedev kernel
//! phi(k, z) = sqrt(2k sinh(k pi))/pi * K_{ik}(z), real and even in k.
//!
//! Below the series switch phi = -sqrt(2k/sinh(k pi)) Im I_{ik}(z); the prefactor is
//! folded into the series coefficients (|1/Gamma(1+ik)| = sqrt(sinh(k pi)/(pi k))), so no
//! e^{pi k} sized numbers appear.

use crate::special::bessel::{bessel_k_cf2_scaled, k_switch};
use crate::special::gamma::ln_gamma_complex;
use crate::C64;
use std::f64::consts::PI;

/// Per-k data for repeated kernel evaluation.
#[derive(Debug, Clone)]
pub struct KernelRow {
    pub k: f64,
    coef: Vec<C64>,
    z_switch: f64,
    /// beyond this argument phi < 1e-20
    z_cut: f64,
    /// log of sqrt(2k sinh(k pi))/pi minus k pi/2
    log_norm: f64,
}

impl KernelRow {
    pub fn new(k: f64) -> Self {
        let k = k.abs();
        let z_switch = k_switch(C64::new(0.0, k));
        let z_cut = 0.5 * PI * k + 47.0;
        if k == 0.0 {
            return Self { k, coef: vec![], z_switch, z_cut, log_norm: f64::NEG_INFINITY };
        }
        let arg = ln_gamma_complex(C64::new(1.0, k)).expect("no pole").im;
        let mut b = C64::from_polar((2.0 / PI).sqrt(), -arg);
        // enough terms for q = z_switch^2 / 4
        let q = 0.25 * z_switch * z_switch;
        let mut coef = Vec::new();
        let mut m = 0usize;
        let mut peak: f64 = 0.0;
        loop {
            coef.push(b);
            let mag = b.norm() * q.powi(m as i32);
            peak = peak.max(mag);
            b /= (m as f64 + 1.0) * C64::new(m as f64 + 1.0, k);
            m += 1;
            if (m as f64) > q.sqrt() && b.norm() * q.powi(m as i32) < 1e-18 * peak.max(1e-300) {
                break;
            }
            if m > 400 {
                break;
            }
        }
        let sh = if k * PI > 40.0 { k * PI - 2f64.ln() } else { (k * PI).sinh().ln() };
        let log_norm = 0.5 * (2.0 * k).ln() + 0.5 * sh - PI.ln() - 0.5 * PI * k;
        Self { k, coef, z_switch, z_cut, log_norm }
    }

    /// phi(k, z) for z > 0.
    pub fn eval(&self, z: f64) -> f64 {
        if self.k == 0.0 || z >= self.z_cut {
            return 0.0;
        }
        if z <= self.z_switch {
            let q = 0.25 * z * z;
            let mut s = C64::new(0.0, 0.0);
            let mut p = 1.0;
            let mut best = 0.0f64;
            for c in &self.coef {
                let term = c * p;
                s += term;
                best = best.max(term.norm());
                if term.norm() < 1e-18 * best && p > 1.0 {
                    break;
                }
                p *= q;
            }
            let ph = C64::from_polar(1.0, self.k * (0.5 * z).ln());
            -(ph * s).im
        } else {
            // z > k here, so K_{ik} is monotone and Steed's continued fraction is accurate
            let ks = bessel_k_cf2_scaled(C64::new(0.0, self.k), z).re;
            ks * (self.log_norm + 0.5 * PI * self.k - z).exp()
        }
    }
}

/// phi(k, z) for a single pair.
pub fn kl_kernel(k: f64, z: f64) -> f64 {
    KernelRow::new(k).eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel::{bessel_k_ik, bessel_k_quadrature};

    #[test]
    fn matches_direct_normalisation() {
        for &(k, z) in &[(0.3, 0.01), (1.0, 0.5), (2.0, 3.0), (5.0, 2.0), (5.0, 9.5), (12.0, 30.0)] {
            let direct = (2.0 * k * (k * PI).sinh()).sqrt() / PI * bessel_k_ik(k, z).unwrap();
            let v = kl_kernel(k, z);
            assert!((v - direct).abs() < 1e-11 * direct.abs().max(1e-3), "{k} {z}: {v} {direct}");
        }
    }

    #[test]
    fn continuous_across_switch() {
        let k = 20.0;
        let row = KernelRow::new(k);
        let zs = row.z_switch;
        let a = row.eval(zs * (1.0 - 1e-12));
        let b = (2.0 * k * (k * PI).sinh()).sqrt() / PI * bessel_k_quadrature(k, zs);
        assert!((a - b).abs() < 1e-10, "{a} {b}");
    }

    #[test]
    fn small_argument_is_bounded_and_odd_free() {
        // phi ~ sqrt(2/pi) sin(k log(z/2) - arg Gamma(1+ik)) for tiny z
        let k = 3.0;
        let z: f64 = 1e-6;
        let arg = ln_gamma_complex(C64::new(1.0, k)).unwrap().im;
        let want = -(2.0 / PI).sqrt() * (k * (0.5 * z).ln() - arg).sin();
        assert!((kl_kernel(k, z) - want).abs() < 1e-10);
        assert_eq!(kl_kernel(0.0, 1.0), 0.0);
    }
}
