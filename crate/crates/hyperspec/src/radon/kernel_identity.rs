//! Pairing check of the distributional identity
//!
//! (2 pi)^{-1} int_R e^{ikt} (-ik / Gamma(1-ik)) K_{ik}(y) dk
//!     = e^{-t} delta(2e^{-t} - y) - (1/2) e^{-t} y theta(2e^{-t} - y) J1(w)/w,  w^2 = 2e^{-t} y - y^2,
//!
//! tested against smooth compactly supported psi. The left side is computed as
//! pi^{-1/2} Re int_0^inf e^{ikt} omega(k) M(k) chi(k) dk with M(k) = int Phi(k, y) psi(y) dy.

use super::transform::omega;
use crate::error::{arg, Result};
use crate::kl::KernelRow;
use crate::special::j1_over_x;
use crate::special::quad::GaussRule;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// A test function on (0, inf) with support inside [lo, hi].
pub struct TestFunction<'a> {
    pub lo: f64,
    pub hi: f64,
    pub f: &'a (dyn Fn(f64) -> f64 + Sync),
}

/// exp(1 - 1/(1 - r^2)) in log y, r = (log y - center)/width.
pub fn log_bump(y: f64, center: f64, width: f64) -> f64 {
    let r = (y.ln() - center) / width;
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Smooth cutoff: 1 on [0, a], 0 beyond b.
pub fn smooth_cutoff(k: f64, a: f64, b: f64) -> f64 {
    if k <= a {
        return 1.0;
    }
    if k >= b {
        return 0.0;
    }
    let r = (k - a) / (b - a);
    let e = |x: f64| (-1.0 / x).exp();
    e(1.0 - r) / (e(1.0 - r) + e(r))
}

/// Spectral side prepared once per test function.
pub struct KernelPairing {
    ks: Vec<(f64, f64)>,
    // omega(k) M(k) w_k
    weights: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelIdentityResult {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs - rhs| / scale (absolute when scale = 0)
    pub residual: f64,
    pub scale: f64,
    /// |lhs(k_max) - lhs(k_max / 2)| / scale
    pub cutoff_error: f64,
    /// residual against the right side with doubled constants (as sometimes printed)
    pub residual_doubled_rhs: f64,
}

impl KernelPairing {
    /// k_max is where the cutoff starts; it reaches zero at 2 k_max.
    pub fn new(psi: &TestFunction, k_max: f64) -> Result<Self> {
        if !(psi.lo > 0.0 && psi.hi > psi.lo) {
            return arg("test function support must be [lo, hi] with 0 < lo < hi");
        }
        if !(k_max > 0.0) {
            return arg("k_max must be positive");
        }
        let rule = GaussRule::new(16);
        let (a, b) = (psi.lo.ln(), psi.hi.ln());
        let tau = rule.nodes(a, b, ((b - a) / 0.04).ceil() as usize);
        let samples: Vec<(f64, f64)> = tau.iter().map(|&(t, w)| (t.exp(), w * t.exp() * (psi.f)(t.exp()))).collect();
        let ks = rule.nodes(0.0, 2.0 * k_max, (2.0 * k_max).ceil() as usize);
        let weights = ks
            .par_iter()
            .map(|&(k, wk)| {
                let row = KernelRow::new(k);
                let m: f64 = samples.iter().map(|&(y, w)| w * row.eval(y)).sum();
                omega(k) * (m * wk * smooth_cutoff(k, k_max, 2.0 * k_max))
            })
            .collect();
        Ok(Self { ks, weights })
    }

    /// Left side at t.
    pub fn lhs(&self, t: f64) -> f64 {
        self.lhs_phase(|k| C64::from_polar(1.0, k * t))
    }

    /// Left side in the variable s = t - log 2: phases e^{iks} e^{ik log 2}.
    pub fn lhs_s(&self, s: f64) -> f64 {
        self.lhs_phase(|k| C64::from_polar(1.0, k * s) * C64::from_polar(1.0, k * LN_2))
    }

    fn lhs_phase(&self, phase: impl Fn(f64) -> C64) -> f64 {
        let mut acc = 0.0;
        for (&(k, _), w) in self.ks.iter().zip(&self.weights) {
            acc += (phase(k) * w).re;
        }
        acc / PI.sqrt()
    }
}

/// Right side (value, scale) at e^{-t} = et.
fn rhs(psi: &TestFunction, et: f64) -> (f64, f64) {
    let top = 2.0 * et;
    let point = et * (psi.f)(top);
    let (lo, hi) = (psi.lo, psi.hi.min(top));
    if lo >= hi {
        return (point, point.abs());
    }
    let rule = GaussRule::new(16);
    let mut acc = 0.0;
    let mut mag = 0.0;
    for (y, w) in rule.nodes(lo, hi, 64) {
        let q = (top * y - y * y).max(0.0);
        let v = w * y * j1_over_x(q.sqrt()) * (psi.f)(y);
        acc += v;
        mag += v.abs();
    }
    (point - 0.5 * et * acc, point.abs() + 0.5 * et * mag)
}

fn assemble(t: f64, lhs: f64, lhs_coarse: f64, psi: &TestFunction, et: f64) -> KernelIdentityResult {
    let (r, scale) = rhs(psi, et);
    // absolute residuals when the right side vanishes identically (support case)
    let sc = if scale > 0.0 { scale } else { 1.0 };
    KernelIdentityResult {
        t,
        lhs,
        rhs: r,
        residual: (lhs - r).abs() / sc,
        scale,
        cutoff_error: (lhs - lhs_coarse).abs() / sc,
        residual_doubled_rhs: (lhs - 2.0 * r).abs() / (2.0 * sc),
    }
}

/// Residuals at each t with the cutoff starting at k_max; the cutoff error compares with k_max / 2.
pub fn kernel_identity_check(psi: &TestFunction, ts: &[f64], k_max: f64) -> Result<Vec<KernelIdentityResult>> {
    let coarse = KernelPairing::new(psi, 0.5 * k_max)?;
    let fine = KernelPairing::new(psi, k_max)?;
    Ok(ts.iter().map(|&t| assemble(t, fine.lhs(t), coarse.lhs(t), psi, (-t).exp())).collect())
}

/// Same check parametrised by s = t - log 2.
pub fn kernel_identity_check_s(psi: &TestFunction, ss: &[f64], k_max: f64) -> Result<Vec<KernelIdentityResult>> {
    let coarse = KernelPairing::new(psi, 0.5 * k_max)?;
    let fine = KernelPairing::new(psi, k_max)?;
    Ok(ss.iter().map(|&s| assemble(s + LN_2, fine.lhs_s(s), coarse.lhs_s(s), psi, 0.5 * (-s).exp())).collect())
}
