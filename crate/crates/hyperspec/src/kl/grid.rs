use crate::error::{arg, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Log-equispaced nodes y_i = exp(t0 + i h) carrying the measure dy/y^n.
///
/// Functions are stored as raw samples f(y_i). Internally the transforms work with
/// (Uf)(t) = e^{-(n-1)t/2} f(e^t), which maps L^2(dy/y^n) unitarily onto L^2(dt).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub n: usize,
    pub t0: f64,
    pub h: f64,
    pub len: usize,
}

impl RadialGrid {
    pub fn new(n: usize, y_min: f64, y_max: f64, nodes: usize) -> Result<Self> {
        if n < 2 {
            return arg("dimension n must be >= 2");
        }
        if !(y_min > 0.0 && y_max > y_min) {
            return arg(format!("need 0 < y_min < y_max, got [{y_min}, {y_max}]"));
        }
        if nodes < 64 {
            return arg(format!("radial grid needs >= 64 nodes, got {nodes}"));
        }
        let t0 = y_min.ln();
        let h = (y_max.ln() - t0) / (nodes - 1) as f64;
        Ok(Self { n, t0, h, len: nodes })
    }

    /// n = 2, y in [1e-4, 1e4], 2048 nodes.
    pub fn standard() -> Self {
        Self::new(2, 1e-4, 1e4, 2048).expect("valid default grid")
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    pub fn y(&self, i: usize) -> f64 {
        self.t(i).exp()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.t(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.y(i)).collect()
    }

    fn half(&self) -> f64 {
        0.5 * (self.n as f64 - 1.0)
    }

    /// e^{-(n-1)t/2} at node i.
    pub fn u_factor(&self, i: usize) -> f64 {
        (-self.half() * self.t(i)).exp()
    }

    pub fn to_u(&self, f: &[C64]) -> Vec<C64> {
        f.iter().enumerate().map(|(i, v)| v * self.u_factor(i)).collect()
    }

    pub fn from_u(&self, w: &[C64]) -> Vec<C64> {
        w.iter().enumerate().map(|(i, v)| v / self.u_factor(i)).collect()
    }

    /// Samples of a function of y.
    pub fn sample<F: Fn(f64) -> C64>(&self, f: F) -> Vec<C64> {
        (0..self.len).map(|i| f(self.y(i))).collect()
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> Vec<C64> {
        (0..self.len).map(|i| C64::new(f(self.y(i)), 0.0)).collect()
    }

    /// L^2(dy/y^n) inner product (trapezoid in t; integrands vanish at the ends).
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..self.len {
            let w = self.u_factor(i);
            s += f[i].conj() * g[i] * (w * w);
        }
        s * self.h
    }

    pub fn norm(&self, f: &[C64]) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }

    pub(crate) fn check(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.len {
            return arg(format!("sample length {} does not match grid length {}", f.len(), self.len));
        }
        Ok(())
    }
}

/// Uniform spectral grid k_j = (j + 1) dk, j = 0..len. The trapezoid rule on this grid
/// includes the point k = 0 with weight dk/2, where every KL coefficient vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub dk: f64,
    pub len: usize,
}

impl KGrid {
    pub fn new(k_max: f64, len: usize) -> Result<Self> {
        if !(k_max > 0.0) || len < 2 {
            return arg("k-grid needs k_max > 0 and at least two nodes");
        }
        Ok(Self { dk: k_max / len as f64, len })
    }

    /// k in (0, 40], 2048 nodes.
    pub fn standard() -> Self {
        Self::new(40.0, 2048).expect("valid default k-grid")
    }

    pub fn k(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dk
    }

    pub fn ks(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.k(j)).collect()
    }

    pub fn k_max(&self) -> f64 {
        self.k(self.len - 1)
    }
}

/// Fourth-order central differences in t on interior nodes (zero within two nodes of the ends).
pub(crate) fn d1_d2(v: &[C64], h: f64) -> (Vec<C64>, Vec<C64>) {
    let n = v.len();
    let mut d1 = vec![C64::new(0.0, 0.0); n];
    let mut d2 = vec![C64::new(0.0, 0.0); n];
    for i in 2..n.saturating_sub(2) {
        d1[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
        d2[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h * h);
    }
    (d1, d2)
}

/// L0(zeta) = y^2(-d_y^2 + zeta^2) + (n-2) y d_y - (n-1)^2/4 by finite differences,
/// written in t = log y as -f_tt + (n-1) f_t + zeta^2 e^{2t} f - (n-1)^2/4 f.
pub fn apply_l0_fd(f: &[C64], zeta: f64, grid: &RadialGrid) -> Result<Vec<C64>> {
    grid.check(f)?;
    let (d1, d2) = d1_d2(f, grid.h);
    let m = grid.n as f64 - 1.0;
    let mut out = vec![C64::new(0.0, 0.0); f.len()];
    for i in 2..f.len().saturating_sub(2) {
        let e2 = (2.0 * grid.t(i)).exp();
        out[i] = -d2[i] + m * d1[i] + (zeta * zeta * e2 - 0.25 * m * m) * f[i];
    }
    Ok(out)
}
