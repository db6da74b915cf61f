//! Quadrature helpers.

use crate::C64;
use std::f64::consts::PI;

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierC {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierC {
    pub fn add(&mut self, v: C64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        Self { x, w }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = Neumaier::default();
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for (xi, wi) in self.x.iter().zip(&self.w) {
                acc.add(wi * 0.5 * h * f(c + 0.5 * h * xi));
            }
        }
        acc.value()
    }

    /// Nodes and weights of the composite rule.
    pub fn nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.x.len());
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for (xi, wi) in self.x.iter().zip(&self.w) {
                out.push((c + 0.5 * h * xi, wi * 0.5 * h));
            }
        }
        out
    }
}

/// Trapezoid weights on an equispaced grid with Gregory end corrections of
/// order 4 (exact for cubics); falls back to plain trapezoid for short grids.
pub fn gregory_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n < 8 {
        if n > 0 {
            w[0] *= 0.5;
            w[n - 1] *= 0.5;
        }
        return w;
    }
    let c = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    for i in 0..3 {
        w[i] = h * c[i];
        w[n - 1 - i] = h * c[i];
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials() {
        let g = GaussRule::new(8);
        let v = g.integrate(0.0, 2.0, 1, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
        let v = g.integrate(0.0, PI, 4, f64::sin);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut s = Neumaier::default();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn gregory_exact_for_cubic() {
        let n = 21;
        let h = 1.0 / (n - 1) as f64;
        let w = gregory_weights(n, h);
        let v: f64 = (0..n).map(|i| w[i] * (i as f64 * h).powi(3)).sum();
        assert!((v - 0.25).abs() < 1e-14);
    }
}
