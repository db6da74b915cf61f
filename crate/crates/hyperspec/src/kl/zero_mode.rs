//! Transform for the xi = 0 mode: after the unitary map U the operator
//! L00 = -(y d_y)^2 + (n-1) y d_y - (n-1)^2/4 becomes -d_t^2, diagonalised by e^{+-ikt}.

use super::grid::{KGrid, RadialGrid};
use crate::error::{arg, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Coefficients F^+ and F^- on k_j = j dk, j = 0..=len (k = 0 included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeCoefficients {
    pub dk: f64,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

impl ZeroModeCoefficients {
    pub fn k(&self, j: usize) -> f64 {
        j as f64 * self.dk
    }

    fn weight(&self, j: usize) -> f64 {
        if j == 0 {
            0.5 * self.dk
        } else {
            self.dk
        }
    }

    /// (int_0^inf |F^+|^2 + |F^-|^2 dk)^{1/2}
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.plus.len() {
            s += self.weight(j) * (self.plus[j].norm_sqr() + self.minus[j].norm_sqr());
        }
        s.sqrt()
    }
}

/// F^{+-}(k) = (2 pi)^{-1/2} int e^{+-ikt} (U psi)(t) dt.
pub fn zero_mode_forward(psi: &[C64], grid: &RadialGrid, kgrid: &KGrid) -> Result<ZeroModeCoefficients> {
    grid.check(psi)?;
    let w = grid.to_u(psi);
    let ts = grid.ts();
    let c = grid.h / (2.0 * PI).sqrt();
    let mut plus = Vec::with_capacity(kgrid.len + 1);
    let mut minus = Vec::with_capacity(kgrid.len + 1);
    for j in 0..=kgrid.len {
        let k = j as f64 * kgrid.dk;
        let mut p = C64::new(0.0, 0.0);
        let mut m = C64::new(0.0, 0.0);
        for (t, v) in ts.iter().zip(&w) {
            let e = C64::from_polar(1.0, k * t);
            p += e * v;
            m += e.conj() * v;
        }
        plus.push(p * c);
        minus.push(m * c);
    }
    Ok(ZeroModeCoefficients { dk: kgrid.dk, plus, minus })
}

/// psi = U^{-1} (2 pi)^{-1/2} int_0^inf (e^{-ikt} F^+ + e^{ikt} F^-) dk.
pub fn zero_mode_inverse(c: &ZeroModeCoefficients, grid: &RadialGrid) -> Result<Vec<C64>> {
    if c.plus.len() != c.minus.len() || c.plus.is_empty() {
        return arg("zero-mode coefficient arrays must be non-empty and of equal length");
    }
    let s = 1.0 / (2.0 * PI).sqrt();
    let w: Vec<C64> = (0..grid.len)
        .map(|i| {
            let t = grid.t(i);
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..c.plus.len() {
                let e = C64::from_polar(1.0, c.k(j) * t);
                acc += c.weight(j) * (e.conj() * c.plus[j] + e * c.minus[j]);
            }
            acc * s
        })
        .collect();
    Ok(grid.from_u(&w))
}

/// L00 psi by fourth-order finite differences in t.
pub fn apply_l00_fd(psi: &[C64], grid: &RadialGrid) -> Result<Vec<C64>> {
    super::grid::apply_l0_fd(psi, 0.0, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_round_trip_and_spectrum() {
        let grid = RadialGrid::new(3, 1e-4, 1e4, 1024).unwrap();
        let kg = KGrid::new(20.0, 512).unwrap();
        let psi = grid.sample(|y| {
            let t = y.ln();
            C64::new((-t * t).exp(), 0.3 * t * (-t * t).exp())
        });
        let c = zero_mode_forward(&psi, &grid, &kg).unwrap();
        let n = grid.norm(&psi);
        assert!((c.norm() - n).abs() / n < 1e-10);
        let back = zero_mode_inverse(&c, &grid).unwrap();
        let d: Vec<C64> = back.iter().zip(&psi).map(|(a, b)| a - b).collect();
        assert!(grid.norm(&d) / n < 1e-8);

        let l = apply_l00_fd(&psi, &grid).unwrap();
        let cl = zero_mode_forward(&l, &grid, &kg).unwrap();
        for j in (0..=kg.len).step_by(37) {
            let k2 = c.k(j).powi(2);
            let want = c.plus[j] * k2;
            assert!((cl.plus[j] - want).norm() < 1e-4 * (1.0 + want.norm()), "{j}");
        }
    }
}
