use crate::error::{arg, Result};
use crate::kl::hn::{partial_fourier, HnFunction};
use crate::kl::RadialGrid;
use crate::C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Samples of (R f)(s, x) on s_i = s0 + i h and the periodic x-lattice; `values[i * nx + j]`.
/// The s-grid is the reversed t-grid of the source, so y = e^{-s} falls on radial nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadonImage {
    pub s0: f64,
    pub h: f64,
    pub len: usize,
    pub period: f64,
    pub nx: usize,
    pub values: Vec<C64>,
}

impl RadonImage {
    pub(crate) fn for_source(grid: &RadialGrid, period: f64, nx: usize) -> Self {
        let s0 = -grid.t(grid.len - 1);
        Self { s0, h: grid.h, len: grid.len, period, nx, values: vec![C64::new(0.0, 0.0); grid.len * nx] }
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.h
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.period + j as f64 * self.period / self.nx as f64
    }

    /// L^2(ds dx) norm.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.h * self.period / self.nx as f64).sqrt()
    }

    /// Lattice Fourier modes (same normalisation as the source transform), FFT slot order;
    /// `modes[m][i]` is the coefficient at s_i.
    pub fn modes(&self) -> Vec<Vec<C64>> {
        let nx = self.nx;
        let fft = FftPlanner::new().plan_fft_forward(nx);
        let scale = self.period / nx as f64 / (2.0 * PI).sqrt();
        let mut out = vec![vec![C64::new(0.0, 0.0); self.len]; nx];
        let mut buf = vec![C64::new(0.0, 0.0); nx];
        for i in 0..self.len {
            buf.copy_from_slice(&self.values[i * nx..(i + 1) * nx]);
            fft.process(&mut buf);
            for m in 0..nx {
                let sg = if signed(m, nx) % 2 == 0 { 1.0 } else { -1.0 };
                out[m][i] = buf[m] * (scale * sg);
            }
        }
        out
    }

    /// Norm of the part orthogonal to the xi = 0 mode.
    pub fn norm_nonzero_modes(&self) -> f64 {
        let modes = self.modes();
        let mut s = 0.0;
        for row in modes.iter().skip(1) {
            s += row.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        (s * self.h * 2.0 * PI / self.period).sqrt()
    }

    pub(crate) fn set_modes(&mut self, modes: &[Vec<C64>]) {
        let nx = self.nx;
        let fft = FftPlanner::new().plan_fft_inverse(nx);
        let scale = (2.0 * PI).sqrt() / self.period;
        let mut buf = vec![C64::new(0.0, 0.0); nx];
        for i in 0..self.len {
            for m in 0..nx {
                let sg = if signed(m, nx) % 2 == 0 { 1.0 } else { -1.0 };
                buf[m] = modes[m][i] * (scale * sg);
            }
            fft.process(&mut buf);
            self.values[i * nx..(i + 1) * nx].copy_from_slice(&buf);
        }
    }

    /// Relative L^2 distance to another image on the same grid.
    pub fn rel_diff(&self, other: &RadonImage) -> Result<f64> {
        if self.len != other.len || self.nx != other.nx {
            return arg("Radon images live on different grids");
        }
        let mut d = self.clone();
        for (a, b) in d.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
        Ok(d.norm() / other.norm().max(1e-300))
    }
}

pub(crate) fn signed(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Partial Fourier modes of the source together with their frequencies.
pub(crate) fn source_modes(f: &HnFunction) -> Vec<(usize, f64, Vec<C64>)> {
    let modes = partial_fourier(f);
    let total = f.norm().max(1e-300);
    let c = (2.0 * PI / f.period).sqrt();
    modes
        .into_iter()
        .enumerate()
        .filter(|(_, row)| c * f.grid.norm(row) > crate::kl::hn::MODE_THRESHOLD * total)
        .map(|(m, row)| (m, f.xi(m), row))
        .collect()
}
