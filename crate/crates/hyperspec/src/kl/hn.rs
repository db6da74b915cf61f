//! Fourier transform on H^2 = R x R_+ built from the partial Fourier transform in x
//! (periodic lattice of period L) and a KL transform in y for every frequency.

use super::grid::{KGrid, RadialGrid};
use super::kernel::KernelRow;
use super::transform::KlPlan;
use crate::error::{arg, Result};
use crate::C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative mode energy below which a frequency is not transformed.
pub const MODE_THRESHOLD: f64 = 1e-14;

/// Samples f(x_j, y_i) on x_j = -L/2 + j L/nx and the radial grid; `values[i * nx + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HnFunction {
    pub grid: RadialGrid,
    pub period: f64,
    pub nx: usize,
    pub values: Vec<C64>,
}

impl HnFunction {
    pub fn zeros(grid: &RadialGrid, period: f64, nx: usize) -> Result<Self> {
        if grid.n != 2 {
            return arg(format!("the H^n transform is implemented for n = 2, got n = {}", grid.n));
        }
        if !(period > 0.0) || nx < 4 || nx % 2 != 0 {
            return arg("need period > 0 and an even nx >= 4");
        }
        Ok(Self { grid: grid.clone(), period, nx, values: vec![C64::new(0.0, 0.0); nx * grid.len] })
    }

    pub fn from_fn<F: Fn(f64, f64) -> C64>(grid: &RadialGrid, period: f64, nx: usize, f: F) -> Result<Self> {
        let mut out = Self::zeros(grid, period, nx)?;
        for i in 0..grid.len {
            let y = grid.y(i);
            for j in 0..nx {
                out.values[i * nx + j] = f(out.x(j), y);
            }
        }
        Ok(out)
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.period + j as f64 * self.period / self.nx as f64
    }

    /// Signed frequency of FFT slot m.
    pub fn xi(&self, m: usize) -> f64 {
        2.0 * PI * signed(m, self.nx) as f64 / self.period
    }

    pub fn norm(&self) -> f64 {
        let dx = self.period / self.nx as f64;
        let mut s = 0.0;
        for i in 0..self.grid.len {
            let w = self.grid.u_factor(i).powi(2);
            for j in 0..self.nx {
                s += self.values[i * self.nx + j].norm_sqr() * w;
            }
        }
        (s * dx * self.grid.h).sqrt()
    }

    /// Norm of the part orthogonal to the xi = 0 mode.
    pub fn norm_nonzero_modes(&self) -> f64 {
        let modes = partial_fourier(self);
        let mut s = 0.0;
        for (m, row) in modes.iter().enumerate().skip(1) {
            let _ = m;
            s += self.grid.norm(row).powi(2);
        }
        (s * 2.0 * PI / self.period).sqrt()
    }
}

fn signed(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// fhat_m(y_i) = (2 pi)^{-1/2} (L/nx) sum_j e^{-i xi_m x_j} f(x_j, y_i), slots in FFT order.
pub fn partial_fourier(f: &HnFunction) -> Vec<Vec<C64>> {
    let nx = f.nx;
    let fft = FftPlanner::new().plan_fft_forward(nx);
    let scale = f.period / nx as f64 / (2.0 * PI).sqrt();
    let mut modes = vec![vec![C64::new(0.0, 0.0); f.grid.len]; nx];
    let mut buf = vec![C64::new(0.0, 0.0); nx];
    for i in 0..f.grid.len {
        buf.copy_from_slice(&f.values[i * nx..(i + 1) * nx]);
        fft.process(&mut buf);
        for m in 0..nx {
            let sign = if signed(m, nx) % 2 == 0 { 1.0 } else { -1.0 };
            modes[m][i] = buf[m] * (scale * sign);
        }
    }
    modes
}

/// Inverse of [`partial_fourier`].
pub fn partial_fourier_inverse(modes: &[Vec<C64>], grid: &RadialGrid, period: f64) -> Result<HnFunction> {
    let nx = modes.len();
    let mut out = HnFunction::zeros(grid, period, nx)?;
    let fft = FftPlanner::new().plan_fft_inverse(nx);
    let scale = (2.0 * PI).sqrt() / period;
    let mut buf = vec![C64::new(0.0, 0.0); nx];
    for i in 0..grid.len {
        for m in 0..nx {
            let sign = if signed(m, nx) % 2 == 0 { 1.0 } else { -1.0 };
            buf[m] = modes[m][i] * (scale * sign);
        }
        fft.process(&mut buf);
        out.values[i * nx..(i + 1) * nx].copy_from_slice(&buf);
    }
    Ok(out)
}

fn active_modes(f: &HnFunction, modes: &[Vec<C64>]) -> Vec<usize> {
    let total = f.norm().max(1e-300);
    let c = (2.0 * PI / f.period).sqrt();
    (1..f.nx).filter(|&m| c * f.grid.norm(&modes[m]) > MODE_THRESHOLD * total).collect()
}

/// Per-frequency KL coefficients C_m(k_j) of all nonzero, non-negligible modes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HnSpectrum {
    pub period: f64,
    pub nx: usize,
    pub kgrid: KGrid,
    /// (FFT slot, xi, coefficients on the k-grid)
    pub modes: Vec<(usize, f64, Vec<C64>)>,
}

impl HnSpectrum {
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for (_, _, c) in &self.modes {
            s += c.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        (s * self.kgrid.dk * 2.0 * PI / self.period).sqrt()
    }

    /// F^{(+-)}(k_j) as a function on the x-lattice.
    pub fn evaluate(&self, j: usize, sign: i32) -> Result<Vec<C64>> {
        if j >= self.kgrid.len {
            return arg("k index out of range");
        }
        let k = self.kgrid.k(j);
        let mut slots = vec![C64::new(0.0, 0.0); self.nx];
        for (m, xi, c) in &self.modes {
            slots[*m] = phase(*xi, k, sign) * c[j];
        }
        Ok(lattice_synthesis(&slots, self.period))
    }

    /// Inverse transform back onto `grid`.
    pub fn inverse(&self, grid: &RadialGrid) -> Result<HnFunction> {
        let mut modes = vec![vec![C64::new(0.0, 0.0); grid.len]; self.nx];
        let rows: Vec<(usize, Vec<C64>)> = self
            .modes
            .par_iter()
            .map(|(m, xi, c)| {
                let plan = KlPlan::new(grid, &self.kgrid, xi.abs())?;
                Ok((*m, grid.from_u(&plan.inverse_u(c)?)))
            })
            .collect::<Result<_>>()?;
        for (m, r) in rows {
            modes[m] = r;
        }
        partial_fourier_inverse(&modes, grid, self.period)
    }
}

/// (|xi|/2)^{-+ik}
fn phase(xi: f64, k: f64, sign: i32) -> C64 {
    let s = if sign >= 0 { -1.0 } else { 1.0 };
    C64::from_polar(1.0, s * k * (0.5 * xi.abs()).ln())
}

/// (2 pi)^{-1/2} sum_m (2 pi / L) e^{i xi_m x_j} c_m.
fn lattice_synthesis(slots: &[C64], period: f64) -> Vec<C64> {
    let nx = slots.len();
    let fft = FftPlanner::new().plan_fft_inverse(nx);
    let scale = (2.0 * PI).sqrt() / period;
    let mut buf: Vec<C64> = slots
        .iter()
        .enumerate()
        .map(|(m, v)| v * scale * if signed(m, nx) % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    fft.process(&mut buf);
    buf
}

/// All KL coefficients of the nonzero modes.
pub fn hn_spectrum(f: &HnFunction, kgrid: &KGrid) -> Result<HnSpectrum> {
    let modes = partial_fourier(f);
    let act = active_modes(f, &modes);
    let out: Vec<(usize, f64, Vec<C64>)> = act
        .par_iter()
        .map(|&m| {
            let xi = f.xi(m);
            let plan = KlPlan::new(&f.grid, kgrid, xi.abs())?;
            Ok((m, xi, plan.forward_u(&f.grid.to_u(&modes[m]))?))
        })
        .collect::<Result<_>>()?;
    Ok(HnSpectrum { period: f.period, nx: f.nx, kgrid: *kgrid, modes: out })
}

/// F^{(+-)}_0 f at a single k, as a function on the x-lattice.
pub fn hn_fourier_forward(f: &HnFunction, k: f64, sign: i32) -> Result<Vec<C64>> {
    if !(k > 0.0) {
        return arg(format!("hn transform needs k > 0, got {k}"));
    }
    let modes = partial_fourier(f);
    let row = KernelRow::new(k);
    let mut slots = vec![C64::new(0.0, 0.0); f.nx];
    for m in active_modes(f, &modes) {
        let xi = f.xi(m);
        let w = f.grid.to_u(&modes[m]);
        let mut s = C64::new(0.0, 0.0);
        for (i, v) in w.iter().enumerate() {
            s += v * row.eval(xi.abs() * f.grid.y(i));
        }
        slots[m] = phase(xi, k, sign) * s * f.grid.h;
    }
    Ok(lattice_synthesis(&slots, f.period))
}

/// Adjoint of f -> F^{(+-)}_0 f(k): a superposition of generalised eigenfunctions
/// e^{i xi x} y^{1/2} K_{ik}(|xi| y) weighted by the lattice Fourier coefficients of `phi`.
pub fn hn_fourier_adjoint(phi: &[C64], k: f64, sign: i32, grid: &RadialGrid, period: f64) -> Result<HnFunction> {
    let nx = phi.len();
    let mut out = HnFunction::zeros(grid, period, nx)?;
    let fft = FftPlanner::new().plan_fft_forward(nx);
    let mut buf = phi.to_vec();
    fft.process(&mut buf);
    let row = KernelRow::new(k);
    let scale = period / nx as f64 / (2.0 * PI).sqrt();
    let mut modes = vec![vec![C64::new(0.0, 0.0); grid.len]; nx];
    for m in 1..nx {
        let xi = out.xi(m);
        let sg = if signed(m, nx) % 2 == 0 { 1.0 } else { -1.0 };
        let coef = buf[m] * (scale * sg) * phase(xi, k, sign).conj();
        if coef.norm() == 0.0 {
            continue;
        }
        for i in 0..grid.len {
            modes[m][i] = coef * row.eval(xi.abs() * grid.y(i)) / grid.u_factor(i);
        }
    }
    out = partial_fourier_inverse(&modes, grid, period)?;
    Ok(out)
}

/// Relative residual of (Delta_g + 1/4 + k^2) u by finite differences (per mode in t).
pub fn helmholtz_residual(u: &HnFunction, k: f64) -> f64 {
    let modes = partial_fourier(u);
    let mut num = 0.0;
    let mut den = 0.0;
    for (m, row) in modes.iter().enumerate() {
        let xi = u.xi(m);
        let l = super::grid::apply_l0_fd(row, xi.abs().max(0.0), &u.grid).expect("grid matches");
        let mut r: Vec<C64> = l.iter().zip(row).map(|(a, b)| a - k * k * b).collect();
        for i in [0, 1, u.grid.len - 2, u.grid.len - 1] {
            r[i] = C64::new(0.0, 0.0);
        }
        let scaled: Vec<C64> = row.iter().map(|v| v * k * k).collect();
        num += u.grid.norm(&r).powi(2);
        den += u.grid.norm(&scaled).powi(2);
    }
    (num / den.max(1e-300)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (RadialGrid, KGrid) {
        (RadialGrid::new(2, 1e-4, 1e4, 512).unwrap(), KGrid::new(40.0, 512).unwrap())
    }

    #[test]
    fn partial_fourier_against_direct_sum() {
        let grid = RadialGrid::new(2, 1e-2, 1e2, 64).unwrap();
        let f = HnFunction::from_fn(&grid, 8.0, 16, |x, y| C64::new((-x * x).exp() * y, x.sin() / (1.0 + y))).unwrap();
        let modes = partial_fourier(&f);
        for m in [0usize, 3, 13] {
            for i in [0usize, 30] {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..16 {
                    s += C64::from_polar(1.0, -f.xi(m) * f.x(j)) * f.values[i * 16 + j];
                }
                s *= 0.5 / (2.0 * PI).sqrt();
                assert!((s - modes[m][i]).norm() < 1e-13);
            }
        }
        let back = partial_fourier_inverse(&modes, &grid, 8.0).unwrap();
        for (a, b) in back.values.iter().zip(&f.values) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn parseval_and_inverse() {
        let (grid, kg) = setup();
        let f = HnFunction::from_fn(&grid, 32.0, 256, |x, y| {
            let t = y.ln();
            C64::new((-0.5 * x * x).exp() * x * (-(t * t)).exp(), 0.0)
        })
        .unwrap();
        let sp = hn_spectrum(&f, &kg).unwrap();
        let n = f.norm_nonzero_modes();
        assert!((sp.norm() - n).abs() / n < 1e-3, "{} {}", sp.norm(), n);
        let back = sp.inverse(&grid).unwrap();
        let mut d = back.clone();
        for (a, b) in d.values.iter_mut().zip(&f.values) {
            *a -= b;
        }
        assert!(d.norm() / f.norm() < 1e-3);
    }

    #[test]
    fn product_input_and_single_k_agree() {
        let (grid, kg) = setup();
        let xi0 = 2.0 * PI * 5.0 / 32.0;
        let g = |y: f64| (-(y.ln() - 0.5).powi(2)).exp();
        let f = HnFunction::from_fn(&grid, 32.0, 64, |x, y| C64::from_polar(g(y), xi0 * x)).unwrap();
        let k = kg.k(100);
        let plan = KlPlan::new(&grid, &KGrid { dk: k, len: 1 }, xi0).unwrap();
        let cg = plan.forward(&grid.sample_real(g)).unwrap().values[0];
        for sign in [1, -1] {
            let v = hn_fourier_forward(&f, k, sign).unwrap();
            for j in [0usize, 17, 40] {
                let x = f.x(j);
                let want = phase(xi0, k, sign) * C64::from_polar(1.0, xi0 * x) * cg;
                assert!((v[j] - want).norm() < 1e-10 * (1.0 + want.norm()), "{sign} {j}");
            }
        }
        let sp = hn_spectrum(&f, &kg).unwrap();
        let v = sp.evaluate(99, 1).unwrap();
        let w = hn_fourier_forward(&f, kg.k(99), 1).unwrap();
        for j in 0..64 {
            assert!((v[j] - w[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_solves_helmholtz() {
        let grid = RadialGrid::new(2, 1e-3, 1e3, 2048).unwrap();
        let nx = 32;
        let phi: Vec<C64> = (0..nx).map(|j| C64::new((-(j as f64 - 16.0).powi(2) / 8.0).exp(), 0.0)).collect();
        let u = hn_fourier_adjoint(&phi, 2.5, 1, &grid, 16.0).unwrap();
        let r = helmholtz_residual(&u, 2.5);
        assert!(r < 1e-4, "{r}");
    }
}
