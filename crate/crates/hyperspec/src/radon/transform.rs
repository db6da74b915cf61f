//! Modified Radon transform on H^2, mode by mode in the horizontal frequency xi.
//!
//! Spectral path: R(s) = (2 pi)^{-1/2} int_0^inf 2 Re(e^{i k sigma} omega(k)) F(k) dk with
//! sigma = s - log(|xi|/2), F the normalised KL coefficient of U fhat and
//! omega(k) = e^{i(arg Gamma(1+ik) - pi/2)}/sqrt 2.
//!
//! Explicit path: R(s) = 2^{-1/2} (U fhat)(-s)
//!   - 2^{-1/2} e^{-s} int_{-inf}^{-s} e^tau (|xi|^2/2) J1(w)/w (U fhat)(tau) dtau,
//! w = |xi| e^{tau/2} (e^{-s} - e^tau)^{1/2}.

use super::image::{source_modes, RadonImage};
use crate::error::Result;
use crate::kl::hn::HnFunction;
use crate::kl::{zero_mode_forward, KGrid, KlPlan};
use crate::special::gamma::ln_gamma_complex;
use crate::special::j1_over_x;
use crate::special::quad::gregory_weights;
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// omega(k) = -ik / (sqrt(pi) Gamma(1 - ik)) divided by the kernel normalisation.
pub fn omega(k: f64) -> C64 {
    let arg = ln_gamma_complex(C64::new(1.0, k)).expect("no pole").im;
    C64::from_polar(FRAC_1_SQRT_2, arg - 0.5 * PI)
}

fn zero_mode_spectral(row: &[C64], f: &HnFunction, kgrid: &KGrid, out: &RadonImage) -> Result<Vec<C64>> {
    let c = zero_mode_forward(row, &f.grid, kgrid)?;
    let norm = FRAC_1_SQRT_2 / (2.0 * PI).sqrt();
    Ok((0..out.len)
        .map(|i| {
            let s = out.s(i);
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..c.plus.len() {
                let w = if j == 0 { 0.5 * c.dk } else { c.dk };
                let e = C64::from_polar(1.0, c.k(j) * s);
                acc += w * (e * c.plus[j] + e.conj() * c.minus[j]);
            }
            acc * norm
        })
        .collect())
}

/// Spectral-path Radon transform.
pub fn radon_spectral(f: &HnFunction, kgrid: &KGrid) -> Result<RadonImage> {
    let mut out = RadonImage::for_source(&f.grid, f.period, f.nx);
    let src = source_modes(f);
    let om: Vec<C64> = kgrid.ks().iter().map(|&k| omega(k)).collect();
    let rows: Vec<(usize, Vec<C64>)> = src
        .par_iter()
        .map(|(m, xi, row)| {
            if *xi == 0.0 {
                return Ok((*m, zero_mode_spectral(row, f, kgrid, &out)?));
            }
            let plan = KlPlan::new(&f.grid, kgrid, xi.abs())?;
            let fk = plan.forward_u(&f.grid.to_u(row))?;
            let shift = (0.5 * xi.abs()).ln();
            let pref = 2.0 * kgrid.dk / (2.0 * PI).sqrt();
            let r: Vec<C64> = (0..out.len)
                .map(|i| {
                    let sigma = out.s(i) - shift;
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, fj) in fk.iter().enumerate() {
                        let e = C64::from_polar(1.0, kgrid.k(j) * sigma) * om[j];
                        acc += fj * e.re;
                    }
                    acc * pref
                })
                .collect();
            Ok((*m, r))
        })
        .collect::<Result<_>>()?;
    let mut modes = vec![vec![C64::new(0.0, 0.0); out.len]; f.nx];
    for (m, r) in rows {
        modes[m] = r;
    }
    out.set_modes(&modes);
    Ok(out)
}

/// Explicit-path Radon transform of one mode; `u` holds (U fhat)(t_i).
pub fn explicit_mode(u: &[C64], xi: f64, t0: f64, h: f64) -> Vec<C64> {
    let n = u.len();
    let a = 0.5 * xi * xi;
    (0..n)
        .map(|i| {
            // s_i = -t_{n-1-i}; the integral runs over t_0 .. t_{n-1-i}
            let top = n - 1 - i;
            let mut r = u[top] * FRAC_1_SQRT_2;
            if xi != 0.0 && top > 0 {
                let es = (t0 + top as f64 * h).exp();
                let w = gregory_weights(top + 1, h);
                let mut acc = C64::new(0.0, 0.0);
                for (l, wl) in w.iter().enumerate() {
                    if u[l] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let y = (t0 + l as f64 * h).exp();
                    let arg = xi.abs() * (y * (es - y)).max(0.0).sqrt();
                    acc += u[l] * (wl * y * a * j1_over_x(arg));
                }
                r -= acc * (FRAC_1_SQRT_2 * es);
            }
            r
        })
        .collect()
}

/// Explicit-path Radon transform.
pub fn radon_explicit(f: &HnFunction) -> Result<RadonImage> {
    let mut out = RadonImage::for_source(&f.grid, f.period, f.nx);
    let src = source_modes(f);
    let rows: Vec<(usize, Vec<C64>)> = src
        .par_iter()
        .map(|(m, xi, row)| (*m, explicit_mode(&f.grid.to_u(row), *xi, f.grid.t0, f.grid.h)))
        .collect();
    let mut modes = vec![vec![C64::new(0.0, 0.0); out.len]; f.nx];
    for (m, r) in rows {
        modes[m] = r;
    }
    out.set_modes(&modes);
    Ok(out)
}
