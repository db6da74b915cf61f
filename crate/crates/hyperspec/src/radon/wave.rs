//! Wave equation u_tt + H0 u = 0 on H^n, solved mode by mode in the horizontal frequency.
//!
//! In the coordinates tau = log y and v = U u the mode equation is
//! v_tt - v_tautau + zeta^2 e^{2 tau} v = 0, whose Riemann function is J0(zeta W) with
//! W^2 = (y e^t - y')(y' - y e^{-t}). For data (f, g):
//!
//! v(tau, t) = [f(tau+t) + f(tau-t)]/2 + 1/2 int K1 f + 1/2 int J0(zeta W) g,
//!
//! integrals over [tau - t, tau + t], K1 = d_t J0(zeta W) = -zeta^2 y y' sinh t J1(w)/w.

use super::image::signed;
use crate::error::{arg, Result};
use crate::kl::hn::{partial_fourier, partial_fourier_inverse, HnFunction};
use crate::kl::{zero_mode_forward, KGrid, KlPlan, RadialGrid};
use crate::special::bessel::bessel_j01;
use crate::special::quad::GaussRule;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tunables of the explicit propagator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveOptions {
    /// the solution is set to zero where zeta y exceeds this (evanescent region)
    pub z_cut: f64,
    /// Gauss-Legendre order per panel
    pub order: usize,
    /// panel length cap in tau
    pub panel: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        Self { z_cut: 60.0, order: 16, panel: 0.5 }
    }
}

/// Data of one mode in U-coordinates on a uniform tau grid, with interpolation.
#[derive(Debug, Clone)]
pub struct ModeProfile {
    pub t0: f64,
    pub h: f64,
    pub v: Vec<C64>,
    pub dv: Vec<C64>,
    /// support [lo, hi] in tau (empty if lo > hi)
    pub lo: f64,
    pub hi: f64,
}

const FD8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Eighth-order first derivative on interior nodes (zero within four nodes of the ends).
pub(crate) fn d1_fd8(v: &[C64], h: f64) -> Vec<C64> {
    let n = v.len();
    let mut d = vec![C64::new(0.0, 0.0); n];
    for i in 4..n.saturating_sub(4) {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in FD8.iter().enumerate() {
            acc += (v[i + k + 1] - v[i - k - 1]) * *c;
        }
        d[i] = acc / h;
    }
    d
}

impl ModeProfile {
    pub fn new(v: Vec<C64>, t0: f64, h: f64) -> Self {
        let dv = d1_fd8(&v, h);
        let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let thr = 1e-16 * peak;
        let first = v.iter().position(|z| z.norm() > thr);
        let last = v.iter().rposition(|z| z.norm() > thr);
        let (lo, hi) = match (first, last) {
            (Some(a), Some(b)) if peak > 0.0 => (t0 + a.saturating_sub(4) as f64 * h, t0 + (b + 4).min(v.len() - 1) as f64 * h),
            _ => (1.0, -1.0),
        };
        Self { t0, h, v, dv, lo, hi }
    }

    pub fn is_zero(&self) -> bool {
        self.lo > self.hi
    }

    fn interp(&self, arr: &[C64], tau: f64) -> C64 {
        let n = arr.len();
        let x = (tau - self.t0) / self.h;
        if x < 0.0 || x > (n - 1) as f64 {
            return C64::new(0.0, 0.0);
        }
        let i = x.floor() as isize;
        let start = (i - 3).clamp(0, n as isize - 8) as usize;
        // barycentric weights of 8 equispaced nodes: (-1)^j C(7, j)
        const W: [f64; 8] = [1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0];
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..8 {
            let d = x - (start + j) as f64;
            if d == 0.0 {
                return arr[start + j];
            }
            let c = W[j] / d;
            num += arr[start + j] * c;
            den += c;
        }
        num / den
    }

    pub fn at(&self, tau: f64) -> C64 {
        self.interp(&self.v, tau)
    }

    pub fn d_at(&self, tau: f64) -> C64 {
        self.interp(&self.dv, tau)
    }
}

/// (J0(w), J1(w)/w, J2(w)/w^2), smooth at w = 0.
fn j_terms(w: f64) -> (f64, f64, f64) {
    if w < 2.0 {
        let q = -0.25 * w * w;
        let (mut a, mut b, mut c) = (1.0, 0.5, 0.125);
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for m in 0..30 {
            s0 += a;
            s1 += b;
            s2 += c;
            let mf = m as f64 + 1.0;
            a *= q / (mf * mf);
            b *= q / (mf * (mf + 1.0));
            c *= q / (mf * (mf + 2.0));
            if a.abs() < 1e-18 && b.abs() < 1e-18 {
                break;
            }
        }
        return (s0, s1, s2);
    }
    let (j0, j1) = bessel_j01(w);
    (j0, j1 / w, (2.0 * j1 / w - j0) / (w * w))
}

/// Propagate one mode: returns (v, v_t) at each requested tau.
pub fn propagate_mode(zeta: f64, f: &ModeProfile, g: &ModeProfile, t: f64, taus: &[f64], opts: &WaveOptions) -> Vec<(C64, C64)> {
    let rule = GaussRule::new(opts.order);
    let (sh, ch) = (t.sinh(), t.cosh());
    let z2 = zeta * zeta;
    let lo = f.lo.min(g.lo);
    let hi = f.hi.max(g.hi);
    taus.par_iter()
        .map(|&tau| {
            let y = tau.exp();
            if zeta > 0.0 && zeta * y > opts.z_cut {
                return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            }
            let (a, b) = (tau - t, tau + t);
            let mut u = 0.5 * (f.at(a) + f.at(b));
            let mut ut = 0.5 * (f.d_at(b) - f.d_at(a)) + 0.5 * (g.at(a) + g.at(b));
            if t == 0.0 {
                return (u, ut);
            }
            let k1_end = |yp: f64| -0.5 * z2 * y * yp * sh;
            ut += 0.5 * (f.at(b) * k1_end(b.exp()) + f.at(a) * k1_end(a.exp()));
            let (ia, ib) = (a.max(lo), b.min(hi));
            if ia >= ib {
                return (u, ut);
            }
            let qmax = (z2 * y * y * sh * sh).min(z2 * y * t.exp() * ib.exp());
            let panels = ((ib - ia) / opts.panel).ceil() as usize + (qmax.sqrt() / 4.0).ceil() as usize;
            let (ye, yi) = (y * t.exp(), y * (-t).exp());
            let mut iu = C64::new(0.0, 0.0);
            let mut iut = C64::new(0.0, 0.0);
            for (tp, w) in rule.nodes(ia, ib, panels.max(1)) {
                let yp = tp.exp();
                let q = (z2 * (ye - yp) * (yp - yi)).max(0.0);
                let (j0, j1w, j2w2) = j_terms(q.sqrt());
                let yy = y * yp;
                let k1 = -z2 * yy * sh * j1w;
                let k2 = z2 * z2 * yy * yy * sh * sh * j2w2 - z2 * yy * ch * j1w;
                let fv = f.at(tp);
                let gv = g.at(tp);
                iu += (fv * k1 + gv * j0) * w;
                iut += (fv * k2 + gv * k1) * w;
            }
            u += 0.5 * iu;
            ut += 0.5 * iut;
            (u, ut)
        })
        .collect()
}

/// Solution snapshot: u and u_t at time t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub t: f64,
    pub u: HnFunction,
    pub ut: HnFunction,
    pub warnings: Vec<String>,
}

fn check_pair(f: &HnFunction, g: &HnFunction) -> Result<()> {
    if f.grid != g.grid || f.nx != g.nx || f.period != g.period {
        return arg("initial data f and g must share one grid");
    }
    Ok(())
}

fn mode_profiles(f: &HnFunction) -> Vec<ModeProfile> {
    partial_fourier(f).into_iter().map(|row| ModeProfile::new(f.grid.to_u(&row), f.grid.t0, f.grid.h)).collect()
}

fn truncation_warnings(profiles: &[ModeProfile], grid: &RadialGrid, t: f64) -> Vec<String> {
    let (a, b) = (grid.t0, grid.t(grid.len - 1));
    let lo = profiles.iter().filter(|p| !p.is_zero()).map(|p| p.lo).fold(f64::INFINITY, f64::min);
    let hi = profiles.iter().filter(|p| !p.is_zero()).map(|p| p.hi).fold(f64::NEG_INFINITY, f64::max);
    let mut w = Vec::new();
    if lo.is_finite() && (lo - t < a || hi + t > b) {
        w.push(format!("support [{lo:.3}, {hi:.3}] in log y reaches the grid boundary [{a:.3}, {b:.3}] within time {t}"));
    }
    w
}

/// cos(t sqrt H0) f + sin(t sqrt H0)/sqrt H0 g, with its time derivative, on the source grid.
pub fn wave_propagate(f: &HnFunction, g: &HnFunction, t: f64, opts: &WaveOptions) -> Result<WaveState> {
    check_pair(f, g)?;
    if !(t >= 0.0) {
        return arg(format!("wave_propagate needs t >= 0, got {t}"));
    }
    let pf = mode_profiles(f);
    let pg = mode_profiles(g);
    let taus = f.grid.ts();
    let mut mu = vec![vec![C64::new(0.0, 0.0); f.grid.len]; f.nx];
    let mut mut_ = mu.clone();
    for m in 0..f.nx {
        if pf[m].is_zero() && pg[m].is_zero() {
            continue;
        }
        let zeta = (2.0 * PI * signed(m, f.nx) as f64 / f.period).abs();
        let r = propagate_mode(zeta, &pf[m], &pg[m], t, &taus, opts);
        mu[m] = f.grid.from_u(&r.iter().map(|p| p.0).collect::<Vec<_>>());
        mut_[m] = f.grid.from_u(&r.iter().map(|p| p.1).collect::<Vec<_>>());
    }
    Ok(WaveState {
        t,
        u: partial_fourier_inverse(&mu, &f.grid, f.period)?,
        ut: partial_fourier_inverse(&mut_, &f.grid, f.period)?,
        warnings: truncation_warnings(&pf, &f.grid, t),
    })
}

/// Spectral solution through the KL and zero-mode transforms (independent oracle).
pub fn wave_propagate_spectral(f: &HnFunction, g: &HnFunction, t: f64, kgrid: &KGrid) -> Result<WaveState> {
    check_pair(f, g)?;
    let grid = &f.grid;
    let mf = partial_fourier(f);
    let mg = partial_fourier(g);
    let mut mu = vec![vec![C64::new(0.0, 0.0); grid.len]; f.nx];
    let mut mut_ = mu.clone();
    let rows: Vec<(usize, Vec<C64>, Vec<C64>)> = (0..f.nx)
        .into_par_iter()
        .filter(|&m| mf[m].iter().chain(&mg[m]).any(|v| v.norm() > 0.0))
        .map(|m| {
            let zeta = (2.0 * PI * signed(m, f.nx) as f64 / f.period).abs();
            if zeta == 0.0 {
                let cf = zero_mode_forward(&mf[m], grid, kgrid)?;
                let cg = zero_mode_forward(&mg[m], grid, kgrid)?;
                let mut u = cf.clone();
                let mut ut = cf.clone();
                for j in 0..cf.plus.len() {
                    let k = cf.k(j);
                    let (s, c) = (k * t).sin_cos();
                    let sk = if k == 0.0 { t } else { s / k };
                    for (dst, dt, a, b) in [(&mut u.plus, &mut ut.plus, cf.plus[j], cg.plus[j]), (&mut u.minus, &mut ut.minus, cf.minus[j], cg.minus[j])] {
                        dst[j] = a * c + b * sk;
                        dt[j] = -a * k * s + b * c;
                    }
                }
                return Ok((m, crate::kl::zero_mode_inverse(&u, grid)?, crate::kl::zero_mode_inverse(&ut, grid)?));
            }
            let plan = KlPlan::new(grid, kgrid, zeta)?;
            let a = plan.forward_u(&grid.to_u(&mf[m]))?;
            let b = plan.forward_u(&grid.to_u(&mg[m]))?;
            let mut u = vec![C64::new(0.0, 0.0); a.len()];
            let mut ut = u.clone();
            for j in 0..a.len() {
                let k = kgrid.k(j);
                let (s, c) = (k * t).sin_cos();
                u[j] = a[j] * c + b[j] * (s / k);
                ut[j] = -a[j] * (k * s) + b[j] * c;
            }
            Ok((m, grid.from_u(&plan.inverse_u(&u)?), grid.from_u(&plan.inverse_u(&ut)?)))
        })
        .collect::<Result<_>>()?;
    for (m, u, ut) in rows {
        mu[m] = u;
        mut_[m] = ut;
    }
    Ok(WaveState {
        t,
        u: partial_fourier_inverse(&mu, grid, f.period)?,
        ut: partial_fourier_inverse(&mut_, grid, f.period)?,
        warnings: vec![],
    })
}

/// E = ||u_t||^2 + (H0 u, u), evaluated mode by mode in U-coordinates with eighth-order differences.
pub fn wave_energy(state: &WaveState) -> f64 {
    let grid = &state.u.grid;
    let mu = partial_fourier(&state.u);
    let mt = partial_fourier(&state.ut);
    let nx = state.u.nx;
    let mut e = 0.0;
    for m in 0..nx {
        let zeta = 2.0 * PI * signed(m, nx) as f64 / state.u.period;
        let v = grid.to_u(&mu[m]);
        let vt = grid.to_u(&mt[m]);
        let dv = d1_fd8(&v, grid.h);
        let mut s = 0.0;
        for i in 0..grid.len {
            let y = grid.y(i);
            s += vt[i].norm_sqr() + dv[i].norm_sqr() + zeta * zeta * y * y * v[i].norm_sqr();
        }
        e += s * grid.h;
    }
    e * 2.0 * PI / state.u.period
}

/// Relative L^2 distance between two snapshots (u and u_t together).
pub fn state_rel_diff(a: &WaveState, b: &WaveState) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in [(&a.u, &b.u), (&a.ut, &b.ut)] {
        let mut d = x.clone();
        for (p, q) in d.values.iter_mut().zip(&y.values) {
            *p -= q;
        }
        num += d.norm().powi(2);
        den += y.norm().powi(2);
    }
    (num / den.max(1e-300)).sqrt()
}

/// L^2 distance between sqrt2 (U cos(t sqrt H0) f)(-s - t) and the Radon transform of f,
/// relative to the latter. Vanishes as t grows.
pub fn asymptotic_profile_check(f: &HnFunction, t: f64, opts: &WaveOptions) -> Result<f64> {
    if !(t >= 0.0) {
        return arg(format!("asymptotic_profile_check needs t >= 0, got {t}"));
    }
    let r = super::radon_explicit(f)?;
    let rm = r.modes();
    let zero = ModeProfile::new(vec![C64::new(0.0, 0.0); f.grid.len], f.grid.t0, f.grid.h);
    let taus: Vec<f64> = (0..r.len).map(|i| -r.s(i) - t).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for (m, xi, row) in super::image::source_modes(f) {
        let p = ModeProfile::new(f.grid.to_u(&row), f.grid.t0, f.grid.h);
        let v = propagate_mode(xi.abs(), &p, &zero, t, &taus, opts);
        for (i, (u, _)) in v.iter().enumerate() {
            num += (u * std::f64::consts::SQRT_2 - rm[m][i]).norm_sqr();
            den += rm[m][i].norm_sqr();
        }
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (HnFunction, HnFunction) {
        let grid = RadialGrid::new(2, 1e-4, 1e4, 1024).unwrap();
        let xi1 = 2.0 * PI / 16.0;
        let f = HnFunction::from_fn(&grid, 16.0, 8, |x, y| {
            C64::new((1.0 + 0.5 * (xi1 * x).cos()) * (-4.0 * (y.ln() - 0.2).powi(2)).exp(), 0.0)
        })
        .unwrap();
        let g = HnFunction::from_fn(&grid, 16.0, 8, |x, y| C64::new((2.0 * xi1 * x).sin() * (-3.0 * (y.ln() + 0.3).powi(2)).exp(), 0.0)).unwrap();
        (f, g)
    }

    #[test]
    fn initial_data_and_spectral_agreement() {
        let (f, g) = data();
        let opts = WaveOptions::default();
        let s0 = wave_propagate(&f, &g, 0.0, &opts).unwrap();
        let mut d = s0.u.clone();
        for (a, b) in d.values.iter_mut().zip(&f.values) {
            *a -= b;
        }
        assert!(d.norm() / f.norm() < 1e-12);
        let s = wave_propagate(&f, &g, 1.5, &opts).unwrap();
        let o = wave_propagate_spectral(&f, &g, 1.5, &KGrid::new(40.0, 1024).unwrap()).unwrap();
        let r = state_rel_diff(&s, &o);
        assert!(r < 1e-5, "{r}");
    }

    #[test]
    fn energy_is_conserved() {
        let (f, g) = data();
        let opts = WaveOptions::default();
        let e0 = wave_energy(&wave_propagate(&f, &g, 0.0, &opts).unwrap());
        for t in [1.0, 2.5] {
            let e = wave_energy(&wave_propagate(&f, &g, t, &opts).unwrap());
            assert!((e - e0).abs() / e0 < 1e-6, "{t}: {e} {e0}");
        }
    }

    #[test]
    fn asymptotic_profile_decreases() {
        let grid = RadialGrid::new(2, 1e-4, 1e4, 1024).unwrap();
        let f = HnFunction::from_fn(&grid, 32.0, 16, |x, y| C64::new((-x * x / 8.0).exp() * (-4.0 * y.ln().powi(2)).exp(), 0.0)).unwrap();
        let opts = WaveOptions::default();
        let d: Vec<f64> = [2.0, 4.0, 8.0].iter().map(|&t| asymptotic_profile_check(&f, t, &opts).unwrap()).collect();
        assert!(d[0] > d[1] && d[1] > d[2] && d[2] <= 0.05, "{d:?}");
        let zero = HnFunction::zeros(&grid, 32.0, 16).unwrap();
        assert_eq!(asymptotic_profile_check(&zero, 4.0, &opts).unwrap(), 0.0);
    }

    #[test]
    fn reversibility_and_finite_speed() {
        let (f, _) = data();
        let zero = HnFunction::zeros(&f.grid, f.period, f.nx).unwrap();
        let opts = WaveOptions::default();
        let s = wave_propagate(&f, &zero, 1.0, &opts).unwrap();
        let mut back_g = s.ut.clone();
        for v in back_g.values.iter_mut() {
            *v = -*v;
        }
        let b = wave_propagate(&s.u, &back_g, 1.0, &opts).unwrap();
        let mut d = b.u.clone();
        for (a, c) in d.values.iter_mut().zip(&f.values) {
            *a -= c;
        }
        assert!(d.norm() / f.norm() < 1e-6, "{}", d.norm() / f.norm());
        // data of the constant mode lives where |log y - 0.2| < 3.2 above 1e-16; nothing beyond + t
        let grid = &f.grid;
        for i in 0..grid.len {
            if (grid.t(i) - 0.2).abs() > 3.2 + 1.0 + 4.0 * grid.h {
                for j in 0..f.nx {
                    assert!(s.u.values[i * f.nx + j].norm() < 1e-12);
                }
            }
        }
    }
}
