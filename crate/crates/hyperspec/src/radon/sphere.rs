//! Spherical means on H^3 and the cos-branch of the wave group they generate:
//! cos(t sqrt H0) f (z) = d/dt (sinh t M_f(z, t)), M_f the mean over the geodesic sphere S(z, t).

use super::wave::{propagate_mode, ModeProfile, WaveOptions};
use crate::error::{arg, Result};
use crate::kl::RadialGrid;
use crate::special::quad::GaussRule;
use crate::C64;
use std::f64::consts::PI;

/// (4 pi sinh t)^{-1} int_{S(z,t)} f dS = sinh t M_f(z, t).
///
/// The geodesic sphere about (x1, x2, y) is the Euclidean sphere with centre (x1, x2, y cosh t)
/// and radius y sinh t; the hyperbolic area element is dS_euc / h^2.
pub fn sphere_integral(f: &dyn Fn(f64, f64, f64) -> f64, z: [f64; 3], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return arg(format!("spherical mean needs t > 0, got {t}"));
    }
    if !(z[2] > 0.0) {
        return arg("point must lie in the upper half-space");
    }
    let (c, r) = (z[2] * t.cosh(), z[2] * t.sinh());
    let rule = GaussRule::new(32);
    // the area density peaks at the bottom pole for large t: more panels there
    let panels = 4 + (2.0 * t) as usize;
    let nphi = 96;
    let mut acc = 0.0;
    for (th, w) in rule.nodes(0.0, PI, panels) {
        let (st, ct) = th.sin_cos();
        let h = c + r * ct;
        let mut ring = 0.0;
        for j in 0..nphi {
            let phi = 2.0 * PI * j as f64 / nphi as f64;
            ring += f(z[0] + r * st * phi.cos(), z[1] + r * st * phi.sin(), h);
        }
        acc += w * ring * (2.0 * PI / nphi as f64) * r * r * st / (h * h);
    }
    Ok(acc / (4.0 * PI * t.sinh()))
}

/// cos(t sqrt H0) f at z through spherical means, by a fourth-order difference in t.
pub fn wave_spherical_mean_n3(f: &dyn Fn(f64, f64, f64) -> f64, z: [f64; 3], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return arg(format!("wave_spherical_mean_n3 needs t > 0, got {t}"));
    }
    let d = (1e-3f64).min(0.25 * t);
    let s = |tt: f64| sphere_integral(f, z, tt);
    Ok((s(t - 2.0 * d)? - 8.0 * s(t - d)? + 8.0 * s(t + d)? - s(t + 2.0 * d)?) / (12.0 * d))
}

/// Cos-branch through the mode propagator on H^3 for f = cos(xi x1) g(y):
/// the value at each (x1, y) of `points`.
pub fn wave_cos_mode_n3(xi: f64, g: &dyn Fn(f64) -> f64, t: f64, points: &[(f64, f64)], opts: &WaveOptions) -> Result<Vec<f64>> {
    let grid = RadialGrid::new(3, 1e-4, 1e4, 2048)?;
    let v = grid.to_u(&grid.sample_real(g));
    let p = ModeProfile::new(v, grid.t0, grid.h);
    let zero = ModeProfile::new(vec![C64::new(0.0, 0.0); grid.len], grid.t0, grid.h);
    let taus: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let out = propagate_mode(xi.abs(), &p, &zero, t, &taus, opts);
    // U^{-1} on H^3 multiplies by y
    Ok(points.iter().zip(out).map(|(&(x1, y), (u, _))| (xi * x1).cos() * y * u.re).collect())
}
