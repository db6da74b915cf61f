//! Resolvent (L0(zeta) + nu^2)^{-1} for Re nu > 0 with kernel
//! G(y, y') = (y y')^{(n-1)/2} K_nu(zeta y_>) I_nu(zeta y_<) with respect to dy'/y'^n.

use super::grid::RadialGrid;
use crate::error::{arg, Result};
use crate::special::bessel::{bessel_i_scaled, bessel_k_scaled};
use crate::C64;
use rayon::prelude::*;

fn check_nu(nu: C64, zeta: f64) -> Result<()> {
    if !(nu.re > 0.0) {
        return arg(format!("Green operator needs Re nu > 0, got {nu}"));
    }
    if !(zeta > 0.0) {
        return arg(format!("Green operator needs zeta > 0, got {zeta}"));
    }
    Ok(())
}

/// Pointwise kernel value.
pub fn green_kernel(y: f64, yp: f64, zeta: f64, nu: C64, n: usize) -> Result<C64> {
    check_nu(nu, zeta)?;
    if !(y > 0.0 && yp > 0.0) {
        return arg("Green kernel needs y, y' > 0");
    }
    let (hi, lo) = if y >= yp { (y, yp) } else { (yp, y) };
    let k = bessel_k_scaled(nu, zeta * hi)?;
    let i = bessel_i_scaled(nu, zeta * lo)?;
    let pref = (0.5 * (n as f64 - 1.0) * (y * yp).ln() - zeta * (hi - lo)).exp();
    Ok(k * i * pref)
}

/// G f on the grid nodes, O(N^2) trapezoid in t.
pub fn green_apply(f: &[C64], zeta: f64, nu: C64, grid: &RadialGrid) -> Result<Vec<C64>> {
    check_nu(nu, zeta)?;
    grid.check(f)?;
    let ys = grid.ys();
    let ks: Vec<C64> = ys.iter().map(|y| bessel_k_scaled(nu, zeta * y)).collect::<Result<_>>()?;
    let is: Vec<C64> = ys.iter().map(|y| bessel_i_scaled(nu, zeta * y)).collect::<Result<_>>()?;
    let w = grid.to_u(f);
    let h = grid.h;
    let out: Vec<C64> = (0..grid.len)
        .into_par_iter()
        .map(|i| {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..grid.len {
                if w[j] == C64::new(0.0, 0.0) {
                    continue;
                }
                let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
                let e = (-zeta * (ys[hi] - ys[lo])).exp();
                if e == 0.0 {
                    continue;
                }
                s += ks[hi] * is[lo] * e * w[j];
            }
            s * h
        })
        .collect();
    Ok(grid.from_u(&out))
}

/// Relative residual ||(L0 + nu^2) G f - f|| / ||f|| with finite-difference L0.
pub fn green_residual(f: &[C64], zeta: f64, nu: C64, grid: &RadialGrid) -> Result<f64> {
    let g = green_apply(f, zeta, nu, grid)?;
    let lg = super::grid::apply_l0_fd(&g, zeta, grid)?;
    let nu2 = nu * nu;
    let mut r: Vec<C64> = lg.iter().zip(&g).zip(f).map(|((a, b), c)| a + nu2 * b - c).collect();
    // the stencil leaves two nodes at each end unset
    for i in [0, 1, grid.len - 2, grid.len - 1] {
        r[i] = C64::new(0.0, 0.0);
    }
    Ok(grid.norm(&r) / grid.norm(f))
}

/// Largest value of |G(y,y')| sqrt((1+zeta y)(1+zeta y')) e^{zeta|y-y'|} / (y y')^{(n-1)/2}
/// over the sampled pairs; finite and moderate when the exponential bound holds.
pub fn green_bound_constant(zeta: f64, nu: C64, grid: &RadialGrid, stride: usize) -> Result<f64> {
    check_nu(nu, zeta)?;
    let mut worst: f64 = 0.0;
    let idx: Vec<usize> = (0..grid.len).step_by(stride.max(1)).collect();
    for &i in &idx {
        for &j in &idx {
            let (y, yp) = (grid.y(i), grid.y(j));
            let (hi, lo) = if y >= yp { (y, yp) } else { (yp, y) };
            let v = bessel_k_scaled(nu, zeta * hi)? * bessel_i_scaled(nu, zeta * lo)?;
            worst = worst.max(v.norm() * ((1.0 + zeta * y) * (1.0 + zeta * yp)).sqrt());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_small() {
        let grid = RadialGrid::new(2, 1e-4, 1e4, 2048).unwrap();
        let f = grid.sample_real(|y| (-(y.ln()).powi(2)).exp());
        for nu in [C64::new(0.5, 0.0), C64::new(1.2, 2.0)] {
            let r = green_residual(&f, 1.0, nu, &grid).unwrap();
            assert!(r < 1e-3, "{nu}: {r}");
        }
    }

    #[test]
    fn symmetric_and_bounded() {
        let nu = C64::new(0.8, -1.0);
        let a = green_kernel(0.3, 2.0, 1.5, nu, 3).unwrap();
        let b = green_kernel(2.0, 0.3, 1.5, nu, 3).unwrap();
        assert!((a - b).norm() < 1e-15 * a.norm());
        let grid = RadialGrid::new(2, 1e-3, 1e2, 256).unwrap();
        let c = green_bound_constant(1.0, nu, &grid, 4).unwrap();
        assert!(c.is_finite() && c < 10.0, "{c}");
        assert!(green_kernel(1.0, 1.0, 1.0, C64::new(-0.5, 0.0), 2).is_err());
    }
}
