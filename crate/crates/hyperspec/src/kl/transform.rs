use super::grid::{KGrid, RadialGrid};
use super::kernel::KernelRow;
use crate::error::{arg, Result};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// KL coefficients F(k_j) on a [`KGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlCoefficients {
    pub kgrid: KGrid,
    pub zeta: f64,
    pub values: Vec<C64>,
}

impl KlCoefficients {
    /// Spectral norm (int_0^inf |F(k)|^2 dk)^{1/2}; trapezoid with F(0) = 0.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.kgrid.dk).sqrt()
    }
}

/// Tabulated kernel phi(k_j, zeta y_i) for repeated transforms at one zeta.
#[derive(Debug, Clone)]
pub struct KlPlan {
    pub grid: RadialGrid,
    pub kgrid: KGrid,
    pub zeta: f64,
    /// row j holds phi(k_j, zeta y_i) for all i
    table: Vec<f64>,
}

impl KlPlan {
    pub fn new(grid: &RadialGrid, kgrid: &KGrid, zeta: f64) -> Result<Self> {
        if !(zeta > 0.0) || !zeta.is_finite() {
            return arg(format!("KL transform needs zeta > 0, got {zeta}"));
        }
        let ys = grid.ys();
        let nt = grid.len;
        let mut table = vec![0.0; nt * kgrid.len];
        table.par_chunks_mut(nt).enumerate().for_each(|(j, row)| {
            let kr = KernelRow::new(kgrid.k(j));
            for (i, y) in ys.iter().enumerate() {
                row[i] = kr.eval(zeta * y);
            }
        });
        Ok(Self { grid: grid.clone(), kgrid: *kgrid, zeta, table })
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.table[j * self.grid.len..(j + 1) * self.grid.len]
    }

    /// Forward transform from U-coordinates: F(k) = int phi(k, zeta e^t) (Uf)(t) dt.
    pub fn forward_u(&self, w: &[C64]) -> Result<Vec<C64>> {
        self.grid.check(w)?;
        let h = self.grid.h;
        Ok((0..self.kgrid.len)
            .into_par_iter()
            .map(|j| {
                let r = self.row(j);
                let mut s = C64::new(0.0, 0.0);
                for i in 0..w.len() {
                    s += w[i] * r[i];
                }
                s * h
            })
            .collect())
    }

    /// Inverse transform into U-coordinates: (Uf)(t) = int_0^inf phi(k, zeta e^t) F(k) dk.
    pub fn inverse_u(&self, f: &[C64]) -> Result<Vec<C64>> {
        if f.len() != self.kgrid.len {
            return arg(format!("coefficient length {} does not match k-grid {}", f.len(), self.kgrid.len));
        }
        let nt = self.grid.len;
        let dk = self.kgrid.dk;
        let chunks = rayon::current_num_threads().max(1);
        let per = nt.div_ceil(chunks);
        let parts: Vec<Vec<C64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = (c * per).min(nt);
                let hi = ((c + 1) * per).min(nt);
                let mut out = vec![C64::new(0.0, 0.0); hi - lo];
                for (j, fj) in f.iter().enumerate() {
                    let r = &self.row(j)[lo..hi];
                    for (o, p) in out.iter_mut().zip(r) {
                        *o += fj * *p;
                    }
                }
                out
            })
            .collect();
        Ok(parts.concat().into_iter().map(|v| v * dk).collect())
    }

    pub fn forward(&self, f: &[C64]) -> Result<KlCoefficients> {
        self.grid.check(f)?;
        let values = self.forward_u(&self.grid.to_u(f))?;
        Ok(KlCoefficients { kgrid: self.kgrid, zeta: self.zeta, values })
    }

    pub fn inverse(&self, c: &KlCoefficients) -> Result<Vec<C64>> {
        if c.kgrid != self.kgrid {
            return arg("coefficients were computed on a different k-grid");
        }
        Ok(self.grid.from_u(&self.inverse_u(&c.values)?))
    }
}

/// One-shot forward KL transform of radial samples f(y_i).
pub fn kl_forward(f: &[C64], zeta: f64, grid: &RadialGrid, kgrid: &KGrid) -> Result<KlCoefficients> {
    KlPlan::new(grid, kgrid, zeta)?.forward(f)
}

/// One-shot inverse KL transform onto `grid`.
pub fn kl_inverse(c: &KlCoefficients, grid: &RadialGrid) -> Result<Vec<C64>> {
    KlPlan::new(grid, &c.kgrid, c.zeta)?.inverse(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kl::grid::apply_l0_fd;
    use crate::kl::kernel::kl_kernel;

    fn bump(grid: &RadialGrid) -> Vec<C64> {
        // smooth, rapidly decaying in log y
        grid.sample_real(|y| {
            let t = y.ln();
            (-(t - 0.3) * (t - 0.3)).exp() * (1.0 + 0.2 * t)
        })
    }

    #[test]
    fn parseval_and_round_trip() {
        let grid = RadialGrid::standard();
        let kg = KGrid::standard();
        let f = bump(&grid);
        let plan = KlPlan::new(&grid, &kg, 1.0).unwrap();
        let c = plan.forward(&f).unwrap();
        let nf = grid.norm(&f);
        assert!((c.norm() - nf).abs() / nf < 1e-6, "{} {}", c.norm(), nf);
        let back = plan.inverse(&c).unwrap();
        let diff: Vec<C64> = back.iter().zip(&f).map(|(a, b)| a - b).collect();
        assert!(grid.norm(&diff) / nf < 1e-4);
    }

    #[test]
    fn eigen_relation_against_fd() {
        // F[L0 f](k) = k^2 F[f](k)
        let grid = RadialGrid::new(3, 1e-4, 1e4, 1024).unwrap();
        let kg = KGrid::new(30.0, 512).unwrap();
        let zeta = 0.7;
        let f = bump(&grid);
        let lf = apply_l0_fd(&f, zeta, &grid).unwrap();
        let plan = KlPlan::new(&grid, &kg, zeta).unwrap();
        let a = plan.forward(&f).unwrap();
        let b = plan.forward(&lf).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, k) in kg.ks().iter().enumerate() {
            num += (b.values[j] - k * k * a.values[j]).norm_sqr();
            den += (k * k * a.values[j]).norm_sqr();
        }
        assert!((num / den).sqrt() < 1e-3, "{}", (num / den).sqrt());
    }

    #[test]
    fn quadrature_converges_under_refinement() {
        // single coefficient at 4x finer radial spacing
        let f = |y: f64| (-(y.ln() - 0.3).powi(2)).exp() * (1.0 + 0.2 * y.ln());
        let coarse = RadialGrid::standard();
        let fine = RadialGrid::new(2, 1e-4, 1e4, 4 * 2047 + 1).unwrap();
        for &k in &[0.5, 5.0, 20.0] {
            let one = |g: &RadialGrid| {
                let mut s = 0.0;
                for i in 0..g.len {
                    s += kl_kernel(k, g.y(i)) * f(g.y(i)) * g.u_factor(i);
                }
                s * g.h
            };
            let a = one(&coarse);
            let b = one(&fine);
            assert!((a - b).abs() < 1e-8, "{k}: {a} {b}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let grid = RadialGrid::standard();
        assert!(KlPlan::new(&grid, &KGrid::standard(), 0.0).is_err());
        let plan = KlPlan::new(&RadialGrid::new(2, 1e-2, 1e2, 128).unwrap(), &KGrid::new(5.0, 16).unwrap(), 1.0).unwrap();
        assert!(plan.forward(&[C64::new(1.0, 0.0); 3]).is_err());
    }
}
