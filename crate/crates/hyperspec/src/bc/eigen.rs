//! Neumann eigenproblem -Delta_g phi = lambda phi on the grid, and the boundary spectral data.
//!
//! In two dimensions the Dirichlet form of g = c^{-2} delta is the Euclidean one, so the
//! vertex-centred five-point stiffness S needs no metric factor; the mass is W c^{-2}.

use super::linalg::{lowest_eigenpairs, BandedSym, EigenOptions};
use super::metric::{Boundary, ConformalMetric};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Five-point stiffness with natural (Neumann) boundary rows.
pub fn stiffness(m: &ConformalMetric) -> BandedSym {
    let g = &m.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (dx, dy) = (g.dx(), g.dy());
    let n = g.len();
    let mut diag = vec![0.0; n];
    let mut east = vec![0.0; n - 1];
    let mut north = vec![0.0; n - nx];
    for j in 0..ny {
        let ey = if j == 0 || j == ny - 1 { 0.5 * dy } else { dy };
        for i in 0..nx - 1 {
            let p = g.index(i, j);
            let a = ey / dx;
            diag[p] += a;
            diag[p + 1] += a;
            east[p] = -a;
        }
    }
    for i in 0..nx {
        let ex = if i == 0 || i == nx - 1 { 0.5 * dx } else { dx };
        for j in 0..ny - 1 {
            let p = g.index(i, j);
            let b = ex / dy;
            diag[p] += b;
            diag[p + nx] += b;
            north[p] = -b;
        }
    }
    BandedSym { diag, bands: vec![(1, east), (nx, north)] }
}

/// Eigenpairs with full (interior) eigenvectors.
#[derive(Debug, Clone)]
pub struct NeumannEigen {
    pub metric: ConformalMetric,
    pub values: Vec<f64>,
    /// M-orthonormal: sum_p M_p phi_i(p) phi_j(p) = delta_ij
    pub vectors: DMatrix<f64>,
    pub max_residual: f64,
}

pub fn neumann_eigensolve(metric: &ConformalMetric, k: usize) -> Result<NeumannEigen> {
    let g = &metric.grid;
    if g.nx < 64 || g.ny < 64 {
        return Err(Error::Config(format!("the eigensolver needs a grid of at least 64x64, got {}x{}", g.nx, g.ny)));
    }
    neumann_eigensolve_unchecked(metric, k)
}

/// Same, without the minimum-grid guard (small grids in tests and quick runs).
pub fn neumann_eigensolve_unchecked(metric: &ConformalMetric, k: usize) -> Result<NeumannEigen> {
    let n = metric.grid.len();
    if k == 0 || 10 * k > n {
        return Err(Error::Config(format!("mode count K = {k} must satisfy 1 <= K <= 0.1 * nodes ({n})")));
    }
    let s = stiffness(metric);
    let mass = metric.mass();
    let r = lowest_eigenpairs(&s, &mass, k, &EigenOptions::default())?;
    let mut vectors = r.vectors;
    // fix the sign convention: largest-magnitude component positive
    for c in 0..k {
        let col = vectors.column(c);
        let (mut best, mut val) = (0.0f64, 0.0);
        for &v in col.iter() {
            if v.abs() > best + 1e-12 {
                best = v.abs();
                val = v;
            }
        }
        if val < 0.0 {
            vectors.column_mut(c).neg_mut();
        }
    }
    Ok(NeumannEigen { metric: metric.clone(), values: r.values, vectors, max_residual: r.max_residual })
}

/// Eigenvalues and boundary traces: all that the inverse problem may use.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundarySpectralData {
    pub lambda: Vec<f64>,
    /// traces[i][k] = phi_i at boundary node k
    pub traces: Vec<Vec<f64>>,
    pub boundary: Boundary,
    pub grid: super::metric::GridSpec,
}

impl BoundarySpectralData {
    pub fn modes(&self) -> usize {
        self.lambda.len()
    }

    /// The first k modes only.
    pub fn truncate(&self, k: usize) -> Self {
        let k = k.min(self.modes());
        Self { lambda: self.lambda[..k].to_vec(), traces: self.traces[..k].to_vec(), boundary: self.boundary.clone(), grid: self.grid }
    }
}

impl NeumannEigen {
    pub fn boundary_data(&self) -> BoundarySpectralData {
        let boundary = self.metric.boundary();
        let traces = (0..self.values.len()).map(|i| boundary.nodes.iter().map(|&p| self.vectors[(p, i)]).collect()).collect();
        BoundarySpectralData { lambda: self.values.clone(), traces, boundary, grid: self.metric.grid }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::metric::{GridSpec, MetricSpec};
    use std::f64::consts::PI;

    #[test]
    fn constant_speed_spectrum() {
        let g = GridSpec { nx: 64, ny: 64, lx: 1.0, ly: 1.0 };
        let m = ConformalMetric::constant(g, 1.0).unwrap();
        let e = neumann_eigensolve(&m, 12).unwrap();
        let mut want: Vec<f64> = (0..6).flat_map(|a| (0..6).map(move |b| PI * PI * (a * a + b * b) as f64)).collect();
        want.sort_by(f64::total_cmp);
        assert!(e.values[0].abs() < 1e-8);
        for i in 1..10 {
            assert!((e.values[i] - want[i]).abs() < 0.01 * want[i], "{i} {} {}", e.values[i], want[i]);
        }
        // constant mode
        let c0 = e.vectors.column(0);
        let spread = c0.max() - c0.min();
        assert!(spread < 1e-8);
    }

    #[test]
    fn swap_symmetry() {
        let g = GridSpec { nx: 64, ny: 64, lx: 1.0, ly: 1.0 };
        let m = ConformalMetric::new(g, MetricSpec::Lens { depth: 0.3, width: 0.2, center: Some([0.4, 0.4]) }).unwrap();
        let e = neumann_eigensolve(&m, 15).unwrap();
        // swapping x and y maps the grid onto itself; the pencil is permutation-similar
        let s = stiffness(&m);
        let perm: Vec<usize> = (0..g.len()).map(|p| g.index(p / g.nx, p % g.nx)).collect();
        let mass = m.mass();
        for i in 0..15 {
            let v: Vec<f64> = perm.iter().map(|&q| e.vectors[(q, i)]).collect();
            let mut sv = vec![0.0; v.len()];
            s.apply(&v, &mut sv);
            let rq: f64 = sv.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / v.iter().zip(&mass).map(|(a, w)| a * a * w).sum::<f64>();
            assert!((rq - e.values[i]).abs() <= 1e-10 * e.values[i].max(1.0), "{i} {rq} {}", e.values[i]);
        }
    }
}
