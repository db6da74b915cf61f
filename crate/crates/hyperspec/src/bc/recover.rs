//! Local metric recovery from boundary distance functions, and the heat-kernel distance.

use super::eigen::NeumannEigen;
use super::metric::{ConformalMetric, GridSpec};
use super::oracle::{distance_from_boundary_point, interpolate, normal_geodesic};
use super::reconstruct::Reconstruction;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Condition number above which the eikonal system is declared ill-posed.
pub const COND_LIMIT: f64 = 1e6;

/// Contravariant metric g^{ij} at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub g: [[f64; 2]; 2],
    /// (g^11)^(1/2): the wave speed when g is conformal
    pub c: f64,
    pub condition: f64,
    /// rms of g^{ij} p_i p_j - 1 over the directions kept
    pub residual: f64,
    pub directions: usize,
}

impl MetricEstimate {
    pub fn is_positive_definite(&self) -> bool {
        let [[a, b], [_, d]] = self.g;
        a > 0.0 && a * d - b * b > 0.0
    }
}

fn solve_eikonal(grads: &[(f64, f64)]) -> Result<(DVector<f64>, f64, DVector<f64>)> {
    if grads.len() < 3 {
        return Err(Error::IllPosed { cond: f64::INFINITY, limit: COND_LIMIT });
    }
    let a = DMatrix::from_fn(grads.len(), 3, |r, c| {
        let (p, q) = grads[r];
        [p * p, 2.0 * p * q, q * q][c]
    });
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= COND_LIMIT) {
        return Err(Error::IllPosed { cond, limit: COND_LIMIT });
    }
    let b = DVector::from_element(grads.len(), 1.0);
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Solver(e.to_string()))?;
    let res = &a * &x - b;
    Ok((x, cond, res))
}

/// Least-squares solution of g^{ij} p_i p_j = 1 over the gradients p = grad d(., z).
/// Directions whose residual exceeds `outlier` times the median are dropped once
/// (gradients taken across a cut locus of d(., z)).
pub fn metric_from_gradients(grads: &[(f64, f64)], outlier: f64) -> Result<MetricEstimate> {
    let (mut x, mut cond, mut res) = solve_eikonal(grads)?;
    let mut kept = grads.len();
    if outlier > 0.0 && grads.len() > 3 {
        let mut r: Vec<f64> = res.iter().map(|v| v.abs()).collect();
        r.sort_by(f64::total_cmp);
        let med = r[r.len() / 2].max(1e-3);
        let keep: Vec<(f64, f64)> = grads.iter().zip(res.iter()).filter(|(_, e)| e.abs() <= outlier * med).map(|(p, _)| *p).collect();
        if keep.len() >= 3 && keep.len() < grads.len() {
            (x, cond, res) = solve_eikonal(&keep)?;
            kept = keep.len();
        }
    }
    let g = [[x[0], x[1]], [x[1], x[2]]];
    let est = MetricEstimate { g, c: x[0].max(0.0).sqrt(), condition: cond, residual: (res.norm_squared() / kept as f64).sqrt(), directions: kept };
    if !est.is_positive_definite() {
        return Err(Error::Degenerate(format!("recovered metric {g:?} is not positive definite")));
    }
    Ok(est)
}

/// Central-difference gradient of a grid field at (x, y), step `h`.
pub fn field_gradient(metric: &ConformalMetric, field: &[f64], x: f64, y: f64, h: f64) -> (f64, f64) {
    let f = |a: f64, b: f64| interpolate(metric, field, a, b);
    ((f(x + h, y) - f(x - h, y)) / (2.0 * h), (f(x, y + h) - f(x, y - h)) / (2.0 * h))
}

/// Boundary distance functions d(., z) sampled on the grid, one per boundary position.
pub struct DistanceFields {
    pub zs: Vec<f64>,
    pub fields: Vec<Vec<f64>>,
}

impl DistanceFields {
    /// Fast-marching reference fields.
    pub fn oracle(metric: &ConformalMetric, zs: &[f64]) -> Self {
        let b = metric.boundary();
        let g = &metric.grid;
        let r0 = 1.5 * g.dx().max(g.dy());
        Self { zs: zs.to_vec(), fields: zs.iter().map(|&z| distance_from_boundary_point(metric, &b, z, r0)).collect() }
    }
}

/// Stage-isolated recovery at x0 from distance fields: gradients by central differences
/// (step two cells), then the eikonal least squares.
pub fn metric_recover(metric: &ConformalMetric, fields: &DistanceFields, x0: (f64, f64)) -> Result<MetricEstimate> {
    let g = &metric.grid;
    let h = 2.0 * g.dx().max(g.dy());
    if x0.0 - h < 0.0 || x0.0 + h > g.lx || x0.1 - h < 0.0 || x0.1 + h > g.ly {
        return Err(Error::Argument(format!("probe {x0:?} too close to the boundary for differencing")));
    }
    let grads: Vec<(f64, f64)> = fields.fields.iter().map(|f| field_gradient(metric, f, x0.0, x0.1, h)).collect();
    metric_from_gradients(&grads, 3.0)
}

/// One row of recovery.csv.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRow {
    pub x: f64,
    pub y: f64,
    pub c_true: f64,
    pub c_est: f64,
}

/// End-to-end recovery at the probe points of the net: each point is placed at gamma_w(s)
/// by the oracle, r(z) is fitted by an affine function over the net points within `radius`,
/// and the fitted gradients enter the eikonal least squares. Points without enough
/// neighbours or with an ill-posed system are skipped.
pub fn metric_recover_end_to_end(metric: &ConformalMetric, rec: &Reconstruction, radius: f64) -> Vec<(RecoveryRow, MetricEstimate)> {
    let g = &metric.grid;
    let b = metric.boundary();
    let step = 0.25 * g.dx().min(g.dy());
    let pts: Vec<Option<(f64, f64)>> = rec.vectors.iter().map(|v| normal_geodesic(metric, &b, v.w, v.s, step).last().copied()).collect();
    let mut out = vec![];
    for (i, v) in rec.vectors.iter().enumerate() {
        let Some(x0) = pts[i] else { continue };
        let near: Vec<usize> = (0..pts.len()).filter(|&j| pts[j].is_some_and(|p| (p.0 - x0.0).hypot(p.1 - x0.1) <= radius)).collect();
        if near.len() < 4 || v.s < 2.0 * rec.eps {
            continue;
        }
        let a = DMatrix::from_fn(near.len(), 3, |r, c| {
            let p = pts[near[r]].unwrap();
            [1.0, p.0 - x0.0, p.1 - x0.1][c]
        });
        let svd = a.clone().svd(true, true);
        if svd.singular_values.min() < 1e-3 * svd.singular_values.max() {
            continue;
        }
        let grads: Vec<(f64, f64)> = (0..rec.zs.len())
            .filter_map(|k| {
                let y = DVector::from_fn(near.len(), |r, _| rec.vectors[near[r]].r[k]);
                svd.solve(&y, 0.0).ok().map(|c| (c[1], c[2]))
            })
            .collect();
        if let Ok(est) = metric_from_gradients(&grads, 3.0) {
            out.push((RecoveryRow { x: x0.0, y: x0.1, c_true: metric.speed_at(x0.0, x0.1), c_est: est.c }, est));
        }
    }
    out
}

/// Heat kernel h(p, q, t) = sum_i exp(-lambda_i t) phi_i(p) phi_i(q) over the computed modes.
pub fn heat_kernel(eig: &NeumannEigen, p: usize, q: usize, t: f64) -> f64 {
    eig.values.iter().enumerate().map(|(i, &l)| (-l * t).exp() * eig.vectors[(p, i)] * eig.vectors[(q, i)]).sum()
}

/// Varadhan distance d(p, q)^2 = lim_{t -> 0} -4t log h. The 2D prefactor is divided out,
/// F(t) = -4t log(4 pi t h) = d^2 + O(t), and F is extrapolated to t = 0 by a least-squares
/// polynomial of degree len - 1 (at most 2) in t.
pub fn heat_distance(eig: &NeumannEigen, p: usize, q: usize, ts: &[f64]) -> Result<f64> {
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Argument("heat_distance needs positive times".into()));
    }
    if p == q {
        return Ok(0.0);
    }
    let (p, q) = (p.min(q), p.max(q));
    let mut f = Vec::with_capacity(ts.len());
    for &t in ts {
        let h = heat_kernel(eig, p, q, t);
        if !(h > 0.0) {
            return Err(Error::Truncation(format!("heat kernel {h:.3e} <= 0 at t = {t} with {} modes", eig.values.len())));
        }
        f.push(-4.0 * t * (4.0 * PI * t * h).ln());
    }
    let deg = (ts.len() - 1).min(2);
    let a = DMatrix::from_fn(ts.len(), deg + 1, |r, c| ts[r].powi(c as i32));
    let x = a.svd(true, true).solve(&DVector::from_vec(f), 0.0).map_err(|e| Error::Solver(e.to_string()))?;
    Ok(x[0].max(0.0).sqrt())
}

/// Grid node nearest to (x, y).
pub fn nearest_node(grid: &GridSpec, x: f64, y: f64) -> usize {
    let i = (x / grid.dx()).round().clamp(0.0, (grid.nx - 1) as f64) as usize;
    let j = (y / grid.dy()).round().clamp(0.0, (grid.ny - 1) as f64) as usize;
    grid.index(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::eigen::neumann_eigensolve_unchecked;
    use crate::bc::metric::MetricSpec;
    use crate::bc::reconstruct::boundary_samples;

    #[test]
    fn exact_gradients_and_scaling() {
        // g^{ij} = diag(4, 1): unit covectors of that metric
        let grads: Vec<(f64, f64)> = [0.3f64, 1.1, 2.0, 2.9].iter().map(|&a| (a.cos() / 2.0, a.sin())).collect();
        let m = metric_from_gradients(&grads, 0.0).unwrap();
        assert!((m.g[0][0] - 4.0).abs() < 1e-12 && m.g[0][1].abs() < 1e-12 && (m.g[1][1] - 1.0).abs() < 1e-12);
        let alpha = 1.7;
        let scaled: Vec<(f64, f64)> = grads.iter().map(|&(p, q)| (alpha * p, alpha * q)).collect();
        let s = metric_from_gradients(&scaled, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((s.g[i][j] - m.g[i][j] / (alpha * alpha)).abs() <= 1e-10 * m.g[i][j].abs().max(1.0));
            }
        }
        let parallel = vec![(1.0, 0.0), (2.0, 0.0), (-1.0, 0.0)];
        assert!(matches!(metric_from_gradients(&parallel, 0.0), Err(Error::IllPosed { .. })));
        assert!(matches!(metric_from_gradients(&parallel[..2], 0.0), Err(Error::IllPosed { .. })));
    }

    #[test]
    fn constant_speed_recovered_from_fast_marching() {
        let g = GridSpec { nx: 49, ny: 49, lx: 1.0, ly: 1.0 };
        let m = ConformalMetric::new(g, MetricSpec::Constant { c: 1.0 }).unwrap();
        let zs = boundary_samples(&m.boundary(), 0.25);
        let f = DistanceFields::oracle(&m, &zs);
        for x0 in [(0.5, 0.5), (0.3, 0.6), (0.7, 0.3)] {
            let est = metric_recover(&m, &f, x0).unwrap();
            assert!((est.c - 1.0).abs() < 0.05, "{x0:?} {est:?}");
            assert!(est.g[0][1].abs() <= 0.1 * est.g[0][0]);
        }
        assert!(metric_recover(&m, &f, (0.01, 0.5)).is_err());
    }

    #[test]
    fn heat_distance_basics() {
        let g = GridSpec { nx: 41, ny: 41, lx: 1.0, ly: 1.0 };
        let m = ConformalMetric::constant(g, 1.0).unwrap();
        let eig = neumann_eigensolve_unchecked(&m, 160).unwrap();
        let (p, q) = (nearest_node(&g, 0.4, 0.5), nearest_node(&g, 0.6, 0.55));
        let ts = [0.006, 0.009, 0.012];
        assert_eq!(heat_distance(&eig, p, p, &ts).unwrap(), 0.0);
        let a = heat_distance(&eig, p, q, &ts).unwrap();
        let b = heat_distance(&eig, q, p, &ts).unwrap();
        assert!((a - b).abs() <= 1e-10);
        let d = 0.2f64.hypot(0.05);
        assert!((a - d).abs() < 0.1 * d, "{a} vs {d}");
        assert!(heat_distance(&eig, p, q, &[]).is_err());
    }
}
