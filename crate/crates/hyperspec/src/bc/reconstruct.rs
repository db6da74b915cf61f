//! Reconstruction of the set R(N) of boundary distance functions on an epsilon-net of
//! boundary normal coordinates (w, s), and its fast-marching reference.

use super::eigen::BoundarySpectralData;
use super::metric::{Boundary, ConformalMetric};
use super::oracle::distance_from_boundary_point;
use super::projection::{ArrivalPicker, ControlSettings, ControlSpace, PickerSettings, Verdict};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// r(z) = d(x, z) over the boundary sample, for x = gamma_w(s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceVector {
    pub w: f64,
    pub s: f64,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Reconstruction {
    pub eps: f64,
    /// boundary sample positions (arclength)
    pub zs: Vec<f64>,
    pub vectors: Vec<DistanceVector>,
    pub probes: usize,
    pub indeterminate: usize,
    /// probes past the cut value by the influence test
    pub beyond_cut: usize,
    /// admissible probes whose vector contradicts d(x, dN) = s
    pub inconsistent: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructSettings {
    pub eps: f64,
    /// deepest probe
    pub s_max: f64,
    /// accepted deficit of min_z r(z) below s
    pub consistency: f64,
    /// width of the median filter along the boundary (odd)
    pub median: usize,
}

impl Default for ReconstructSettings {
    fn default() -> Self {
        Self { eps: 0.05, s_max: 0.6, consistency: 0.1, median: 5 }
    }
}

/// Evenly spaced boundary positions at spacing close to h.
pub fn boundary_samples(boundary: &Boundary, h: f64) -> Vec<f64> {
    let n = (boundary.perimeter / h).round().max(4.0) as usize;
    (0..n).map(|k| k as f64 * boundary.perimeter / n as f64).collect()
}

/// Circular median filter.
fn median_filter(r: &[f64], width: usize) -> Vec<f64> {
    if width <= 1 || r.len() < width {
        return r.to_vec();
    }
    let n = r.len();
    let h = width / 2;
    (0..n)
        .map(|i| {
            let mut win: Vec<f64> = (0..width).map(|k| r[(i + n + k - h) % n]).collect();
            win.sort_by(f64::total_cmp);
            win[h]
        })
        .collect()
}

/// Runs the probe net. Probes along each w stop at the first False verdict (the cut value).
/// Distances are first-arrival picks against the packet, so min_z r(z) sits about eps below s
/// at the cap; a deficit beyond `consistency` marks a point already past its cut.
pub fn reconstruct_r(bsd: &BoundarySpectralData, control: ControlSettings, picker: PickerSettings, rs: ReconstructSettings) -> Result<Reconstruction> {
    let cell = bsd.grid.dx().max(bsd.grid.dy());
    if rs.eps < 2.0 * cell - 1e-12 {
        return Err(Error::Config(format!("resolution eps = {} is below two grid cells ({})", rs.eps, 2.0 * cell)));
    }
    if rs.s_max > control.t_final + control.eps + 1e-12 {
        return Err(Error::Config(format!("s_max = {} needs T >= s_max - eps (T = {})", rs.s_max, control.t_final)));
    }
    let space = ControlSpace::new(bsd, control)?;
    let pick = ArrivalPicker::new(bsd, picker)?;
    let zs = boundary_samples(&bsd.boundary, rs.eps);
    let ws = zs.clone();
    let mut alive = vec![true; ws.len()];
    let mut out = Reconstruction { eps: rs.eps, zs: zs.clone(), vectors: vec![], probes: 0, indeterminate: 0, beyond_cut: 0, inconsistent: 0 };
    let ns = (rs.s_max / rs.eps + 1e-9).floor() as usize;
    for k in 1..=ns {
        let s = k as f64 * rs.eps;
        if !alive.iter().any(|&a| a) {
            break;
        }
        let layer = space.layer(s);
        for (iw, &w) in ws.iter().enumerate() {
            if !alive[iw] {
                continue;
            }
            out.probes += 1;
            let probe = space.probe(&layer, w, s);
            match probe.verdict {
                Verdict::False => {
                    alive[iw] = false;
                    out.beyond_cut += 1;
                    continue;
                }
                Verdict::Indeterminate => {
                    out.indeterminate += 1;
                    continue;
                }
                Verdict::True => {}
            }
            let r = match pick.distance_vector(&probe, &zs) {
                Ok(r) => median_filter(&r, rs.median),
                Err(_) => {
                    out.inconsistent += 1;
                    continue;
                }
            };
            let rmin = r.iter().cloned().fold(f64::INFINITY, f64::min);
            if rmin < s - rs.consistency {
                out.inconsistent += 1;
                continue;
            }
            out.vectors.push(DistanceVector { w, s, r });
        }
    }
    Ok(out)
}

/// Fast-marching R(N): boundary distance vectors of the grid nodes (every `stride`-th in each
/// direction) over the sample zs.
pub fn true_distance_vectors(metric: &ConformalMetric, zs: &[f64], stride: usize) -> Vec<Vec<f64>> {
    let b = metric.boundary();
    let g = &metric.grid;
    let fields: Vec<Vec<f64>> = zs.iter().map(|&z| distance_from_boundary_point(metric, &b, z, 1.5 * g.dx().max(g.dy()))).collect();
    let stride = stride.max(1);
    let mut out = vec![];
    for j in (0..g.ny).step_by(stride) {
        for i in (0..g.nx).step_by(stride) {
            let p = g.index(i, j);
            out.push(fields.iter().map(|f| f[p]).collect());
        }
    }
    out
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Hausdorff distance between two finite sets of vectors in the sup norm.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one = |x: &[Vec<f64>], y: &[Vec<f64>]| x.iter().map(|p| y.iter().map(|q| sup_dist(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hausdorff_basics() {
        let a = vec![vec![0.0, 1.0], vec![1.0, 1.0]];
        let b = vec![vec![0.0, 1.2]];
        assert!((hausdorff(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(hausdorff(&a, &a), 0.0);
        assert!(hausdorff(&a, &[]).is_infinite());
    }

    #[test]
    fn median_removes_isolated_outliers() {
        let r = vec![1.0, 1.1, 5.0, 1.3, 1.4, 1.5, 1.6];
        let m = median_filter(&r, 3);
        assert_eq!(m[2], 1.3);
        assert_eq!(m[4], 1.4);
    }
}
