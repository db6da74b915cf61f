//! Conformal metric g = c^{-2} (dx^2 + dy^2) on a rectangle, sampled on a vertex grid.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "Lx", alias = "lx")]
    pub lx: f64,
    #[serde(rename = "Ly", alias = "ly")]
    pub ly: f64,
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        self.lx / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / (self.ny - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn point(&self, p: usize) -> (f64, f64) {
        ((p % self.nx) as f64 * self.dx(), (p / self.nx) as f64 * self.dy())
    }

    pub fn diameter(&self) -> f64 {
        self.lx.hypot(self.ly)
    }

    pub fn check(&self) -> Result<()> {
        if self.nx < 8 || self.ny < 8 || !(self.lx > 0.0) || !(self.ly > 0.0) {
            return Err(Error::Config(format!("grid needs nx, ny >= 8 and positive lengths, got {self:?}")));
        }
        Ok(())
    }
}

/// Wave-speed profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricSpec {
    Constant {
        #[serde(default = "one")]
        c: f64,
    },
    /// c = 1 - depth exp(-|x - center|^2 / (2 width^2)): slow in the middle.
    Lens {
        #[serde(default = "lens_depth")]
        depth: f64,
        #[serde(default = "lens_width")]
        width: f64,
        #[serde(default)]
        center: Option<[f64; 2]>,
    },
    /// Values on an (m x n) grid spanning the rectangle, row-major in y, bilinear in between.
    Table { nx: usize, ny: usize, values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}
fn lens_depth() -> f64 {
    0.3
}
fn lens_width() -> f64 {
    0.15
}

impl MetricSpec {
    pub fn lens() -> Self {
        MetricSpec::Lens { depth: lens_depth(), width: lens_width(), center: None }
    }

    /// Wave speed at (x, y) of the rectangle.
    pub fn speed(&self, grid: &GridSpec, x: f64, y: f64) -> f64 {
        match self {
            MetricSpec::Constant { c } => *c,
            MetricSpec::Lens { depth, width, center } => {
                let [cx, cy] = center.unwrap_or([0.5 * grid.lx, 0.5 * grid.ly]);
                let r2 = (x - cx).powi(2) + (y - cy).powi(2);
                1.0 - depth * (-r2 / (2.0 * width * width)).exp()
            }
            MetricSpec::Table { nx, ny, values } => bilinear(*nx, *ny, values, x / grid.lx, y / grid.ly),
        }
    }
}

fn bilinear(nx: usize, ny: usize, v: &[f64], u: f64, w: f64) -> f64 {
    let fx = (u.clamp(0.0, 1.0) * (nx - 1) as f64).min((nx - 1) as f64 - 1e-12);
    let fy = (w.clamp(0.0, 1.0) * (ny - 1) as f64).min((ny - 1) as f64 - 1e-12);
    let (i, j) = (fx as usize, fy as usize);
    let (a, b) = (fx - i as f64, fy - j as f64);
    let at = |i: usize, j: usize| v[j * nx + i];
    (1.0 - a) * (1.0 - b) * at(i, j) + a * (1.0 - b) * at(i + 1, j) + (1.0 - a) * b * at(i, j + 1) + a * b * at(i + 1, j + 1)
}

/// Sampled conformal factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalMetric {
    pub grid: GridSpec,
    pub spec: MetricSpec,
    pub c: Vec<f64>,
}

impl ConformalMetric {
    pub fn new(grid: GridSpec, spec: MetricSpec) -> Result<Self> {
        grid.check()?;
        if let MetricSpec::Table { nx, ny, values } = &spec {
            if *nx < 2 || *ny < 2 || values.len() != nx * ny {
                return Err(Error::Config("metric table needs nx, ny >= 2 and nx*ny values".into()));
            }
        }
        let c: Vec<f64> = (0..grid.len())
            .map(|p| {
                let (x, y) = grid.point(p);
                spec.speed(&grid, x, y)
            })
            .collect();
        let (lo, hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        if !(lo >= 0.2 && hi <= 5.0) {
            return Err(Error::Config(format!("wave speed must stay in [0.2, 5], got [{lo}, {hi}]")));
        }
        Ok(Self { grid, spec, c })
    }

    pub fn constant(grid: GridSpec, c: f64) -> Result<Self> {
        Self::new(grid, MetricSpec::Constant { c })
    }

    pub fn speed_at(&self, x: f64, y: f64) -> f64 {
        self.spec.speed(&self.grid, x, y)
    }

    pub fn c_max(&self) -> f64 {
        self.c.iter().cloned().fold(0.0, f64::max)
    }

    /// Trapezoid cell areas (Euclidean).
    pub fn cell_weights(&self) -> Vec<f64> {
        let g = &self.grid;
        let (dx, dy) = (g.dx(), g.dy());
        (0..g.len())
            .map(|p| {
                let (i, j) = (p % g.nx, p / g.nx);
                let ex = if i == 0 || i == g.nx - 1 { 0.5 * dx } else { dx };
                let ey = if j == 0 || j == g.ny - 1 { 0.5 * dy } else { dy };
                ex * ey
            })
            .collect()
    }

    /// Diagonal of the g-volume mass matrix, W c^{-2}.
    pub fn mass(&self) -> Vec<f64> {
        self.cell_weights().iter().zip(&self.c).map(|(w, c)| w / (c * c)).collect()
    }

    pub fn boundary(&self) -> Boundary {
        Boundary::new(self)
    }
}

/// Boundary nodes in counter-clockwise order from (0, 0), with Euclidean arclength and
/// the g-measure weights c^{-1} dz (trapezoid).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub nodes: Vec<usize>,
    pub arclength: Vec<f64>,
    pub weights: Vec<f64>,
    pub perimeter: f64,
}

impl Boundary {
    fn new(m: &ConformalMetric) -> Self {
        let g = &m.grid;
        let (nx, ny) = (g.nx, g.ny);
        let mut nodes = Vec::with_capacity(2 * (nx + ny) - 4);
        for i in 0..nx {
            nodes.push(g.index(i, 0));
        }
        for j in 1..ny {
            nodes.push(g.index(nx - 1, j));
        }
        for i in (0..nx - 1).rev() {
            nodes.push(g.index(i, ny - 1));
        }
        for j in (1..ny - 1).rev() {
            nodes.push(g.index(0, j));
        }
        let mut arclength = Vec::with_capacity(nodes.len());
        let mut s = 0.0;
        for k in 0..nodes.len() {
            if k > 0 {
                let (a, b) = (g.point(nodes[k - 1]), g.point(nodes[k]));
                s += (a.0 - b.0).hypot(a.1 - b.1);
            }
            arclength.push(s);
        }
        let perimeter = 2.0 * (g.lx + g.ly);
        let n = nodes.len();
        let weights = (0..n)
            .map(|k| {
                let p = g.point(nodes[k]);
                let prev = g.point(nodes[(k + n - 1) % n]);
                let next = g.point(nodes[(k + 1) % n]);
                let dz = 0.5 * ((p.0 - prev.0).hypot(p.1 - prev.1) + (p.0 - next.0).hypot(p.1 - next.1));
                dz / m.c[nodes[k]]
            })
            .collect();
        Self { nodes, arclength, weights, perimeter }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Periodic arclength distance between two boundary positions.
    pub fn arc_distance(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(self.perimeter);
        d.min(self.perimeter - d)
    }

    /// Index of the boundary node nearest to arclength position a.
    pub fn nearest(&self, a: f64) -> usize {
        (0..self.len())
            .min_by(|&i, &j| self.arc_distance(self.arclength[i], a).total_cmp(&self.arc_distance(self.arclength[j], a)))
            .unwrap_or(0)
    }

    /// Euclidean point at arclength position a (counter-clockwise from the origin corner).
    pub fn point_at(&self, grid: &GridSpec, a: f64) -> (f64, f64) {
        let s = a.rem_euclid(self.perimeter);
        let (lx, ly) = (grid.lx, grid.ly);
        if s <= lx {
            (s, 0.0)
        } else if s <= lx + ly {
            (lx, s - lx)
        } else if s <= 2.0 * lx + ly {
            (2.0 * lx + ly - s, ly)
        } else {
            (0.0, 2.0 * (lx + ly) - s)
        }
    }

    /// Inward unit normal at arclength position a (corners take the diagonal).
    pub fn inward_normal(&self, grid: &GridSpec, a: f64) -> (f64, f64) {
        let (x, y) = self.point_at(grid, a);
        let tol = 1e-12 * (grid.lx + grid.ly);
        let mut n: (f64, f64) = (0.0, 0.0);
        if x <= tol {
            n.0 += 1.0;
        }
        if x >= grid.lx - tol {
            n.0 -= 1.0;
        }
        if y <= tol {
            n.1 += 1.0;
        }
        if y >= grid.ly - tol {
            n.1 -= 1.0;
        }
        let r = n.0.hypot(n.1);
        (n.0 / r, n.1 / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_layout() {
        let g = GridSpec { nx: 11, ny: 9, lx: 1.0, ly: 0.8 };
        let m = ConformalMetric::constant(g, 2.0).unwrap();
        let b = m.boundary();
        assert_eq!(b.len(), 2 * (11 + 9) - 4);
        let total: f64 = b.weights.iter().sum();
        assert!((total - 0.5 * b.perimeter).abs() < 1e-12);
        let mut seen = b.nodes.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), b.len());
        assert!((b.arclength.last().unwrap() + g.dy() - b.perimeter).abs() < 1e-12);
        let q = b.point_at(&g, 1.2);
        assert!((q.0 - 1.0).abs() < 1e-12 && (q.1 - 0.2).abs() < 1e-12);
        assert_eq!(b.inward_normal(&g, 0.5), (0.0, 1.0));
    }

    #[test]
    fn speed_bounds_enforced() {
        let g = GridSpec { nx: 16, ny: 16, lx: 1.0, ly: 1.0 };
        assert!(ConformalMetric::constant(g, 0.1).is_err());
        let lens = ConformalMetric::new(g, MetricSpec::lens()).unwrap();
        assert!(lens.speed_at(0.5, 0.5) < lens.speed_at(0.0, 0.0));
        let t = MetricSpec::Table { nx: 2, ny: 2, values: vec![1.0, 2.0, 1.0, 2.0] };
        assert!((t.speed(&g, 0.5, 0.3) - 1.5).abs() < 1e-12);
        let json = r#"{"kind":"lens","depth":0.2}"#;
        let s: MetricSpec = serde_json::from_str(json).unwrap();
        assert_eq!(s, MetricSpec::Lens { depth: 0.2, width: 0.15, center: None });
    }
}
