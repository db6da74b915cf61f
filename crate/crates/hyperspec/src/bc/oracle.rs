//! Forward-model oracles: leapfrog wave solver, fast marching and geodesic ray tracing.
//! None of these are used by the reconstruction itself.

use super::control::ControlFunction;
use super::eigen::stiffness;
use super::metric::{Boundary, ConformalMetric};
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Leapfrog states at the requested times.
#[derive(Debug, Clone)]
pub struct FdWave {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    /// max relative change of the discrete energy over the source-free steps
    pub energy_drift: f64,
}

/// M u'' + S u = b(t), b = boundary load of the Neumann source, from rest (or from (u0, v0)).
pub fn fd_wave_oracle(
    metric: &ConformalMetric,
    f: &ControlFunction,
    init: Option<(&[f64], &[f64])>,
    times: &[f64],
    cfl: f64,
) -> Result<FdWave> {
    if !(cfl > 0.0 && cfl <= 0.5) {
        return Err(Error::Config(format!("CFL number must lie in (0, 0.5], got {cfl}")));
    }
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Argument("output times must be non-negative".into()));
    }
    let g = &metric.grid;
    let h = g.dx().min(g.dy());
    let mut steps = ((t_max / (cfl * h / metric.c_max())).ceil() as usize).max(1);
    if t_max == 0.0 {
        steps = 1;
    }
    let dt = if t_max > 0.0 { t_max / steps as f64 } else { cfl * h / metric.c_max() };
    let s = stiffness(metric);
    let mass = metric.mass();
    let boundary = metric.boundary();
    let n = g.len();
    let load = |t: f64, out: &mut Vec<f64>| {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (k, &p) in boundary.nodes.iter().enumerate() {
            out[p] = boundary.weights[k] * f.eval(&boundary, boundary.arclength[k], t);
        }
    };
    let (mut prev, mut cur) = match init {
        Some((u0, v0)) => {
            if u0.len() != n || v0.len() != n {
                return Err(Error::Argument("initial data length mismatch".into()));
            }
            // Taylor start: u1 = u0 + dt v0 + dt^2/2 M^{-1}(b - S u0)
            let mut su = vec![0.0; n];
            s.apply(u0, &mut su);
            let mut b = vec![0.0; n];
            load(0.0, &mut b);
            let u1: Vec<f64> = (0..n).map(|p| u0[p] + dt * v0[p] + 0.5 * dt * dt * (b[p] - su[p]) / mass[p]).collect();
            (u0.to_vec(), u1)
        }
        None => {
            let mut b = vec![0.0; n];
            load(0.0, &mut b);
            let u1: Vec<f64> = (0..n).map(|p| 0.5 * dt * dt * b[p] / mass[p]).collect();
            (vec![0.0; n], u1)
        }
    };
    let free_from = f.last_time();
    let energy = |u0: &[f64], u1: &[f64]| {
        let mut su = vec![0.0; n];
        s.apply(u0, &mut su);
        let mut e = 0.0;
        for p in 0..n {
            let v = (u1[p] - u0[p]) / dt;
            e += 0.5 * mass[p] * v * v + 0.5 * su[p] * u1[p];
        }
        e
    };
    let mut e_ref: Option<f64> = None;
    let mut drift: f64 = 0.0;
    let mut history: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut wanted: Vec<usize> = Vec::new();
    for &t in times {
        let r = t / dt;
        wanted.push(r.floor() as usize);
        wanted.push((r.ceil() as usize).min(steps));
    }
    wanted.sort();
    wanted.dedup();
    let keep = |step: usize, u: &[f64], history: &mut Vec<(usize, Vec<f64>)>| {
        if wanted.binary_search(&step).is_ok() {
            history.push((step, u.to_vec()));
        }
    };
    keep(0, &prev, &mut history);
    keep(1, &cur, &mut history);
    let mut su = vec![0.0; n];
    let mut b = vec![0.0; n];
    for step in 1..steps {
        let t = step as f64 * dt;
        s.apply(&cur, &mut su);
        load(t, &mut b);
        let next: Vec<f64> = (0..n).map(|p| 2.0 * cur[p] - prev[p] + dt * dt * (b[p] - su[p]) / mass[p]).collect();
        prev = std::mem::replace(&mut cur, next);
        keep(step + 1, &cur, &mut history);
        if t >= free_from {
            let e = energy(&prev, &cur);
            match e_ref {
                None => e_ref = Some(e),
                Some(r) => drift = drift.max((e - r).abs() / r.abs().max(1e-300)),
            }
        }
    }
    let lookup = |step: usize| -> &Vec<f64> { &history.iter().find(|(s, _)| *s == step).expect("stored step").1 };
    let states = times
        .iter()
        .map(|&t| {
            let r = t / dt;
            let (a, b) = (r.floor() as usize, (r.ceil() as usize).min(steps));
            let w = r - a as f64;
            let (ua, ub) = (lookup(a), lookup(b));
            ua.iter().zip(ub).map(|(x, y)| (1.0 - w) * x + w * y).collect()
        })
        .collect();
    Ok(FdWave { times: times.to_vec(), states, dt, energy_drift: drift })
}

/// g-volume inner product on the grid.
pub fn mass_inner(metric: &ConformalMetric, u: &[f64], v: &[f64]) -> f64 {
    metric.mass().iter().zip(u.iter().zip(v)).map(|(m, (a, b))| m * a * b).sum()
}

#[derive(PartialEq)]
struct Node(f64, usize);
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Travel-time field from the given (node, initial time) seeds, second-order upwind
/// fast marching for |grad T| = 1/c.
pub fn fast_marching(metric: &ConformalMetric, seeds: &[(usize, f64)]) -> Vec<f64> {
    let g = &metric.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (dx, dy) = (g.dx(), g.dy());
    let n = g.len();
    let mut t = vec![f64::INFINITY; n];
    let mut known = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &(p, v) in seeds {
        if v < t[p] {
            t[p] = v;
            heap.push(Node(v, p));
        }
    }
    let solve = |p: usize, t: &[f64], known: &[bool]| -> f64 {
        let (i, j) = (p % nx, p / nx);
        let slow = 1.0 / metric.c[p];
        // per axis: (coefficient, value) of the upwind difference
        let axis = |d: usize, len: usize, stride: usize, h: f64| -> Option<(f64, f64)> {
            let mut best: Option<(f64, f64)> = None;
            for dir in [-1i64, 1] {
                let q1 = d as i64 + dir;
                if q1 < 0 || q1 >= len as i64 {
                    continue;
                }
                let p1 = (p as i64 + dir * stride as i64) as usize;
                if !known[p1] {
                    continue;
                }
                let t1 = t[p1];
                let q2 = d as i64 + 2 * dir;
                let cand = if q2 >= 0 && q2 < len as i64 {
                    let p2 = (p as i64 + 2 * dir * stride as i64) as usize;
                    if known[p2] && t[p2] <= t1 {
                        (1.5 / h, (4.0 * t1 - t[p2]) / 3.0)
                    } else {
                        (1.0 / h, t1)
                    }
                } else {
                    (1.0 / h, t1)
                };
                if best.map_or(true, |b| cand.1 < b.1) {
                    best = Some(cand);
                }
            }
            best
        };
        let ax = axis(i, nx, 1, dx);
        let ay = axis(j, ny, nx, dy);
        let single = |(a, v): (f64, f64)| v + slow / a;
        match (ax, ay) {
            (Some(x), None) => single(x),
            (None, Some(y)) => single(y),
            (Some(x), Some(y)) => {
                // (a (T - u))^2 + (b (T - v))^2 = slow^2
                let (a2, b2) = (x.0 * x.0, y.0 * y.0);
                let qa = a2 + b2;
                let qb = -2.0 * (a2 * x.1 + b2 * y.1);
                let qc = a2 * x.1 * x.1 + b2 * y.1 * y.1 - slow * slow;
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let r = (-qb + disc.sqrt()) / (2.0 * qa);
                    if r >= x.1.max(y.1) {
                        return r;
                    }
                }
                single(x).min(single(y))
            }
            (None, None) => f64::INFINITY,
        }
    };
    while let Some(Node(v, p)) = heap.pop() {
        if known[p] || v > t[p] {
            continue;
        }
        known[p] = true;
        let (i, j) = (p % nx, p / nx);
        let mut nb = Vec::with_capacity(4);
        if i > 0 {
            nb.push(p - 1);
        }
        if i + 1 < nx {
            nb.push(p + 1);
        }
        if j > 0 {
            nb.push(p - nx);
        }
        if j + 1 < ny {
            nb.push(p + nx);
        }
        for q in nb {
            if known[q] {
                continue;
            }
            let cand = solve(q, &t, &known);
            if cand < t[q] {
                t[q] = cand;
                heap.push(Node(cand, q));
            }
        }
    }
    t
}

/// Travel time from a boundary point at arclength a; nodes within `r0` Euclidean radius are
/// seeded with |x - z| / c(z).
pub fn distance_from_boundary_point(metric: &ConformalMetric, boundary: &Boundary, a: f64, r0: f64) -> Vec<f64> {
    let g = &metric.grid;
    let z = boundary.point_at(g, a);
    let cz = metric.speed_at(z.0, z.1);
    let seeds: Vec<(usize, f64)> = (0..g.len())
        .filter_map(|p| {
            let (x, y) = g.point(p);
            let r = (x - z.0).hypot(y - z.1);
            (r <= r0).then(|| (p, r / (0.5 * (cz + metric.c[p]))))
        })
        .collect();
    fast_marching(metric, &seeds)
}

/// Travel time to the whole boundary.
pub fn distance_to_boundary(metric: &ConformalMetric) -> Vec<f64> {
    let b = metric.boundary();
    fast_marching(metric, &b.nodes.iter().map(|&p| (p, 0.0)).collect::<Vec<_>>())
}

/// Bilinear interpolation of a grid field.
pub fn interpolate(metric: &ConformalMetric, field: &[f64], x: f64, y: f64) -> f64 {
    let g = &metric.grid;
    let fx = (x / g.dx()).clamp(0.0, (g.nx - 1) as f64 - 1e-9);
    let fy = (y / g.dy()).clamp(0.0, (g.ny - 1) as f64 - 1e-9);
    let (i, j) = (fx as usize, fy as usize);
    let (a, b) = (fx - i as f64, fy - j as f64);
    let at = |i: usize, j: usize| field[g.index(i, j)];
    (1.0 - a) * (1.0 - b) * at(i, j) + a * (1.0 - b) * at(i + 1, j) + (1.0 - a) * b * at(i, j + 1) + a * b * at(i + 1, j + 1)
}

/// Boundary normal geodesic from arclength position a, sampled every ds of g-arclength up to s_max
/// (stops when it leaves the rectangle). Hamilton form: x' = c^2 p, p' = -|p|^2 c grad c.
pub fn normal_geodesic(metric: &ConformalMetric, boundary: &Boundary, a: f64, s_max: f64, ds: f64) -> Vec<(f64, f64)> {
    let g = &metric.grid;
    let z = boundary.point_at(g, a);
    let nrm = boundary.inward_normal(g, a);
    let c0 = metric.speed_at(z.0, z.1);
    let grad = |x: f64, y: f64| {
        let h = 1e-6;
        (
            (metric.speed_at(x + h, y) - metric.speed_at(x - h, y)) / (2.0 * h),
            (metric.speed_at(x, y + h) - metric.speed_at(x, y - h)) / (2.0 * h),
        )
    };
    let rhs = |s: [f64; 4]| {
        let c = metric.speed_at(s[0], s[1]);
        let (gx, gy) = grad(s[0], s[1]);
        let p2 = s[2] * s[2] + s[3] * s[3];
        [c * c * s[2], c * c * s[3], -p2 * c * gx, -p2 * c * gy]
    };
    let mut st = [z.0, z.1, nrm.0 / c0, nrm.1 / c0];
    let mut out = vec![(st[0], st[1])];
    let steps = (s_max / ds).ceil() as usize;
    for _ in 0..steps {
        let k1 = rhs(st);
        let add = |a: [f64; 4], k: [f64; 4], h: f64| [a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2], a[3] + h * k[3]];
        let k2 = rhs(add(st, k1, 0.5 * ds));
        let k3 = rhs(add(st, k2, 0.5 * ds));
        let k4 = rhs(add(st, k3, ds));
        for q in 0..4 {
            st[q] += ds / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        }
        if st[0] < 0.0 || st[0] > g.lx || st[1] < 0.0 || st[1] > g.ly {
            break;
        }
        out.push((st[0], st[1]));
    }
    out
}

/// Cut value of the boundary normal geodesic from a: the first s with d(gamma(s), boundary) < s - tol.
pub fn boundary_cut_value(metric: &ConformalMetric, boundary: &Boundary, to_boundary: &[f64], a: f64, tol: f64) -> f64 {
    let ds = 0.25 * metric.grid.dx().min(metric.grid.dy());
    let path = normal_geodesic(metric, boundary, a, 2.0 * metric.grid.diameter(), ds);
    for (k, &(x, y)) in path.iter().enumerate() {
        let s = k as f64 * ds;
        if interpolate(metric, to_boundary, x, y) < s - tol {
            return s;
        }
    }
    (path.len() - 1) as f64 * ds
}
