//! Upper half-space model H^n = {(x, y) : x in R^{n-1}, y > 0} with metric (dx^2 + dy^2)/y^2.

use crate::error::{arg, Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Coordinates closer than this are treated as the same point.
pub const POINT_EQ_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    pub x: Vec<f64>,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return arg(format!("not an upper half-space point: y = {y}"));
        }
        Ok(Self { x, y })
    }

    /// Point of H^2 from a complex number with positive imaginary part.
    pub fn from_complex(z: C64) -> Result<Self> {
        Self::new(vec![z.re], z.im)
    }

    pub fn to_complex(&self) -> C64 {
        C64::new(self.x.first().copied().unwrap_or(0.0), self.y)
    }

    /// The base point (0, 1) of H^n.
    pub fn origin(n: usize) -> Self {
        Self { x: vec![0.0; n.saturating_sub(1)], y: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.x.len() + 1
    }

    fn euclid_sq(&self, other: &Self) -> f64 {
        let dx: f64 = self.x.iter().zip(&other.x).map(|(a, b)| (a - b) * (a - b)).sum();
        dx + (self.y - other.y).powi(2)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.x.len() == other.x.len()
            && self.x.iter().zip(&other.x).all(|(a, b)| (a - b).abs() <= POINT_EQ_TOL)
            && (self.y - other.y).abs() <= POINT_EQ_TOL
    }
}

fn same_dim(p: &UpperHalfPoint, q: &UpperHalfPoint) -> Result<()> {
    if p.x.len() != q.x.len() {
        return arg(format!("dimension mismatch: {} vs {}", p.dim(), q.dim()));
    }
    Ok(())
}

/// Hyperbolic distance. Uses sinh(d/2) = |p - q| / (2 sqrt(y y')), which has no
/// cancellation near d = 0 and is algebraically the same as the arccosh form.
pub fn hyperbolic_distance(p: &UpperHalfPoint, q: &UpperHalfPoint) -> Result<f64> {
    same_dim(p, q)?;
    let e = p.euclid_sq(q).sqrt();
    Ok(2.0 * (e / (2.0 * (p.y * q.y).sqrt())).asinh())
}

/// d from (cosh d - 1)/2 = |p - q|^2 / (4 y y').
pub fn distance_cosh_form(p: &UpperHalfPoint, q: &UpperHalfPoint) -> Result<f64> {
    same_dim(p, q)?;
    let c = 1.0 + p.euclid_sq(q) / (2.0 * p.y * q.y);
    Ok(c.acosh())
}

/// d from tanh^2(d/2) = (|x - x'|^2 + |y - y'|^2) / (|x - x'|^2 + |y + y'|^2).
pub fn distance_tanh_form(p: &UpperHalfPoint, q: &UpperHalfPoint) -> Result<f64> {
    same_dim(p, q)?;
    let dx: f64 = p.x.iter().zip(&q.x).map(|(a, b)| (a - b) * (a - b)).sum();
    let t2 = (dx + (p.y - q.y).powi(2)) / (dx + (p.y + q.y).powi(2));
    Ok(2.0 * t2.sqrt().atanh())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeodesicCurve {
    /// {(x0, y) : y > 0}
    VerticalLine { x0: Vec<f64> },
    /// Half circle |x - center|^2 + y^2 = radius^2 inside the vertical plane
    /// through `center` spanned by the horizontal unit vector `direction`.
    HemiCircle { center: Vec<f64>, radius: f64, direction: Vec<f64> },
}

impl GeodesicCurve {
    /// Euclidean distance from a point to the curve (0 when the point lies on it).
    pub fn residual(&self, p: &UpperHalfPoint) -> f64 {
        match self {
            GeodesicCurve::VerticalLine { x0 } => {
                x0.iter().zip(&p.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            }
            GeodesicCurve::HemiCircle { center, radius, direction } => {
                let rel: Vec<f64> = p.x.iter().zip(center).map(|(a, c)| a - c).collect();
                let along: f64 = rel.iter().zip(direction).map(|(a, e)| a * e).sum();
                let off: f64 = rel
                    .iter()
                    .zip(direction)
                    .map(|(a, e)| (a - along * e).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let rho = (along * along + p.y * p.y).sqrt();
                off.hypot(rho - radius)
            }
        }
    }
}

/// The unique geodesic through two distinct points.
pub fn geodesic_through(p: &UpperHalfPoint, q: &UpperHalfPoint) -> Result<GeodesicCurve> {
    same_dim(p, q)?;
    if p.approx_eq(q) {
        return Err(Error::Degenerate("geodesic through coincident points".into()));
    }
    let diff: Vec<f64> = q.x.iter().zip(&p.x).map(|(a, b)| a - b).collect();
    let dlen = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dlen <= POINT_EQ_TOL {
        return Ok(GeodesicCurve::VerticalLine { x0: p.x.clone() });
    }
    let e: Vec<f64> = diff.iter().map(|v| v / dlen).collect();
    // centre at p.x + c e with c^2 + y_p^2 = (D - c)^2 + y_q^2
    let c = (dlen * dlen + q.y * q.y - p.y * p.y) / (2.0 * dlen);
    let center: Vec<f64> = p.x.iter().zip(&e).map(|(a, b)| a + c * b).collect();
    let radius = (c * c + p.y * p.y).sqrt();
    Ok(GeodesicCurve::HemiCircle { center, radius, direction: e })
}

/// Element of SL(2, R) acting on H^2 by z -> (az + b)/(cz + d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MoebiusMap {
    /// Normalises a matrix of positive determinant to determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return arg(format!("Moebius matrix needs positive determinant, got {det}"));
        }
        let s = det.sqrt().recip();
        Ok(Self { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// z -> z + 1
    pub fn t() -> Self {
        Self { a: 1.0, b: 1.0, c: 0.0, d: 1.0 }
    }

    /// z -> -1/z
    pub fn inv() -> Self {
        Self { a: 0.0, b: -1.0, c: 1.0, d: 0.0 }
    }

    /// Rotation about i; its differential at i turns tangent vectors by -2 alpha.
    pub fn rotation_about_i(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self { a: c, b: -s, c: s, d: c }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn apply_c(&self, z: C64) -> C64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    pub fn apply(&self, z: &UpperHalfPoint) -> Result<UpperHalfPoint> {
        if z.x.len() != 1 {
            return arg("Moebius maps act on H^2 only");
        }
        let w = self.apply_c(z.to_complex());
        // keep y exactly positive: Im w = y / |cz + d|^2
        let den = (z.to_complex() * self.c + self.d).norm_sqr();
        UpperHalfPoint::new(vec![w.re], z.y / den)
    }
}

pub fn mobius_apply(g: &MoebiusMap, z: &UpperHalfPoint) -> Result<UpperHalfPoint> {
    g.apply(z)
}

/// Generators of the isometry group of H^n.
#[derive(Debug, Clone, PartialEq)]
pub enum Isometry {
    Dilation(f64),
    Translation(Vec<f64>),
    /// Orthogonal (n-1)x(n-1) matrix, row-major.
    Rotation(Vec<Vec<f64>>),
    /// (x, y) -> (x, y)/(|x|^2 + y^2)
    Inversion,
}

impl Isometry {
    pub fn apply(&self, p: &UpperHalfPoint) -> Result<UpperHalfPoint> {
        match self {
            Isometry::Dilation(l) => {
                if !(*l > 0.0) {
                    return arg("dilation factor must be positive");
                }
                UpperHalfPoint::new(p.x.iter().map(|v| v * l).collect(), p.y * l)
            }
            Isometry::Translation(b) => {
                if b.len() != p.x.len() {
                    return arg("translation dimension mismatch");
                }
                UpperHalfPoint::new(p.x.iter().zip(b).map(|(a, b)| a + b).collect(), p.y)
            }
            Isometry::Rotation(r) => {
                if r.len() != p.x.len() || r.iter().any(|row| row.len() != p.x.len()) {
                    return arg("rotation dimension mismatch");
                }
                let x = r.iter().map(|row| row.iter().zip(&p.x).map(|(a, b)| a * b).sum()).collect();
                UpperHalfPoint::new(x, p.y)
            }
            Isometry::Inversion => {
                let r2 = p.x.iter().map(|v| v * v).sum::<f64>() + p.y * p.y;
                UpperHalfPoint::new(p.x.iter().map(|v| v / r2).collect(), p.y / r2)
            }
        }
    }
}

/// Geodesic polar coordinates about (0, 1): the radius and the unit initial
/// direction (horizontal part, vertical part) of the geodesic from (0, 1) to p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub r: f64,
    pub theta_x: Vec<f64>,
    pub theta_y: f64,
}

pub fn polar_coordinates(p: &UpperHalfPoint) -> Result<Polar> {
    let o = UpperHalfPoint::origin(p.dim());
    if p.approx_eq(&o) {
        return Err(Error::Degenerate("polar coordinates at the centre".into()));
    }
    let r = hyperbolic_distance(&o, p)?;
    let dl = p.x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dl <= POINT_EQ_TOL {
        return Ok(Polar { r, theta_x: vec![0.0; p.x.len()], theta_y: p.y.ln().signum() });
    }
    let c = (dl * dl + p.y * p.y - 1.0) / (2.0 * dl);
    let nrm = (1.0 + c * c).sqrt();
    Ok(Polar { r, theta_x: p.x.iter().map(|v| v / dl / nrm).collect(), theta_y: c / nrm })
}

pub fn polar_inverse(pc: &Polar) -> Result<UpperHalfPoint> {
    let a = pc.theta_x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nrm = a.hypot(pc.theta_y);
    if !(pc.r >= 0.0) || (nrm - 1.0).abs() > 1e-8 {
        return arg("polar inverse needs r >= 0 and a unit direction");
    }
    let alpha = 0.5 * a.atan2(pc.theta_y);
    let w = MoebiusMap::rotation_about_i(alpha).apply_c(C64::new(0.0, pc.r.exp()));
    let x = if a > 0.0 { pc.theta_x.iter().map(|v| v / a * w.re).collect() } else { vec![0.0; pc.theta_x.len()] };
    UpperHalfPoint::new(x, w.im)
}

/// Euclidean centre height and radius of the geodesic sphere of radius r about (0, 1).
pub fn geodesic_sphere(r: f64) -> (f64, f64) {
    (r.cosh(), r.sinh())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(vec![x], y).unwrap()
    }

    #[test]
    fn vertical_distance_is_log() {
        let d = hyperbolic_distance(&p2(0.0, 1.0), &p2(0.0, std::f64::consts::E)).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        assert_eq!(hyperbolic_distance(&p2(0.3, 0.2), &p2(0.3, 0.2)).unwrap(), 0.0);
    }

    /// Length of a discretised curve, minimised over a family of circular arcs.
    #[test]
    fn horizontal_pair_against_curve_minimisation() {
        let target = 1.5f64.acosh();
        let len = |h: f64| {
            // arc through (0,1),(1,1) bulging to height h
            let m = 20000;
            let mut s = 0.0;
            let pt = |t: f64| (t, 1.0 + 4.0 * (h - 1.0) * t * (1.0 - t));
            let mut prev = pt(0.0);
            for i in 1..=m {
                let q = pt(i as f64 / m as f64);
                let ym = 0.5 * (prev.1 + q.1);
                s += ((q.0 - prev.0).hypot(q.1 - prev.1)) / ym;
                prev = q;
            }
            s
        };
        let best = (0..200).map(|i| len(1.0 + i as f64 * 0.005)).fold(f64::INFINITY, f64::min);
        assert!((best - target).abs() < 2e-3, "{best} vs {target}");
        let d = hyperbolic_distance(&p2(0.0, 1.0), &p2(1.0, 1.0)).unwrap();
        assert!((d - 0.962424).abs() < 1e-6);
        assert!(best >= d - 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let q = UpperHalfPoint::new(vec![0.0, 0.0], 1.0).unwrap();
        assert!(hyperbolic_distance(&p2(0.0, 1.0), &q).is_err());
    }

    #[test]
    fn geodesics() {
        match geodesic_through(&p2(0.0, 1.0), &p2(0.0, 2.0)).unwrap() {
            GeodesicCurve::VerticalLine { x0 } => assert_eq!(x0, vec![0.0]),
            g => panic!("{g:?}"),
        }
        // elimination oracle: (x + B)^2 + y^2 = A through both points
        let (p, q) = (p2(-1.0, 1.0), p2(1.0, 1.0));
        let b = -((q.x[0].powi(2) + q.y.powi(2)) - (p.x[0].powi(2) + p.y.powi(2))) / (2.0 * (q.x[0] - p.x[0]));
        let a = (p.x[0] + b).powi(2) + p.y.powi(2);
        match geodesic_through(&p, &q).unwrap() {
            GeodesicCurve::HemiCircle { center, radius, .. } => {
                assert!((center[0] + b).abs() < 1e-14);
                assert!((radius - a.sqrt()).abs() < 1e-14);
                assert!((radius - 2f64.sqrt()).abs() < 1e-14);
            }
            g => panic!("{g:?}"),
        }
        assert!(matches!(geodesic_through(&p, &p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn moebius_generators() {
        let i = p2(0.0, 1.0);
        let ti = MoebiusMap::t().apply(&i).unwrap();
        assert!(ti.approx_eq(&p2(1.0, 1.0)));
        assert!(MoebiusMap::inv().apply(&i).unwrap().approx_eq(&i));
        assert!(MoebiusMap::identity().apply(&p2(0.3, 0.7)).unwrap().approx_eq(&p2(0.3, 0.7)));
        let g = MoebiusMap::new(2.0, 1.0, 3.0, 4.0).unwrap();
        assert!((g.det() - 1.0).abs() < 1e-12);
        assert!(MoebiusMap::new(1.0, 2.0, 3.0, 4.0).is_err());
    }

    #[test]
    fn polar_axis_and_sphere() {
        let pc = polar_coordinates(&p2(0.0, std::f64::consts::E)).unwrap();
        assert!((pc.r - 1.0).abs() < 1e-14);
        assert_eq!(pc.theta_x, vec![0.0]);
        assert_eq!(pc.theta_y, 1.0);
        assert!(polar_coordinates(&p2(0.0, 1.0)).is_err());
        let r = 0.8;
        let (h, rad) = geodesic_sphere(r);
        for k in 0..16 {
            let phi = k as f64 * 0.39;
            let p = p2(rad * phi.cos(), h + rad * phi.sin());
            let d = hyperbolic_distance(&UpperHalfPoint::origin(2), &p).unwrap();
            assert!((d - r).abs() < 1e-12);
        }
    }

    #[test]
    fn polar_in_three_dimensions() {
        let p = UpperHalfPoint::new(vec![0.4, -1.1], 0.6).unwrap();
        let pc = polar_coordinates(&p).unwrap();
        let back = polar_inverse(&pc).unwrap();
        assert!(p.euclid_sq(&back).sqrt() < 1e-12);
    }
}
