//! Neumann controls and the Blagovestchenskii identity:
//! u_i^f(t) = int_0^t int_dN S(t - s, lambda_i) f(z, s) phi_i(z) dS_g ds,  S(t, lambda) = sin(sqrt(lambda) t)/sqrt(lambda).

use super::eigen::BoundarySpectralData;
use super::metric::Boundary;
use crate::error::{Error, Result};
use crate::special::quad::GaussRule;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Boundary profile in periodic arclength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpaceProfile {
    Hat { center: f64, half_width: f64 },
    Gaussian { center: f64, width: f64 },
}

/// Temporal profile, compactly supported in (center - half_width, center + half_width).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeProfile {
    /// cos^2 taper
    Hann { center: f64, half_width: f64 },
    /// exp(1 - 1/(1 - r^2))
    Bump { center: f64, half_width: f64 },
}

impl SpaceProfile {
    pub fn eval(&self, boundary: &Boundary, a: f64) -> f64 {
        match *self {
            SpaceProfile::Hat { center, half_width } => (1.0 - boundary.arc_distance(a, center) / half_width).max(0.0),
            SpaceProfile::Gaussian { center, width } => {
                let d = boundary.arc_distance(a, center) / width;
                (-0.5 * d * d).exp()
            }
        }
    }
}

impl TimeProfile {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            TimeProfile::Hann { center, half_width } | TimeProfile::Bump { center, half_width } => (center - half_width, center + half_width),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Hann { center, half_width } => {
                let r = (t - center) / half_width;
                if r.abs() >= 1.0 {
                    0.0
                } else {
                    (0.5 * PI * r).cos().powi(2)
                }
            }
            TimeProfile::Bump { center, half_width } => {
                let r = (t - center) / half_width;
                if r.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlTerm {
    pub amp: f64,
    pub space: SpaceProfile,
    pub time: TimeProfile,
}

/// f(z, t) = sum of separable terms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlFunction {
    pub terms: Vec<ControlTerm>,
}

impl ControlFunction {
    pub fn single(space: SpaceProfile, time: TimeProfile) -> Self {
        Self { terms: vec![ControlTerm { amp: 1.0, space, time }] }
    }

    pub fn eval(&self, boundary: &Boundary, a: f64, t: f64) -> f64 {
        self.terms.iter().map(|c| c.amp * c.space.eval(boundary, a) * c.time.eval(t)).sum()
    }

    /// Time after which the control vanishes.
    pub fn last_time(&self) -> f64 {
        self.terms.iter().map(|c| c.time.support().1).fold(0.0, f64::max)
    }

    /// f(., 0) = f(., T) = 0: every temporal support inside [0, T].
    pub fn check(&self, t_final: f64) -> Result<()> {
        for c in &self.terms {
            let (a, b) = c.time.support();
            if a < 0.0 || b > t_final + 1e-12 {
                return Err(Error::Argument(format!("control support [{a}, {b}] leaves [0, {t_final}]")));
            }
        }
        Ok(())
    }
}

/// S(t, lambda), with the lambda -> 0 limit t.
pub fn sine_propagator(t: f64, lambda: f64) -> f64 {
    if lambda.abs() < 1e-9 {
        return t;
    }
    let w = lambda.max(0.0).sqrt();
    (w * t).sin() / w
}

/// int_0^t S(t - s, lambda) theta(s) ds by Gauss-Legendre on the support.
pub fn duhamel(lambda: f64, time: &TimeProfile, t: f64) -> f64 {
    let (a, b) = time.support();
    let (a, b) = (a.max(0.0), b.min(t));
    if b <= a {
        return 0.0;
    }
    let w = lambda.max(0.0).sqrt();
    let panels = 4 + ((b - a) * (w / PI + 16.0)).ceil() as usize;
    GaussRule::new(16).integrate(a, b, panels, |s| sine_propagator(t - s, lambda) * time.eval(s))
}

/// <profile, phi_i>_{dN, g} for every mode.
pub fn trace_projection(bsd: &BoundarySpectralData, space: &SpaceProfile) -> Vec<f64> {
    let b = &bsd.boundary;
    let prof: Vec<f64> = (0..b.len()).map(|k| b.weights[k] * space.eval(b, b.arclength[k])).collect();
    bsd.traces.iter().map(|tr| tr.iter().zip(&prof).map(|(p, w)| p * w).sum()).collect()
}

/// Fourier coefficient u_i^f(t) of the wave generated by f.
pub fn blago_coeff(bsd: &BoundarySpectralData, f: &ControlFunction, i: usize, t: f64) -> Result<f64> {
    if i >= bsd.modes() {
        return Err(Error::Argument(format!("mode index {i} out of range (K = {})", bsd.modes())));
    }
    let b = &bsd.boundary;
    let mut acc = 0.0;
    for c in &f.terms {
        let tr: f64 = (0..b.len()).map(|k| b.weights[k] * c.space.eval(b, b.arclength[k]) * bsd.traces[i][k]).sum();
        acc += c.amp * tr * duhamel(bsd.lambda[i], &c.time, t);
    }
    Ok(acc)
}

/// All K coefficients of u^f(t).
pub fn wave_coefficients(bsd: &BoundarySpectralData, f: &ControlFunction, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; bsd.modes()];
    for c in &f.terms {
        let tr = trace_projection(bsd, &c.space);
        for i in 0..bsd.modes() {
            out[i] += c.amp * tr[i] * duhamel(bsd.lambda[i], &c.time, t);
        }
    }
    out
}

/// (u^f(t), u^h(s)) from boundary spectral data only.
pub fn blago_inner(bsd: &BoundarySpectralData, f: &ControlFunction, t: f64, h: &ControlFunction, s: f64) -> f64 {
    let a = wave_coefficients(bsd, f, t);
    let b = wave_coefficients(bsd, h, s);
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::eigen::neumann_eigensolve_unchecked;
    use crate::bc::metric::{ConformalMetric, GridSpec};

    fn bsd() -> BoundarySpectralData {
        let m = ConformalMetric::constant(GridSpec { nx: 33, ny: 33, lx: 1.0, ly: 1.0 }, 1.0).unwrap();
        neumann_eigensolve_unchecked(&m, 40).unwrap().boundary_data()
    }

    #[test]
    fn zero_control_and_zero_mode() {
        let d = bsd();
        let zero = ControlFunction::default();
        assert_eq!(blago_coeff(&d, &zero, 3, 0.7).unwrap(), 0.0);
        assert!(blago_coeff(&d, &zero, 400, 0.7).is_err());
        let tp = TimeProfile::Bump { center: 0.3, half_width: 0.2 };
        let f = ControlFunction::single(SpaceProfile::Gaussian { center: 1.0, width: 0.2 }, tp);
        assert_eq!(blago_coeff(&d, &f, 2, 0.0).unwrap(), 0.0);
        // lambda_0 = 0: u_0(t) = int (t - s) <f(s), phi_0> ds
        let t = 0.9;
        let tr = trace_projection(&d, &f.terms[0].space)[0];
        let q = GaussRule::new(32).integrate(0.1, 0.5, 8, |s| (t - s) * tp.eval(s)) * tr;
        let got = blago_coeff(&d, &f, 0, t).unwrap();
        assert!((got - q).abs() < 1e-10 * q.abs().max(1.0), "{got} {q}");
    }

    #[test]
    fn bilinear_and_symmetric() {
        let d = bsd();
        let f = ControlFunction::single(SpaceProfile::Hat { center: 0.4, half_width: 0.2 }, TimeProfile::Hann { center: 0.3, half_width: 0.2 });
        let h = ControlFunction::single(SpaceProfile::Gaussian { center: 2.5, width: 0.3 }, TimeProfile::Bump { center: 0.5, half_width: 0.3 });
        let a = blago_inner(&d, &f, 0.8, &h, 0.9);
        let b = blago_inner(&d, &h, 0.9, &f, 0.8);
        assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
        let mut f2 = f.clone();
        f2.terms[0].amp = 3.0;
        let c = blago_inner(&d, &f2, 0.8, &h, 0.9);
        assert!((c - 3.0 * a).abs() <= 1e-13 * c.abs());
        assert!(blago_inner(&d, &f, 0.8, &f, 0.8) > 0.0);
    }
}
