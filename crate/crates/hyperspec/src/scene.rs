//! Scenes of Gaussian bumps on the upper half-plane, for the `radon` and `wave` commands.

use crate::error::{Error, Result};
use crate::io::{Check, Report, Table};
use crate::kl::{HnFunction, KGrid, RadialGrid};
use crate::radon::wave::state_rel_diff;
use crate::radon::{radon_explicit, radon_spectral, wave_energy, wave_propagate, wave_propagate_spectral, WaveOptions};
use crate::{row, C64};
use serde::{Deserialize, Serialize};

/// Sampling of a scene: log-uniform in y, periodic in x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneGrid {
    pub nodes: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub period: f64,
    pub nx: usize,
}

impl Default for SceneGrid {
    fn default() -> Self {
        Self { nodes: 1024, y_min: 1e-3, y_max: 1e3, period: 16.0, nx: 128 }
    }
}

/// Bumps a exp(-d(z, c)^2 / (2 w^2)), d the hyperbolic distance with x taken modulo the period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub centers: Vec<[f64; 2]>,
    pub widths: Vec<f64>,
    pub amplitudes: Vec<f64>,
    #[serde(default)]
    pub grid: SceneGrid,
    /// output times of the wave command
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
}

fn default_times() -> Vec<f64> {
    vec![1.0, 2.0]
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let n = self.centers.len();
        if n == 0 {
            return bad("scene has no bumps".into());
        }
        if self.widths.len() != n || self.amplitudes.len() != n {
            return bad(format!("centers ({n}), widths ({}) and amplitudes ({}) differ in length", self.widths.len(), self.amplitudes.len()));
        }
        for (i, c) in self.centers.iter().enumerate() {
            if !(c[1] > 0.0) || !c[0].is_finite() || !c[1].is_finite() {
                return bad(format!("center {i} must have finite x and y > 0"));
            }
            if !(self.widths[i] > 0.0) {
                return bad(format!("width {i} must be positive"));
            }
            if !self.amplitudes[i].is_finite() {
                return bad(format!("amplitude {i} must be finite"));
            }
        }
        let g = &self.grid;
        if g.nodes < 16 || !(g.y_min > 0.0 && g.y_max > g.y_min) || !(g.period > 0.0) || g.nx < 4 || g.nx % 2 != 0 {
            return bad("grid needs nodes >= 16, 0 < y_min < y_max, period > 0 and an even nx >= 4".into());
        }
        if self.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("times must be finite and non-negative".into());
        }
        Ok(())
    }

    pub fn radial_grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(2, self.grid.y_min, self.grid.y_max, self.grid.nodes)
    }

    /// Sum over the periodic images of every bump, so the scene is smooth across the period.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let p = self.grid.period;
        let mut v = 0.0;
        for ((c, w), a) in self.centers.iter().zip(&self.widths).zip(&self.amplitudes) {
            let term = |dx: f64| {
                // cosh d = 1 + (dx^2 + (y - cy)^2) / (2 y cy)
                let d = (1.0 + (dx * dx + (y - c[1]).powi(2)) / (2.0 * y * c[1])).acosh();
                (-0.5 * (d / w).powi(2)).exp()
            };
            let base = (x - c[0]) - p * ((x - c[0]) / p).round();
            let mut s = term(base);
            for dir in [1.0, -1.0] {
                // terms decrease monotonically away from the nearest image
                for k in 1.. {
                    let t = term(base + dir * k as f64 * p);
                    s += t;
                    if t <= 1e-18 * s || t == 0.0 {
                        break;
                    }
                }
            }
            v += a * s;
        }
        v
    }

    pub fn sample(&self) -> Result<HnFunction> {
        HnFunction::from_fn(&self.radial_grid()?, self.grid.period, self.grid.nx, |x, y| C64::new(self.evaluate(x, y), 0.0))
    }
}

/// Explicit Radon transform of the scene, cross-checked against the spectral route.
pub fn radon_scene(scene: &Scene) -> Result<Report> {
    scene.validate()?;
    const G: &str = "radon";
    let mut rep = Report::default();
    let f = scene.sample()?;
    let kg = KGrid::new(40.0, 512)?;
    rep.note("radon:k_grid", "k_max 40, 512 nodes");
    let re = rep.time("radon:explicit", || radon_explicit(&f))?;
    let rs = rep.time("radon:spectral", || radon_spectral(&f, &kg))?;
    let nf = f.norm_nonzero_modes();
    if nf > 0.0 {
        rep.check(Check::at_most(G, "isometry", (rs.norm_nonzero_modes() - nf).abs() / nf, 1e-3));
        rep.check(Check::at_most(G, "explicit_vs_spectral", re.rel_diff(&rs)?, 1e-3));
    } else {
        rep.note("radon:isometry", "source is independent of x; only the zero mode is present");
    }
    let mut t = Table::new(&["s", "x", "re", "im"]);
    for i in 0..re.len {
        for j in 0..re.nx {
            let v = re.values[i * re.nx + j];
            t.push(row![re.s(i), re.x(j), v.re, v.im]);
        }
    }
    rep.table("radon.csv", t);
    Ok(rep)
}

/// Wave evolution with the scene as displacement and zero velocity.
pub fn wave_scene(scene: &Scene) -> Result<Report> {
    scene.validate()?;
    const G: &str = "wave";
    let mut rep = Report::default();
    let opts = WaveOptions::default();
    rep.note("wave:options", opts);
    let f = scene.sample()?;
    let g = HnFunction::zeros(&f.grid, f.period, f.nx)?;
    let s0 = wave_propagate(&f, &g, 0.0, &opts)?;
    let e0 = wave_energy(&s0);
    let mut drift: f64 = 0.0;
    let mut t = Table::new(&["t", "x", "y", "u"]);
    let kg = KGrid::new(40.0, 1024)?;
    for &time in &scene.times {
        let s = rep.time(&format!("wave:t={time}"), || wave_propagate(&f, &g, time, &opts))?;
        for w in &s.warnings {
            rep.note(&format!("wave:warning_t={time}"), w.as_str());
        }
        if e0 > 0.0 {
            drift = drift.max((wave_energy(&s) - e0).abs() / e0);
        }
        let o = wave_propagate_spectral(&f, &g, time, &kg)?;
        rep.check(Check::at_most(G, &format!("explicit_vs_spectral_t={time}"), state_rel_diff(&s, &o), 1e-5));
        for i in 0..f.grid.len {
            for j in 0..f.nx {
                t.push(row![time, f.x(j), f.grid.y(i), s.u.values[i * f.nx + j].re]);
            }
        }
    }
    rep.check(Check::at_most(G, "energy_drift", drift, 1e-6));
    rep.table("wave.csv", t);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene() -> Scene {
        serde_json::from_str(r#"{"centers": [[0.0, 1.0], [1.5, 0.6]], "widths": [0.4, 0.3], "amplitudes": [1.0, -0.5]}"#).unwrap()
    }

    #[test]
    fn defaults_and_validation() {
        let s = scene();
        s.validate().unwrap();
        assert_eq!(s.grid, SceneGrid::default());
        assert_eq!(s.times, vec![1.0, 2.0]);
        assert!((s.evaluate(0.0, 1.0) - 1.0).abs() < 1e-3);
        let mut b = s.clone();
        b.widths.pop();
        assert!(matches!(b.validate(), Err(Error::Config(_))));
        let mut b = s.clone();
        b.centers[0][1] = -1.0;
        assert!(b.validate().is_err());
        assert!(serde_json::from_str::<Scene>(r#"{"centers": [], "widths": [], "amplitudes": [], "bogus": 1}"#).is_err());
    }

    #[test]
    fn bumps_are_periodic_in_x() {
        let s = scene();
        assert!((s.evaluate(0.3, 0.8) - s.evaluate(0.3 + 32.0, 0.8)).abs() < 1e-12);
    }
}
