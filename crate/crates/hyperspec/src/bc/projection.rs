//! Domain-of-influence projections realised by regularised boundary control, computed in the
//! K-dimensional Fourier space of the waves. Every matrix here comes from the
//! Blagovestchenskii coefficients, i.e. from boundary spectral data only.
//!
//! Controls are tensor products of boundary hats and Hann bumps on a time grid anchored at the
//! final time T; the window (T - tau, T) takes the bumps supported inside it, so the control
//! spaces are nested in tau. Basis waves are normalised, which makes every cut a fraction of a
//! wave's own energy.

use super::control::{duhamel, trace_projection, SpaceProfile, TimeProfile};
use super::eigen::BoundarySpectralData;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSettings {
    /// final time T; controls act on (T - tau, T)
    pub t_final: f64,
    /// arclength spacing of the boundary hats (hat half-width = spacing)
    pub hat_spacing: f64,
    /// step of the Hann time grid (half-width = step)
    pub time_step: f64,
    /// cap on the number of basis functions of one control problem
    pub max_basis: usize,
    /// Tikhonov weight relative to the largest Gram eigenvalue (projections, influence test)
    pub reg: f64,
    /// weight used to isolate the wave packet at gamma_w(s)
    pub packet_reg: f64,
    /// slack of the influence criterion
    pub eps: f64,
    /// decision margin on the relative norm gap
    pub margin: f64,
    /// relative norm gap separating the verdicts
    pub threshold: f64,
    /// radius of the source neighbourhood around a boundary point
    pub neighbourhood: f64,
}

impl Default for ControlSettings {
    fn default() -> Self {
        Self {
            t_final: 0.55,
            hat_spacing: 0.1,
            time_step: 0.05,
            max_basis: 400,
            reg: 1e-6,
            packet_reg: 1e-3,
            eps: 0.05,
            margin: 0.02,
            threshold: 0.05,
            neighbourhood: 0.05,
        }
    }
}

/// Result of min |u - u^eta(tau)|^2 + alpha |eta|^2 over the window basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub coefficients: Vec<f64>,
    /// |u - u^eta|^2 at the minimiser
    pub residual: f64,
    /// |P u|^2 = |u|^2 - residual
    pub projected_norm_sq: f64,
    /// number of Gram eigenvalues above reg * max
    pub effective_rank: usize,
    /// largest over smallest retained Gram eigenvalue
    pub condition: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LCurvePoint {
    pub reg: f64,
    pub residual_norm: f64,
    pub solution_norm: f64,
}

/// Three-way decision; never forced inside the margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    True,
    False,
    Indeterminate,
}

/// Spectral decomposition of the span of one control family: G = A A^T = U diag(mu) U^T,
/// mu descending.
#[derive(Debug, Clone)]
pub struct Span {
    pub u: DMatrix<f64>,
    pub mu: Vec<f64>,
    pub columns: usize,
}

impl Span {
    fn new(a: &DMatrix<f64>) -> Self {
        let k = a.nrows();
        if a.ncols() == 0 {
            return Self { u: DMatrix::zeros(k, 0), mu: vec![], columns: 0 };
        }
        let g = a * a.transpose();
        let eig = SymmetricEigen::new(g);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let u = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
        let mu = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        Self { u, mu, columns: a.ncols() }
    }

    pub fn mu_max(&self) -> f64 {
        self.mu.first().copied().unwrap_or(0.0)
    }

    /// Orthonormal basis of the directions with mu > reg * mu_max.
    pub fn basis(&self, reg: f64) -> DMatrix<f64> {
        let cut = reg * self.mu_max();
        let r = self.mu.iter().take_while(|&&m| m > cut && m > 0.0).count();
        self.u.columns(0, r).into_owned()
    }

    /// Tikhonov filter f = mu / (mu + alpha) with alpha = reg * mu_max, applied to x.
    pub fn filtered(&self, x: &DVector<f64>, reg: f64) -> DVector<f64> {
        let alpha = reg * self.mu_max();
        let mut out = DVector::zeros(x.len());
        for (k, &m) in self.mu.iter().enumerate() {
            if m <= 0.0 {
                continue;
            }
            let c = self.u.column(k).dot(x);
            out += self.u.column(k) * (c * m / (m + alpha));
        }
        out
    }
}

pub struct ControlSpace<'a> {
    pub bsd: &'a BoundarySpectralData,
    pub settings: ControlSettings,
    pub hats: Vec<f64>,
    /// K x H: <hat_j, phi_i>
    hat_traces: DMatrix<f64>,
}

impl<'a> ControlSpace<'a> {
    pub fn new(bsd: &'a BoundarySpectralData, settings: ControlSettings) -> Result<Self> {
        let s = &settings;
        if !(s.t_final > 0.0 && s.hat_spacing > 0.0 && s.time_step > 0.0 && s.reg > 0.0 && s.packet_reg > 0.0 && s.eps >= 0.0) {
            return Err(Error::Config(format!("invalid control settings {settings:?}")));
        }
        if s.max_basis > 400 {
            return Err(Error::Config(format!("control basis size B = {} exceeds 400", s.max_basis)));
        }
        let per = bsd.boundary.perimeter;
        let nh = (per / s.hat_spacing).round().max(3.0) as usize;
        let spacing = per / nh as f64;
        let hats: Vec<f64> = (0..nh).map(|j| j as f64 * spacing).collect();
        let k = bsd.modes();
        let mut hat_traces = DMatrix::zeros(k, nh);
        for (j, &c) in hats.iter().enumerate() {
            let tr = trace_projection(bsd, &SpaceProfile::Hat { center: c, half_width: spacing });
            hat_traces.column_mut(j).copy_from_slice(&tr);
        }
        let space = Self { bsd, settings: ControlSettings { hat_spacing: spacing, ..settings }, hats, hat_traces };
        let bumps = space.time_profiles(s.t_final).len();
        if nh * bumps > s.max_basis {
            return Err(Error::Config(format!("{nh} hats x {bumps} time bumps = {} basis functions exceed B = {}", nh * bumps, s.max_basis)));
        }
        Ok(space)
    }

    /// Bumps supported in (T - tau, T) on the fixed grid.
    pub fn time_profiles(&self, tau: f64) -> Vec<TimeProfile> {
        let d = self.settings.time_step;
        let tau = tau.min(self.settings.t_final);
        let t = self.settings.t_final;
        (1..).take_while(|&j| (j + 1) as f64 * d <= tau + 1e-12).map(|j| TimeProfile::Hann { center: t - j as f64 * d, half_width: d }).collect()
    }

    pub fn all_hats(&self) -> Vec<usize> {
        (0..self.hats.len()).collect()
    }

    /// Hats centred within `radius` of arclength position a (at least the nearest one).
    pub fn hats_near(&self, a: f64, radius: f64) -> Vec<usize> {
        let b = &self.bsd.boundary;
        let mut v: Vec<usize> = (0..self.hats.len()).filter(|&j| b.arc_distance(self.hats[j], a) <= radius + 1e-12).collect();
        if v.is_empty() {
            let j = (0..self.hats.len()).min_by(|&i, &j| b.arc_distance(self.hats[i], a).total_cmp(&b.arc_distance(self.hats[j], a))).unwrap_or(0);
            v.push(j);
        }
        v
    }

    /// K x (hats * bumps) matrix of the normalised states u^eta(T), bumps fastest.
    pub fn control_matrix(&self, hats: &[usize], tau: f64) -> DMatrix<f64> {
        let profiles = self.time_profiles(tau);
        let k = self.bsd.modes();
        let t = self.settings.t_final;
        let d: Vec<Vec<f64>> = profiles.iter().map(|p| self.bsd.lambda.iter().map(|&l| duhamel(l, p, t)).collect()).collect();
        let mut a = DMatrix::zeros(k, hats.len() * profiles.len());
        for (hi, &h) in hats.iter().enumerate() {
            for (li, dl) in d.iter().enumerate() {
                let col = hi * profiles.len() + li;
                for i in 0..k {
                    a[(i, col)] = self.hat_traces[(i, h)] * dl[i];
                }
                let nrm = a.column(col).norm();
                if nrm > 0.0 {
                    a.column_mut(col).unscale_mut(nrm);
                }
            }
        }
        a
    }

    pub fn span(&self, hats: &[usize], tau: f64) -> Span {
        Span::new(&self.control_matrix(hats, tau))
    }

    /// Tikhonov-regularised projection of `target` onto the waves from `hats` in time tau.
    pub fn control_project(&self, hats: &[usize], tau: f64, target: &DVector<f64>, reg: f64) -> Result<Projection> {
        if tau > self.settings.t_final + 1e-12 {
            return Err(Error::Argument(format!("window {tau} exceeds T = {}", self.settings.t_final)));
        }
        let a = self.control_matrix(hats, tau);
        let norm2 = target.norm_squared();
        if a.ncols() == 0 {
            return Ok(Projection { coefficients: vec![], residual: norm2, projected_norm_sq: 0.0, effective_rank: 0, condition: 1.0 });
        }
        let span = Span::new(&a);
        let alpha = reg * span.mu_max();
        // eta = A^T (A A^T + alpha)^{-1} u, never inverting the Gram matrix directly
        let mut w = DVector::zeros(target.len());
        for (k, &m) in span.mu.iter().enumerate() {
            let c = span.u.column(k).dot(target);
            w += span.u.column(k) * (c / (m + alpha));
        }
        let coef = a.tr_mul(&w);
        let fitted = span.filtered(target, reg);
        let residual = (target - &fitted).norm_squared();
        let kept: Vec<f64> = span.mu.iter().cloned().filter(|&m| m > reg * span.mu_max() && m > 0.0).collect();
        Ok(Projection {
            coefficients: coef.iter().cloned().collect(),
            residual,
            projected_norm_sq: norm2 - residual,
            effective_rank: kept.len(),
            condition: span.mu_max() / kept.last().copied().unwrap_or(span.mu_max()),
        })
    }

    /// Residual and control norms over a sweep of regularisation weights.
    pub fn l_curve(&self, hats: &[usize], tau: f64, target: &DVector<f64>, regs: &[f64]) -> Result<Vec<LCurvePoint>> {
        regs.iter()
            .map(|&r| {
                let p = self.control_project(hats, tau, target, r)?;
                let sol = p.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
                Ok(LCurvePoint { reg: r, residual_norm: p.residual.max(0.0).sqrt(), solution_norm: sol })
            })
            .collect()
    }

    fn verdict(&self, gap: f64) -> Verdict {
        let (t, m) = (self.settings.threshold, self.settings.margin);
        if gap.is_nan() {
            // no basis wave fits the window
            Verdict::Indeterminate
        } else if gap >= t + m {
            Verdict::True
        } else if gap <= t - m {
            Verdict::False
        } else {
            Verdict::Indeterminate
        }
    }

    /// Boundary layer N(dN, s - eps) for the probes of depth s.
    pub fn layer(&self, s: f64) -> Span {
        self.span(&self.all_hats(), s - self.settings.eps)
    }

    /// Largest relative norm gap 1 - |P u| / |u| over the waves sent from near w in time s,
    /// P the projection onto the layer; NaN when the window holds no basis wave.
    pub fn influence_gap(&self, layer: &Span, w: f64, s: f64) -> f64 {
        let local = self.span(&self.hats_near(w, self.settings.neighbourhood), s).basis(self.settings.reg);
        if local.ncols() == 0 {
            // shallower than the time grid: nothing to compare against
            return if layer.columns == 0 { 1.0 } else { f64::NAN };
        }
        gap_of(&local, &layer.basis(self.settings.reg))
    }

    /// Is the boundary normal geodesic from w still distance-minimising at s?
    pub fn influence_test(&self, w: f64, s: f64) -> (Verdict, f64) {
        let gap = self.influence_gap(&self.layer(s), w, s);
        (self.verdict(gap), gap)
    }

    /// Probe at gamma_w(s): the shell wave from w with its layer part removed (unit norm).
    pub fn probe(&self, layer: &Span, w: f64, s: f64) -> Probe {
        let gap = self.influence_gap(layer, w, s);
        let hat = self.hats_near(w, 0.0);
        let mut shell = self.control_matrix(&hat, s);
        if shell.ncols() == 0 && s > 0.0 {
            // shallower than the time grid: the first bump, whose front reaches 2 dt
            shell = self.control_matrix(&hat, 2.0 * self.settings.time_step);
        }
        let k = self.bsd.modes();
        let (packet, packet_fraction) = if shell.ncols() == 0 {
            (DVector::zeros(k), 0.0)
        } else {
            // earliest bump of the window: the front has travelled furthest
            let u = shell.column(shell.ncols() - 1).clone_owned();
            let v = &u - layer.filtered(&u, self.settings.packet_reg);
            let f = v.norm() / u.norm();
            (if f > 0.0 { v.unscale(v.norm()) } else { v }, f)
        };
        Probe { w, s, gap, verdict: self.verdict(gap), packet_fraction, packet }
    }
}

/// 1 - sigma_min(Q^T U): the worst unit vector of span(U) against span(Q), both orthonormal.
fn gap_of(u: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    if u.ncols() == 0 {
        return 0.0;
    }
    if q.ncols() == 0 {
        return 1.0;
    }
    let m = q.tr_mul(u);
    let g = m.tr_mul(&m);
    let lo = SymmetricEigen::new(g).eigenvalues.min().max(0.0);
    1.0 - lo.sqrt().min(1.0)
}

#[derive(Debug, Clone)]
pub struct Probe {
    pub w: f64,
    pub s: f64,
    pub gap: f64,
    pub verdict: Verdict,
    /// relative norm of the shell wave outside the layer
    pub packet_fraction: f64,
    pub packet: DVector<f64>,
}

/// First-arrival picking of the probe packet in the waves sent from boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PickerSettings {
    pub lag_step: f64,
    pub max_lag: f64,
    /// half-width of the Hann pulse in time
    pub pulse: f64,
    /// half-width of the boundary hat
    pub aperture: f64,
    /// first local maximum above detect * global maximum counts as the arrival
    pub detect: f64,
    /// onset where the correlation first reaches level * that maximum
    pub level: f64,
}

impl Default for PickerSettings {
    fn default() -> Self {
        Self { lag_step: 0.0125, max_lag: 1.6, pulse: 0.05, aperture: 0.05, detect: 0.3, level: 0.5 }
    }
}

pub struct ArrivalPicker<'a> {
    pub bsd: &'a BoundarySpectralData,
    pub settings: PickerSettings,
    pub lags: Vec<f64>,
    /// pulses[(j, i)]: mode-i Duhamel factor of the pulse emitted lags[j] before evaluation
    pulses: DMatrix<f64>,
}

impl<'a> ArrivalPicker<'a> {
    pub fn new(bsd: &'a BoundarySpectralData, settings: PickerSettings) -> Result<Self> {
        if !(settings.lag_step > 0.0 && settings.max_lag > settings.lag_step && settings.pulse > 0.0 && settings.aperture > 0.0) {
            return Err(Error::Config(format!("invalid picker settings {settings:?}")));
        }
        let n = (settings.max_lag / settings.lag_step).floor() as usize + 1;
        let lags: Vec<f64> = (0..n).map(|j| j as f64 * settings.lag_step).collect();
        let t = settings.max_lag + settings.pulse;
        let pulses = DMatrix::from_fn(n, bsd.modes(), |j, i| {
            duhamel(bsd.lambda[i], &TimeProfile::Hann { center: t - lags[j], half_width: settings.pulse }, t)
        });
        Ok(Self { bsd, settings, lags, pulses })
    }

    /// |<packet, e_z(lag)>| / |e_z(lag)| for every lag.
    pub fn correlation(&self, packet: &DVector<f64>, z: f64) -> Vec<f64> {
        let tr = DVector::from_vec(trace_projection(self.bsd, &SpaceProfile::Hat { center: z, half_width: self.settings.aperture }));
        let num = &self.pulses * tr.component_mul(packet);
        let den = self.pulses.component_mul(&self.pulses) * tr.component_mul(&tr);
        num.iter().zip(den.iter()).map(|(a, b)| if *b > 0.0 { a.abs() / b.sqrt() } else { 0.0 }).collect()
    }

    /// Onset lag of the first strong arrival, linearly interpolated.
    pub fn onset(&self, packet: &DVector<f64>, z: f64) -> Result<f64> {
        let c = self.correlation(packet, z);
        let mx = c.iter().cloned().fold(0.0, f64::max);
        if !(mx > 0.0) {
            return Err(Error::Degenerate("packet invisible from the boundary".into()));
        }
        let mut j = c.iter().position(|&v| v >= self.settings.detect * mx).unwrap_or(0);
        while j + 1 < c.len() && c[j + 1] > c[j] {
            j += 1;
        }
        let thr = self.settings.level * c[j];
        while j > 0 && c[j - 1] >= thr {
            j -= 1;
        }
        let frac = if j == 0 { 0.0 } else { (thr - c[j - 1]) / (c[j] - c[j - 1]) };
        Ok((j as f64 - 1.0 + frac).max(0.0) * self.settings.lag_step)
    }

    /// Lag between the onset and the arrival of the pulse centre: the Hann pulse
    /// cos^2(pi r / 2) reaches `level` at r = (2 / pi) acos(sqrt(level)).
    pub fn latency(&self) -> f64 {
        self.settings.pulse * 2.0 / PI * self.settings.level.sqrt().acos()
    }

    /// d(gamma_w(s), z) for the probe.
    pub fn boundary_distance_estimate(&self, probe: &Probe, z: f64) -> Result<f64> {
        Ok(self.onset(&probe.packet, z)? + self.latency())
    }

    /// The whole vector over boundary positions zs.
    pub fn distance_vector(&self, probe: &Probe, zs: &[f64]) -> Result<Vec<f64>> {
        zs.iter().map(|&z| self.boundary_distance_estimate(probe, z)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::eigen::neumann_eigensolve_unchecked;
    use crate::bc::metric::{ConformalMetric, GridSpec};

    fn setup() -> BoundarySpectralData {
        let m = ConformalMetric::constant(GridSpec { nx: 41, ny: 41, lx: 1.0, ly: 1.0 }, 1.0).unwrap();
        neumann_eigensolve_unchecked(&m, 60).unwrap().boundary_data()
    }

    #[test]
    fn projection_limits_and_monotonicity() {
        let bsd = setup();
        let cs = ControlSpace::new(&bsd, ControlSettings { t_final: 1.5, hat_spacing: 0.2, time_step: 0.1, ..Default::default() }).unwrap();
        let all = cs.all_hats();
        let target = cs.control_matrix(&cs.hats_near(0.5, 0.05), 0.4).column(1).clone_owned();
        let p0 = cs.control_project(&all, 0.0, &target, 1e-6).unwrap();
        assert_eq!(p0.projected_norm_sq, 0.0);
        assert_eq!(p0.residual, target.norm_squared());
        let full = cs.control_project(&all, 1.5, &target, 1e-6).unwrap();
        assert!(full.residual <= 1e-3 * target.norm_squared(), "{}", full.residual);
        let mut last = 0.0;
        for tau in [0.2, 0.3, 0.5, 0.8, 1.2] {
            let p = cs.control_project(&all, tau, &target, 1e-6).unwrap();
            // nested spans; the Tikhonov filter perturbs the ordering at the level of reg
            assert!(p.projected_norm_sq >= last - 1e-6 * target.norm_squared(), "{tau} {} {last}", p.projected_norm_sq);
            last = p.projected_norm_sq;
        }
        assert!(cs.control_project(&all, 2.0, &target, 1e-6).is_err());
    }

    #[test]
    fn basis_cap_and_l_curve() {
        let bsd = setup();
        assert!(ControlSpace::new(&bsd, ControlSettings { t_final: 2.0, ..Default::default() }).is_err());
        let cs = ControlSpace::new(&bsd, ControlSettings { t_final: 1.0, hat_spacing: 0.2, time_step: 0.1, ..Default::default() }).unwrap();
        let target = cs.control_matrix(&cs.hats_near(2.0, 0.05), 0.6).column(0).clone_owned();
        let lc = cs.l_curve(&cs.all_hats(), 0.5, &target, &[1e-8, 1e-6, 1e-4, 1e-2]).unwrap();
        for w in lc.windows(2) {
            // more regularisation: larger residual, smaller control
            assert!(w[1].residual_norm >= w[0].residual_norm - 1e-12);
            assert!(w[1].solution_norm <= w[0].solution_norm + 1e-12);
        }
    }

    #[test]
    fn picker_locates_a_point_packet() {
        use crate::bc::eigen::neumann_eigensolve_unchecked;
        use crate::bc::metric::{ConformalMetric, GridSpec};
        let g = GridSpec { nx: 49, ny: 49, lx: 1.0, ly: 1.0 };
        let m = ConformalMetric::constant(g, 1.0).unwrap();
        let eig = neumann_eigensolve_unchecked(&m, 120).unwrap();
        let bsd = eig.boundary_data();
        let pk = ArrivalPicker::new(&bsd, PickerSettings { pulse: 0.08, ..Default::default() }).unwrap();
        assert!((pk.latency() - 0.04).abs() < 1e-12);
        let (x, y) = (0.5, 0.25);
        let p = g.index(24, 12);
        let packet = DVector::from_fn(120, |i, _| eig.vectors[(p, i)] * (-eig.values[i] * 0.03f64.powi(2) / 2.0).exp());
        let probe = Probe { w: 0.5, s: 0.25, gap: 1.0, verdict: Verdict::True, packet_fraction: 1.0, packet };
        for z in [0.5, 1.2, 2.5, 3.7] {
            let q = bsd.boundary.point_at(&g, z);
            let d = (x - q.0).hypot(y - q.1);
            let r = pk.boundary_distance_estimate(&probe, z).unwrap();
            assert!((r - d).abs() < 0.05, "z {z}: {r} vs {d}");
        }
    }
}