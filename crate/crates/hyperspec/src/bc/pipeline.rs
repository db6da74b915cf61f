//! The configured inverse experiment: boundary spectral data, R(N) reconstruction, local
//! metric recovery (stage-isolated and end-to-end) and heat-kernel distances, with all
//! outputs as tables and all acceptance decisions as checks.

use super::eigen::{neumann_eigensolve, NeumannEigen};
use super::metric::{ConformalMetric, GridSpec, MetricSpec};
use super::oracle::{fast_marching, interpolate, normal_geodesic};
use super::projection::{ControlSettings, ControlSpace, PickerSettings};
use super::reconstruct::{boundary_samples, hausdorff, reconstruct_r, true_distance_vectors, ReconstructSettings, Reconstruction};
use super::recover::{heat_distance, metric_recover, metric_recover_end_to_end, nearest_node, DistanceFields};
use crate::error::{Error, Result};
use crate::io::{Check, Report, Table};
use crate::row;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcConfig {
    pub grid: GridSpec,
    pub metric: MetricSpec,
    /// boundary spectral data truncation K
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default)]
    pub control: ControlConfig,
    /// interior points for the stage-isolated recovery
    #[serde(default = "default_probes")]
    pub probes: Vec<[f64; 2]>,
    /// resolution of the probe net
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// spacing of the boundary directions used by the stage-isolated recovery
    #[serde(default = "default_direction_spacing")]
    pub direction_spacing: f64,
    /// neighbourhood radius of the end-to-end gradient fit
    #[serde(default = "default_fit_radius")]
    pub fit_radius: f64,
    #[serde(default)]
    pub heat: HeatConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlConfig {
    /// cap on the basis size of one control problem
    #[serde(rename = "B")]
    pub basis: usize,
    /// final time of the controls
    #[serde(rename = "T")]
    pub t_final: f64,
    pub reg: f64,
}

impl Default for ControlConfig {
    fn default() -> Self {
        let d = ControlSettings::default();
        Self { basis: d.max_basis, t_final: d.t_final, reg: d.reg }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeatConfig {
    /// modes of the heat sum (0 disables the stage)
    pub modes: usize,
    pub ts: Vec<f64>,
    pub pairs: Vec<[[f64; 2]; 2]>,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self {
            modes: 300,
            ts: vec![0.006, 0.009, 0.012],
            pairs: vec![[[0.35, 0.5], [0.65, 0.5]], [[0.3, 0.3], [0.6, 0.45]], [[0.25, 0.7], [0.5, 0.5]], [[0.4, 0.4], [0.55, 0.45]]],
        }
    }
}

fn default_modes() -> usize {
    200
}
fn default_eps() -> f64 {
    0.05
}
fn default_direction_spacing() -> f64 {
    0.1
}
fn default_fit_radius() -> f64 {
    0.12
}
fn default_probes() -> Vec<[f64; 2]> {
    vec![[0.5, 0.5], [0.35, 0.5], [0.5, 0.65], [0.62, 0.62], [0.3, 0.3], [0.2, 0.7], [0.75, 0.4], [0.45, 0.55]]
}

impl BcConfig {
    /// 96 x 96 unit square with the given profile and all defaults.
    pub fn standard(metric: MetricSpec) -> Self {
        Self {
            grid: GridSpec { nx: 96, ny: 96, lx: 1.0, ly: 1.0 },
            metric,
            modes: default_modes(),
            control: ControlConfig::default(),
            probes: default_probes(),
            eps: default_eps(),
            direction_spacing: default_direction_spacing(),
            fit_radius: default_fit_radius(),
            heat: HeatConfig::default(),
        }
    }

    pub fn control_settings(&self) -> ControlSettings {
        ControlSettings { t_final: self.control.t_final, max_basis: self.control.basis, reg: self.control.reg, eps: self.eps, ..ControlSettings::default() }
    }

    pub fn reconstruct_settings(&self) -> ReconstructSettings {
        ReconstructSettings { eps: self.eps, s_max: self.control.t_final + self.eps, ..ReconstructSettings::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.check()?;
        let nodes = self.grid.len();
        for (what, k) in [("modes", self.modes), ("heat.modes", self.heat.modes)] {
            if 10 * k > nodes {
                return Err(Error::Config(format!("{what} = {k} exceeds 0.1 * nodes ({nodes})")));
            }
        }
        if self.modes == 0 {
            return Err(Error::Config("modes must be positive".into()));
        }
        if !(self.control.t_final > self.eps) || !(self.control.reg >= 0.0) || self.control.basis == 0 {
            return Err(Error::Config("control needs T > eps, reg >= 0 and B > 0".into()));
        }
        if self.control.basis > 400 {
            return Err(Error::Config(format!("control basis B = {} exceeds the cap of 400", self.control.basis)));
        }
        let inside = |p: &[f64; 2]| p[0] > 0.0 && p[0] < self.grid.lx && p[1] > 0.0 && p[1] < self.grid.ly;
        if let Some(p) = self.probes.iter().find(|p| !inside(p)) {
            return Err(Error::Config(format!("probe {p:?} is not interior")));
        }
        if let Some(p) = self.heat.pairs.iter().flatten().find(|p| !inside(p)) {
            return Err(Error::Config(format!("heat point {p:?} is not interior")));
        }
        if self.heat.modes > 0 && (self.heat.ts.is_empty() || self.heat.ts.iter().any(|t| !(*t > 0.0))) {
            return Err(Error::Config("heat.ts must be positive times".into()));
        }
        Ok(())
    }

    fn is_constant(&self) -> bool {
        matches!(self.metric, MetricSpec::Constant { .. })
    }
}

/// Groups of the checks emitted by [`run_bc`].
pub const GROUP_BSD: &str = "bsd";
pub const GROUP_ISOLATED: &str = "stage-isolated";
pub const GROUP_END_TO_END: &str = "end-to-end";

pub const ISOLATED_TOL_CONSTANT: f64 = 0.05;
pub const ISOLATED_TOL: f64 = 0.15;
pub const ISOLATED_MIN_PROBES: usize = 5;
/// loose binding of the end-to-end recovery (median relative error)
pub const END_TO_END_RECOVERY_TOL: f64 = 0.25;
pub const HEAT_TOL: f64 = 0.1;

/// Runs the whole experiment. A non-empty `tag` prefixes stage names and puts the tables
/// into a subdirectory of that name.
pub fn run_bc(cfg: &BcConfig, tag: &str) -> Result<Report> {
    cfg.validate()?;
    let mut rep = Report::default();
    let metric = ConformalMetric::new(cfg.grid, cfg.metric.clone())?;
    let stage = |s: &str| if tag.is_empty() { s.to_string() } else { format!("{tag}:{s}") };
    let file = |s: &str| if tag.is_empty() { s.to_string() } else { format!("{tag}/{s}") };
    rep.note(&stage("modes"), cfg.modes);
    rep.note(&stage("heat_modes"), cfg.heat.modes);
    rep.note(&stage("control"), cfg.control_settings());
    rep.note(&stage("picker"), PickerSettings::default());
    rep.note(&stage("reconstruct"), cfg.reconstruct_settings());

    // stage-isolated recovery needs no spectral data
    isolated(cfg, &metric, &mut rep, &stage, &file)?;

    let k_solve = cfg.modes.max(cfg.heat.modes);
    let eig = rep.time(&stage("eigensolve"), || neumann_eigensolve(&metric, k_solve))?;
    let bsd = eig.boundary_data().truncate(cfg.modes);
    rep.note(&stage("eigensolve_max_residual"), eig.max_residual);
    rep.check(Check::at_most(GROUP_BSD, &stage("lambda_1"), bsd.lambda[0].abs(), 1e-8));
    let mut t = Table::new(&std::iter::once("i".to_string()).chain(std::iter::once("lambda".into())).chain((0..bsd.boundary.len()).map(|k| format!("trace_{k}"))).collect::<Vec<_>>());
    for (i, l) in bsd.lambda.iter().enumerate() {
        let mut r = row![i, *l];
        r.extend(bsd.traces[i].iter().map(|&v| v.into()));
        t.push(r);
    }
    rep.table(&file("bsd.csv"), t);

    let rec = rep.time(&stage("reconstruct"), || reconstruct_r(&bsd, cfg.control_settings(), PickerSettings::default(), cfg.reconstruct_settings()))?;
    end_to_end(cfg, &metric, &rec, &mut rep, &stage, &file);
    l_curve(cfg, &bsd, &mut rep, &file)?;
    if cfg.heat.modes > 0 {
        heat(cfg, &metric, &eig, &mut rep, &stage, &file);
    }
    let total = rep.seconds(if tag.is_empty() { "" } else { tag });
    rep.check(Check::at_most(GROUP_END_TO_END, &stage("runtime_s"), total, 900.0));
    Ok(rep)
}

fn isolated(cfg: &BcConfig, metric: &ConformalMetric, rep: &mut Report, stage: &dyn Fn(&str) -> String, file: &dyn Fn(&str) -> String) -> Result<()> {
    let t0 = std::time::Instant::now();
    let zs = boundary_samples(&metric.boundary(), cfg.direction_spacing);
    let fields = DistanceFields::oracle(metric, &zs);
    let mut t = Table::new(&["probe", "x", "y", "c_true", "c_est", "rel_err", "offdiag_ratio"]);
    let (mut worst, mut within, mut worst_off): (f64, usize, f64) = (0.0, 0, 0.0);
    let tol = if cfg.is_constant() { ISOLATED_TOL_CONSTANT } else { ISOLATED_TOL };
    for (i, p) in cfg.probes.iter().enumerate() {
        let c_true = metric.speed_at(p[0], p[1]);
        match metric_recover(metric, &fields, (p[0], p[1])) {
            Ok(e) => {
                let rel = (e.c / c_true - 1.0).abs();
                let off = e.g[0][1].abs() / e.g[0][0].abs().max(e.g[1][1].abs());
                worst = worst.max(rel);
                worst_off = worst_off.max(off);
                within += (rel <= tol) as usize;
                t.push(row![i, p[0], p[1], c_true, e.c, rel, off]);
            }
            Err(err) => {
                worst = f64::INFINITY;
                t.push(row![i, p[0], p[1], c_true, f64::NAN, f64::NAN, f64::NAN]);
                rep.check(Check::errored(GROUP_ISOLATED, &stage(&format!("probe_{i}")), &err));
            }
        }
    }
    rep.stages.push(crate::io::Stage { name: stage("stage_isolated"), wall_seconds: t0.elapsed().as_secs_f64() });
    if cfg.is_constant() {
        rep.check(Check::at_most(GROUP_ISOLATED, &stage("max_rel_err"), worst, tol));
    } else {
        let need = ISOLATED_MIN_PROBES.min(cfg.probes.len());
        rep.check(Check::at_least(GROUP_ISOLATED, &stage("probes_within_15pct"), within as f64, need as f64));
    }
    rep.check(Check::at_most(GROUP_ISOLATED, &stage("offdiag_ratio"), worst_off, 0.1));
    rep.check(Check::at_most(GROUP_ISOLATED, &stage("runtime_s"), rep.seconds(&stage("stage_isolated")), 120.0));
    rep.table(&file("recovery.csv"), t);
    Ok(())
}

fn end_to_end(cfg: &BcConfig, metric: &ConformalMetric, rec: &Reconstruction, rep: &mut Report, stage: &dyn Fn(&str) -> String, file: &dyn Fn(&str) -> String) {
    rep.note(&stage("net_probes"), rec.probes);
    rep.note(&stage("net_vectors"), rec.vectors.len());
    rep.note(&stage("net_indeterminate"), rec.indeterminate);
    rep.note(&stage("net_beyond_cut"), rec.beyond_cut);
    rep.note(&stage("net_inconsistent"), rec.inconsistent);
    let mut net = Table::new(&["probe", "w", "s"]);
    let mut d = Table::new(&["probe", "z_index", "r"]);
    for (i, v) in rec.vectors.iter().enumerate() {
        net.push(row![i, v.w, v.s]);
        for (k, &r) in v.r.iter().enumerate() {
            d.push(row![i, k, r]);
        }
    }
    rep.table(&file("net.csv"), net);
    rep.table(&file("distances.csv"), d);

    let truth = rep.time(&stage("oracle_r"), || true_distance_vectors(metric, &rec.zs, 3));
    let est: Vec<Vec<f64>> = rec.vectors.iter().map(|v| v.r.clone()).collect();
    let h = hausdorff(&est, &truth);
    let diam = truth.iter().flatten().cloned().fold(0.0, f64::max);
    let cell = cfg.grid.dx().max(cfg.grid.dy());
    let tol = if cfg.is_constant() { 3.0 * cfg.eps + 2.0 * cell } else { 0.1 * diam };
    rep.note(&stage("diameter"), diam);
    rep.check(Check::at_most(GROUP_END_TO_END, &stage("hausdorff"), h, tol));

    // x -> r_x is injective on the net: oracle vectors of distinct net points are separated
    let sep = rep.time(&stage("injectivity"), || oracle_separation(metric, rec));
    rep.check(Check::at_least(GROUP_END_TO_END, &stage("oracle_min_separation"), sep, 0.5 * cell));
    // net positions closer than one boundary hat share their source and hence their vector
    let dup = (0..est.len()).filter(|&a| (a + 1..est.len()).any(|b| est[a] == est[b])).count();
    rep.note(&stage("net_duplicate_vectors"), dup);

    let rows = rep.time(&stage("end_to_end_recovery"), || metric_recover_end_to_end(metric, rec, cfg.fit_radius));
    let mut t = Table::new(&["probe", "x", "y", "c_true", "c_est", "rel_err"]);
    let mut errs = vec![];
    for (i, (r, _)) in rows.iter().enumerate() {
        let e = (r.c_est / r.c_true - 1.0).abs();
        errs.push(e);
        t.push(row![i, r.x, r.y, r.c_true, r.c_est, e]);
    }
    rep.table(&file("recovery_end_to_end.csv"), t);
    errs.sort_by(f64::total_cmp);
    let median = errs.get(errs.len() / 2).copied().unwrap_or(f64::INFINITY);
    rep.check(Check::at_most(GROUP_END_TO_END, &stage("recovery_median_rel_err"), median, END_TO_END_RECOVERY_TOL).with_note(format!("{} points", errs.len())));
}

/// Smallest sup-norm distance between oracle boundary distance vectors of net points lying
/// at least one cell apart; the points are placed on their normal geodesics.
fn oracle_separation(metric: &ConformalMetric, rec: &Reconstruction) -> f64 {
    let g = &metric.grid;
    let b = metric.boundary();
    let cell = g.dx().max(g.dy());
    let fields = DistanceFields::oracle(metric, &rec.zs);
    let pts: Vec<(f64, f64)> = rec.vectors.iter().filter_map(|v| normal_geodesic(metric, &b, v.w, v.s, 0.25 * cell).last().copied()).collect();
    let vecs: Vec<Vec<f64>> = pts.iter().map(|p| fields.fields.iter().map(|f| interpolate(metric, f, p.0, p.1)).collect()).collect();
    let mut sep = f64::INFINITY;
    for a in 0..pts.len() {
        for c in a + 1..pts.len() {
            if (pts[a].0 - pts[c].0).hypot(pts[a].1 - pts[c].1) < cell {
                continue;
            }
            let s = vecs[a].iter().zip(&vecs[c]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            sep = sep.min(s);
        }
    }
    sep
}

/// Residual and solution norms of one representative projection over a regularisation sweep.
fn l_curve(cfg: &BcConfig, bsd: &super::eigen::BoundarySpectralData, rep: &mut Report, file: &dyn Fn(&str) -> String) -> Result<()> {
    let space = ControlSpace::new(bsd, cfg.control_settings())?;
    let (w, s) = (0.5 * cfg.grid.lx, 0.3f64.min(cfg.control.t_final));
    let shell = space.control_matrix(&space.hats_near(w, 0.0), s);
    if shell.ncols() == 0 {
        return Ok(());
    }
    let u: DVector<f64> = shell.column(shell.ncols() - 1).clone_owned();
    let regs: Vec<f64> = (0..13).map(|k| 10f64.powf(-12.0 + k as f64)).collect();
    let pts = space.l_curve(&space.all_hats(), s - cfg.eps, &u, &regs)?;
    let mut t = Table::new(&["reg", "residual_norm", "solution_norm"]);
    for p in pts {
        t.push(row![p.reg, p.residual_norm, p.solution_norm]);
    }
    rep.table(&file("lcurve.csv"), t);
    Ok(())
}

fn heat(cfg: &BcConfig, metric: &ConformalMetric, eig: &NeumannEigen, rep: &mut Report, stage: &dyn Fn(&str) -> String, file: &dyn Fn(&str) -> String) {
    let t0 = std::time::Instant::now();
    let g = &cfg.grid;
    let mut t = Table::new(&["pair", "x1", "y1", "x2", "y2", "d_heat", "d_fmm", "rel_err"]);
    let mut worst: f64 = 0.0;
    let mut asym: f64 = 0.0;
    for (i, [a, b]) in cfg.heat.pairs.iter().enumerate() {
        let (p, q) = (nearest_node(g, a[0], a[1]), nearest_node(g, b[0], b[1]));
        let truth = fast_marching(metric, &[(p, 0.0)])[q];
        match (heat_distance(eig, p, q, &cfg.heat.ts), heat_distance(eig, q, p, &cfg.heat.ts)) {
            (Ok(d), Ok(d2)) => {
                let e = (d / truth - 1.0).abs();
                worst = worst.max(e);
                asym = asym.max((d - d2).abs());
                t.push(row![i, a[0], a[1], b[0], b[1], d, truth, e]);
            }
            (Err(err), _) | (_, Err(err)) => {
                worst = f64::INFINITY;
                t.push(row![i, a[0], a[1], b[0], b[1], f64::NAN, truth, f64::NAN]);
                rep.check(Check::errored(GROUP_END_TO_END, &stage(&format!("heat_pair_{i}")), &err));
            }
        }
    }
    rep.stages.push(crate::io::Stage { name: stage("heat"), wall_seconds: t0.elapsed().as_secs_f64() });
    rep.note(&stage("heat_ts"), &cfg.heat.ts);
    rep.check(Check::at_most(GROUP_END_TO_END, &stage("heat_max_rel_err"), worst, HEAT_TOL));
    rep.check(Check::at_most(GROUP_END_TO_END, &stage("heat_symmetry"), asym, 1e-10));
    rep.table(&file("heat.csv"), t);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_defaults() {
        let js = r#"{"grid":{"nx":96,"ny":96,"Lx":1,"Ly":1},"metric":{"kind":"lens"},"modes":200,"control":{"B":400,"T":0.55,"reg":1e-6},"probes":[[0.5,0.5]]}"#;
        let c: BcConfig = serde_json::from_str(js).unwrap();
        assert_eq!(c.metric, MetricSpec::lens());
        assert_eq!(c.heat, HeatConfig::default());
        c.validate().unwrap();
        let back: BcConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn schema_violations() {
        let bad = [
            r#"{"grid":{"nx":96,"ny":96,"Lx":1,"Ly":1},"metric":{"kind":"lens"},"typo":1}"#,
            r#"{"grid":{"nx":96,"ny":96,"Lx":1,"Ly":1},"metric":{"kind":"wobbly"}}"#,
        ];
        for b in bad {
            assert!(serde_json::from_str::<BcConfig>(b).is_err(), "{b}");
        }
        let mut c = BcConfig::standard(MetricSpec::Constant { c: 1.0 });
        c.modes = 2000;
        assert!(c.validate().is_err());
        let mut c = BcConfig::standard(MetricSpec::Constant { c: 1.0 });
        c.probes.push([1.0, 0.5]);
        assert!(c.validate().is_err());
        let mut c = BcConfig::standard(MetricSpec::Constant { c: 1.0 });
        c.control.basis = 401;
        assert!(c.validate().is_err());
    }
}
