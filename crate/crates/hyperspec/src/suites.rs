//! Verification suites: each module's invariants as quantitative checks.
//!
//! Checks carry a group name; groups map one-to-one onto the acceptance criteria
//! (`kl`, `bessel`, `radon`, `kernel-identity`, `wave`, `eisenstein`, `bc-forward`,
//! `stage-isolated`, `end-to-end`) plus `geometry` and `bsd`.
//! `quick` shrinks the sample-based checks (random points, parameter boxes); discretisations
//! that a tolerance depends on are never coarsened.

use crate::bc::oracle::{fd_wave_oracle, mass_inner};
use crate::bc::pipeline::{run_bc, BcConfig};
use crate::bc::{blago_inner, neumann_eigensolve, ConformalMetric, ControlFunction, GridSpec, MetricSpec, SpaceProfile, TimeProfile};
use crate::eisenstein::{constant_term_check, critical_line_sweep, eisenstein_series, reduce_to_fundamental_domain, smatrix, smatrix_direct, Generator, LatticeTruncation};
use crate::error::{Error, Result};
use crate::geometry::{distance_cosh_form, distance_tanh_form, geodesic_through, hyperbolic_distance, polar_coordinates, polar_inverse, Isometry, MoebiusMap, UpperHalfPoint};
use crate::io::{Check, Report, Table};
use crate::kl::{apply_l0_fd, HnFunction, KGrid, KlPlan, RadialGrid};
use crate::radon::kernel_identity::log_bump;
use crate::radon::wave::state_rel_diff;
use crate::radon::{
    asymptotic_profile_check, kernel_identity_check, radon_explicit, radon_spectral, wave_cos_mode_n3, wave_energy, wave_propagate, wave_propagate_spectral, wave_spherical_mean_n3, TestFunction,
    WaveOptions,
};
use crate::special::bessel::{bessel_i, bessel_k, bessel_k_analytic, bessel_k_quadrature, k_ik_envelope};
use crate::special::gamma::gamma_complex;
use crate::{row, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Geometry,
    Bessel,
    Kl,
    Radon,
    Wave,
    Eisenstein,
    BcForward,
    BcInverse,
}

impl Suite {
    pub const ALL: [Suite; 8] = [Suite::Geometry, Suite::Bessel, Suite::Kl, Suite::Radon, Suite::Wave, Suite::Eisenstein, Suite::BcForward, Suite::BcInverse];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Bessel => "bessel",
            Suite::Kl => "kl",
            Suite::Radon => "radon",
            Suite::Wave => "wave",
            Suite::Eisenstein => "eisenstein",
            Suite::BcForward => "bc-forward",
            Suite::BcInverse => "bc-inverse",
        }
    }

    /// Comma-separated names, `all` expanding to every suite; duplicates are dropped.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out: Vec<Suite> = vec![];
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let add: Vec<Suite> = if part == "all" { Suite::ALL.to_vec() } else { vec![part.parse()?] };
            for x in add {
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Argument("empty suite selection".into()));
        }
        Ok(out)
    }

    pub fn run(self, ctx: &SuiteContext) -> Result<Report> {
        match self {
            Suite::Geometry => geometry(ctx),
            Suite::Bessel => bessel(ctx),
            Suite::Kl => kl(ctx),
            Suite::Radon => radon(ctx),
            Suite::Wave => wave(ctx),
            Suite::Eisenstein => eisenstein(ctx),
            Suite::BcForward => bc_forward(ctx),
            Suite::BcInverse => bc_inverse(ctx),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::Argument(format!("unknown suite '{s}' (expected one of {}, all)", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteContext {
    pub seed: u64,
    pub quick: bool,
}

impl Default for SuiteContext {
    fn default() -> Self {
        Self { seed: 1, quick: false }
    }
}

/// Records the outcome of a fallible computation as a check, or as a failed check on error.
fn push<T>(rep: &mut Report, group: &str, name: &str, r: Result<T>, f: impl FnOnce(T) -> Check) {
    rep.check(match r {
        Ok(v) => f(v),
        Err(e) => Check::errored(group, name, &e),
    });
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> UpperHalfPoint {
    let x = (0..n - 1).map(|_| rng.gen_range(-5.0..5.0)).collect();
    UpperHalfPoint::new(x, rng.gen_range(-3.0f64..3.0).exp()).expect("positive height")
}

pub fn geometry(ctx: &SuiteContext) -> Result<Report> {
    const G: &str = "geometry";
    let mut rep = Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let n = if ctx.quick { 200 } else { 2000 };
    rep.note("geometry:samples", n);
    let t0 = std::time::Instant::now();
    let (mut forms, mut tri, mut iso, mut moeb, mut polar, mut geo): (f64, f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let (p, q) = (random_point(&mut rng, 2), random_point(&mut rng, 2));
        let a = hyperbolic_distance(&p, &q)?;
        // arccosh loses digits near 0: compare on the cosh scale there
        forms = forms.max((a.cosh() - distance_cosh_form(&p, &q)?.cosh()).abs() / a.cosh());
        forms = forms.max((a - distance_tanh_form(&p, &q)?).abs() / a.max(1.0));
        let (ga, gb, gc) = (rng.gen_range(0.2..3.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let m = MoebiusMap::new(ga, gb, gc, (1.0 + gb * gc) / ga)?;
        moeb = moeb.max((hyperbolic_distance(&m.apply(&p)?, &m.apply(&q)?)? - a).abs() / a.max(1.0));
        if a > 1e-6 {
            let c = geodesic_through(&p, &q)?;
            let scale = 1.0f64.max(p.x[0].abs()).max(q.x[0].abs()).max(p.y).max(q.y);
            geo = geo.max(c.residual(&p).max(c.residual(&q)) / scale);
        }

        let (p, q, r) = (random_point(&mut rng, 3), random_point(&mut rng, 3), random_point(&mut rng, 3));
        let d = |a: &UpperHalfPoint, b: &UpperHalfPoint| hyperbolic_distance(a, b);
        tri = tri.max(d(&p, &r)? - d(&p, &q)? - d(&q, &r)?);
        let d0 = d(&p, &q)?;
        let th = rng.gen_range(0.0..2.0 * PI);
        let maps = [
            Isometry::Dilation(rng.gen_range(0.1..10.0)),
            Isometry::Translation(vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]),
            Isometry::Rotation(vec![vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]),
            Isometry::Inversion,
        ];
        for m in &maps {
            iso = iso.max((d(&m.apply(&p)?, &m.apply(&q)?)? - d0).abs() / d0.max(1.0));
        }
        if d(&UpperHalfPoint::origin(3), &p)? > 1e-6 {
            polar = polar.max(d(&p, &polar_inverse(&polar_coordinates(&p)?)?)?);
        }
    }
    rep.stages.push(crate::io::Stage { name: "geometry".into(), wall_seconds: t0.elapsed().as_secs_f64() });
    rep.check(Check::at_most(G, "distance_forms", forms, 1e-9));
    rep.check(Check::at_most(G, "triangle_violation", tri.max(0.0), 1e-10));
    rep.check(Check::at_most(G, "isometry_invariance", iso, 1e-9));
    rep.check(Check::at_most(G, "moebius_invariance", moeb, 1e-8));
    rep.check(Check::at_most(G, "polar_round_trip", polar, 1e-8));
    rep.check(Check::at_most(G, "geodesic_residual", geo, 1e-9));
    Ok(rep)
}

pub fn bessel(ctx: &SuiteContext) -> Result<Report> {
    const G: &str = "bessel";
    let mut rep = Report::default();
    let (nk, nz, ns) = if ctx.quick { (12, 20, 60) } else { (40, 60, 300) };
    let ks = linspace(0.1, 10.0, nk);
    let zs = logspace(0.05, 20.0, nz);
    rep.note("bessel:box", format!("k in [0.1, 10] x z in [0.05, 20], {nk} x {nz} points"));
    let (cross, wr) = rep.time("bessel", || -> Result<(f64, f64)> {
        let (mut cross, mut wr): (f64, f64) = (0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        for &k in &ks {
            let nu = C64::new(0.0, k);
            for &z in &zs {
                // the analytic path is the series below its switch point and CF2 above
                let q = bessel_k_quadrature(k, z);
                let a = bessel_k_analytic(nu, z).re;
                // K_ik oscillates for z < k: measure against its envelope there
                let den = if z < k { a.abs().max(k_ik_envelope(k, z)) } else { a.abs() };
                cross = cross.max((q - a).abs() / den);
                let (i0, k0) = (bessel_i(nu, z)?, bessel_k(nu, z)?);
                let di = 0.5 * (bessel_i(nu - one, z)? + bessel_i(nu + one, z)?);
                let dk = -0.5 * (bessel_k(nu - one, z)? + bessel_k(nu + one, z)?);
                let w = i0 * dk - di * k0;
                let scale = (i0.norm() * dk.norm() + di.norm() * k0.norm()).max(1.0 / z);
                wr = wr.max((w + 1.0 / z).norm() / scale);
            }
        }
        Ok((cross, wr))
    })?;
    let gam = rep.time("bessel:gamma", || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in linspace(0.01, 30.0, ns) {
            let g = gamma_complex(C64::new(1.0, s))?;
            let want = PI * s / (PI * s).sinh();
            worst = worst.max((g.norm_sqr() - want).abs() / want);
        }
        Ok(worst)
    })?;
    rep.check(Check::at_most(G, "series_vs_quadrature", cross, 1e-8));
    rep.check(Check::at_most(G, "wronskian", wr, 1e-8));
    rep.check(Check::at_most(G, "gamma_modulus_identity", gam, 1e-10));
    rep.check(Check::at_most(G, "runtime_s", rep.seconds("bessel"), 10.0));
    Ok(rep)
}

fn kl_bump(grid: &RadialGrid) -> Vec<C64> {
    grid.sample_real(|y| {
        let t = y.ln();
        (-(t - 0.3) * (t - 0.3)).exp() * (1.0 + 0.2 * t)
    })
}

pub fn kl(_ctx: &SuiteContext) -> Result<Report> {
    const G: &str = "kl";
    let mut rep = Report::default();
    let grid = RadialGrid::standard();
    let kg = KGrid::standard();
    rep.note("kl:radial_nodes", grid.len);
    rep.note("kl:k_nodes", kg.ks().len());
    rep.note("kl:k_max", kg.k_max());
    let (parseval, round, c) = rep.time("kl:unitarity", || -> Result<_> {
        let f = kl_bump(&grid);
        let plan = KlPlan::new(&grid, &kg, 1.0)?;
        let c = plan.forward(&f)?;
        let nf = grid.norm(&f);
        let back = plan.inverse(&c)?;
        let diff: Vec<C64> = back.iter().zip(&f).map(|(a, b)| a - b).collect();
        Ok(((c.norm() - nf).abs() / nf, grid.norm(&diff) / nf, c))
    })?;
    rep.check(Check::at_most(G, "parseval", parseval, 1e-6));
    rep.check(Check::at_most(G, "round_trip", round, 1e-4));
    rep.check(Check::at_most(G, "runtime_s", rep.seconds("kl:unitarity"), 5.0));
    let mut t = Table::new(&["k", "re", "im"]);
    for (k, v) in kg.ks().iter().zip(&c.values) {
        t.push(row![*k, v.re, v.im]);
    }
    rep.table("kl/coefficients.csv", t);

    // F[L0 f](k) = k^2 F[f](k)
    let diag = rep.time("kl:diagonalisation", || -> Result<f64> {
        let grid = RadialGrid::new(3, 1e-4, 1e4, 1024)?;
        let kg = KGrid::new(30.0, 512)?;
        let zeta = 0.7;
        let f = kl_bump(&grid);
        let lf = apply_l0_fd(&f, zeta, &grid)?;
        let plan = KlPlan::new(&grid, &kg, zeta)?;
        let (a, b) = (plan.forward(&f)?, plan.forward(&lf)?);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, k) in kg.ks().iter().enumerate() {
            num += (b.values[j] - k * k * a.values[j]).norm_sqr();
            den += (k * k * a.values[j]).norm_sqr();
        }
        Ok((num / den).sqrt())
    });
    push(&mut rep, G, "diagonalisation", diag, |d| Check::at_most(G, "diagonalisation", d, 1e-3));
    Ok(rep)
}

pub fn radon(_ctx: &SuiteContext) -> Result<Report> {
    let mut rep = Report::default();
    const G: &str = "radon";
    let grid = RadialGrid::new(2, 1e-4, 1e4, 512)?;
    let kg = KGrid::new(40.0, 512)?;
    rep.note("radon:radial_nodes", grid.len);
    rep.note("radon:horizontal", "period 32, 64 modes");
    rep.note("radon:k_grid", "k_max 40, 512 nodes");
    let out = rep.time("radon", || -> Result<(f64, f64, f64)> {
        let f = HnFunction::from_fn(&grid, 32.0, 64, |x, y| C64::new((-x * x / 8.0).exp() * (-4.0 * y.ln().powi(2)).exp(), 0.0))?;
        let rs = radon_spectral(&f, &kg)?;
        let re = radon_explicit(&f)?;
        let iso = (rs.norm_nonzero_modes() - f.norm_nonzero_modes()).abs() / f.norm_nonzero_modes();
        let cross = re.rel_diff(&rs)?;
        // vanishes for y < e^{-0.6}, so R f = 0 for s > 0.6
        let g = HnFunction::from_fn(&grid, 32.0, 64, |x, y| C64::new((-0.5 * x * x).exp() * log_bump(y, 0.6, 1.2), 0.0))?;
        let rg = radon_explicit(&g)?;
        let mut leak: f64 = 0.0;
        for i in 0..rg.len {
            if rg.s(i) > 0.6 + 1e-9 {
                for j in 0..rg.nx {
                    leak = leak.max(rg.values[i * rg.nx + j].norm());
                }
            }
        }
        Ok((iso, cross, leak))
    });
    match out {
        Ok((iso, cross, leak)) => {
            rep.check(Check::at_most(G, "isometry", iso, 1e-3));
            rep.check(Check::at_most(G, "explicit_vs_spectral", cross, 1e-3));
            rep.check(Check::at_most(G, "support_leakage", leak, 1e-10));
        }
        Err(e) => rep.check(Check::errored(G, "radon", &e)),
    }
    rep.check(Check::at_most(G, "runtime_s", rep.seconds("radon"), 30.0));

    const K: &str = "kernel-identity";
    let ts = [0.5, 1.0, 2.0];
    rep.note("kernel-identity:k_max", 60.0);
    let specs = [(-0.5, 1.0), (-0.6, 1.2), (-0.4, 1.1), (-0.7, 1.4), (-0.3, 1.3)];
    let res = rep.time("kernel-identity", || -> Result<(f64, f64, f64)> {
        let (mut worst, mut cut, mut support): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for (c, w) in specs {
            let f = move |y: f64| log_bump(y, c, w);
            let psi = TestFunction { lo: (c - w).exp(), hi: (c + w).exp(), f: &f };
            for r in kernel_identity_check(&psi, &ts, 60.0)? {
                worst = worst.max(r.residual);
                cut = cut.max(r.cutoff_error);
            }
        }
        // support beyond 2 e^{-t}: the right side vanishes
        let f = |y: f64| log_bump(y, 1.2, 0.5);
        let psi = TestFunction { lo: 0.7f64.exp(), hi: 1.7f64.exp(), f: &f };
        for r in kernel_identity_check(&psi, &ts, 60.0)? {
            support = support.max(r.lhs.abs());
        }
        Ok((worst, cut, support))
    });
    match res {
        Ok((worst, cut, support)) => {
            rep.check(Check::at_most(K, "residual", worst, 1e-3).with_note(format!("5 test functions at t = 0.5, 1, 2; cutoff sensitivity {cut:.2e}")));
            rep.check(Check::at_most(K, "outside_support", support, 1e-6));
        }
        Err(e) => rep.check(Check::errored(K, "residual", &e)),
    }
    rep.check(Check::at_most(K, "runtime_s", rep.seconds("kernel-identity"), 60.0));
    Ok(rep)
}

pub fn wave(_ctx: &SuiteContext) -> Result<Report> {
    const G: &str = "wave";
    let mut rep = Report::default();
    let opts = WaveOptions::default();
    rep.note("wave:options", opts);
    let t0 = std::time::Instant::now();
    let grid = RadialGrid::new(2, 1e-4, 1e4, 1024)?;
    let xi1 = 2.0 * PI / 16.0;
    let f = HnFunction::from_fn(&grid, 16.0, 8, |x, y| C64::new((1.0 + 0.5 * (xi1 * x).cos()) * (-4.0 * (y.ln() - 0.2).powi(2)).exp(), 0.0))?;
    let g = HnFunction::from_fn(&grid, 16.0, 8, |x, y| C64::new((2.0 * xi1 * x).sin() * (-3.0 * (y.ln() + 0.3).powi(2)).exp(), 0.0))?;

    let rel = |a: &HnFunction, b: &HnFunction| {
        let mut d = a.clone();
        for (x, y) in d.values.iter_mut().zip(&b.values) {
            *x -= y;
        }
        d.norm() / b.norm()
    };
    let s0 = wave_propagate(&f, &g, 0.0, &opts)?;
    rep.check(Check::at_most(G, "initial_data", rel(&s0.u, &f).max(rel(&s0.ut, &g)), 1e-6));

    let e0 = wave_energy(&s0);
    let mut drift: f64 = 0.0;
    for t in [1.0, 2.5, 5.0] {
        let s = wave_propagate(&f, &g, t, &opts)?;
        drift = drift.max((wave_energy(&s) - e0).abs() / e0);
    }
    rep.check(Check::at_most(G, "energy_drift", drift, 1e-6).with_note("t in {1, 2.5, 5}"));

    let s = wave_propagate(&f, &g, 1.5, &opts)?;
    let o = wave_propagate_spectral(&f, &g, 1.5, &KGrid::new(40.0, 1024)?)?;
    rep.check(Check::at_most(G, "explicit_vs_spectral", state_rel_diff(&s, &o), 1e-5));

    // n = 3: Kirchhoff-type spherical mean against the mode propagator
    let prof = |y: f64| (-4.0 * (y.ln() - 0.1).powi(2)).exp();
    let xi = 0.7;
    let pts = [(0.3, 0.5), (0.3, 1.0), (-0.8, 2.0), (1.1, 1.4)];
    let mut sph: f64 = 0.0;
    for t in [0.5, 1.0, 1.5] {
        let prop = wave_cos_mode_n3(xi, &prof, t, &pts, &opts)?;
        let scale = prop.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3);
        for (p, w) in pts.iter().zip(&prop) {
            let fx = |x: f64, _: f64, y: f64| (xi * x).cos() * prof(y);
            let v = wave_spherical_mean_n3(&fx, [p.0, 0.0, p.1], t)?;
            sph = sph.max((v - w).abs() / scale);
        }
    }
    rep.check(Check::at_most(G, "spherical_mean_n3", sph, 1e-2));

    let fa = HnFunction::from_fn(&grid, 32.0, 16, |x, y| C64::new((-x * x / 8.0).exp() * (-4.0 * y.ln().powi(2)).exp(), 0.0))?;
    let d: Vec<f64> = [2.0, 4.0, 8.0].iter().map(|&t| asymptotic_profile_check(&fa, t, &opts)).collect::<Result<_>>()?;
    rep.check(Check::holds(G, "asymptotic_decreasing", d[0] > d[1] && d[1] > d[2]).with_note(format!("deviation {:.3e}, {:.3e}, {:.3e} at t = 2, 4, 8", d[0], d[1], d[2])));
    rep.check(Check::at_most(G, "asymptotic_t8", d[2], 0.05));
    rep.stages.push(crate::io::Stage { name: "wave".into(), wall_seconds: t0.elapsed().as_secs_f64() });
    rep.check(Check::at_most(G, "runtime_s", rep.seconds("wave"), 60.0));
    Ok(rep)
}

pub fn eisenstein(ctx: &SuiteContext) -> Result<Report> {
    const G: &str = "eisenstein";
    let mut rep = Report::default();
    let t0 = std::time::Instant::now();
    rep.note("eisenstein:truncation_m", 200);
    let trunc = LatticeTruncation::new(200)?;
    push(&mut rep, G, "constant_term_s2_y3", constant_term_check(3.0, C64::new(2.0, 0.0), &trunc), |r| Check::at_most(G, "constant_term_s2_y3", r.residual, 1e-6));
    push(&mut rep, G, "constant_term_s3_y4", constant_term_check(4.0, C64::new(3.0, 0.0), &trunc), |r| Check::at_most(G, "constant_term_s3_y4", r.residual, 1e-8));

    let sweep = critical_line_sweep(0.5, 20.0, 50)?;
    let unit = sweep.iter().map(|(_, v)| (v.value.norm() - 1.0).abs()).fold(0.0, f64::max);
    rep.check(Check::at_most(G, "unitarity", unit, 1e-9).with_note("50 points, t in [0.5, 20]"));
    let mut t = Table::new(&["t", "abs_s", "arg_s"]);
    for (x, v) in &sweep {
        t.push(row![*x, v.value.norm(), v.value.arg()]);
    }
    rep.table("eisenstein/smatrix.csv", t);

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let (mut fun, mut direct): (f64, f64) = (0.0, 0.0);
    for _ in 0..if ctx.quick { 10 } else { 40 } {
        let mut re: f64 = rng.gen_range(0.05..0.95);
        if (re - 0.5).abs() < 0.02 {
            re += 0.1;
        }
        let s = C64::new(re, rng.gen_range(-15.0..15.0));
        let a = smatrix(s)?.value;
        fun = fun.max((a * smatrix(1.0 - s)?.value - 1.0).norm());
        direct = direct.max((a - smatrix_direct(s)?).norm() / a.norm());
    }
    rep.check(Check::at_most(G, "functional_relation", fun, 1e-8));
    rep.check(Check::at_most(G, "direct_formula", direct, 1e-9));
    let half = smatrix(C64::new(0.5, 0.0))?.value;
    rep.check(Check::at_most(G, "s_half", (half + 1.0).norm(), 1e-6));

    let s = C64::new(2.0, 0.0);
    let z = reduce_to_fundamental_domain(C64::new(0.1, 0.1))?.point.z;
    let e = eisenstein_series(z, s, &trunc)?;
    let mut inv: f64 = 0.0;
    for gen in [Generator::T(1), Generator::I] {
        inv = inv.max((eisenstein_series(gen.apply(z), s, &trunc)?.value - e.value).norm() / e.value.norm());
    }
    rep.check(Check::at_most(G, "modular_invariance", inv, 1e-6));
    rep.stages.push(crate::io::Stage { name: "eisenstein".into(), wall_seconds: t0.elapsed().as_secs_f64() });
    rep.check(Check::at_most(G, "runtime_s", rep.seconds("eisenstein"), 30.0));
    Ok(rep)
}

/// Smooth controls of the forward consistency check, with their observation times.
fn forward_controls() -> Vec<(ControlFunction, f64)> {
    vec![
        (ControlFunction::single(SpaceProfile::Gaussian { center: 0.5, width: 0.1 }, TimeProfile::Bump { center: 0.3, half_width: 0.25 }), 0.8),
        (ControlFunction::single(SpaceProfile::Gaussian { center: 2.3, width: 0.15 }, TimeProfile::Bump { center: 0.5, half_width: 0.3 }), 1.0),
        (ControlFunction::single(SpaceProfile::Hat { center: 3.6, half_width: 0.1 }, TimeProfile::Hann { center: 0.4, half_width: 0.3 }), 0.9),
    ]
}

pub fn bc_forward(_ctx: &SuiteContext) -> Result<Report> {
    const G: &str = "bc-forward";
    let mut rep = Report::default();
    let t0 = std::time::Instant::now();
    let grid = GridSpec { nx: 96, ny: 96, lx: 1.0, ly: 1.0 };
    let ks = [50usize, 100, 150, 200];
    rep.note("bc-forward:grid", grid);
    rep.note("bc-forward:fd_cfl", 0.25);
    let mut table = Table::new(&["profile", "modes", "worst_rel_err"]);
    for (name, spec) in [("constant", MetricSpec::Constant { c: 1.0 }), ("lens", MetricSpec::lens())] {
        let m = ConformalMetric::new(grid, spec)?;
        let bsd = neumann_eigensolve(&m, 200)?.boundary_data();
        let fs = forward_controls();
        let fd: Vec<Vec<f64>> = fs.iter().map(|(f, t)| fd_wave_oracle(&m, f, None, &[*t], 0.25).map(|r| r.states[0].clone())).collect::<Result<_>>()?;
        let mut errs = vec![];
        for &k in &ks {
            let b = bsd.truncate(k);
            let mut worst: f64 = 0.0;
            for a in 0..fs.len() {
                for c in a..fs.len() {
                    let x = blago_inner(&b, &fs[a].0, fs[a].1, &fs[c].0, fs[c].1);
                    let y = mass_inner(&m, &fd[a], &fd[c]);
                    let n = (mass_inner(&m, &fd[a], &fd[a]) * mass_inner(&m, &fd[c], &fd[c])).sqrt();
                    worst = worst.max((x - y).abs() / n);
                }
            }
            table.push(row![name, k, worst]);
            errs.push(worst);
        }
        rep.check(Check::at_most(G, &format!("{name}:bsp_vs_fd_k200"), errs[3], 2e-2));
        let mono = errs.windows(2).all(|w| w[1] < w[0]);
        let note = errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ");
        rep.check(Check::holds(G, &format!("{name}:monotone_in_k"), mono).with_note(format!("K = 50, 100, 150, 200: {note}")));
    }
    rep.table("bc-forward/convergence.csv", table);

    let g128 = GridSpec { nx: 128, ny: 128, lx: 1.0, ly: 1.0 };
    let e = neumann_eigensolve(&ConformalMetric::constant(g128, 1.0)?, 12)?;
    let mut want: Vec<f64> = (0..6).flat_map(|a| (0..6).map(move |b| PI * PI * (a * a + b * b) as f64)).collect();
    want.sort_by(f64::total_cmp);
    let worst = (1..10).map(|i| (e.values[i] - want[i]).abs() / want[i]).fold(0.0, f64::max);
    rep.check(Check::at_most(G, "constant_eigenvalues_128", worst, 0.01).with_note("first 10 modes"));
    rep.check(Check::at_most(G, "lambda_1", e.values[0].abs(), 1e-8));
    rep.stages.push(crate::io::Stage { name: "bc-forward".into(), wall_seconds: t0.elapsed().as_secs_f64() });
    rep.check(Check::at_most(G, "runtime_s", rep.seconds("bc-forward"), 300.0));
    Ok(rep)
}

pub fn bc_inverse(_ctx: &SuiteContext) -> Result<Report> {
    let mut rep = Report::default();
    let mut combined = Table::new(&["profile", "probe", "x", "y", "c_true", "c_est", "rel_err"]);
    for (name, spec) in [("constant", MetricSpec::Constant { c: 1.0 }), ("lens", MetricSpec::lens())] {
        let mut r = run_bc(&BcConfig::standard(spec), name)?;
        for (file, t) in r.tables.iter_mut() {
            if file.ends_with("/recovery.csv") {
                for row in &t.rows {
                    let mut c = row![name];
                    c.extend(row[..6].iter().cloned());
                    combined.push(c);
                }
            }
            *file = format!("bc-inverse/{file}");
        }
        rep.absorb(r);
    }
    rep.table("bc-inverse/recovery.csv", combined);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_selection() {
        assert_eq!(Suite::parse_list("all").unwrap().len(), 8);
        assert_eq!(Suite::parse_list("kl, radon,kl").unwrap(), vec![Suite::Kl, Suite::Radon]);
        assert!(Suite::parse_list("").is_err());
        assert!(Suite::parse_list(" , ").is_err());
        assert!(Suite::parse_list("kl,bogus").is_err());
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
    }

    #[test]
    fn geometry_suite_is_seeded() {
        let ctx = SuiteContext { seed: 3, quick: true };
        let a = geometry(&ctx).unwrap();
        let b = geometry(&ctx).unwrap();
        assert!(a.passed());
        let vals = |r: &Report| r.checks.iter().map(|c| c.value).collect::<Vec<_>>();
        assert_eq!(vals(&a), vals(&b));
    }
}
