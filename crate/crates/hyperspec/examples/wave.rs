//! Wave equation on H^2: energy conservation, agreement with the spectral propagator,
//! the n = 3 spherical mean and the large-time profile.
use hyperspec::kl::{HnFunction, KGrid, RadialGrid};
use hyperspec::radon::wave::state_rel_diff;
use hyperspec::radon::*;
use hyperspec::C64;

fn main() -> hyperspec::Result<()> {
    let grid = RadialGrid::new(2, 1e-4, 1e4, 1024)?;
    let f = HnFunction::from_fn(&grid, 16.0, 8, |x, y| C64::new((1.0 + 0.5 * (0.4 * x).cos()) * (-4.0 * (y.ln() - 0.2).powi(2)).exp(), 0.0))?;
    let g = HnFunction::zeros(&grid, 16.0, 8)?;
    let opts = WaveOptions::default();
    let e0 = wave_energy(&wave_propagate(&f, &g, 0.0, &opts)?);
    for t in [1.0, 2.0, 4.0] {
        let s = wave_propagate(&f, &g, t, &opts)?;
        let o = wave_propagate_spectral(&f, &g, t, &KGrid::new(40.0, 1024)?)?;
        println!("t = {t}: energy drift {:.2e}, explicit vs spectral {:.2e}", (wave_energy(&s) - e0).abs() / e0, state_rel_diff(&s, &o));
    }

    let prof = |y: f64| (-4.0 * (y.ln() - 0.1).powi(2)).exp();
    let pts = [(0.3, 1.0)];
    let mode = wave_cos_mode_n3(0.7, &prof, 1.0, &pts, &opts)?[0];
    let mean = wave_spherical_mean_n3(&|x: f64, _: f64, y: f64| (0.7 * x).cos() * prof(y), [0.3, 0.0, 1.0], 1.0)?;
    println!("n = 3 at t = 1: mode propagator {mode:.8e}, spherical mean formula {mean:.8e}");

    let fa = HnFunction::from_fn(&grid, 32.0, 16, |x, y| C64::new((-x * x / 8.0).exp() * (-4.0 * y.ln().powi(2)).exp(), 0.0))?;
    for t in [2.0, 4.0, 8.0] {
        println!("deviation from the asymptotic profile at t = {t}: {:.3e}", asymptotic_profile_check(&fa, t, &opts)?);
    }
    Ok(())
}
