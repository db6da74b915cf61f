//! Radon transform of a bump scene by the explicit and spectral routes, and the kernel identity.
use hyperspec::kl::KGrid;
use hyperspec::radon::kernel_identity::log_bump;
use hyperspec::radon::{kernel_identity_check, radon_explicit, radon_spectral, TestFunction};
use hyperspec::scene::Scene;

fn main() -> hyperspec::Result<()> {
    let scene: Scene = serde_json::from_str(
        r#"{"centers": [[0.0, 1.0], [1.0, 0.7]], "widths": [0.8, 0.6], "amplitudes": [1.0, 0.5],
            "grid": {"nodes": 512, "y_min": 1e-3, "y_max": 1e3, "period": 16, "nx": 16}}"#,
    )
    .expect("valid scene");
    let f = scene.sample()?;
    let re = radon_explicit(&f)?;
    let rs = radon_spectral(&f, &KGrid::new(40.0, 512)?)?;
    println!("explicit vs spectral: {:.3e}", re.rel_diff(&rs)?);
    println!("isometry on x-dependent modes: {:.6} vs {:.6}", f.norm_nonzero_modes(), rs.norm_nonzero_modes());

    let g = |y: f64| log_bump(y, -0.5, 1.0);
    let psi = TestFunction { lo: (-1.5f64).exp(), hi: 0.5f64.exp(), f: &g };
    for r in kernel_identity_check(&psi, &[0.5, 1.0, 2.0], 60.0)? {
        println!("kernel identity t = {}: lhs {:.10e}, rhs {:.10e}, residual {:.2e}", r.t, r.lhs, r.rhs, r.residual);
    }
    Ok(())
}
