//! Boundary spectral data of a conformal metric and the Blagoveshchenskii identity:
//! inner products of waves from boundary data alone, against a finite-difference solve.
use hyperspec::bc::oracle::{fd_wave_oracle, mass_inner};
use hyperspec::bc::*;

fn main() -> hyperspec::Result<()> {
    let m = ConformalMetric::new(GridSpec { nx: 96, ny: 96, lx: 1.0, ly: 1.0 }, MetricSpec::lens())?;
    let eig = neumann_eigensolve(&m, 200)?;
    println!("first eigenvalues: {:?}", &eig.values[..6]);
    let bsd = eig.boundary_data();
    let f = ControlFunction::single(SpaceProfile::Gaussian { center: 0.5, width: 0.1 }, TimeProfile::Bump { center: 0.3, half_width: 0.25 });
    let g = ControlFunction::single(SpaceProfile::Gaussian { center: 2.3, width: 0.15 }, TimeProfile::Bump { center: 0.5, half_width: 0.3 });
    let uf = fd_wave_oracle(&m, &f, None, &[0.8], 0.25)?.states.remove(0);
    let ug = fd_wave_oracle(&m, &g, None, &[1.0], 0.25)?.states.remove(0);
    for k in [50, 100, 200] {
        let b = blago_inner(&bsd.truncate(k), &f, 0.8, &g, 1.0);
        println!("K = {k}: boundary-data inner product {b:.10e}, FD {:.10e}", mass_inner(&m, &uf, &ug));
    }
    Ok(())
}
