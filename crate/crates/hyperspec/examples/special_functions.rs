//! Modified Bessel functions of imaginary order and the Gamma function.
use hyperspec::special::bessel::{bessel_i, bessel_k, bessel_k_analytic, bessel_k_quadrature};
use hyperspec::special::gamma_complex;
use hyperspec::C64;
use std::f64::consts::PI;

fn main() -> hyperspec::Result<()> {
    println!("{:>6} {:>8} {:>22} {:>22} {:>10}", "k", "z", "K_ik(z) analytic", "K_ik(z) quadrature", "diff");
    for (k, z) in [(0.5, 0.1), (2.0, 1.0), (5.0, 2.0), (9.0, 12.0)] {
        let a = bessel_k_analytic(C64::new(0.0, k), z).re;
        let q = bessel_k_quadrature(k, z);
        println!("{k:>6} {z:>8} {a:>22.14e} {q:>22.14e} {:>10.2e}", (a - q).abs());
    }

    // Wronskian I_nu K_nu' - I_nu' K_nu = -1/z
    let (nu, z, one) = (C64::new(0.0, 3.0), 1.7, C64::new(1.0, 0.0));
    let di = 0.5 * (bessel_i(nu - one, z)? + bessel_i(nu + one, z)?);
    let dk = -0.5 * (bessel_k(nu - one, z)? + bessel_k(nu + one, z)?);
    let w = bessel_i(nu, z)? * dk - di * bessel_k(nu, z)?;
    println!("Wronskian at nu = 3i, z = 1.7: {w:.14} (expected {:.14})", -1.0 / z);

    for s in [0.5, 2.0, 10.0] {
        let g = gamma_complex(C64::new(1.0, s))?;
        println!("|Gamma(1 + {s}i)|^2 = {:.14e}, pi s / sinh(pi s) = {:.14e}", g.norm_sqr(), PI * s / (PI * s).sinh());
    }
    Ok(())
}
