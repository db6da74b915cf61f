//! Non-holomorphic Eisenstein series for SL(2, Z) and its scattering matrix.
use hyperspec::eisenstein::*;
use hyperspec::C64;

fn main() -> hyperspec::Result<()> {
    let trunc = LatticeTruncation::new(200)?;
    let s = C64::new(2.0, 0.0);
    let z = C64::new(0.3, 1.2);
    let e = eisenstein_series(z, s, &trunc)?;
    println!("E({z}, {s}) = {:.12} (tail correction {:.2e}, bound {:.2e})", e.value, e.tail_correction.norm(), e.tail_bound);
    let red = reduce_to_fundamental_domain(C64::new(0.1, 0.05))?;
    println!("0.1 + 0.05i reduces to {:.6} by a word of length {}", red.point.z, red.word_length());

    let c = constant_term_check(3.0, s, &trunc)?;
    println!("constant term at y = 3: quadrature {:.12}, y^s + S(s) y^(1-s) = {:.12}, residual {:.2e}", c.quadrature, c.predicted, c.residual);

    for (t, v) in critical_line_sweep(0.5, 20.0, 6)? {
        println!("S(1/2 + {t:.2}i) = {:.10}, |S| - 1 = {:.1e}", v.value, v.value.norm() - 1.0);
    }
    println!("S(1/2) = {}", smatrix(C64::new(0.5, 0.0))?.value);
    Ok(())
}
