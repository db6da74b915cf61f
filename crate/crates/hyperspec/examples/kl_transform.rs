//! Kontorovich-Lebedev transform: unitarity, inversion and the Green operator.
use hyperspec::kl::{green_residual, KGrid, KlPlan, RadialGrid};
use hyperspec::C64;

fn main() -> hyperspec::Result<()> {
    let grid = RadialGrid::standard();
    let kg = KGrid::standard();
    let f = grid.sample_real(|y| (-(y.ln() - 0.3).powi(2)).exp());
    let plan = KlPlan::new(&grid, &kg, 1.0)?;
    let c = plan.forward(&f)?;
    let back = plan.inverse(&c)?;
    let err: Vec<C64> = back.iter().zip(&f).map(|(a, b)| a - b).collect();
    println!("||f|| = {:.12}, ||Ff|| = {:.12}", grid.norm(&f), c.norm());
    println!("round trip relative error {:.3e}", grid.norm(&err) / grid.norm(&f));
    for j in (0..kg.ks().len()).step_by(kg.ks().len() / 8) {
        println!("  F(k = {:7.3}) = {:.6e}", kg.k(j), c.values[j]);
    }
    let r = green_residual(&f, 1.0, C64::new(0.5, 0.0), &grid)?;
    println!("Green operator residual ||(L0 - nu^2) G f - f|| / ||f|| = {r:.3e}");
    Ok(())
}
