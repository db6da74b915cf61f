//! Distances, isometries, geodesics and polar coordinates in the upper half-space.
use hyperspec::geometry::*;

fn main() -> hyperspec::Result<()> {
    let p = UpperHalfPoint::new(vec![0.3, -1.0], 0.5)?;
    let q = UpperHalfPoint::new(vec![2.0, 0.4], 3.0)?;
    let d = hyperbolic_distance(&p, &q)?;
    println!("d(p, q) = {d:.12}  (cosh form {:.12}, tanh form {:.12})", distance_cosh_form(&p, &q)?, distance_tanh_form(&p, &q)?);

    for m in [Isometry::Dilation(4.0), Isometry::Translation(vec![1.0, 2.0]), Isometry::Inversion] {
        let dm = hyperbolic_distance(&m.apply(&p)?, &m.apply(&q)?)?;
        println!("{m:?}: distance changes by {:.2e}", dm - d);
    }

    // planar geodesics and Moebius maps
    let (a, b) = (UpperHalfPoint::new(vec![-1.0], 1.0)?, UpperHalfPoint::new(vec![1.5], 0.5)?);
    let g = geodesic_through(&a, &b)?;
    println!("geodesic {g:?}, residual at the endpoints {:.1e}", g.residual(&a).max(g.residual(&b)));
    let m = MoebiusMap::new(2.0, 1.0, 1.0, 1.0)?;
    println!("Moebius det {} moves d by {:.2e}", m.det(), hyperbolic_distance(&m.apply(&a)?, &m.apply(&b)?)? - hyperbolic_distance(&a, &b)?);

    let pc = polar_coordinates(&q)?;
    println!("polar of q: r = {:.6}, theta = ({:?}, {:.6}); back: {:?}", pc.r, pc.theta_x, pc.theta_y, polar_inverse(&pc)?);
    let (h, r) = geodesic_sphere(1.0);
    println!("geodesic sphere of radius 1 about (0, 1): Euclidean centre height {h:.6}, radius {r:.6}");
    Ok(())
}
