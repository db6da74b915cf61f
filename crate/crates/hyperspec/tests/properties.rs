use hyperspec::geometry::{
    distance_cosh_form, distance_tanh_form, hyperbolic_distance, polar_coordinates, polar_inverse, Isometry, MoebiusMap, UpperHalfPoint,
};
use hyperspec::special::bessel::{bessel_i, bessel_k};
use hyperspec::special::gamma::gamma_complex;
use hyperspec::C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn point2() -> impl Strategy<Value = UpperHalfPoint> {
    (-5.0..5.0f64, -3.0..3.0f64).prop_map(|(x, ly)| UpperHalfPoint::new(vec![x], ly.exp()).unwrap())
}

fn point3() -> impl Strategy<Value = UpperHalfPoint> {
    (-5.0..5.0f64, -5.0..5.0f64, -3.0..3.0f64).prop_map(|(a, b, ly)| UpperHalfPoint::new(vec![a, b], ly.exp()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn triangle_inequality(p in point3(), q in point3(), r in point3()) {
        let d = |a: &UpperHalfPoint, b: &UpperHalfPoint| hyperbolic_distance(a, b).unwrap();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-10);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() < 1e-12);
    }

    #[test]
    fn distance_forms_agree(p in point2(), q in point2()) {
        let a = hyperbolic_distance(&p, &q).unwrap();
        let b = distance_cosh_form(&p, &q).unwrap();
        let c = distance_tanh_form(&p, &q).unwrap();
        let tol = 1e-12 * a.max(1.0);
        // arccosh loses digits near 0: compare there on the cosh scale
        prop_assert!((a.cosh() - b.cosh()).abs() <= 1e-12 * a.cosh());
        prop_assert!((a - c).abs() <= 1e-9 * a.max(1.0) || (a - c).abs() <= tol);
    }

    #[test]
    fn isometries_preserve_distance(p in point3(), q in point3(), l in 0.1..10.0f64, b0 in -3.0..3.0f64, b1 in -3.0..3.0f64, th in 0.0..6.28f64) {
        let d0 = hyperbolic_distance(&p, &q).unwrap();
        let maps = [
            Isometry::Dilation(l),
            Isometry::Translation(vec![b0, b1]),
            Isometry::Rotation(vec![vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]),
            Isometry::Inversion,
        ];
        for m in &maps {
            let d = hyperbolic_distance(&m.apply(&p).unwrap(), &m.apply(&q).unwrap()).unwrap();
            prop_assert!((d - d0).abs() <= 1e-9 * d0.max(1.0), "{:?}: {} vs {}", m, d, d0);
        }
    }

    #[test]
    fn moebius_maps_preserve_distance(p in point2(), q in point2(), a in 0.2..3.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64) {
        // det = 1 with d = (1 + bc)/a
        let g = MoebiusMap::new(a, b, c, (1.0 + b * c) / a).unwrap();
        let d0 = hyperbolic_distance(&p, &q).unwrap();
        let d = hyperbolic_distance(&g.apply(&p).unwrap(), &g.apply(&q).unwrap()).unwrap();
        prop_assert!((d - d0).abs() <= 1e-8 * d0.max(1.0));
    }

    #[test]
    fn polar_round_trip(p in point3()) {
        prop_assume!(hyperbolic_distance(&UpperHalfPoint::origin(3), &p).unwrap() > 1e-6);
        let pc = polar_coordinates(&p).unwrap();
        let back = polar_inverse(&pc).unwrap();
        let d = hyperbolic_distance(&p, &back).unwrap();
        prop_assert!(d < 1e-8, "{:?} {:?} {}", p, back, d);
    }

    #[test]
    fn bessel_wronskian(k in 0.1..10.0f64, z in 0.05..20.0f64) {
        // I K' - I' K = -1/z with derivatives from the recurrences
        let nu = C64::new(0.0, k);
        let one = C64::new(1.0, 0.0);
        let i0 = bessel_i(nu, z).unwrap();
        let k0 = bessel_k(nu, z).unwrap();
        let di = 0.5 * (bessel_i(nu - one, z).unwrap() + bessel_i(nu + one, z).unwrap());
        let dk = -0.5 * (bessel_k(nu - one, z).unwrap() + bessel_k(nu + one, z).unwrap());
        let w = i0 * dk - di * k0;
        let scale = (i0.norm() * dk.norm() + di.norm() * k0.norm()).max(1.0 / z);
        prop_assert!((w + 1.0 / z).norm() <= 1e-8 * scale, "k={} z={} w={}", k, z, w);
    }

    #[test]
    fn gamma_modulus_identity(s in 0.01..30.0f64) {
        let g = gamma_complex(C64::new(1.0, s)).unwrap();
        let want = PI * s / (PI * s).sinh();
        prop_assert!((g.norm_sqr() - want).abs() <= 1e-10 * want.max(1e-300) || (g.norm_sqr() - want).abs() <= 1e-10);
    }
}

mod modular_and_output {
    use hyperspec::eisenstein::{apply_matrix, apply_word, eisenstein_series, in_fundamental_domain, reduce_to_fundamental_domain, smatrix, Generator, LatticeTruncation};
    use hyperspec::io::fmt_float;
    use hyperspec::scene::Scene;
    use hyperspec::C64;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn functional_relation(re in 0.05..0.95f64, im in -15.0..15.0f64) {
            prop_assume!((re - 0.5).abs() > 0.02 || im.abs() > 0.1);
            let s = C64::new(re, im);
            let p = smatrix(s).unwrap().value * smatrix(1.0 - s).unwrap().value;
            prop_assert!((p - 1.0).norm() <= 1e-8, "s = {} product {}", s, p);
        }

        #[test]
        fn unitary_on_the_critical_line(t in 0.0..40.0f64) {
            let v = smatrix(C64::new(0.5, t)).unwrap().value;
            prop_assert!((v.norm() - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn reduction_lands_in_the_fundamental_domain(x in -20.0..20.0f64, ly in -6.0..3.0f64) {
            let z = C64::new(x, ly.exp());
            let r = reduce_to_fundamental_domain(z).unwrap();
            prop_assert!(in_fundamental_domain(r.point.z));
            let [a, b, c, d] = r.matrix;
            prop_assert_eq!(a * d - b * c, 1);
            let scale = 1.0 + r.point.z.norm();
            prop_assert!((apply_matrix(r.matrix, z) - r.point.z).norm() <= 1e-9 * scale);
            prop_assert!((apply_word(&r.word, z) - r.point.z).norm() <= 1e-9 * scale);
        }

        #[test]
        fn csv_floats_round_trip(x in proptest::num::f64::NORMAL) {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x.abs(), "{} -> {}", x, s);
            let exp = s.split('e').nth(1).unwrap();
            prop_assert!(exp.starts_with('+') || exp.starts_with('-'));
            prop_assert!(exp.len() >= 3);
        }

        #[test]
        fn scene_is_periodic(x in -8.0..8.0f64, ly in -3.0..3.0f64, cx in -8.0..8.0f64, w in 0.2..1.5f64) {
            let scene = Scene { centers: vec![[cx, 1.0]], widths: vec![w], amplitudes: vec![1.0], grid: Default::default(), times: vec![1.0] };
            let p = scene.grid.period;
            let (a, b) = (scene.evaluate(x, ly.exp()), scene.evaluate(x + p, ly.exp()));
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn eisenstein_is_modular_invariant(x in -0.5..0.5f64, y in 0.9..3.0f64, s in 1.5..3.0f64) {
            let z = C64::new(x, y);
            prop_assume!(z.norm() > 1.0);
            let trunc = LatticeTruncation::new(200).unwrap();
            let s = C64::new(s, 0.0);
            let e = eisenstein_series(z, s, &trunc).unwrap().value;
            for g in [Generator::T(1), Generator::I] {
                let v = eisenstein_series(g.apply(z), s, &trunc).unwrap().value;
                prop_assert!((v - e).norm() <= 1e-6 * e.norm(), "{:?}: {} vs {}", g, v, e);
            }
        }
    }
}
