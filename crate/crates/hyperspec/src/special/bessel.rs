//! Modified Bessel functions I_nu, K_nu of complex order and real argument,
//! and the ordinary Bessel functions J0, J1.
//!
//! Evaluation paths for K:
//! * power series through K = (pi/2)(I_{-nu} - I_nu)/sin(nu pi), for z up to [`k_switch`];
//! * the cosh integral K_nu(z) = int_0^inf e^{-z cosh s} cosh(nu s) ds, trapezoid on a
//!   contour tilted towards the saddle point so that the sum has no catastrophic cancellation;
//! * Steed's continued fraction (Temme's CF2) for z >= 2.

use super::gamma::rgamma;
use super::quad::{Neumaier, NeumaierC};
use crate::error::{arg, Result};
use crate::C64;
use std::f64::consts::PI;

/// Offset of the integer-order limit: K_n is Richardson-extrapolated from the
/// symmetric averages of K_{n +- d} at d = INT_DELTA and 2 INT_DELTA.
pub const INT_DELTA: f64 = 1e-3;
/// Exponent at which integrands e^{-q} are dropped.
const TAIL: f64 = 41.5;

/// Series/integral switch point: series for z <= 4 + 0.9 |Im nu|.
///
/// The series combination loses roughly e^{2z - c k} to cancellation; this bound keeps
/// its error near 1e-12 across k in [0, 40] (measured against the tilted quadrature).
pub fn k_switch(nu: C64) -> f64 {
    4.0 + 0.9 * nu.im.abs()
}

fn near_integer(nu: C64) -> Option<i64> {
    let n = nu.re.round();
    if nu.im.abs() < 1e-5 && (nu.re - n).abs() < 1e-5 {
        Some(n as i64)
    } else {
        None
    }
}

/// Power series I_nu(z) = (z/2)^nu sum (z^2/4)^m / (m! Gamma(nu + m + 1)), times e^{-shift}.
fn i_series_shifted(nu: C64, z: f64, shift: f64) -> C64 {
    if z == 0.0 {
        return if nu == C64::new(0.0, 0.0) { C64::new((-shift).exp(), 0.0) } else { C64::new(0.0, 0.0) };
    }
    // I_{-n} = I_n for integers; avoids the zero denominators of the recursion
    let nu = match near_integer(nu) {
        Some(n) if n < 0 && (nu.re - n as f64).abs() == 0.0 && nu.im == 0.0 => C64::new(-nu.re, 0.0),
        _ => nu,
    };
    let q = 0.25 * z * z;
    let mut term = rgamma(nu + 1.0);
    let mut m = 0usize;
    if term.norm() == 0.0 {
        // nu + 1 a non-positive integer but not exactly integral nu: start later
        while term.norm() == 0.0 && m < 64 {
            m += 1;
            term = rgamma(nu + 1.0 + m as f64) * q.powi(m as i32);
            let mut f = 1.0;
            for j in 1..=m {
                f *= j as f64;
            }
            term /= f;
        }
    }
    let mut acc = NeumaierC::default();
    loop {
        acc.add(term);
        let den = (m as f64 + 1.0) * (nu + m as f64 + 1.0);
        term *= q / den;
        m += 1;
        if m as f64 > 0.5 * z + 2.0 && term.norm() <= 1e-17 * acc.value().norm() {
            break;
        }
        if m > 5000 {
            break;
        }
    }
    // (z/2)^nu e^{-shift}
    let lz = (0.5 * z).ln();
    let pref = (nu * lz - shift).exp();
    pref * acc.value()
}

/// I_nu(z) by its power series; z >= 0.
pub fn bessel_i_series(nu: C64, z: f64) -> C64 {
    i_series_shifted(nu, z, 0.0)
}

/// Large-argument expansion of e^{-z} I_nu(z).
fn i_scaled_asymptotic(nu: C64, z: f64) -> C64 {
    let mu = 4.0 * nu * nu;
    let mut term = C64::new(1.0, 0.0);
    let mut acc = NeumaierC::default();
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        acc.add(term);
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.norm() > prev || next.norm() < 1e-17 * acc.value().norm() {
            break;
        }
        prev = next.norm();
        term = next;
    }
    acc.value() / (2.0 * PI * z).sqrt()
}

fn i_asym_ok(nu: C64, z: f64) -> bool {
    z > 30.0 + nu.norm_sqr()
}

/// I_nu(z) for z >= 0.
pub fn bessel_i(nu: C64, z: f64) -> Result<C64> {
    if !(z >= 0.0) {
        return arg(format!("bessel_i needs z >= 0, got {z}"));
    }
    if i_asym_ok(nu, z) {
        if z > 700.0 {
            return arg(format!("I_nu({z}) overflows; use bessel_i_scaled"));
        }
        return Ok(i_scaled_asymptotic(nu, z) * z.exp());
    }
    Ok(bessel_i_series(nu, z))
}

/// e^{-z} I_nu(z).
pub fn bessel_i_scaled(nu: C64, z: f64) -> Result<C64> {
    if !(z >= 0.0) {
        return arg(format!("bessel_i_scaled needs z >= 0, got {z}"));
    }
    if i_asym_ok(nu, z) {
        return Ok(i_scaled_asymptotic(nu, z));
    }
    Ok(i_series_shifted(nu, z, z))
}

/// K through the series combination, with the integer limit branch.
pub fn bessel_k_series(nu: C64, z: f64) -> C64 {
    if near_integer(nu).is_some() {
        let n = C64::new(nu.re.round(), 0.0);
        let avg = |d: f64| 0.5 * (k_series_raw(n + d, z) + k_series_raw(n - d, z));
        // the averages are even in d: A(d) = K_n + c d^2 + O(d^4)
        return (4.0 * avg(INT_DELTA) - avg(2.0 * INT_DELTA)) / 3.0;
    }
    k_series_raw(nu, z)
}

fn k_series_raw(nu: C64, z: f64) -> C64 {
    let s = (nu * PI).sin();
    0.5 * PI * (i_series_shifted(-nu, z, 0.0) - i_series_shifted(nu, z, 0.0)) / s
}

/// K_{ik}(z) for real k by the tilted-contour cosh integral.
///
/// With s = u - i theta, K_{ik}(z) = e^{-k theta} int_0^inf e^{-z cos(theta) cosh u}
/// cos(z sin(theta) sinh u - k u) du. theta follows the saddle point asin(k/z),
/// capped below pi/2 so the integrand is never much larger than the result.
pub fn bessel_k_quadrature(k: f64, z: f64) -> f64 {
    bessel_k_quadrature_scaled(k, z, 0.0)
}

/// e^{shift} K_{ik}(z) by the tilted-contour integral.
pub fn bessel_k_quadrature_scaled(k: f64, z: f64, shift: f64) -> f64 {
    let k = k.abs();
    let dmin = if k > 0.0 { (1.0 / k).min(0.3) } else { 0.3 };
    let theta = if k > 0.0 { (k / z).min(1.0).asin().min(0.5 * PI - dmin) } else { 0.0 };
    let delta = 0.5 * PI - theta;
    let (st, ct) = theta.sin_cos();
    // step from the width of the strip of analyticity on both sides of the contour
    let mut h = 1.8 * PI * delta / 40.0;
    if theta > 0.0 {
        let excess = (k * theta + z * ct - z).max(0.0);
        h = h.min(2.0 * PI * theta / (excess + 40.0));
    }
    let zc = z * ct;
    // the integrand is dropped once it is e^{-TAIL} below its value at u = 0
    let umax = (1.0 + TAIL / zc).acosh() + 0.25;
    let n = (umax / h).ceil() as usize + 1;
    let mut acc = Neumaier::default();
    let base = -k * theta + shift;
    for j in 0..=n {
        let u = j as f64 * h;
        let e = -zc * u.cosh() + base;
        let w = if j == 0 { 0.5 } else { 1.0 };
        acc.add(w * e.exp() * (z * st * u.sinh() - k * u).cos());
    }
    acc.value() * h
}

/// K_nu(z) for complex nu by the cosh integral on the real line (no tilt).
pub fn bessel_k_quadrature_c(nu: C64, z: f64) -> C64 {
    let a = nu.re.abs();
    let h = (2.0 * PI * 0.5 * PI / (0.5 * PI * nu.im.abs() + 40.0)).min(0.1);
    let mut acc = NeumaierC::default();
    let mut j = 0usize;
    loop {
        let u = j as f64 * h;
        let e = -z * u.cosh() + a * u;
        if u > 1.0 && e < -TAIL - 20.0 {
            break;
        }
        let w = if j == 0 { 0.5 } else { 1.0 };
        acc.add(w * e.exp() * (0.5 * ((nu - a) * u).exp() + 0.5 * ((-nu - a) * u).exp() * (-2.0 * a * u).exp()));
        j += 1;
        if j > 200_000 {
            break;
        }
    }
    acc.value() * h
}

/// Steed/Temme continued fraction: returns (e^z K_mu(z), e^z K_{mu+1}(z)); z >= 2 advised.
fn cf2(mu: C64, x: f64) -> (C64, C64) {
    let one = C64::new(1.0, 0.0);
    let mut b = C64::new(2.0 * (1.0 + x), 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = C64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 1..100_000 {
        a -= 2.0 * i as f64;
        c = -a * c / (i as f64 + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = one / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() && delh.norm() < 1e-17 * h.norm() && i > 4 {
            break;
        }
    }
    h = a1 * h;
    let kmu = (PI / (2.0 * x)).sqrt() / s;
    let k1 = kmu * (mu + x + 0.5 - h) / x;
    (kmu, k1)
}

/// e^z K_nu(z) by CF2 plus upward recurrence.
pub fn bessel_k_cf2_scaled(nu: C64, z: f64) -> C64 {
    let nu = if nu.re < 0.0 { -nu } else { nu };
    let n = (nu.re + 0.5).floor();
    let mu = nu - n;
    let (mut km, mut kp) = cf2(mu, z);
    for j in 0..n as i64 {
        let next = km + 2.0 * (mu + 1.0 + j as f64) / z * kp;
        km = kp;
        kp = next;
    }
    km
}

pub fn bessel_k_cf2(nu: C64, z: f64) -> C64 {
    bessel_k_cf2_scaled(nu, z) * (-z).exp()
}

fn check_z(z: f64, name: &str) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return arg(format!("{name} needs z > 0, got {z}"));
    }
    Ok(())
}

/// K_nu(z), z > 0. Series below [`k_switch`]; above it the real cosh integral for
/// purely imaginary order and CF2 otherwise.
pub fn bessel_k(nu: C64, z: f64) -> Result<C64> {
    check_z(z, "bessel_k")?;
    let nu = if nu.re < 0.0 { -nu } else { nu };
    if z <= k_switch(nu) {
        let v = bessel_k_series(nu, z);
        return Ok(if nu.re == 0.0 { C64::new(v.re, 0.0) } else { v });
    }
    if nu.re == 0.0 {
        return Ok(C64::new(bessel_k_quadrature(nu.im, z), 0.0));
    }
    Ok(bessel_k_cf2(nu, z))
}

/// e^z K_nu(z), z > 0.
pub fn bessel_k_scaled(nu: C64, z: f64) -> Result<C64> {
    check_z(z, "bessel_k_scaled")?;
    let nu = if nu.re < 0.0 { -nu } else { nu };
    if z <= k_switch(nu) {
        return Ok(bessel_k_series(nu, z) * z.exp());
    }
    if nu.re == 0.0 {
        return Ok(C64::new(bessel_k_quadrature_scaled(nu.im, z, z), 0.0));
    }
    Ok(bessel_k_cf2_scaled(nu, z))
}

/// K_{ik}(z) as a real number.
pub fn bessel_k_ik(k: f64, z: f64) -> Result<f64> {
    bessel_k(C64::new(0.0, k), z).map(|v| v.re)
}

/// The analytic (non-quadrature) path: series below the switch, CF2 above.
pub fn bessel_k_analytic(nu: C64, z: f64) -> C64 {
    let nu = if nu.re < 0.0 { -nu } else { nu };
    if z <= k_switch(nu) {
        bessel_k_series(nu, z)
    } else {
        bessel_k_cf2(nu, z)
    }
}

/// Oscillation envelope of K_{ik}(z) for z < k (uniform WKB amplitude); used as the
/// error scale near zeros, where relative error is undefined.
pub fn k_ik_envelope(k: f64, z: f64) -> f64 {
    let k = k.abs();
    let q = (k * k - z * z).max(k.powf(4.0 / 3.0));
    (2.0 * PI).sqrt() * (-0.5 * PI * k).exp() / q.powf(0.25)
}

fn hankel_pq(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n * n) as f64;
    let y = 8.0 * x;
    let mut p = Neumaier::default();
    let mut q = Neumaier::default();
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    let mut k = 0u32;
    loop {
        if k % 2 == 0 {
            p.add(if k % 4 == 0 { term } else { -term });
        } else {
            q.add(if k % 4 == 1 { term } else { -term });
        }
        let odd = (2 * k + 1) as f64;
        let next = term * (mu - odd * odd) / ((k + 1) as f64 * y);
        k += 1;
        if next.abs() >= prev || next.abs() < 1e-18 || k > 120 {
            break;
        }
        prev = next.abs();
        term = next;
    }
    (p.value(), q.value())
}

/// (J0(x), J1(x)): Miller backward recurrence for |x| <= 60, Hankel expansion beyond.
pub fn bessel_j01(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let sgn = if x < 0.0 { -1.0 } else { 1.0 };
    if ax < 1e-8 {
        return (1.0 - 0.25 * x * x, 0.5 * x);
    }
    if ax > 60.0 {
        let amp = (2.0 / (PI * ax)).sqrt();
        let (p0, q0) = hankel_pq(0, ax);
        let (p1, q1) = hankel_pq(1, ax);
        let c0 = ax - 0.25 * PI;
        let c1 = ax - 0.75 * PI;
        let j0 = amp * (p0 * c0.cos() - q0 * c0.sin());
        let j1 = amp * (p1 * c1.cos() - q1 * c1.sin());
        return (j0, sgn * j1);
    }
    let m = 2 * ((ax + 15.0 + 10.0 * ax.cbrt()) as usize / 2 + 1);
    let mut jp = 0.0;
    let mut j = 1e-280;
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=m).rev() {
        let jm = 2.0 * k as f64 / ax * j - jp;
        jp = j;
        j = jm;
        // j now holds J_{k-1}
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
        if k - 1 == 1 {
            j1 = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += j;
    (j / norm, sgn * j1 / norm)
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j01(x).0
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j01(x).1
}

/// Bessel J of order 0 or 1.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    match order {
        0 => Ok(bessel_j0(x)),
        1 => Ok(bessel_j1(x)),
        _ => arg(format!("bessel_j supports orders 0 and 1, got {order}")),
    }
}

/// J1(w)/w, smooth through w = 0 (value 1/2).
pub fn j1_over_x(w: f64) -> f64 {
    if w.abs() < 2.0 {
        let q = -0.25 * w * w;
        let mut term = 0.5;
        let mut s = 0.0;
        for m in 0..40 {
            s += term;
            term *= q / ((m as f64 + 1.0) * (m as f64 + 2.0));
            if term.abs() < 1e-18 {
                break;
            }
        }
        return s + term;
    }
    bessel_j1(w) / w
}

/// J2(w)/w^2, smooth through w = 0 (value 1/8).
pub fn j2_over_x2(w: f64) -> f64 {
    if w.abs() < 2.0 {
        let q = -0.25 * w * w;
        let mut term = 0.125;
        let mut s = 0.0;
        for m in 0..40 {
            s += term;
            term *= q / ((m as f64 + 1.0) * (m as f64 + 3.0));
            if term.abs() < 1e-18 {
                break;
            }
        }
        return s + term;
    }
    let (j0, j1) = bessel_j01(w);
    (2.0 * j1 / w - j0) / (w * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn half_integer_closed_forms() {
        let i = bessel_i(c(0.5, 0.0), 1.0).unwrap();
        let want = (2.0 / PI).sqrt() * 1f64.sinh();
        assert!((i.re / want - 1.0).abs() < 1e-13);
        let k = bessel_k(c(0.5, 0.0), 1.0).unwrap();
        let want = (PI / 2.0).sqrt() * (-1f64).exp();
        assert!((k.re / want - 1.0).abs() < 1e-12);
        // through CF2 as well
        let k = bessel_k_cf2(c(0.5, 0.0), 3.0);
        let want = (PI / 6.0).sqrt() * (-3f64).exp();
        assert!((k.re / want - 1.0).abs() < 1e-13);
    }

    #[test]
    fn k0_paths_agree() {
        let a = bessel_k(c(0.0, 0.0), 1.0).unwrap().re;
        let b = bessel_k_quadrature(0.0, 1.0);
        assert!((a - 0.421_024_438_240_708_3).abs() < 1e-10, "{a}");
        assert!((b - 0.421_024_438_240_708_3).abs() < 1e-14, "{b}");
        let k1 = bessel_k(c(1.0, 0.0), 1.0).unwrap().re;
        assert!((k1 - 0.601_907_230_197_234_6).abs() < 1e-10, "{k1}");
    }

    #[test]
    fn imaginary_order_is_real() {
        let s = bessel_k_series(c(0.0, 1.3), 0.7);
        assert!(s.im.abs() < 1e-12 * s.re.abs().max(1e-300));
        let q = bessel_k_quadrature(1.3, 0.7);
        assert!((q - s.re).abs() < 1e-12);
    }

    #[test]
    fn i0_at_zero() {
        assert_eq!(bessel_i(c(0.0, 0.0), 0.0).unwrap(), c(1.0, 0.0));
        assert!((bessel_i(c(0.0, 0.0), 1e-12).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn recurrence_for_i() {
        let nu = c(0.3, 0.8);
        let z = 1.7;
        let h = 1e-5;
        let d = (bessel_i(nu, z + h).unwrap() - bessel_i(nu, z - h).unwrap()) / (2.0 * h);
        let r = 0.5 * (bessel_i(nu - 1.0, z).unwrap() + bessel_i(nu + 1.0, z).unwrap());
        assert!((d - r).norm() / r.norm() < 1e-6);
    }

    #[test]
    fn scaled_i_asymptotic_matches_series() {
        let nu = c(0.5, -0.5);
        let z = 31.0;
        let a = i_scaled_asymptotic(nu, z);
        let b = i_series_shifted(nu, z, z);
        assert!((a - b).norm() / b.norm() < 1e-12, "{a} {b}");
    }

    #[test]
    fn cf2_against_series_at_switch() {
        for &(k, z) in &[(0.5, 3.0), (3.0, 7.0), (8.0, 11.0)] {
            let a = bessel_k_series(c(0.0, k), z).re;
            let b = bessel_k_cf2(c(0.0, k), z).re;
            assert!((a - b).abs() / b.abs() < 1e-9, "{k} {z}: {a} {b}");
        }
    }

    #[test]
    fn j_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert_eq!(bessel_j1(0.0), 0.0);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!((bessel_j1(100.0) + 0.077_145_352_014_112_16).abs() < 1e-14);
        assert!((bessel_j0(59.9) - bessel_j0_hankel(59.9)).abs() < 1e-13);
        assert!((j1_over_x(1e-9) - 0.5).abs() < 1e-15);
        assert!((j1_over_x(1.999) - bessel_j1(1.999) / 1.999).abs() < 1e-15);
        assert!((j2_over_x2(1.999) - j2_over_x2(2.001)).abs() < 1e-3);
        assert!(bessel_j(2, 1.0).is_err());
    }

    fn bessel_j0_hankel(x: f64) -> f64 {
        let (p0, q0) = hankel_pq(0, x);
        let c0 = x - 0.25 * PI;
        (2.0 / (PI * x)).sqrt() * (p0 * c0.cos() - q0 * c0.sin())
    }

    #[test]
    fn j0_first_zero_by_bisection() {
        let (mut a, mut b) = (2.0, 3.0);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if bessel_j0(a) * bessel_j0(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        assert!((a - 2.404826).abs() < 1e-5);
        assert!(bessel_j0(2.404826).abs() < 1e-5);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(c(0.0, 1.0), 0.0).is_err());
        assert!(bessel_i(c(0.0, 1.0), -1.0).is_err());
    }
}
