//! Riemann zeta and the completed function xi(w) = w(w-1)/2 pi^{-w/2} Gamma(w/2) zeta(w).

use crate::error::{Error, Result};
use crate::special::gamma::gamma_complex;
use crate::C64;
use std::f64::consts::PI;

/// Stieltjes constants gamma_0..gamma_3.
const STIELTJES: [f64; 4] = [0.577_215_664_901_532_9, -0.072_815_845_483_676_72, -0.009_690_363_192_872_318, 0.002_053_834_420_303_346];

/// B_2, B_4, ..., B_30.
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Dirichlet eta by the Cohen-Villegas-Zagier acceleration of the alternating series.
pub fn eta_cvz(s: C64) -> C64 {
    // error ~ e^{pi |t|/2} (3 + sqrt 8)^{-n}
    let n = ((37.0 + 0.5 * PI * s.im.abs()) / (3.0 + 8f64.sqrt()).ln()).ceil() as usize + 4;
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0;
    let mut c = -d;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        c = b - c;
        acc += c * (-s * ((k + 1) as f64).ln()).exp();
        let kf = k as f64;
        let nf = n as f64;
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    acc / d
}

/// zeta by Euler-Maclaurin summation; valid for any s != 1.
pub fn zeta_euler_maclaurin(s: C64) -> C64 {
    let n = 20 + s.norm().ceil() as usize;
    let nf = n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 1..n {
        acc += (-s * (k as f64).ln()).exp();
    }
    let ns = (-s * nf.ln()).exp();
    acc += ns * nf / (s - 1.0) + 0.5 * ns;
    // B_{2j}/(2j)! s(s+1)...(s+2j-2) N^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = ns / nf;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = rising * npow * (*b / fact);
        acc += term;
        let m = 2 * j as u32 + 2;
        rising *= (s + (m - 1) as f64) * (s + m as f64);
        fact *= ((m + 1) * (m + 2)) as f64;
        npow /= nf * nf;
    }
    acc
}

fn zeta_right(s: C64) -> C64 {
    let den = C64::new(1.0, 0.0) - (C64::new(2f64.ln(), 0.0) * (1.0 - s)).exp();
    if den.norm() < 1e-2 {
        // 1 - 2^{1-s} vanishes at s = 1 + 2 pi i m / log 2
        return zeta_euler_maclaurin(s);
    }
    eta_cvz(s) / den
}

/// Riemann zeta for s != 1: eta acceleration for Re s >= 1/2, functional equation otherwise.
pub fn riemann_zeta(s: C64) -> Result<C64> {
    if (s - 1.0).norm() < 1e-15 {
        return Err(Error::Pole { location: "1".into(), detail: "zeta has a simple pole with residue 1".into() });
    }
    if s.re >= 0.5 {
        if s.re > 60.0 {
            return Ok(C64::new(1.0, 0.0) + (-s * 2f64.ln()).exp() + (-s * 3f64.ln()).exp());
        }
        return Ok(zeta_right(s));
    }
    if s.norm() < 0.1 {
        // the reflected formula is 0 * pole at s = 0
        return Ok(zeta_euler_maclaurin(s));
    }
    // zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
    let one = C64::new(1.0, 0.0);
    let pref = (s * 2f64.ln()).exp() * ((s - 1.0) * PI.ln()).exp() * (s * 0.5 * PI).sin();
    let g = gamma_complex(one - s)?;
    Ok(pref * g * zeta_right(one - s))
}

/// Completed zeta xi(w), entire and symmetric under w -> 1 - w.
pub fn xi(w: C64) -> C64 {
    let w = if w.re < 0.5 { C64::new(1.0, 0.0) - w } else { w };
    let e = w - 1.0;
    let res = if e.norm() < 1e-3 {
        // (w-1) zeta(w) = 1 + sum_n (-1)^n gamma_n / n! (w-1)^{n+1}
        let mut r = C64::new(1.0, 0.0);
        let mut p = e;
        let mut fact = 1.0;
        for (n, g) in STIELTJES.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            r += p * (sign * g / fact);
            p *= e;
        }
        r
    } else {
        e * zeta_right(w)
    };
    let g = gamma_complex(0.5 * w).expect("Re w >= 1/2 avoids poles");
    0.5 * w * (-0.5 * w * PI.ln()).exp() * g * res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let z2 = riemann_zeta(C64::new(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-12 * z2.re && z2.im == 0.0);
        let z0 = riemann_zeta(C64::new(0.0, 0.0)).unwrap();
        assert!((z0.re + 0.5).abs() < 1e-13);
        let z40 = riemann_zeta(C64::new(40.0, 3.0)).unwrap();
        assert!((z40 - 1.0).norm() < 1e-11);
        // zeta(-1) = -1/12
        assert!((riemann_zeta(C64::new(-1.0, 0.0)).unwrap().re + 1.0 / 12.0).abs() < 1e-13);
        assert!(matches!(riemann_zeta(C64::new(1.0, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn two_algorithms_agree() {
        for s in [C64::new(0.5, 14.134725), C64::new(0.7, 49.0), C64::new(1.0, 9.06472), C64::new(3.0, -20.0), C64::new(0.5, 1.0)] {
            let a = riemann_zeta(s).unwrap();
            let b = zeta_euler_maclaurin(s);
            assert!((a - b).norm() < 1e-10 * b.norm().max(1e-3), "{s}: {a} {b}");
        }
        // first nontrivial zero
        assert!(riemann_zeta(C64::new(0.5, 14.134_725_141_734_693)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn xi_symmetry_and_special_values() {
        assert!((xi(C64::new(1.0, 0.0)) - 0.5).norm() < 1e-14);
        assert!((xi(C64::new(0.0, 0.0)) - 0.5).norm() < 1e-14);
        let w = C64::new(0.3, 4.0);
        let a = xi(w);
        let b = xi(C64::new(1.0, 0.0) - w);
        assert!((a - b).norm() < 1e-14 * a.norm());
        // continuity across the Laurent branch
        let inner = xi(C64::new(1.0 + 9e-4, 0.0));
        let outer = xi(C64::new(1.0 + 1.1e-3, 0.0));
        assert!((inner - outer).norm() < 1e-3 && (inner - 0.5).norm() < 1e-3);
        let direct = {
            let w = C64::new(1.0 + 0.999e-3, 0.0);
            0.5 * w * (w - 1.0) * (-0.5 * w * PI.ln()).exp() * gamma_complex(0.5 * w).unwrap() * zeta_euler_maclaurin(w)
        };
        let series = xi(C64::new(1.0 + 0.999e-3, 0.0));
        assert!((series - direct).norm() < 1e-12);
    }
}
