//! Truncated Eisenstein series
//! E(z, s) = y^s + sum_{c >= 1, gcd(c, d) = 1} (y / ((cx + d)^2 + c^2 y^2))^s
//! with a continuum correction for the pairs outside the box.

use super::modular::LatticeTruncation;
use super::zeta::riemann_zeta;
use crate::error::{Error, Result};
use crate::special::gamma::gamma_complex;
use crate::special::quad::{GaussRule, NeumaierC};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EisensteinValue {
    /// box sum plus tail correction
    pub value: C64,
    pub box_sum: C64,
    /// density-6/pi^2 continuum estimate of the omitted pairs
    pub tail_correction: C64,
    /// rigorous bound on the omitted pairs (reduced z), from y/|cz+d|^2 <= 2/(sqrt3 |cd|)
    pub tail_bound: f64,
}

fn check_s(s: C64) -> Result<()> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("the lattice sum converges only for Re s > 1, got s = {s}")));
    }
    Ok(())
}

fn term(c: i64, d: i64, x: f64, y: f64, s: C64) -> C64 {
    let q = y / ((c as f64 * x + d as f64).powi(2) + (c * c) as f64 * y * y);
    (s * q.ln()).exp()
}

/// Deterministic chunked sum over the pairs; chunk boundaries do not depend on the thread count.
fn box_sum(pairs: &[(i64, i64)], x: f64, y: f64, s: C64) -> C64 {
    let parts: Vec<C64> = pairs
        .par_chunks(CHUNK)
        .map(|ch| {
            let mut acc = NeumaierC::default();
            for &(c, d) in ch {
                acc.add(term(c, d, x, y, s));
            }
            acc.value()
        })
        .collect();
    let mut acc = NeumaierC::default();
    for p in parts {
        acc.add(p);
    }
    acc.value()
}

/// Sum over pairs with c >= 1, d != 0, outside [1, M]^2 of (2/(sqrt3 |c d|))^sigma.
pub fn box_tail_bound(m: usize, sigma: f64) -> Result<f64> {
    let z = riemann_zeta(C64::new(sigma, 0.0))?.re;
    let h: f64 = (1..=m).map(|n| (n as f64).powf(-sigma)).sum();
    Ok(2.0 * (2.0 / 3f64.sqrt()).powf(sigma) * (z * z - h * h).max(0.0))
}

/// Continuum estimate of the pairs outside the box |c|, |d| <= M with boundary B = M + 1/2.
pub fn tail_correction(x: f64, y: f64, s: C64, m: usize) -> Result<C64> {
    check_s(s)?;
    let b = m as f64 + 0.5;
    let g = |v: C64| gamma_complex(v);
    // c > B, all d
    let far = ((1.0 - s) * y.ln()).exp() * PI.sqrt() * g(s - 0.5)? / g(s)?
        * ((2.0 - 2.0 * s) * b.ln()).exp()
        / (2.0 * s - 2.0);
    // 0 < c < B, |d| > B: c = B v, d = B/u
    let rule = GaussRule::new(24);
    let nodes = rule.nodes(0.0, 1.0, 4);
    let mut side = NeumaierC::default();
    for &(v, wv) in &nodes {
        let c = b * v;
        for &(u, wu) in &nodes {
            for sx in [x, -x] {
                let den = (b + c * sx * u).powi(2) + c * c * y * y * u * u;
                let q = y * u * u / den;
                side.add((s * q.ln()).exp() * (b / (u * u)) * (b * wv * wu));
            }
        }
    }
    Ok((far + side.value()) * (6.0 / (PI * PI)))
}

/// Truncated Eisenstein series at z = x + iy.
pub fn eisenstein_series(z: C64, s: C64, trunc: &LatticeTruncation) -> Result<EisensteinValue> {
    check_s(s)?;
    if !(z.im > 0.0) {
        return crate::error::arg(format!("Eisenstein series needs Im z > 0, got {z}"));
    }
    if trunc.m < 10 {
        return crate::error::arg("truncation bound M must be at least 10");
    }
    let (x, y) = (z.re, z.im);
    let box_sum = (s * y.ln()).exp() + box_sum(trunc.pairs(), x, y, s);
    let tail = tail_correction(x, y, s, trunc.m)?;
    Ok(EisensteinValue { value: box_sum + tail, box_sum, tail_correction: tail, tail_bound: box_tail_bound(trunc.m, s.re)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantTermCheck {
    /// int_0^1 E(x + iy, s) dx
    pub quadrature: C64,
    /// y^s + S(s) y^{1-s}
    pub predicted: C64,
    /// |quadrature - predicted| / |y^s|
    pub residual: f64,
    /// same residual without the continuum tail correction
    pub residual_box_only: f64,
}

/// Constant term of the truncated series by 64-point Gauss-Legendre in x.
pub fn constant_term_check(y: f64, s: C64, trunc: &LatticeTruncation) -> Result<ConstantTermCheck> {
    check_s(s)?;
    if !(y > 0.0) {
        return crate::error::arg("y must be positive");
    }
    let rule = GaussRule::new(64);
    let nodes = rule.nodes(0.0, 1.0, 1);
    let mut with_tail = NeumaierC::default();
    let mut box_only = NeumaierC::default();
    for &(x, w) in &nodes {
        let e = eisenstein_series(C64::new(x, y), s, trunc)?;
        with_tail.add(e.value * w);
        box_only.add(e.box_sum * w);
    }
    let ys = (s * y.ln()).exp();
    let predicted = ys + super::smatrix::smatrix(s)?.value * ((1.0 - s) * y.ln()).exp();
    let q = with_tail.value();
    Ok(ConstantTermCheck {
        quadrature: q,
        predicted,
        residual: (q - predicted).norm() / ys.norm(),
        residual_box_only: (box_only.value() - predicted).norm() / ys.norm(),
    })
}

/// Largest |E(z,s) - y^s| over the given points.
pub fn sup_deviation(points: &[C64], s: C64, trunc: &LatticeTruncation) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in points {
        let e = eisenstein_series(*z, s, trunc)?;
        worst = worst.max((e.value - (s * z.im.ln()).exp()).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::modular::{reduce_to_fundamental_domain, Generator};

    /// Mobius function by trial division.
    fn mobius(mut n: i64) -> i64 {
        let mut r = 1;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                r = -r;
            }
            p += 1;
        }
        if n > 1 {
            r = -r;
        }
        r
    }

    #[test]
    fn mobius_sieve_oracle() {
        // sum over coprime pairs = sum_g mu(g) sum over all pairs divisible by g
        let m = 60i64;
        let t = LatticeTruncation::new(m as usize).unwrap();
        let (x, y) = (0.0, 10.0);
        let s = C64::new(2.0, 0.0);
        let ours = box_sum(t.pairs(), x, y, s);
        let mut acc = NeumaierC::default();
        for g in 1..=m {
            let mu = mobius(g);
            if mu == 0 {
                continue;
            }
            for c in 1..=m / g {
                for d in -(m / g)..=(m / g) {
                    acc.add(term(g * c, g * d, x, y, s) * mu as f64);
                }
            }
        }
        let oracle = acc.value();
        let full_o = oracle + 100.0;
        let full = ours + 100.0;
        assert!((full - full_o).norm() / full_o.norm() < 1e-8);
        assert!((ours - oracle).norm() < 1e-13 * oracle.norm());
    }

    #[test]
    fn constant_term_identity() {
        let t = LatticeTruncation::new(200).unwrap();
        let r = constant_term_check(3.0, C64::new(2.0, 0.0), &t).unwrap();
        assert!(r.residual <= 1e-6, "{r:?}");
        let r3 = constant_term_check(4.0, C64::new(3.0, 0.0), &t).unwrap();
        assert!(r3.residual <= 1e-8, "{r3:?}");
    }

    #[test]
    fn invariance_under_generators() {
        let t = LatticeTruncation::new(200).unwrap();
        let s = C64::new(2.0, 0.0);
        let z = reduce_to_fundamental_domain(C64::new(0.1, 0.1)).unwrap().point.z;
        let e = eisenstein_series(z, s, &t).unwrap();
        for g in [Generator::T(1), Generator::I] {
            let e2 = eisenstein_series(g.apply(z), s, &t).unwrap();
            assert!((e2.value - e.value).norm() <= e.tail_bound, "{g:?}");
            assert!((e2.value - e.value).norm() <= 1e-6 * e.value.norm(), "{g:?} {} {}", e2.value, e.value);
        }
    }

    #[test]
    fn domain_errors() {
        let t = LatticeTruncation::new(20).unwrap();
        assert!(matches!(eisenstein_series(C64::new(0.0, 1.0), C64::new(1.0, 0.0), &t), Err(Error::Domain(_))));
        assert!(eisenstein_series(C64::new(0.0, 1.0), C64::new(2.0, 0.0), &LatticeTruncation::new(5).unwrap()).is_err());
    }
}
