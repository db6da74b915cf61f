//! Complex Gamma function (Lanczos, g = 7, n = 9) with reflection.

use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

const G: f64 = 7.0;
const P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn pole_check(s: C64) -> Result<()> {
    if s.re <= 0.5 && s.im.abs() < 1e-14 && (s.re - s.re.round()).abs() < 1e-14 {
        let n = (-s.re.round()) as i64;
        let mut fact = 1.0;
        for k in 1..=n {
            fact *= k as f64;
        }
        let res = if n % 2 == 0 { 1.0 } else { -1.0 } / fact;
        return Err(Error::Pole {
            location: format!("{}", s.re.round()),
            detail: format!("Gamma has a simple pole with residue {res:.6e}"),
        });
    }
    Ok(())
}

fn lanczos_sum(z: C64) -> C64 {
    // z here is s - 1
    let mut x = C64::new(P[0], 0.0);
    for (i, p) in P.iter().enumerate().skip(1) {
        x += *p / (z + i as f64);
    }
    x
}

/// Gamma(s) for complex s away from the non-positive integers.
pub fn gamma_complex(s: C64) -> Result<C64> {
    pole_check(s)?;
    Ok(gamma_unchecked(s))
}

fn gamma_unchecked(s: C64) -> C64 {
    if s.re < 0.5 {
        let sp = (s * PI).sin();
        return PI / (sp * gamma_unchecked(1.0 - s));
    }
    let z = s - 1.0;
    let t = z + G + 0.5;
    let x = lanczos_sum(z);
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// log Gamma(s); the imaginary part is a continuous branch for Re s >= 1/2
/// and is only meaningful modulo 2 pi after reflection.
pub fn ln_gamma_complex(s: C64) -> Result<C64> {
    pole_check(s)?;
    Ok(ln_gamma_unchecked(s))
}

fn ln_gamma_unchecked(s: C64) -> C64 {
    if s.re < 0.5 {
        return C64::new(PI.ln(), 0.0) - (s * PI).sin().ln() - ln_gamma_unchecked(1.0 - s);
    }
    let z = s - 1.0;
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Real Gamma for real arguments.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma_complex(C64::new(x, 0.0)).map(|v| v.re)
}

/// 1/Gamma(s), entire; zero at the poles of Gamma.
pub fn rgamma(s: C64) -> C64 {
    if pole_check(s).is_err() {
        return C64::new(0.0, 0.0);
    }
    if s.re < 0.5 {
        // 1/Gamma(s) = sin(pi s) Gamma(1 - s) / pi
        return (s * PI).sin() * gamma_unchecked(1.0 - s) / PI;
    }
    1.0 / gamma_unchecked(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert!((gamma_complex(C64::new(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        let h = gamma_complex(C64::new(0.5, 0.0)).unwrap();
        assert!((h.re - PI.sqrt()).abs() < 1e-14 * PI.sqrt());
        let g5 = gamma_real(5.0).unwrap();
        assert!((g5 - 24.0).abs() < 1e-12);
    }

    #[test]
    fn modulus_identity() {
        for &sig in &[0.3, 2.0, 7.5, 20.0] {
            let g = gamma_complex(C64::new(1.0, sig)).unwrap();
            let want = PI * sig / (PI * sig).sinh();
            assert!((g.norm_sqr() / want - 1.0).abs() < 1e-12, "{sig}");
        }
    }

    #[test]
    fn reflection_oracle() {
        // Gamma(s) Gamma(1-s) = pi / sin(pi s)
        let s = C64::new(0.3, 1.7);
        let lhs = gamma_complex(s).unwrap() * gamma_complex(1.0 - s).unwrap();
        let rhs = PI / (s * PI).sin();
        assert!((lhs / rhs - 1.0).norm() < 1e-13);
        let s = C64::new(-2.5, 0.0);
        // Gamma(-5/2) = -8 sqrt(pi) / 15
        assert!((gamma_complex(s).unwrap().re + 8.0 * PI.sqrt() / 15.0).abs() < 1e-13);
    }

    #[test]
    fn poles_report_residue() {
        match gamma_complex(C64::new(-2.0, 0.0)) {
            Err(Error::Pole { location, detail }) => {
                assert_eq!(location, "-2");
                assert!(detail.contains("5.0"));
            }
            r => panic!("{r:?}"),
        }
        assert_eq!(rgamma(C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
    }

    #[test]
    fn log_gamma_consistent() {
        for s in [C64::new(1.0, 40.0), C64::new(3.2, -5.0), C64::new(-1.3, 2.0)] {
            let a = ln_gamma_complex(s).unwrap().exp();
            let b = gamma_complex(s).unwrap();
            assert!((a / b - 1.0).norm() < 1e-11, "{s}");
        }
    }
}
