//! SL(2,Z) acting on the upper half-plane: reduction to the fundamental domain
//! {|Re z| <= 1/2, |z| >= 1} and coprime pair enumeration.

use crate::error::{arg, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Tolerance of the fundamental-domain test.
pub const REDUCED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularPoint {
    pub z: C64,
    pub reduced: bool,
}

impl ModularPoint {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.im > 0.0) {
            return arg(format!("modular point needs Im z > 0, got {z}"));
        }
        Ok(Self { z, reduced: in_fundamental_domain(z) })
    }
}

pub fn in_fundamental_domain(z: C64) -> bool {
    z.im > 0.0 && z.norm() >= 1.0 - REDUCED_TOL && z.re.abs() <= 0.5 + REDUCED_TOL
}

/// Generators: T^n z = z + n and I z = -1/z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    T(i64),
    I,
}

impl Generator {
    pub fn apply(&self, z: C64) -> C64 {
        match self {
            Generator::T(n) => z + *n as f64,
            Generator::I => -1.0 / z,
        }
    }

    fn matrix(&self) -> [i64; 4] {
        match self {
            Generator::T(n) => [1, *n, 0, 1],
            Generator::I => [0, -1, 1, 0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub point: ModularPoint,
    /// applied left to right to the input
    pub word: Vec<Generator>,
    /// [a, b, c, d] with (a z + b)/(c z + d) = reduced point
    pub matrix: [i64; 4],
}

impl Reduction {
    pub fn word_length(&self) -> usize {
        self.word.len()
    }
}

fn mat_mul(p: [i64; 4], q: [i64; 4]) -> [i64; 4] {
    [p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]]
}

/// Apply a word left to right.
pub fn apply_word(word: &[Generator], z: C64) -> C64 {
    word.iter().fold(z, |w, g| g.apply(w))
}

pub fn apply_matrix(m: [i64; 4], z: C64) -> C64 {
    (m[0] as f64 * z + m[1] as f64) / (m[2] as f64 * z + m[3] as f64)
}

/// Alternate translations and inversions until the point is reduced.
pub fn reduce_to_fundamental_domain(z: C64) -> Result<Reduction> {
    if !(z.im > 0.0) || !z.re.is_finite() {
        return arg(format!("reduction needs Im z > 0, got {z}"));
    }
    let mut w = z;
    let mut word = Vec::new();
    let mut mat = [1, 0, 0, 1];
    for _ in 0..10_000 {
        let n = -(w.re.round() as i64);
        if n != 0 {
            let g = Generator::T(n);
            w = g.apply(w);
            mat = mat_mul(g.matrix(), mat);
            word.push(g);
        }
        if w.norm_sqr() < 1.0 - REDUCED_TOL {
            let g = Generator::I;
            w = g.apply(w);
            mat = mat_mul(g.matrix(), mat);
            word.push(g);
        } else {
            return Ok(Reduction { point: ModularPoint { z: w, reduced: true }, word, matrix: mat });
        }
    }
    Err(crate::Error::Solver("fundamental-domain reduction did not terminate".into()))
}

/// Coprime pairs (c, d) with 1 <= c <= M and |d| <= M, by Stern-Brocot descent.
/// The sum over c >= 1 equals half of the sign-symmetric sum over c != 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeTruncation {
    pub m: usize,
    pairs: Vec<(i64, i64)>,
}

impl LatticeTruncation {
    pub fn new(m: usize) -> Result<Self> {
        if m < 1 {
            return arg("truncation bound must be positive");
        }
        let mi = m as i64;
        // fractions p/q = |d|/c in the Stern-Brocot tree, pruned at max(p, q) > M
        let mut pairs = vec![(1, 0)];
        let mut stack = vec![((0i64, 1i64), (1i64, 0i64))];
        while let Some(((a, b), (c, d))) = stack.pop() {
            let (p, q) = (a + c, b + d);
            if p > mi || q > mi {
                continue;
            }
            pairs.push((q, p));
            pairs.push((q, -p));
            stack.push(((a, b), (p, q)));
            stack.push(((p, q), (c, d)));
        }
        pairs.sort_unstable();
        Ok(Self { m, pairs })
    }

    /// Pairs with c >= 1.
    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    /// The sign-symmetric set, (c, d) and (-c, -d).
    pub fn symmetric_pairs(&self) -> Vec<(i64, i64)> {
        self.pairs.iter().flat_map(|&(c, d)| [(c, d), (-c, -d)]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn enumeration_matches_gcd_scan() {
        let t = LatticeTruncation::new(37).unwrap();
        let mut scan = Vec::new();
        for c in 1..=37i64 {
            for d in -37..=37i64 {
                if gcd(c, d) == 1 {
                    scan.push((c, d));
                }
            }
        }
        assert_eq!(t.pairs(), &scan[..]);
        let sym = t.symmetric_pairs();
        assert!(sym.iter().all(|&(c, d)| sym.contains(&(-c, -d))));
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_to_fundamental_domain(C64::new(5.0, 1.0)).unwrap();
        assert!((r.point.z - C64::new(0.0, 1.0)).norm() < 1e-14);
        let z = C64::new(0.2, 1.5);
        let r = reduce_to_fundamental_domain(z).unwrap();
        assert_eq!(r.point.z, z);
        assert_eq!(r.word_length(), 0);
        let z = C64::new(0.1, 0.1);
        let r = reduce_to_fundamental_domain(z).unwrap();
        assert!(in_fundamental_domain(r.point.z));
        assert!((apply_word(&r.word, z) - r.point.z).norm() < 1e-10);
        assert!((apply_matrix(r.matrix, z) - r.point.z).norm() < 1e-10);
        let m = r.matrix;
        assert_eq!(m[0] * m[3] - m[1] * m[2], 1);
        assert!(reduce_to_fundamental_domain(C64::new(0.0, -1.0)).is_err());
    }
}
