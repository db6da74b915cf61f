//! Banded Cholesky and a shift-invert block Krylov eigensolver for S x = lambda M x
//! (S symmetric positive semidefinite and sparse, M diagonal positive).

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sparse symmetric matrix given by its diagonal and off-diagonal bands (offset, values),
/// values[p] coupling p and p + offset.
#[derive(Debug, Clone)]
pub struct BandedSym {
    pub diag: Vec<f64>,
    pub bands: Vec<(usize, Vec<f64>)>,
}

impl BandedSym {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.iter().map(|b| b.0).max().unwrap_or(0)
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (p, v) in y.iter_mut().enumerate() {
            *v = self.diag[p] * x[p];
        }
        for (off, vals) in &self.bands {
            for p in 0..self.len().saturating_sub(*off) {
                let a = vals[p];
                if a != 0.0 {
                    y[p] += a * x[p + off];
                    y[p + off] += a * x[p];
                }
            }
        }
    }

    pub fn apply_matrix(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for c in 0..x.ncols() {
            let src = x.column(c);
            let mut dst = vec![0.0; x.nrows()];
            self.apply(src.as_slice(), &mut dst);
            out.column_mut(c).copy_from_slice(&dst);
        }
        out
    }
}

/// Cholesky factor L of a banded SPD matrix, row p holding L[p][p-k] for k = 0..=bw.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(a: &BandedSym) -> Result<Self> {
        let n = a.len();
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for p in 0..n {
            l[p * w] = a.diag[p];
        }
        for (off, vals) in &a.bands {
            for p in 0..n.saturating_sub(*off) {
                l[(p + off) * w + off] = vals[p];
            }
        }
        // column-oriented: L[i][j] for i in j..j+bw
        for j in 0..n {
            let kmin = j.saturating_sub(bw);
            let mut s = l[j * w];
            for k in kmin..j {
                let v = l[j * w + (j - k)];
                s -= v * v;
            }
            if !(s > 0.0) {
                return Err(Error::Solver(format!("banded Cholesky: matrix not positive definite at row {j}")));
            }
            let d = s.sqrt();
            l[j * w] = d;
            for i in j + 1..(j + w).min(n) {
                let kmin = i.saturating_sub(bw);
                let mut s = l[i * w + (i - j)];
                for k in kmin..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                l[i * w + (i - j)] = s / d;
            }
        }
        Ok(Self { n, bw, l })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.n {
            let mut s = b[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.l[i * w + (i - k)] * b[k];
            }
            b[i] = s / self.l[i * w];
        }
        for i in (0..self.n).rev() {
            let mut s = b[i];
            for k in i + 1..(i + w).min(self.n) {
                s -= self.l[k * w + (k - i)] * b[k];
            }
            b[i] = s / self.l[i * w];
        }
    }
}

/// Lowest eigenpairs of the pencil (S, M).
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors as columns
    pub vectors: DMatrix<f64>,
    /// largest relative residual |S x - theta M x|_{M^-1} / (|theta| + shift)
    pub max_residual: f64,
    pub krylov_dim: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub shift: f64,
    pub block: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { shift: 1.0, block: 6, tol: 1e-9, seed: 7 }
    }
}

fn m_orthonormalise(w: &mut DMatrix<f64>, q: &DMatrix<f64>, mq: &DMatrix<f64>, m_diag: &DVector<f64>, filled: usize) -> Vec<usize> {
    // two passes of block Gram-Schmidt against the basis, then MGS inside the block
    for _ in 0..2 {
        if filled > 0 {
            let qv = q.columns(0, filled);
            let mqv = mq.columns(0, filled);
            let c = mqv.tr_mul(w);
            *w -= qv * c;
        }
    }
    let mut keep = Vec::new();
    for j in 0..w.ncols() {
        let orig = w.column(j).component_mul(m_diag).dot(&w.column(j)).sqrt();
        for _ in 0..2 {
            for &k in &keep {
                let a = w.column(k).component_mul(m_diag).dot(&w.column(j));
                let col_k = w.column(k).clone_owned();
                w.column_mut(j).axpy(-a, &col_k, 1.0);
            }
        }
        let nrm = w.column(j).component_mul(m_diag).dot(&w.column(j)).sqrt();
        if nrm > 1e-10 * orig.max(1e-300) && nrm > 0.0 {
            w.column_mut(j).scale_mut(1.0 / nrm);
            keep.push(j);
        }
    }
    keep
}

/// Lowest `k` eigenpairs by block Krylov iteration on (S + shift M)^{-1} M with
/// full reorthogonalisation and Rayleigh-Ritz on S.
pub fn lowest_eigenpairs(s: &BandedSym, m_diag: &[f64], k: usize, opts: &EigenOptions) -> Result<EigenResult> {
    let n = s.len();
    if k == 0 || k > n {
        return Err(Error::Argument(format!("requested {k} eigenpairs of a {n}-dimensional problem")));
    }
    let mut shifted = s.clone();
    for p in 0..n {
        shifted.diag[p] += opts.shift * m_diag[p];
    }
    let chol = BandedCholesky::factor(&shifted)?;
    let md = DVector::from_column_slice(m_diag);
    let p = opts.block.max(1);
    let mut cap = (3 * k + 10 * p).min(n);
    let mut q = DMatrix::<f64>::zeros(n, cap);
    let mut mq = DMatrix::<f64>::zeros(n, cap);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut block = DMatrix::<f64>::from_fn(n, p, |_, _| rng.gen::<f64>() - 0.5);
    let mut filled = 0;
    loop {
        while filled < cap {
            let keep = m_orthonormalise(&mut block, &q, &mq, &md, filled);
            if keep.is_empty() {
                block = DMatrix::<f64>::from_fn(n, p, |_, _| rng.gen::<f64>() - 0.5);
                continue;
            }
            let mut next = DMatrix::<f64>::zeros(n, keep.len());
            for (c, &j) in keep.iter().enumerate() {
                if filled == cap {
                    break;
                }
                let col = block.column(j).clone_owned();
                q.column_mut(filled).copy_from(&col);
                let mcol = col.component_mul(&md);
                mq.column_mut(filled).copy_from(&mcol);
                filled += 1;
                let mut rhs: Vec<f64> = mcol.iter().cloned().collect();
                chol.solve_in_place(&mut rhs);
                next.column_mut(c).copy_from_slice(&rhs);
            }
            block = next;
        }
        let qv = q.columns(0, filled).clone_owned();
        let sq = s.apply_matrix(&qv);
        let mut h = qv.tr_mul(&sq);
        h = 0.5 * (&h + h.transpose());
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..filled).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let sel = DMatrix::from_fn(filled, k, |r, c| eig.eigenvectors[(r, order[c])]);
        let x = &qv * &sel;
        let sx = &sq * &sel;
        let mut worst: f64 = 0.0;
        let values: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
        for c in 0..k {
            let mut r2 = 0.0;
            for row in 0..n {
                let r = sx[(row, c)] - values[c] * m_diag[row] * x[(row, c)];
                r2 += r * r / m_diag[row];
            }
            worst = worst.max(r2.sqrt() / (values[c].abs() + opts.shift));
        }
        if worst <= opts.tol || filled == n {
            return Ok(EigenResult { values, vectors: x, max_residual: worst, krylov_dim: filled });
        }
        if cap >= n {
            return Err(Error::Solver(format!("eigensolver stalled: residual {worst:.3e} with the full space")));
        }
        let new_cap = (cap + cap / 2).min(n);
        q = q.resize_horizontally(new_cap, 0.0);
        mq = mq.resize_horizontally(new_cap, 0.0);
        cap = new_cap;
    }
}
