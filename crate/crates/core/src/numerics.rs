//! Dense complex linear algebra shared by every module.
//!
//! Matrices are `nalgebra` dense matrices over `Complex64`. Operator norms of
//! large truncations use a Lanczos iteration on the Gram matrix with full
//! reorthogonalization; small or non-converging cases fall back to the dense
//! Hermitian eigensolver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Hermitian deviation tolerated by [`hermitian_eigs`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Below this Gram dimension the dense eigensolver is used directly.
const DENSE_CUTOFF: usize = 64;
const MAX_KRYLOV: usize = 320;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn ensure_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `max |M - M*|` entrywise; infinite for non-square input.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    hermitian_deviation(m) <= tol
}

/// Kronecker product `a ⊗ b` (row index of `a` is the slow index).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Block-diagonal matrix from square blocks.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Anticommutator norm `‖ab + ba‖` measured entrywise.
pub fn anticommutator_max(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a * b + b * a))
}

pub fn commutator_max(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a * b - b * a))
}

/// Largest singular value.
///
/// Uses the dense Hermitian eigensolver on the Gram matrix for small
/// dimensions and a reorthogonalized Lanczos iteration otherwise, stopping
/// when the Ritz residual drops below `tol` times the Ritz value. The start
/// vector is drawn from a ChaCha stream seeded with `seed`, so identical
/// inputs give bit-identical outputs.
pub fn spectral_norm(m: &CMat, tol: f64, seed: u64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("spectral tolerance must be positive, got {tol}")));
    }
    ensure_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    if max_abs(m) == 0.0 {
        return Ok(0.0);
    }
    let n = m.nrows().min(m.ncols());
    if n <= DENSE_CUTOFF {
        return Ok(dense_norm(m));
    }
    match lanczos_gram_top(m, tol, seed) {
        Some(v) => Ok(v),
        None => Ok(dense_norm(m)),
    }
}

fn dense_norm(m: &CMat) -> f64 {
    if is_hermitian(m, 0.0) {
        let eigs = m.clone().symmetric_eigenvalues();
        return eigs.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    }
    let gram = if m.nrows() < m.ncols() { m * m.adjoint() } else { m.ad_mul(m) };
    let eigs = hermitianize(gram).symmetric_eigenvalues();
    eigs.max().max(0.0).sqrt()
}

fn hermitianize(m: CMat) -> CMat {
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

/// Top eigenvalue of `M* M` via Lanczos; returns `sqrt` of it or `None` on
/// non-convergence.
fn lanczos_gram_top(m: &CMat, tol: f64, seed: u64) -> Option<f64> {
    let (rows, cols) = m.shape();
    let wide = rows < cols;
    let n = rows.min(cols);
    let apply = |v: &CVec| -> CVec {
        if wide {
            m * m.ad_mul(v)
        } else {
            m.ad_mul(&(m * v))
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CVec::from_fn(n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let nv = v.norm();
    v.unscale_mut(nv);

    let kmax = n.min(MAX_KRYLOV);
    let mut basis: Vec<CVec> = Vec::with_capacity(kmax);
    let mut alpha: Vec<f64> = Vec::with_capacity(kmax);
    let mut beta: Vec<f64> = Vec::with_capacity(kmax);

    for k in 0..kmax {
        let mut w = apply(&v);
        let a = v.dotc(&w).re;
        w.axpy(c64(-a, 0.0), &v, c64(1.0, 0.0));
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            w.axpy(c64(-b, 0.0), prev, c64(1.0, 0.0));
        }
        basis.push(v.clone());
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&w);
                w.axpy(-proj, q, c64(1.0, 0.0));
            }
        }
        alpha.push(a);
        let b = w.norm();

        let size = k + 1;
        let check = size >= 8 && (size % 4 == 0 || size == kmax) || b == 0.0;
        if check || size == n {
            let t = tridiagonal(&alpha, &beta);
            let eig = t.symmetric_eigen();
            let (idx, theta) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
            let residual = b * eig.eigenvectors[(size - 1, idx)].abs();
            let scale = theta.abs().max(f64::MIN_POSITIVE);
            if residual <= tol * scale || size == n || b <= 1e-14 * scale {
                return Some(theta.max(0.0).sqrt());
            }
        }
        if b == 0.0 {
            break;
        }
        beta.push(b);
        v = w.unscale(b);
    }
    None
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigs(m: &CMat, tol: f64) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    if !m.is_square() {
        return Err(Error::NotHermitian(f64::INFINITY));
    }
    let dev = hermitian_deviation(m);
    let bound = tol.max(HERMITIAN_TOL) * max_abs(m).max(1.0);
    if dev > bound {
        return Err(Error::NotHermitian(dev));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut eigs: Vec<f64> = hermitianize(m.clone()).symmetric_eigenvalues().iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Smallest singular value of a square matrix.
pub fn sigma_min(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the top singular space: the largest singular value
/// and all pairs `(u, v)` whose singular value is within `rel_gap` of it.
pub fn top_singular_pairs(m: &CMat, rel_gap: f64) -> (f64, Vec<(CVec, CVec)>) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (0.0, Vec::new());
    }
    if m.nrows() < m.ncols() {
        let (top, pairs) = top_singular_pairs(&m.adjoint(), rel_gap);
        return (top, pairs.into_iter().map(|(u, v)| (v, u)).collect());
    }
    // Right singular vectors are eigenvectors of M* M; u = M v / σ.
    let eig = hermitianize(m.ad_mul(m)).symmetric_eigen();
    let top2 = eig.eigenvalues.max();
    if !(top2 > 0.0) {
        return (0.0, Vec::new());
    }
    let top = top2.sqrt();
    let floor = (top * (1.0 - rel_gap)).powi(2);
    let pairs = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= floor)
        .map(|(i, _)| {
            let v = eig.eigenvectors.column(i).into_owned();
            let mv = m * &v;
            let n = mv.norm();
            (mv.unscale(n), v)
        })
        .collect();
    (top, pairs)
}

/// Rank of a real matrix given by its columns, relative threshold `rel_tol`.
pub fn real_rank(columns: &[Vec<f64>], rel_tol: f64) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    if rows == 0 {
        return 0;
    }
    let mat = DMatrix::<f64>::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    let sv = mat.singular_values();
    let top = sv.iter().copied().fold(0.0_f64, f64::max);
    let thresh = rel_tol * top.max(1.0);
    sv.iter().filter(|&&s| s > thresh).count()
}

/// Complex dimension of the span of a family of equally shaped matrices.
pub fn span_rank(mats: &[CMat], rel_tol: f64) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let len = mats[0].len();
    let stacked = CMat::from_fn(len, mats.len(), |i, j| mats[j][i]);
    let sv = singular_values(&stacked);
    let top = sv.first().copied().unwrap_or(0.0);
    let thresh = rel_tol * top.max(1.0);
    sv.iter().filter(|&&s| s > thresh).count()
}

/// Whether `x` lies in the complex span of `basis` (rank test).
pub fn in_span(basis: &[CMat], x: &CMat, rel_tol: f64) -> bool {
    let r = span_rank(basis, rel_tol);
    let mut ext = basis.to_vec();
    ext.push(x.clone());
    span_rank(&ext, rel_tol) == r
}

/// Haar-ish random unitary from the QR factor of a complex Gaussian-like matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    g.qr().q()
}

pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}
