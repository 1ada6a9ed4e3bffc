//! Dense small-scale kernels.
//!
//! Everything here targets the small matrices produced by Rayleigh–Ritz
//! steps (a handful of columns), plus a dense brute-force decomposition of
//! the full pencil that serves as the independent oracle in tests.  The
//! eigensolver is a Cholesky reduction to standard form followed by cyclic
//! Jacobi sweeps; orthonormalization is modified Gram–Schmidt with one
//! reorthogonalization pass in the supplied inner product.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::sparse::SparseMatrix;
use crate::{Error, Result};

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.set(i, i, 1.0);
        }
        a
    }

    /// Wraps row-major data.
    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch { expected: nrows * ncols, got: data.len() });
        }
        Ok(DenseMatrix { nrows, ncols, data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        assert_eq!(v.len(), self.nrows);
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    /// Keeps the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.nrows, cols.len());
        for (newj, &j) in cols.iter().enumerate() {
            for i in 0..self.nrows {
                out.set(i, newj, self.get(i, j));
            }
        }
        out
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out.data[i * other.ncols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `self^T * other`.
    pub fn transpose_matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.nrows, other.nrows);
        let mut out = DenseMatrix::zeros(self.ncols, other.ncols);
        for k in 0..self.nrows {
            for i in 0..self.ncols {
                let a = self.get(k, i);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out.data[i * other.ncols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Max-norm of the skew part relative to the max-norm of the matrix.
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                scale = scale.max(self.get(i, j).abs());
                if j < self.nrows && i < self.ncols {
                    defect = defect.max((self.get(i, j) - self.get(j, i)).abs());
                }
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }
}

/// Validates that a matrix is square and symmetric to the stated tolerance.
fn require_symmetric(a: &DenseMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    if a.symmetry_defect() > 1e-12 {
        return Err(Error::InvalidArgument(alloc::format!(
            "matrix is not symmetric (relative defect {:e})",
            a.symmetry_defect()
        )));
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in ascending order and the orthonormal eigenvector
/// matrix with matching columns.
pub fn jacobi_eigh(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    require_symmetric(a)?;
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DenseMatrix::identity(n);
    let fro: f64 = a.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    if fro == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let tol = 1e-15 * fro;
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a.get(p, q).powi(2);
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-3 * tol {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- J^T A J with the rotation in the (p, q) plane.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = v.select_cols(&order);
    Ok((values, vectors))
}

/// Dense Cholesky factor `L` with `B = L L^T`.
fn cholesky(b: &DenseMatrix) -> Result<DenseMatrix> {
    require_symmetric(b)?;
    let n = b.nrows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = b.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::NotDefinite);
                }
                l.set(i, i, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`, column by column in place.
fn forward_solve_cols(l: &DenseMatrix, x: &mut DenseMatrix) {
    let n = l.nrows();
    for j in 0..x.ncols() {
        for i in 0..n {
            let mut sum = x.get(i, j);
            for k in 0..i {
                sum -= l.get(i, k) * x.get(k, j);
            }
            x.set(i, j, sum / l.get(i, i));
        }
    }
}

/// Solves `L^T x = b` in place.
fn backward_solve_cols(l: &DenseMatrix, x: &mut DenseMatrix) {
    let n = l.nrows();
    for j in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut sum = x.get(i, j);
            for k in (i + 1)..n {
                sum -= l.get(k, i) * x.get(k, j);
            }
            x.set(i, j, sum / l.get(i, i));
        }
    }
}

/// Symmetric-definite generalized eigenproblem `A v = lambda B v`.
///
/// `A` must be symmetric and `B` symmetric positive definite.  Returns
/// ascending eigenvalues and `B`-orthonormal eigenvector columns.
pub fn dense_sym_gevp(a: &DenseMatrix, b: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    require_symmetric(a)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
    }
    let l = cholesky(b)?;
    // C = L^{-1} A L^{-T}, assembled by two triangular solves.
    let mut c = a.clone();
    forward_solve_cols(&l, &mut c); // L^{-1} A
    let mut ct = c.transpose();
    forward_solve_cols(&l, &mut ct); // L^{-1} (L^{-1} A)^T
    // Symmetrize to scrub the rounding skew before Jacobi.
    let n = a.nrows();
    let mut sym = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            sym.set(i, j, 0.5 * (ct.get(i, j) + ct.get(j, i)));
        }
    }
    let (values, z) = jacobi_eigh(&sym)?;
    let mut vectors = z;
    backward_solve_cols(&l, &mut vectors); // V = L^{-T} Z
    Ok((values, vectors))
}

/// Dense brute-force decomposition of a sparse symmetric-definite pencil.
///
/// The independent oracle for the filtered iteration: densifies `(K, M)` and
/// returns the full ascending generalized spectrum.
pub fn dense_pencil_bruteforce(
    k: &SparseMatrix,
    m: &SparseMatrix,
    cap: usize,
) -> Result<Vec<f64>> {
    let n = k.nrows();
    if n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    if m.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
    }
    let ka = DenseMatrix::from_row_major(n, n, k.to_dense())?;
    let ma = DenseMatrix::from_row_major(n, n, m.to_dense())?;
    let (values, _) = dense_sym_gevp(&ka, &ma)?;
    Ok(values)
}

/// Which input columns survived orthonormalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
}

/// Orthonormalizes the columns of `basis` in the `m_mat` inner product.
///
/// Modified Gram–Schmidt with one reorthogonalization pass.  Columns whose
/// projected norm falls below `1e-12` times the largest input column norm
/// are dropped, so the output may have fewer columns than the input.
pub fn m_orthonormalize(
    basis: &DenseMatrix,
    m_mat: &SparseMatrix,
) -> Result<(DenseMatrix, RankReport)> {
    let n = basis.nrows();
    let m = basis.ncols();
    if m == 0 || n != m_mat.nrows() {
        return Err(Error::DimensionMismatch { expected: m_mat.nrows(), got: n });
    }
    // Input column norms set the rank-drop scale.
    let mut mb = vec![0.0; n * m];
    m_mat.mul_block(basis.data(), m, &mut mb);
    let mut max_norm = 0.0f64;
    for j in 0..m {
        let mut sq = 0.0;
        for i in 0..n {
            sq += basis.get(i, j) * mb[i * m + j];
        }
        max_norm = max_norm.max(sq.max(0.0).sqrt());
    }
    let drop_tol = 1e-12 * max_norm;

    let mut q_cols: Vec<Vec<f64>> = Vec::new();
    let mut mq_cols: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut mv = vec![0.0; n];
    for j in 0..m {
        let mut v = basis.col(j);
        for _pass in 0..2 {
            for (q, mq) in q_cols.iter().zip(&mq_cols) {
                let coef: f64 = mq.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= coef * qi;
                }
            }
        }
        m_mat.mul_vec(&v, &mut mv);
        let sq: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        let norm = sq.max(0.0).sqrt();
        if norm <= drop_tol {
            dropped.push(j);
            continue;
        }
        let inv = 1.0 / norm;
        for x in &mut v {
            *x *= inv;
        }
        mq_cols.push(mv.iter().map(|x| x * inv).collect());
        q_cols.push(v);
        kept.push(j);
    }
    if q_cols.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let mut out = DenseMatrix::zeros(n, q_cols.len());
    for (j, q) in q_cols.iter().enumerate() {
        out.set_col(j, q);
    }
    Ok((out, RankReport { kept, dropped }))
}

/// Largest directed gap between two subspaces from their cross-Gram matrix.
///
/// `cross_gram = Ya^T G Yb` for bases orthonormal in the `G` inner product.
/// Each directed gap is `sqrt(1 - sigma_min^2)` of the relevant cross-Gram
/// block; when the dimensions agree this is the sine of the largest
/// principal angle.
pub fn principal_gap(cross_gram: &DenseMatrix, dims_equal: bool) -> Result<f64> {
    let a = cross_gram.nrows();
    let b = cross_gram.ncols();
    if a == 0 || b == 0 {
        return Err(Error::EmptyInput);
    }
    let gap_from = |g: &DenseMatrix| -> Result<f64> {
        // Directed gap from the row space: smallest singular value of the
        // d x d Gram product, zero automatically when rank-deficient.
        let gg = g.matmul(&g.transpose());
        let (vals, _) = jacobi_eigh(&gg)?;
        let smin_sq = vals[0];
        let smax_sq = vals[vals.len() - 1];
        let eps = 1e-10;
        if !(-eps..=1.0 + eps).contains(&smin_sq) || smax_sq > 1.0 + eps {
            return Err(Error::NotOrthonormal {
                singular_value_sq: if smax_sq > 1.0 + eps { smax_sq } else { smin_sq },
            });
        }
        Ok((1.0 - smin_sq.clamp(0.0, 1.0)).max(0.0).sqrt())
    };
    let d1 = gap_from(cross_gram)?;
    if dims_equal && a == b {
        return Ok(d1);
    }
    let d2 = gap_from(&cross_gram.transpose())?;
    Ok(d1.max(d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseMatrix;
    use alloc::vec;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    #[test]
    fn gevp_diagonal_case() {
        let a = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 2.0]).unwrap();
        let b = DenseMatrix::identity(2);
        let (vals, _) = dense_sym_gevp(&a, &b).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gevp_two_by_two() {
        // Characteristic roots of [[2,1],[1,2]] are 1 and 3.
        let a = DenseMatrix::from_row_major(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let b = DenseMatrix::identity(2);
        let (vals, vecs) = dense_sym_gevp(&a, &b).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        // residual A v = lambda B v
        for j in 0..2 {
            for i in 0..2 {
                let av: f64 = (0..2).map(|k| a.get(i, k) * vecs.get(k, j)).sum();
                assert!((av - vals[j] * vecs.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gevp_identity_pencil() {
        // a = b (any SPD) -> all unit eigenvalues.
        let b = DenseMatrix::from_row_major(3, 3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0])
            .unwrap();
        let (vals, vecs) = dense_sym_gevp(&b, &b).unwrap();
        for v in vals {
            assert!((v - 1.0).abs() < 1e-12);
        }
        // V^T B V = I
        let bv = b.matmul(&vecs);
        let g = vecs.transpose_matmul(&bv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.get(i, j) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gevp_rejects_indefinite_b() {
        let a = DenseMatrix::identity(2);
        let b = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(matches!(dense_sym_gevp(&a, &b), Err(Error::NotDefinite)));
    }

    #[test]
    fn gevp_congruence_invariance() {
        // Eigenvalues are invariant under (a,b) -> (C^T a C, C^T b C).
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _case in 0..25 {
            let n = 4;
            let mut s = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let x = uniform(&mut rng);
                    s.set(i, j, x);
                    s.set(j, i, x);
                }
            }
            let mut b = DenseMatrix::identity(n);
            for i in 0..n {
                for j in 0..n {
                    // diagonally dominant SPD
                    b.set(i, j, b.get(i, j) * (n as f64 + 1.0) + 0.3 * uniform(&mut rng).abs());
                }
            }
            let bsym = {
                let mut t = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        t.set(i, j, 0.5 * (b.get(i, j) + b.get(j, i)));
                    }
                }
                t
            };
            let mut c = DenseMatrix::identity(n);
            for i in 0..n {
                for j in 0..n {
                    c.set(i, j, c.get(i, j) + 0.2 * uniform(&mut rng));
                }
            }
            let (v1, _) = dense_sym_gevp(&s, &bsym).unwrap();
            let sc = c.transpose_matmul(&s.matmul(&c));
            let bc = c.transpose_matmul(&bsym.matmul(&c));
            let bcs = {
                let mut t = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        t.set(i, j, 0.5 * (bc.get(i, j) + bc.get(j, i)));
                    }
                }
                t
            };
            let scs = {
                let mut t = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        t.set(i, j, 0.5 * (sc.get(i, j) + sc.get(j, i)));
                    }
                }
                t
            };
            let (v2, _) = dense_sym_gevp(&scs, &bcs).unwrap();
            for (x, y) in v1.iter().zip(&v2) {
                assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn orthonormalize_drops_duplicate_columns() {
        let m = SparseMatrix::diagonal(&[1.0, 1.0, 1.0]);
        let basis =
            DenseMatrix::from_row_major(3, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]).unwrap();
        let (q, report) = m_orthonormalize(&basis, &m).unwrap();
        assert_eq!(q.ncols(), 1);
        assert_eq!(report.kept, vec![0]);
        assert_eq!(report.dropped, vec![1]);
    }

    #[test]
    fn orthonormalize_is_idempotent_up_to_sign() {
        let m = SparseMatrix::diagonal(&[2.0, 1.0, 0.5]);
        let basis =
            DenseMatrix::from_row_major(3, 2, vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let (q1, _) = m_orthonormalize(&basis, &m).unwrap();
        let (q2, r2) = m_orthonormalize(&q1, &m).unwrap();
        assert_eq!(r2.kept.len(), 2);
        for j in 0..2 {
            let dot: f64 = (0..3).map(|i| q1.get(i, j) * q2.get(i, j)).sum();
            assert!(dot.abs() > 0.0);
            for i in 0..3 {
                assert!((q2.get(i, j) - q1.get(i, j) * dot.signum()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormalize_gram_residual_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _case in 0..20 {
            let n = 30;
            let m = 5;
            let diag: Vec<f64> = (0..n).map(|_| 0.5 + uniform(&mut rng).abs()).collect();
            let mmat = SparseMatrix::diagonal(&diag);
            let mut b = DenseMatrix::zeros(n, m);
            for i in 0..n {
                for j in 0..m {
                    b.set(i, j, uniform(&mut rng));
                }
            }
            let (q, report) = m_orthonormalize(&b, &mmat).unwrap();
            assert_eq!(report.kept.len(), m);
            let mut mq = vec![0.0; n * m];
            mmat.mul_block(q.data(), m, &mut mq);
            for j in 0..m {
                for l in 0..m {
                    let g: f64 = (0..n).map(|i| q.get(i, j) * mq[i * m + l]).sum();
                    let want = if j == l { 1.0 } else { 0.0 };
                    assert!((g - want).abs() <= 1e-10, "gram defect {}", g - want);
                }
            }
        }
    }

    #[test]
    fn all_degenerate_columns_error() {
        let m = SparseMatrix::diagonal(&[1.0, 1.0]);
        let basis = DenseMatrix::zeros(2, 2);
        assert!(matches!(m_orthonormalize(&basis, &m), Err(Error::EmptyBasis)));
    }

    #[test]
    fn principal_gap_examples() {
        let id = DenseMatrix::identity(3);
        assert!(principal_gap(&id, true).unwrap() < 1e-15);
        let zero = DenseMatrix::from_row_major(1, 1, vec![0.0]).unwrap();
        assert!((principal_gap(&zero, true).unwrap() - 1.0).abs() < 1e-15);
        let half = DenseMatrix::from_row_major(1, 1, vec![core::f64::consts::FRAC_1_SQRT_2])
            .unwrap();
        let g = principal_gap(&half, true).unwrap();
        assert!((g - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn principal_gap_rejects_bad_gram() {
        let bad = DenseMatrix::from_row_major(1, 1, vec![1.5]).unwrap();
        assert!(matches!(principal_gap(&bad, true), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn bruteforce_respects_cap_and_counts() {
        let k = SparseMatrix::from_triplets(
            3,
            3,
            vec![
                (0, 0, 2.0),
                (1, 1, 2.0),
                (2, 2, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
            ],
        )
        .unwrap();
        let m = SparseMatrix::diagonal(&[1.0, 1.0, 1.0]);
        assert!(matches!(
            dense_pencil_bruteforce(&k, &m, 2),
            Err(Error::OracleCapExceeded { .. })
        ));
        let vals = dense_pencil_bruteforce(&k, &m, 10).unwrap();
        assert_eq!(vals.len(), 3);
        assert!(vals.iter().all(|&v| v > 0.0));
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        // 1D Laplacian eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2)
        assert!((vals[0] - (2.0 - core::f64::consts::SQRT_2)).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - (2.0 + core::f64::consts::SQRT_2)).abs() < 1e-12);
    }
}
