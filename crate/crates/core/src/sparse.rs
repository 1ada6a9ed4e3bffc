//! Compressed-row matrices and a sparse direct solver for shifted pencils.
//!
//! The solver factors the complex symmetric matrix `zM - K` as `L D L^T`
//! (transpose, not conjugate transpose) without pivoting.  For `Im z != 0`
//! the imaginary part of the shifted matrix is `Im(z) * M`, which is
//! definite, so every leading principal submatrix is nonsingular and the
//! factorization exists.  Columns are ordered by geometric nested dissection
//! computed from the degree-of-freedom coordinates, which keeps fill low on
//! the planar meshes this crate produces.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::{Error, Result};

/// Width of the lane chunks used by blocked matrix-vector products and
/// blocked triangular solves.
const LANE: usize = 8;

/// Real matrix in compressed sparse row form.
///
/// Column indices are strictly increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Assembles a matrix from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(u32, u32, f64)>,
    ) -> Result<Self> {
        for &(r, c, _) in &triplets {
            if r as usize >= nrows || c as usize >= ncols {
                return Err(Error::InvalidArgument(alloc::format!(
                    "triplet ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx: Vec<u32> = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseMatrix { nrows, ncols, row_ptr, col_idx, vals })
    }

    /// Builds an identity-pattern diagonal matrix.
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n as u32).collect(),
            vals: diag.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.vals[a..b])
    }

    /// Entry lookup; zero if not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c as usize];
            }
            y[i] = acc;
        }
    }

    /// `y = A x` with a complex vector.
    pub fn mul_vec_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c as usize];
            }
            y[i] = acc;
        }
    }

    /// `Y = A X` for a row-major block `X` of `width` columns.
    pub fn mul_block(&self, x: &[f64], width: usize, y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols * width);
        assert_eq!(y.len(), self.nrows * width);
        let mut lane0 = 0;
        while lane0 < width {
            let w = LANE.min(width - lane0);
            let mut acc = [0.0f64; LANE];
            for i in 0..self.nrows {
                acc[..w].fill(0.0);
                let (cols, vals) = self.row(i);
                for (&c, &v) in cols.iter().zip(vals) {
                    let xs = &x[c as usize * width + lane0..];
                    for (a, &xv) in acc[..w].iter_mut().zip(&xs[..w]) {
                        *a += v * xv;
                    }
                }
                y[i * width + lane0..i * width + lane0 + w].copy_from_slice(&acc[..w]);
            }
            lane0 += w;
        }
    }

    /// Principal submatrix on the given (strictly increasing) index set.
    pub fn restrict(&self, keep: &[usize]) -> SparseMatrix {
        const ABSENT: u32 = u32::MAX;
        let mut old_to_new = vec![ABSENT; self.ncols.max(self.nrows)];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old] = new as u32;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for &old in keep {
            let (cols, v) = self.row(old);
            for (&c, &x) in cols.iter().zip(v) {
                let nc = old_to_new[c as usize];
                if nc != ABSENT {
                    col_idx.push(nc);
                    vals.push(x);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix { nrows: keep.len(), ncols: keep.len(), row_ptr, col_idx, vals }
    }

    /// Max-norm symmetry defect `max |A - A^T|` together with `max |A|`.
    pub fn symmetry_defect(&self) -> (f64, f64) {
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                scale = scale.max(v.abs());
                defect = defect.max((v - self.get(c as usize, i)).abs());
            }
        }
        (defect, scale)
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out[i * self.ncols + c as usize] = v;
            }
        }
        out
    }

    /// Entries as (row, col, value) triplets in row-major order.
    pub fn triplets(&self) -> Vec<(u32, u32, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out.push((i as u32, c, v));
            }
        }
        out
    }
}

/// Fill-reducing elimination order chosen from dof coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// Identity permutation; adequate for tiny systems and tests.
    Natural,
    /// Geometric nested dissection (recursive coordinate bisection with a
    /// graph-complete separator).
    NestedDissection,
}

/// Computes an elimination order for the symmetric `pattern` using recursive
/// coordinate bisection. Returns `perm` with `perm[new] = old`.
///
/// Cuts snap to coordinate boundaries; among the boundaries nearest the
/// median the one with the smallest vertex separator wins, which on the
/// structured meshes of this crate selects grid lines and keeps separators
/// one dof-column thick.
pub fn nested_dissection(pattern: &SparseMatrix, coords: &[[f64; 2]]) -> Vec<u32> {
    let n = pattern.nrows();
    assert_eq!(coords.len(), n);
    let mut out = Vec::with_capacity(n);
    let mut scratch = DissectScratch { rank: vec![0u32; n], mark: vec![0u32; n], epoch: 0 };
    let nodes: Vec<u32> = (0..n as u32).collect();
    dissect(nodes, pattern, coords, &mut scratch, &mut out);
    debug_assert_eq!(out.len(), n);
    out
}

struct DissectScratch {
    /// Position of each node in the current sorted subset.
    rank: Vec<u32>,
    /// Epoch stamp validating `rank` entries for the current subset.
    mark: Vec<u32>,
    epoch: u32,
}

/// Candidate split boundaries examined around the median.
const SPLIT_CANDIDATES: usize = 9;

fn dissect(
    mut nodes: Vec<u32>,
    pattern: &SparseMatrix,
    coords: &[[f64; 2]],
    scratch: &mut DissectScratch,
    out: &mut Vec<u32>,
) {
    const LEAF: usize = 40;
    if nodes.len() <= LEAF {
        nodes.sort_unstable();
        out.extend_from_slice(&nodes);
        return;
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &v in &nodes {
        for a in 0..2 {
            let x = coords[v as usize][a];
            lo[a] = lo[a].min(x);
            hi[a] = hi[a].max(x);
        }
    }
    let axis = usize::from(hi[1] - lo[1] > hi[0] - lo[0]);
    nodes.sort_unstable_by(|&u, &v| {
        coords[u as usize][axis]
            .total_cmp(&coords[v as usize][axis])
            .then(u.cmp(&v))
    });
    scratch.epoch += 1;
    let tag = scratch.epoch;
    for (i, &v) in nodes.iter().enumerate() {
        scratch.mark[v as usize] = tag;
        scratch.rank[v as usize] = i as u32;
    }

    // Boundaries where the sort coordinate changes, nearest the median first.
    let mid = nodes.len() / 2;
    let mut boundaries: Vec<usize> = Vec::with_capacity(SPLIT_CANDIDATES);
    let coord_at = |i: usize| coords[nodes[i] as usize][axis];
    for offset in 0..nodes.len() {
        for i in [mid.wrapping_sub(offset), mid + offset] {
            if i >= 1 && i < nodes.len() && coord_at(i - 1) < coord_at(i) {
                if !boundaries.contains(&i) {
                    boundaries.push(i);
                }
            }
        }
        if boundaries.len() >= SPLIT_CANDIDATES {
            break;
        }
    }

    if boundaries.is_empty() {
        // Degenerate subset (all coordinates equal): order it outright.
        nodes.sort_unstable();
        out.extend_from_slice(&nodes);
        return;
    }

    // Separator size of a candidate: left nodes with a neighbor in the
    // right part of the current subset.
    let separator_size = |split: usize| -> usize {
        nodes[..split]
            .iter()
            .filter(|&&v| {
                let (cols, _) = pattern.row(v as usize);
                cols.iter().any(|&c| {
                    scratch.mark[c as usize] == tag && scratch.rank[c as usize] as usize >= split
                })
            })
            .count()
    };
    let mut best = boundaries[0];
    let mut best_size = separator_size(best);
    for &cand in &boundaries[1..] {
        let size = separator_size(cand);
        let better = size < best_size
            || (size == best_size
                && mid.abs_diff(cand) < mid.abs_diff(best));
        if better {
            best = cand;
            best_size = size;
        }
    }

    let right = nodes.split_off(best);
    let left = nodes;
    let mut interior = Vec::with_capacity(left.len());
    let mut separator = Vec::with_capacity(best_size);
    for &v in &left {
        let (cols, _) = pattern.row(v as usize);
        let touches_right = cols.iter().any(|&c| {
            scratch.mark[c as usize] == tag && scratch.rank[c as usize] as usize >= best
        });
        if touches_right {
            separator.push(v);
        } else {
            interior.push(v);
        }
    }
    if !interior.is_empty() {
        dissect(interior, pattern, coords, scratch, out);
    }
    dissect(right, pattern, coords, scratch, out);
    separator.sort_unstable();
    out.extend_from_slice(&separator);
}

/// Permuted upper-triangular view of `zM - K` in compressed-column form,
/// ready for the `L D L^T` factorization.
struct ShiftedUpper {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<Complex64>,
    /// Per-column magnitude `|z||M_jj| + |K_jj|` used for pivot screening.
    pivot_scale: Vec<f64>,
}

fn shifted_upper(
    k: &SparseMatrix,
    m: &SparseMatrix,
    z: Complex64,
    perm: &[u32],
    iperm: &[u32],
) -> ShiftedUpper {
    let n = k.nrows();
    let mut col_ptr = vec![0usize; n + 1];
    // Count upper entries per permuted column; the merged pattern of K and M
    // is scanned once per column through the old row perm[j].
    for jnew in 0..n {
        let rold = perm[jnew] as usize;
        let count = merged_row(k, m, rold)
            .filter(|&(c, _, _)| iperm[c as usize] as usize <= jnew)
            .count();
        col_ptr[jnew + 1] = count;
    }
    for j in 0..n {
        col_ptr[j + 1] += col_ptr[j];
    }
    let nnz = col_ptr[n];
    let mut row_idx = vec![0u32; nnz];
    let mut vals = vec![Complex64::new(0.0, 0.0); nnz];
    let mut pivot_scale = vec![0.0f64; n];
    let mut cursor = col_ptr.clone();
    for jnew in 0..n {
        let rold = perm[jnew] as usize;
        for (c, kv, mv) in merged_row(k, m, rold) {
            let inew = iperm[c as usize] as usize;
            if inew <= jnew {
                let p = cursor[jnew];
                row_idx[p] = inew as u32;
                vals[p] = z * mv - kv;
                cursor[jnew] = p + 1;
            }
            if c as usize == rold {
                pivot_scale[jnew] = z.norm() * mv.abs() + kv.abs();
            }
        }
    }
    ShiftedUpper { n, col_ptr, row_idx, vals, pivot_scale }
}

/// Merges row `i` of two matrices with a common shape into
/// `(col, k_val, m_val)` items ordered by column.
fn merged_row<'a>(
    k: &'a SparseMatrix,
    m: &'a SparseMatrix,
    i: usize,
) -> impl Iterator<Item = (u32, f64, f64)> + 'a {
    let (kc, kv) = k.row(i);
    let (mc, mv) = m.row(i);
    MergedRow { kc, kv, mc, mv, a: 0, b: 0 }
}

struct MergedRow<'a> {
    kc: &'a [u32],
    kv: &'a [f64],
    mc: &'a [u32],
    mv: &'a [f64],
    a: usize,
    b: usize,
}

impl Iterator for MergedRow<'_> {
    type Item = (u32, f64, f64);

    fn next(&mut self) -> Option<(u32, f64, f64)> {
        match (self.kc.get(self.a), self.mc.get(self.b)) {
            (Some(&ck), Some(&cm)) => {
                if ck == cm {
                    let out = (ck, self.kv[self.a], self.mv[self.b]);
                    self.a += 1;
                    self.b += 1;
                    Some(out)
                } else if ck < cm {
                    self.a += 1;
                    Some((ck, self.kv[self.a - 1], 0.0))
                } else {
                    self.b += 1;
                    Some((cm, 0.0, self.mv[self.b - 1]))
                }
            }
            (Some(&ck), None) => {
                self.a += 1;
                Some((ck, self.kv[self.a - 1], 0.0))
            }
            (None, Some(&cm)) => {
                self.b += 1;
                Some((cm, 0.0, self.mv[self.b - 1]))
            }
            (None, None) => None,
        }
    }
}

const NONE: u32 = u32::MAX;

/// `L D L^T` factorization of a permuted complex symmetric matrix.
///
/// Up-looking row factorization over the elimination tree; the pattern walk
/// follows the classic LDL scheme of sparse Cholesky codes.
pub struct ShiftedFactor {
    n: usize,
    perm: Vec<u32>,
    lp: Vec<usize>,
    li: Vec<u32>,
    lx: Vec<Complex64>,
    d_inv: Vec<Complex64>,
}

impl ShiftedFactor {
    /// Factors `zM - K` with the given ordering. `k` and `m` must be square,
    /// symmetric, and of equal shape.
    pub fn new(
        k: &SparseMatrix,
        m: &SparseMatrix,
        z: Complex64,
        ordering: Ordering,
        coords: Option<&[[f64; 2]]>,
    ) -> Result<Self> {
        let n = k.nrows();
        if k.ncols() != n || m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
        }
        let perm: Vec<u32> = match (ordering, coords) {
            (Ordering::NestedDissection, Some(c)) => nested_dissection(k, c),
            _ => (0..n as u32).collect(),
        };
        let mut iperm = vec![0u32; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old as usize] = new as u32;
        }
        let upper = shifted_upper(k, m, z, &perm, &iperm);
        Self::factor(upper, perm)
    }

    fn factor(upper: ShiftedUpper, perm: Vec<u32>) -> Result<Self> {
        let n = upper.n;
        // Symbolic pass: elimination tree and column counts.
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for kk in 0..n {
            flag[kk] = kk as u32;
            for p in upper.col_ptr[kk]..upper.col_ptr[kk + 1] {
                let mut i = upper.row_idx[p] as usize;
                while i < kk && flag[i] != kk as u32 {
                    if parent[i] == NONE {
                        parent[i] = kk as u32;
                    }
                    lnz[i] += 1;
                    flag[i] = kk as u32;
                    i = parent[i] as usize;
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for i in 0..n {
            lp[i + 1] = lp[i] + lnz[i];
        }

        // Numeric pass: one sparse triangular solve per row.
        let zero = Complex64::new(0.0, 0.0);
        let mut li = vec![0u32; lp[n]];
        let mut lx = vec![zero; lp[n]];
        let mut d_inv = vec![zero; n];
        let mut y = vec![zero; n];
        let mut pattern = vec![0u32; n];
        let mut filled = vec![0usize; n];
        flag.fill(NONE);
        for kk in 0..n {
            let mut top = n;
            flag[kk] = kk as u32;
            let mut dk = zero;
            for p in upper.col_ptr[kk]..upper.col_ptr[kk + 1] {
                let i0 = upper.row_idx[p] as usize;
                if i0 == kk {
                    dk += upper.vals[p];
                    continue;
                }
                y[i0] += upper.vals[p];
                let mut len = 0usize;
                let mut i = i0;
                while flag[i] != kk as u32 {
                    pattern[len] = i as u32;
                    len += 1;
                    flag[i] = kk as u32;
                    i = parent[i] as usize;
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    pattern[top] = pattern[len];
                }
            }
            for t in top..n {
                let i = pattern[t] as usize;
                let yi = y[i];
                y[i] = zero;
                let (ls, cnt) = (lp[i], filled[i]);
                for q in ls..ls + cnt {
                    y[li[q] as usize] -= lx[q] * yi;
                }
                let l_ki = yi * d_inv[i];
                dk -= l_ki * yi;
                li[ls + cnt] = kk as u32;
                lx[ls + cnt] = l_ki;
                filled[i] = cnt + 1;
            }
            let scale = upper.pivot_scale[kk];
            if !(dk.re.is_finite() && dk.im.is_finite()) || dk.norm_sqr() <= (1e-12 * scale).powi(2)
            {
                return Err(Error::SingularShift { pivot_index: kk });
            }
            d_inv[kk] = 1.0 / dk;
        }
        Ok(ShiftedFactor { n, perm, lp, li, lx, d_inv })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` (unit diagonal omitted).
    pub fn fill_in(&self) -> usize {
        self.lp[self.n]
    }

    /// Solves `(zM - K) X = B` in place; `b` is row-major `n x width`.
    pub fn solve_block_complex(&self, b: &mut [Complex64], width: usize) {
        assert_eq!(b.len(), self.n * width);
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        let mut x = vec![zero; n * width];
        let mut lane0 = 0;
        while lane0 < width {
            let w = LANE.min(width - lane0);
            for i in 0..n {
                let src = self.perm[i] as usize * width + lane0;
                x[i * w..(i + 1) * w].copy_from_slice(&b[src..src + w]);
            }
            let mut buf = [zero; LANE];
            // Forward substitution with unit lower L, stored by columns.
            for j in 0..n {
                buf[..w].copy_from_slice(&x[j * w..(j + 1) * w]);
                for q in self.lp[j]..self.lp[j + 1] {
                    let i = self.li[q] as usize;
                    let l = self.lx[q];
                    let xi = &mut x[i * w..(i + 1) * w];
                    for (t, b) in xi.iter_mut().zip(&buf[..w]) {
                        *t -= l * b;
                    }
                }
                let d = self.d_inv[j];
                for t in &mut x[j * w..(j + 1) * w] {
                    *t *= d;
                }
            }
            // Backward substitution with L^T.
            for j in (0..n).rev() {
                buf[..w].copy_from_slice(&x[j * w..(j + 1) * w]);
                for q in self.lp[j]..self.lp[j + 1] {
                    let i = self.li[q] as usize;
                    let l = self.lx[q];
                    let xi = &x[i * w..(i + 1) * w];
                    for (b, t) in buf[..w].iter_mut().zip(xi) {
                        *b -= l * t;
                    }
                }
                x[j * w..(j + 1) * w].copy_from_slice(&buf[..w]);
            }
            for i in 0..n {
                let dst = self.perm[i] as usize * width + lane0;
                b[dst..dst + w].copy_from_slice(&x[i * w..(i + 1) * w]);
            }
            lane0 += w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn laplace_1d(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i as u32, i as u32, 2.0));
            if i + 1 < n {
                t.push((i as u32, i as u32 + 1, -1.0));
                t.push((i as u32 + 1, i as u32, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, t).unwrap()
    }

    #[test]
    fn triplets_merge_and_sort() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![(1, 1, 4.0), (0, 0, 1.0), (1, 1, 1.0), (0, 1, 2.0)],
        )
        .unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 1), 5.0);
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(1, 0), 0.0);
        let (cols, _) = a.row(0);
        assert!(cols.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn triplet_out_of_range_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn restrict_takes_principal_submatrix() {
        let a = laplace_1d(4);
        let b = a.restrict(&[1, 2]);
        assert_eq!(b.nrows(), 2);
        assert_eq!(b.get(0, 0), 2.0);
        assert_eq!(b.get(0, 1), -1.0);
        assert_eq!(b.get(1, 0), -1.0);
    }

    #[test]
    fn blocked_product_matches_single_vectors() {
        let a = laplace_1d(9);
        let width = 11; // exercises the lane chunking
        let x: Vec<f64> = (0..9 * width).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = vec![0.0; 9 * width];
        a.mul_block(&x, width, &mut y);
        for lane in 0..width {
            let xi: Vec<f64> = (0..9).map(|i| x[i * width + lane]).collect();
            let mut yi = vec![0.0; 9];
            a.mul_vec(&xi, &mut yi);
            for i in 0..9 {
                assert!((y[i * width + lane] - yi[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn shifted_factor_solves_complex_system() {
        let n = 40;
        let k = laplace_1d(n);
        let m = SparseMatrix::diagonal(&vec![1.0; n]);
        let z = Complex64::new(0.7, 0.9);
        let f = ShiftedFactor::new(&k, &m, z, Ordering::Natural, None).unwrap();
        let b: Vec<Complex64> =
            (0..n).map(|i| Complex64::new((i as f64).cos(), 0.25 * i as f64)).collect();
        let mut x = b.clone();
        f.solve_block_complex(&mut x, 1);
        // residual b - (zM - K)x
        let mut kx = vec![Complex64::new(0.0, 0.0); n];
        k.mul_vec_complex(&x, &mut kx);
        let mut mx = vec![Complex64::new(0.0, 0.0); n];
        m.mul_vec_complex(&x, &mut mx);
        let res: f64 = (0..n)
            .map(|i| (b[i] - (z * mx[i] - kx[i])).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-12 * scale, "residual {res}");
    }

    #[test]
    fn nested_dissection_is_a_permutation() {
        let n = 300;
        let k = laplace_1d(n);
        let coords: Vec<[f64; 2]> = (0..n).map(|i| [i as f64, 0.0]).collect();
        let perm = nested_dissection(&k, &coords);
        let mut seen = vec![false; n];
        for &p in &perm {
            assert!(!seen[p as usize]);
            seen[p as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn singular_shift_is_detected() {
        // 1x1 pencil: K = [2], M = [1]; z equal to the eigenvalue 2 is singular.
        let k = SparseMatrix::from_triplets(1, 1, vec![(0, 0, 2.0)]).unwrap();
        let m = SparseMatrix::diagonal(&[1.0]);
        let err = ShiftedFactor::new(&k, &m, Complex64::new(2.0, 0.0), Ordering::Natural, None);
        assert!(matches!(err, Err(Error::SingularShift { .. })));
    }
}
