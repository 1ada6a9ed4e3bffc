//! Lagrange finite elements on triangles and the discrete resolvent.
//!
//! Degree 1–3 spaces with Dirichlet elimination, exact (for affine elements)
//! assembly of stiffness and mass, sparse complex-shifted factorizations of
//! `zM - K`, and the application of the rational filter
//! `S_N^h = w_N + sum_k w_k R_h(z_k)` to a block of coefficient vectors.
//! Conjugate symmetry of the quadrature nodes is exploited so only the
//! upper-half-plane nodes are ever factored.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::filter::RationalFilter;
use crate::linalg::DenseMatrix;
use crate::mesh::Mesh;
use crate::sparse::{Ordering, ShiftedFactor, SparseMatrix};
use crate::{Error, Result};

const FREE_NONE: u32 = u32::MAX;

/// Classification of a degree of freedom by the mesh entity carrying it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Vertex { vertex: u32 },
    Edge { edge: u32, slot: u8 },
    Interior { triangle: u32, slot: u8 },
}

/// Degree-`p` Lagrange finite element space with Dirichlet dofs eliminated.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Mesh,
    degree: usize,
    dof_coords: Vec<[f64; 2]>,
    dof_kind: Vec<DofKind>,
    elem_dofs: Vec<u32>,
    free_dofs: Vec<usize>,
    dof_to_free: Vec<u32>,
    is_boundary: Vec<bool>,
    n_edges: usize,
}

impl FeSpace {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    pub fn dof_kind(&self) -> &[DofKind] {
        &self.dof_kind
    }

    /// Ordered list of non-Dirichlet dof indices.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn is_boundary_dof(&self, dof: usize) -> bool {
        self.is_boundary[dof]
    }

    pub fn free_index(&self, dof: usize) -> Option<usize> {
        let f = self.dof_to_free[dof];
        (f != FREE_NONE).then_some(f as usize)
    }

    /// Global dofs of element `t`, in local shape-function order.
    pub fn element_dofs(&self, t: usize) -> &[u32] {
        let n = shape_count(self.degree);
        &self.elem_dofs[t * n..(t + 1) * n]
    }

    /// Coordinates of the free dofs (used for fill-reducing orderings).
    pub fn free_coords(&self) -> Vec<[f64; 2]> {
        self.free_dofs.iter().map(|&d| self.dof_coords[d]).collect()
    }

    /// Principal submatrix of a full-dof matrix on the free dofs.
    pub fn restrict_to_free(&self, a: &SparseMatrix) -> Result<SparseMatrix> {
        if a.nrows() != self.n_dofs() {
            return Err(Error::DimensionMismatch { expected: self.n_dofs(), got: a.nrows() });
        }
        Ok(a.restrict(&self.free_dofs))
    }

    /// Nodal interpolant of a scalar function, as a free-dof coefficient
    /// vector.  Boundary values are discarded (the target space is V_h with
    /// zero trace).
    pub fn interpolate_free(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.free_dofs.iter().map(|&d| f(self.dof_coords[d][0], self.dof_coords[d][1])).collect()
    }
}

/// Builds the degree-`p` space over `mesh` (`p` in 1..=3).
///
/// Dofs are enumerated vertices first, then `p-1` nodes per edge (ordered
/// along the edge from its lower-numbered vertex), then interior nodes.
/// A dof is Dirichlet exactly when its nodal point lies on the boundary.
pub fn build_space(mesh: Mesh, degree: usize) -> Result<FeSpace> {
    if !(1..=3).contains(&degree) {
        return Err(Error::InvalidArgument(format!("unsupported degree {degree}, expected 1..=3")));
    }
    let info = mesh.edge_info();
    let nv = mesh.n_vertices();
    let ne = info.edges.len();
    let nt = mesh.n_triangles();
    let per_edge = degree - 1;
    let per_tri = (degree - 1) * (degree.saturating_sub(2)) / 2;
    let n_dofs = nv + per_edge * ne + per_tri * nt;

    let mut dof_coords = vec![[0.0f64; 2]; n_dofs];
    let mut dof_kind = Vec::with_capacity(n_dofs);
    let mut is_boundary = vec![false; n_dofs];
    for v in 0..nv {
        dof_coords[v] = mesh.vertices[v];
        dof_kind.push(DofKind::Vertex { vertex: v as u32 });
        is_boundary[v] = mesh.is_boundary_vertex(v as u32);
    }
    for (e, edge) in info.edges.iter().enumerate() {
        let a = mesh.vertices[edge[0] as usize];
        let b = mesh.vertices[edge[1] as usize];
        let on_boundary = info.triangle_count[e] == 1;
        for s in 0..per_edge {
            let t = (s + 1) as f64 / degree as f64;
            let d = nv + e * per_edge + s;
            dof_coords[d] = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            dof_kind.push(DofKind::Edge { edge: e as u32, slot: s as u8 });
            is_boundary[d] = on_boundary;
        }
    }
    for t in 0..nt {
        let [a, b, c] = mesh.triangles[t];
        let pa = mesh.vertices[a as usize];
        let pb = mesh.vertices[b as usize];
        let pc = mesh.vertices[c as usize];
        for s in 0..per_tri {
            let d = nv + per_edge * ne + t * per_tri + s;
            // Only degree 3 has an interior node: the centroid.
            dof_coords[d] =
                [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0];
            dof_kind.push(DofKind::Interior { triangle: t as u32, slot: s as u8 });
        }
    }

    // Element connectivity in local shape order.
    let n_local = shape_count(degree);
    let mut elem_dofs = Vec::with_capacity(nt * n_local);
    for t in 0..nt {
        let [va, vb, vc] = mesh.triangles[t];
        elem_dofs.push(va);
        elem_dofs.push(vb);
        elem_dofs.push(vc);
        if degree >= 2 {
            let sides = [[va, vb], [vb, vc], [vc, va]];
            for (side, &[gi, gj]) in sides.iter().enumerate() {
                let e = info.triangle_edges[t][side] as usize;
                for s_local in 0..per_edge {
                    let s_global =
                        if gi < gj { s_local } else { per_edge - 1 - s_local };
                    elem_dofs.push((nv + e * per_edge + s_global) as u32);
                }
            }
        }
        for s in 0..per_tri {
            elem_dofs.push((nv + per_edge * ne + t * per_tri + s) as u32);
        }
    }

    let mut free_dofs = Vec::new();
    let mut dof_to_free = vec![FREE_NONE; n_dofs];
    for d in 0..n_dofs {
        if !is_boundary[d] {
            dof_to_free[d] = free_dofs.len() as u32;
            free_dofs.push(d);
        }
    }

    Ok(FeSpace {
        mesh,
        degree,
        dof_coords,
        dof_kind,
        elem_dofs,
        free_dofs,
        dof_to_free,
        is_boundary,
        n_edges: ne,
    })
}

fn shape_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

const MAX_LOCAL: usize = 10;

/// Values of the reference shape functions at barycentric `l`.
fn shape_values(degree: usize, l: [f64; 3], out: &mut [f64; MAX_LOCAL]) {
    let [l1, l2, l3] = l;
    match degree {
        1 => {
            out[0] = l1;
            out[1] = l2;
            out[2] = l3;
        }
        2 => {
            out[0] = l1 * (2.0 * l1 - 1.0);
            out[1] = l2 * (2.0 * l2 - 1.0);
            out[2] = l3 * (2.0 * l3 - 1.0);
            out[3] = 4.0 * l1 * l2;
            out[4] = 4.0 * l2 * l3;
            out[5] = 4.0 * l3 * l1;
        }
        3 => {
            let v = |a: f64| 0.5 * a * (3.0 * a - 1.0) * (3.0 * a - 2.0);
            let e = |a: f64, b: f64| 4.5 * a * b * (3.0 * a - 1.0);
            out[0] = v(l1);
            out[1] = v(l2);
            out[2] = v(l3);
            // Edge (1,2): node nearer vertex 1, then nearer vertex 2; same
            // pattern on the remaining sides.
            out[3] = e(l1, l2);
            out[4] = e(l2, l1);
            out[5] = e(l2, l3);
            out[6] = e(l3, l2);
            out[7] = e(l3, l1);
            out[8] = e(l1, l3);
            out[9] = 27.0 * l1 * l2 * l3;
        }
        _ => unreachable!("degree validated at construction"),
    }
}

/// Barycentric gradients `d phi / d lambda_a`; combined with the constant
/// reference gradients of the barycentric coordinates by the caller.
fn shape_bary_grads(degree: usize, l: [f64; 3], out: &mut [[f64; 3]; MAX_LOCAL]) {
    let [l1, l2, l3] = l;
    match degree {
        1 => {
            out[0] = [1.0, 0.0, 0.0];
            out[1] = [0.0, 1.0, 0.0];
            out[2] = [0.0, 0.0, 1.0];
        }
        2 => {
            out[0] = [4.0 * l1 - 1.0, 0.0, 0.0];
            out[1] = [0.0, 4.0 * l2 - 1.0, 0.0];
            out[2] = [0.0, 0.0, 4.0 * l3 - 1.0];
            out[3] = [4.0 * l2, 4.0 * l1, 0.0];
            out[4] = [0.0, 4.0 * l3, 4.0 * l2];
            out[5] = [4.0 * l3, 0.0, 4.0 * l1];
        }
        3 => {
            let dv = |a: f64| 13.5 * a * a - 9.0 * a + 1.0;
            let de_a = |a: f64, b: f64| 4.5 * b * (6.0 * a - 1.0);
            let de_b = |a: f64| 4.5 * a * (3.0 * a - 1.0);
            out[0] = [dv(l1), 0.0, 0.0];
            out[1] = [0.0, dv(l2), 0.0];
            out[2] = [0.0, 0.0, dv(l3)];
            out[3] = [de_a(l1, l2), de_b(l1), 0.0];
            out[4] = [de_b(l2), de_a(l2, l1), 0.0];
            out[5] = [0.0, de_a(l2, l3), de_b(l2)];
            out[6] = [0.0, de_b(l3), de_a(l3, l2)];
            out[7] = [de_b(l3), 0.0, de_a(l3, l1)];
            out[8] = [de_a(l1, l3), 0.0, de_b(l1)];
            out[9] = [27.0 * l2 * l3, 27.0 * l1 * l3, 27.0 * l1 * l2];
        }
        _ => unreachable!("degree validated at construction"),
    }
}

/// Symmetric quadrature rule on the reference triangle exact for polynomials
/// of the requested total degree.  Weights sum to one; integrals are
/// `area * sum w_q f(x_q)`.
fn triangle_rule(min_degree: usize) -> Vec<([f64; 3], f64)> {
    fn perms3(a: f64, w: f64) -> Vec<([f64; 3], f64)> {
        let c = 1.0 - 2.0 * a;
        vec![([c, a, a], w), ([a, c, a], w), ([a, a, c], w)]
    }
    fn perms6(a: f64, b: f64, w: f64) -> Vec<([f64; 3], f64)> {
        let c = 1.0 - a - b;
        vec![
            ([a, b, c], w),
            ([a, c, b], w),
            ([b, a, c], w),
            ([b, c, a], w),
            ([c, a, b], w),
            ([c, b, a], w),
        ]
    }
    match min_degree {
        0 | 1 => vec![([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1.0)],
        2 => perms3(1.0 / 6.0, 1.0 / 3.0),
        3 | 4 => {
            let mut r = perms3(0.445_948_490_915_965, 0.223_381_589_678_011);
            r.extend(perms3(0.091_576_213_509_771, 0.109_951_743_655_322));
            r
        }
        5 | 6 => {
            let mut r = perms3(0.249_286_745_170_910, 0.116_786_275_726_379);
            r.extend(perms3(0.063_089_014_491_502, 0.050_844_906_370_207));
            r.extend(perms6(
                0.310_352_451_033_785,
                0.636_502_499_121_399,
                0.082_851_075_618_374,
            ));
            r
        }
        d => unreachable!("no rule registered for degree {d}"),
    }
}

enum Form {
    Stiffness,
    Mass,
}

fn assemble(space: &FeSpace, form: Form) -> SparseMatrix {
    let degree = space.degree();
    let n_local = shape_count(degree);
    let rule = match form {
        // Gradients of degree-p shapes multiply to degree 2p-2; shapes to 2p.
        Form::Stiffness => triangle_rule(2 * degree - 2),
        Form::Mass => triangle_rule(2 * degree),
    };
    // Precompute shape data at the quadrature points.
    let mut vals_at = Vec::with_capacity(rule.len());
    let mut bgrads_at = Vec::with_capacity(rule.len());
    for &(l, _) in &rule {
        let mut v = [0.0; MAX_LOCAL];
        shape_values(degree, l, &mut v);
        vals_at.push(v);
        let mut g = [[0.0; 3]; MAX_LOCAL];
        shape_bary_grads(degree, l, &mut g);
        bgrads_at.push(g);
    }
    let mesh = space.mesh();
    let mut triplets = Vec::with_capacity(mesh.n_triangles() * n_local * n_local);
    for t in 0..mesh.n_triangles() {
        let [a, b, c] = mesh.triangles[t];
        let pa = mesh.vertices[a as usize];
        let pb = mesh.vertices[b as usize];
        let pc = mesh.vertices[c as usize];
        let j = [[pb[0] - pa[0], pc[0] - pa[0]], [pb[1] - pa[1], pc[1] - pa[1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let area = 0.5 * det;
        // Reference gradients of the barycentric coordinates, pushed forward:
        // grad lambda = J^{-T} grad_ref lambda.
        let inv_det = 1.0 / det;
        let gl = [
            [(-j[1][1] + j[1][0]) * inv_det, (j[0][1] - j[0][0]) * inv_det],
            [j[1][1] * inv_det, -j[0][1] * inv_det],
            [-j[1][0] * inv_det, j[0][0] * inv_det],
        ];
        let mut local = [[0.0f64; MAX_LOCAL]; MAX_LOCAL];
        for (q, &(_, w)) in rule.iter().enumerate() {
            match form {
                Form::Stiffness => {
                    let bg = &bgrads_at[q];
                    let mut g = [[0.0f64; 2]; MAX_LOCAL];
                    for i in 0..n_local {
                        for a3 in 0..3 {
                            g[i][0] += bg[i][a3] * gl[a3][0];
                            g[i][1] += bg[i][a3] * gl[a3][1];
                        }
                    }
                    for i in 0..n_local {
                        for k in i..n_local {
                            local[i][k] += w * (g[i][0] * g[k][0] + g[i][1] * g[k][1]);
                        }
                    }
                }
                Form::Mass => {
                    let v = &vals_at[q];
                    for i in 0..n_local {
                        for k in i..n_local {
                            local[i][k] += w * v[i] * v[k];
                        }
                    }
                }
            }
        }
        let dofs = space.element_dofs(t);
        for i in 0..n_local {
            for k in i..n_local {
                let v = local[i][k] * area;
                triplets.push((dofs[i], dofs[k], v));
                if i != k {
                    triplets.push((dofs[k], dofs[i], v));
                }
            }
        }
    }
    SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), triplets)
        .expect("element dofs are in range")
}

/// Galerkin matrix of the gradient form over all dofs (before elimination).
pub fn assemble_stiffness(space: &FeSpace) -> SparseMatrix {
    assemble(space, Form::Stiffness)
}

/// Galerkin matrix of the L2 inner product over all dofs.
pub fn assemble_mass(space: &FeSpace) -> SparseMatrix {
    assemble(space, Form::Mass)
}

/// Reusable factorization of `zM - K` on the free dofs, together with the
/// matrices needed to form right-hand sides and check residuals.
pub struct ResolventSolver {
    shift: Complex64,
    k: Arc<SparseMatrix>,
    m: Arc<SparseMatrix>,
    factor: ShiftedFactor,
}

/// Relative residual bound enforced on every resolvent solve.
pub const SOLVE_RESIDUAL_BOUND: f64 = 1e-10;

impl ResolventSolver {
    /// Factors `zM - K` for free-dof matrices, with nested dissection when
    /// coordinates are supplied.
    pub fn from_matrices(
        k: Arc<SparseMatrix>,
        m: Arc<SparseMatrix>,
        z: Complex64,
        coords: Option<&[[f64; 2]]>,
    ) -> Result<Self> {
        let ordering =
            if coords.is_some() { Ordering::NestedDissection } else { Ordering::Natural };
        let factor = ShiftedFactor::new(&k, &m, z, ordering, coords)?;
        Ok(ResolventSolver { shift: z, k, m, factor })
    }

    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn n(&self) -> usize {
        self.factor.n()
    }

    /// Stored entries in the triangular factor (fill diagnostics).
    pub fn fill_in(&self) -> usize {
        self.factor.fill_in()
    }

    /// Solves `(zM - K) u = M f` for one coefficient vector `f`, enforcing
    /// the documented residual bound.
    pub fn solve(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n();
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.len() });
        }
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        self.m.mul_vec_complex(f, &mut b);
        self.solve_refined(&b, 1)
    }

    /// Solves `(zM - K) U = M F` for a real block `F` (row-major n x width).
    pub fn solve_block_real(&self, f: &DenseMatrix) -> Result<Vec<Complex64>> {
        let n = self.n();
        if f.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.nrows() });
        }
        let width = f.ncols();
        let mut b_real = vec![0.0f64; n * width];
        self.m.mul_block(f.data(), width, &mut b_real);
        let b: Vec<Complex64> = b_real.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.solve_refined(&b, width)
    }

    /// Factored solve plus iterative refinement until every column meets the
    /// residual bound (at most three correction steps).
    fn solve_refined(&self, b: &[Complex64], width: usize) -> Result<Vec<Complex64>> {
        let mut u = b.to_vec();
        self.factor.solve_block_complex(&mut u, width);
        for _step in 0..3 {
            let (residual, max_rel) = self.residual_block(b, &u, width);
            if max_rel <= SOLVE_RESIDUAL_BOUND {
                return Ok(u);
            }
            let mut correction = residual;
            self.factor.solve_block_complex(&mut correction, width);
            for (ui, di) in u.iter_mut().zip(&correction) {
                *ui += di;
            }
        }
        let (_, max_rel) = self.residual_block(b, &u, width);
        if max_rel <= SOLVE_RESIDUAL_BOUND {
            Ok(u)
        } else {
            Err(Error::SolveFailure { residual: max_rel, bound: SOLVE_RESIDUAL_BOUND })
        }
    }

    /// Residual block `b - (zM - K) u` and the worst per-column relative
    /// residual norm.
    fn residual_block(&self, b: &[Complex64], u: &[Complex64], width: usize) -> (Vec<Complex64>, f64) {
        let n = self.n();
        let mut ku = vec![Complex64::new(0.0, 0.0); n * width];
        let mut mu = vec![Complex64::new(0.0, 0.0); n * width];
        if width == 1 {
            self.k.mul_vec_complex(u, &mut ku);
            self.m.mul_vec_complex(u, &mut mu);
        } else {
            mul_block_complex(&self.k, u, width, &mut ku);
            mul_block_complex(&self.m, u, width, &mut mu);
        }
        let mut residual = vec![Complex64::new(0.0, 0.0); n * width];
        let mut worst = 0.0f64;
        for lane in 0..width {
            let mut res = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..n {
                let idx = i * width + lane;
                let r = b[idx] - (self.shift * mu[idx] - ku[idx]);
                residual[idx] = r;
                res += r.norm_sqr();
                scale += b[idx].norm_sqr();
            }
            if scale > 0.0 {
                worst = worst.max(res.sqrt() / scale.sqrt());
            } else if res > 0.0 {
                worst = f64::INFINITY;
            }
        }
        (residual, worst)
    }
}

fn mul_block_complex(a: &SparseMatrix, x: &[Complex64], width: usize, y: &mut [Complex64]) {
    const CLANE: usize = 4;
    let n = a.nrows();
    let mut lane0 = 0;
    while lane0 < width {
        let w = CLANE.min(width - lane0);
        let mut acc = [Complex64::new(0.0, 0.0); CLANE];
        for i in 0..n {
            acc[..w].fill(Complex64::new(0.0, 0.0));
            let (cols, vals) = a.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let xs = &x[c as usize * width + lane0..];
                for (s, &xv) in acc[..w].iter_mut().zip(&xs[..w]) {
                    *s += v * xv;
                }
            }
            y[i * width + lane0..i * width + lane0 + w].copy_from_slice(&acc[..w]);
        }
        lane0 += w;
    }
}

/// Factors `zM - K` on the free dofs of `space`.
///
/// `k` and `m` may be given over all dofs (they are restricted here) or
/// already restricted to the free dofs.
pub fn factor_shifted(
    space: &FeSpace,
    k: &SparseMatrix,
    m: &SparseMatrix,
    z: Complex64,
) -> Result<ResolventSolver> {
    let (kf, mf) = if k.nrows() == space.n_dofs() {
        (space.restrict_to_free(k)?, space.restrict_to_free(m)?)
    } else if k.nrows() == space.n_free() {
        (k.clone(), m.clone())
    } else {
        return Err(Error::DimensionMismatch { expected: space.n_dofs(), got: k.nrows() });
    };
    let coords = space.free_coords();
    ResolventSolver::from_matrices(Arc::new(kf), Arc::new(mf), z, Some(&coords))
}

/// Factors one solver per upper-half-plane node of the filter, serially.
/// Keys are node indices into `filter.nodes()`.
pub fn build_solvers(
    space: &FeSpace,
    k: &SparseMatrix,
    m: &SparseMatrix,
    filter: &RationalFilter,
) -> Result<BTreeMap<usize, ResolventSolver>> {
    let mut solvers = BTreeMap::new();
    for idx in filter.upper_half_nodes() {
        solvers.insert(idx, factor_shifted(space, k, m, filter.nodes()[idx])?);
    }
    Ok(solvers)
}

/// Applies the discrete filter `S_N^h F = w_N F + sum_k w_k R_h(z_k) F` to a
/// real block of free-dof coefficient vectors.
///
/// `solvers` maps node indices to factorizations; one solver per conjugate
/// pair (the node with positive imaginary part) is required, and the
/// conjugate contribution is folded in as `2 Re(w_k U_k)`, so the result is
/// exactly real.
pub fn apply_filtered_operator(
    filter: &RationalFilter,
    solvers: &BTreeMap<usize, ResolventSolver>,
    f: &DenseMatrix,
) -> Result<DenseMatrix> {
    if !filter.is_conjugate_closed(1e-12) {
        return Err(Error::AssumptionViolated(format!(
            "filter with {} nodes is not conjugate-closed",
            filter.order()
        )));
    }
    let n = f.nrows();
    let width = f.ncols();
    let w_const = filter.w_const().re;
    let mut out = DenseMatrix::zeros(n, width);
    if w_const != 0.0 {
        for (o, &x) in out.data_mut().iter_mut().zip(f.data()) {
            *o = w_const * x;
        }
    }
    for k in filter.upper_half_nodes() {
        let solver = solvers.get(&k).ok_or(Error::MissingSolver { node_index: k })?;
        let node = filter.nodes()[k];
        if (solver.shift() - node).norm() > 1e-12 * node.norm().max(1.0) {
            return Err(Error::MissingSolver { node_index: k });
        }
        if solver.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: solver.n() });
        }
        let u = solver.solve_block_real(f)?;
        let w = filter.weights()[k];
        for (o, &uv) in out.data_mut().iter_mut().zip(&u) {
            *o += 2.0 * (w * uv).re;
        }
    }
    Ok(out)
}
