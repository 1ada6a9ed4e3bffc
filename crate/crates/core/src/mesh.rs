//! Structured conforming triangulations of the three study domains.
//!
//! All meshes are built on uniform grids of spacing `1/n` with every cell
//! split along its lower-left to upper-right diagonal, so they are
//! quasi-uniform by construction (edge lengths are `1/n` or `sqrt(2)/n`).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Conforming triangle mesh.
///
/// Triangles are counterclockwise vertex-index triples; `boundary_vertices`
/// is the ascending list of vertices incident to a boundary edge; `h_max` is
/// the maximum edge length.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[u32; 3]>,
    pub boundary_vertices: Vec<u32>,
    pub h_max: f64,
}

/// Edge incidence data shared by conformity checks and FE enumeration.
#[derive(Debug, Clone)]
pub struct EdgeInfo {
    /// Unique edges as ascending vertex pairs, sorted lexicographically.
    pub edges: Vec<[u32; 2]>,
    /// Number of triangles sharing each edge.
    pub triangle_count: Vec<u8>,
    /// For each triangle, the edge ids of its sides (v0v1, v1v2, v2v0).
    pub triangle_edges: Vec<[u32; 3]>,
}

/// Outcome of checking every `Mesh` invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshReport {
    /// Every triangle has strictly positive signed area.
    pub orientation: bool,
    /// Every edge is shared by exactly one or two triangles, and no vertex
    /// is duplicated.
    pub conformity: bool,
    /// `boundary_vertices` is exactly the endpoints of single-triangle edges.
    pub boundary: bool,
    /// `h_max` equals the true maximum edge length.
    pub h_max: bool,
}

impl MeshReport {
    pub fn all_pass(&self) -> bool {
        self.orientation && self.conformity && self.boundary && self.h_max
    }
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertices[a as usize];
        let pb = self.vertices[b as usize];
        let pc = self.vertices[c as usize];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.signed_area(t)).sum()
    }

    fn edge_len(&self, a: u32, b: u32) -> f64 {
        let pa = self.vertices[a as usize];
        let pb = self.vertices[b as usize];
        ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt()
    }

    /// Maximum edge length, computed from scratch.
    pub fn max_edge_length(&self) -> f64 {
        let mut h: f64 = 0.0;
        for &[a, b, c] in &self.triangles {
            h = h.max(self.edge_len(a, b)).max(self.edge_len(b, c)).max(self.edge_len(c, a));
        }
        h
    }

    /// Minimum edge length (used by the quasi-uniformity property).
    pub fn min_edge_length(&self) -> f64 {
        let mut h = f64::INFINITY;
        for &[a, b, c] in &self.triangles {
            h = h.min(self.edge_len(a, b)).min(self.edge_len(b, c)).min(self.edge_len(c, a));
        }
        h
    }

    /// Collects unique edges and their triangle counts.
    pub fn edge_info(&self) -> EdgeInfo {
        let mut map: BTreeMap<[u32; 2], u32> = BTreeMap::new();
        for &[a, b, c] in &self.triangles {
            for [u, v] in [[a, b], [b, c], [c, a]] {
                let key = if u < v { [u, v] } else { [v, u] };
                map.entry(key).or_insert(0);
            }
        }
        for (id, (_, slot)) in map.iter_mut().enumerate() {
            *slot = id as u32;
        }
        let edges: Vec<[u32; 2]> = map.keys().copied().collect();
        let mut triangle_count = vec![0u8; edges.len()];
        let mut triangle_edges = Vec::with_capacity(self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let mut ids = [0u32; 3];
            for (slot, [u, v]) in [[a, b], [b, c], [c, a]].into_iter().enumerate() {
                let key = if u < v { [u, v] } else { [v, u] };
                let id = map[&key];
                ids[slot] = id;
                triangle_count[id as usize] = triangle_count[id as usize].saturating_add(1);
            }
            triangle_edges.push(ids);
        }
        EdgeInfo { edges, triangle_count, triangle_edges }
    }

    pub fn is_boundary_vertex(&self, v: u32) -> bool {
        self.boundary_vertices.binary_search(&v).is_ok()
    }

    /// Checks all mesh invariants and reports pass/fail per invariant.
    pub fn validate(&self) -> MeshReport {
        let orientation = (0..self.n_triangles()).all(|t| self.signed_area(t) > 0.0);
        let info = self.edge_info();
        let mut conformity = info.triangle_count.iter().all(|&c| c == 1 || c == 2);
        // Duplicated vertices break conformity even when edge counts look sane.
        let mut sorted: Vec<[u64; 2]> =
            self.vertices.iter().map(|p| [p[0].to_bits(), p[1].to_bits()]).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            conformity = false;
        }
        let mut expected = Vec::new();
        for (e, &cnt) in info.edges.iter().zip(&info.triangle_count) {
            if cnt == 1 {
                expected.push(e[0]);
                expected.push(e[1]);
            }
        }
        expected.sort_unstable();
        expected.dedup();
        let boundary = expected == self.boundary_vertices;
        let h_max = (self.max_edge_length() - self.h_max).abs() <= 1e-14 * self.h_max.max(1.0);
        MeshReport { orientation, conformity, boundary, h_max }
    }
}

/// Builds a mesh from cells of a uniform grid, assigning vertex ids to
/// referenced grid points in row-major order.
struct GridBuilder {
    spacing: f64,
    ids: BTreeMap<(i64, i64), u32>,
    points: Vec<(i64, i64)>,
    cells: Vec<(i64, i64)>,
}

impl GridBuilder {
    fn new(spacing: f64) -> Self {
        GridBuilder { spacing, ids: BTreeMap::new(), points: Vec::new(), cells: Vec::new() }
    }

    fn vertex(&mut self, ix: i64, iy: i64) -> u32 {
        if let Some(&id) = self.ids.get(&(iy, ix)) {
            return id;
        }
        let id = self.points.len() as u32;
        self.points.push((ix, iy));
        self.ids.insert((iy, ix), id);
        id
    }

    fn cell(&mut self, ix: i64, iy: i64) {
        self.cells.push((ix, iy));
    }

    fn finish(mut self) -> Mesh {
        // Register vertices cell by cell, then renumber row-major so the
        // final ids do not depend on cell insertion order.
        let cells = core::mem::take(&mut self.cells);
        let mut raw_triangles = Vec::with_capacity(2 * cells.len());
        for (ix, iy) in cells {
            let v00 = self.vertex(ix, iy);
            let v10 = self.vertex(ix + 1, iy);
            let v11 = self.vertex(ix + 1, iy + 1);
            let v01 = self.vertex(ix, iy + 1);
            // Lower-left to upper-right diagonal, both children CCW.
            raw_triangles.push([v00, v10, v11]);
            raw_triangles.push([v00, v11, v01]);
        }
        let mut remap = vec![0u32; self.points.len()];
        for (rank, &id) in self.ids.values().enumerate() {
            remap[id as usize] = rank as u32;
        }
        let mut vertices = vec![[0.0f64; 2]; self.points.len()];
        for (&(iy, ix), &id) in &self.ids {
            vertices[remap[id as usize] as usize] =
                [ix as f64 * self.spacing, iy as f64 * self.spacing];
        }
        let triangles: Vec<[u32; 3]> = raw_triangles
            .iter()
            .map(|&[a, b, c]| [remap[a as usize], remap[b as usize], remap[c as usize]])
            .collect();
        let mut mesh = Mesh { vertices, triangles, boundary_vertices: Vec::new(), h_max: 0.0 };
        mesh.boundary_vertices = boundary_from_edges(&mesh);
        mesh.h_max = mesh.max_edge_length();
        mesh
    }
}

fn boundary_from_edges(mesh: &Mesh) -> Vec<u32> {
    let info = mesh.edge_info();
    let mut boundary = Vec::new();
    for (e, &cnt) in info.edges.iter().zip(&info.triangle_count) {
        if cnt == 1 {
            boundary.push(e[0]);
            boundary.push(e[1]);
        }
    }
    boundary.sort_unstable();
    boundary.dedup();
    boundary
}

/// Structured mesh of the unit square `(0,1)^2` with `n x n` cells.
pub fn make_square_mesh(n: usize) -> Result<Mesh> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("square mesh needs n >= 1, got {n}")));
    }
    let mut b = GridBuilder::new(1.0 / n as f64);
    for iy in 0..n as i64 {
        for ix in 0..n as i64 {
            b.cell(ix, iy);
        }
    }
    Ok(b.finish())
}

/// L-shaped domain `(0,2)^2` minus the closed square `[1,2] x [1,2]`,
/// tiled by three unit squares with `n x n` cells each.  The re-entrant
/// corner `(1,1)` is a mesh vertex.
pub fn make_lshape_mesh(n: usize) -> Result<Mesh> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("L-shape mesh needs n >= 1, got {n}")));
    }
    let m = n as i64;
    let mut b = GridBuilder::new(1.0 / n as f64);
    for iy in 0..2 * m {
        for ix in 0..2 * m {
            if ix >= m && iy >= m {
                continue;
            }
            b.cell(ix, iy);
        }
    }
    Ok(b.finish())
}

/// Dumbbell domain: unit squares `[0,1]^2` and `[1.25,2.25] x [0,1]` joined
/// by the bridge `[1,1.25] x [0.375, 0.625]`, at grid spacing `1/n`.
///
/// `n` must be a multiple of 8 so the bridge aligns with the grid.
pub fn make_dumbbell_mesh(n: usize) -> Result<Mesh> {
    if n == 0 || n % 8 != 0 {
        return Err(Error::InvalidArgument(format!(
            "dumbbell mesh needs n to be a positive multiple of 8, got {n}"
        )));
    }
    let m = n as i64;
    let bridge_lo = 3 * m / 8;
    let bridge_hi = 5 * m / 8;
    let left_end = m;
    let right_start = 5 * m / 4;
    let right_end = right_start + m;
    let mut b = GridBuilder::new(1.0 / n as f64);
    for iy in 0..m {
        for ix in 0..right_end {
            let in_left = ix < left_end;
            let in_right = ix >= right_start;
            let in_bridge = ix >= left_end && ix < right_start && iy >= bridge_lo && iy < bridge_hi;
            if in_left || in_right || in_bridge {
                b.cell(ix, iy);
            }
        }
    }
    Ok(b.finish())
}

/// Splits every triangle into four congruent children via edge midpoints.
/// Halves `h_max` and preserves conformity.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let info = mesh.edge_info();
    let nv = mesh.n_vertices() as u32;
    let mut vertices = mesh.vertices.clone();
    for e in &info.edges {
        let a = mesh.vertices[e[0] as usize];
        let b = mesh.vertices[e[1] as usize];
        vertices.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
    }
    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        let [eab, ebc, eca] = info.triangle_edges[t];
        let mab = nv + eab;
        let mbc = nv + ebc;
        let mca = nv + eca;
        triangles.push([a, mab, mca]);
        triangles.push([b, mbc, mab]);
        triangles.push([c, mca, mbc]);
        triangles.push([mab, mbc, mca]);
    }
    let mut out = Mesh { vertices, triangles, boundary_vertices: Vec::new(), h_max: 0.0 };
    out.boundary_vertices = boundary_from_edges(&out);
    out.h_max = 0.5 * mesh.h_max;
    out
}
