//! File formats: the text mesh format, coordinate dumps of sparse matrices,
//! and the CSV emitted by solve/study runs.
//!
//! Mesh format: line 1 `NV NT`; then NV lines `x y b` (`b` is 1 for
//! boundary vertices) and NT lines `i j k` with 0-based counterclockwise
//! vertex indices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use spectral_feast_core::mesh::Mesh;
use spectral_feast_core::sparse::SparseMatrix;

/// Serializes a mesh in the text format.
pub fn mesh_to_string(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mesh.n_vertices(), mesh.n_triangles());
    for (v, p) in mesh.vertices.iter().enumerate() {
        let b = u8::from(mesh.is_boundary_vertex(v as u32));
        let _ = writeln!(out, "{} {} {}", p[0], p[1], b);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn write_mesh(path: &Path, mesh: &Mesh) -> Result<()> {
    fs::write(path, mesh_to_string(mesh))
        .with_context(|| format!("writing mesh to {}", path.display()))
}

/// Parses the text format back into a mesh and validates its invariants.
pub fn mesh_from_str(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("missing mesh header")?;
    let mut parts = header.split_whitespace();
    let nv: usize = parts.next().context("missing NV")?.parse()?;
    let nt: usize = parts.next().context("missing NT")?.parse()?;
    let mut vertices = Vec::with_capacity(nv);
    let mut boundary = Vec::new();
    for i in 0..nv {
        let line = lines.next().with_context(|| format!("missing vertex line {i}"))?;
        let mut f = line.split_whitespace();
        let x: f64 = f.next().context("missing x")?.parse()?;
        let y: f64 = f.next().context("missing y")?.parse()?;
        let b: u8 = f.next().context("missing boundary flag")?.parse()?;
        vertices.push([x, y]);
        if b != 0 {
            boundary.push(i as u32);
        }
    }
    let mut triangles = Vec::with_capacity(nt);
    for i in 0..nt {
        let line = lines.next().with_context(|| format!("missing triangle line {i}"))?;
        let mut f = line.split_whitespace();
        let a: u32 = f.next().context("missing i")?.parse()?;
        let b: u32 = f.next().context("missing j")?.parse()?;
        let c: u32 = f.next().context("missing k")?.parse()?;
        triangles.push([a, b, c]);
    }
    let mut mesh = Mesh { vertices, triangles, boundary_vertices: boundary, h_max: 0.0 };
    mesh.h_max = mesh.max_edge_length();
    let report = mesh.validate();
    if !report.all_pass() {
        bail!("mesh file violates invariants: {report:?}");
    }
    Ok(mesh)
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading mesh {}", path.display()))?;
    mesh_from_str(&text)
}

/// Coordinate-format dump (`i j value` per line) for debugging.
pub fn sparse_to_coo_string(a: &SparseMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for (i, j, v) in a.triplets() {
        let _ = writeln!(out, "{i} {j} {v}");
    }
    out
}

/// Formats a float with 17 significant digits (round-trip safe).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_feast_core::mesh::{make_dumbbell_mesh, make_lshape_mesh, make_square_mesh};

    #[test]
    fn mesh_round_trip() {
        for mesh in [
            make_square_mesh(3).unwrap(),
            make_lshape_mesh(2).unwrap(),
            make_dumbbell_mesh(8).unwrap(),
        ] {
            let text = mesh_to_string(&mesh);
            let back = mesh_from_str(&text).unwrap();
            assert_eq!(mesh.vertices, back.vertices);
            assert_eq!(mesh.triangles, back.triangles);
            assert_eq!(mesh.boundary_vertices, back.boundary_vertices);
            assert!((mesh.h_max - back.h_max).abs() < 1e-15);
        }
    }

    #[test]
    fn corrupt_mesh_is_rejected() {
        let mut mesh = make_square_mesh(2).unwrap();
        mesh.triangles[0].swap(1, 2); // flipped orientation
        let text = mesh_to_string(&mesh);
        assert!(mesh_from_str(&text).is_err());
    }

    #[test]
    fn float_format_has_17_significant_digits() {
        let x = core::f64::consts::PI * 2.0 * core::f64::consts::PI;
        let s = fmt_f64(x);
        assert_eq!(s, "1.9739208802178716e1");
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, x);
    }
}
