//! Mesh file I/O.
//!
//! Text schema, UTF-8, 0-based indices:
//!
//! ```text
//! sfvem-mesh 1
//! vertices N
//! x y                (N lines, shortest round-trip decimals)
//! cells M
//! k i1 ... ik        (M lines)
//! boundary B
//! i j marker         (B lines)
//! ```

use super::polymesh::{BoundaryEdge, PolyMesh};
use super::Point;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

pub const MESH_HEADER: &str = "sfvem-mesh 1";

pub fn save_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}

pub fn mesh_to_string(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MESH_HEADER}");
    let _ = writeln!(s, "vertices {}", mesh.num_vertices());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    let _ = writeln!(s, "cells {}", mesh.num_cells());
    for cell in &mesh.cells {
        let _ = write!(s, "{}", cell.len());
        for &i in cell {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "boundary {}", mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let _ = writeln!(s, "{} {} {}", e.a, e.b, e.marker);
    }
    s
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<PolyMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    mesh_from_str(&text, &path.display().to_string())
}

pub fn mesh_from_str(text: &str, path: &str) -> Result<PolyMesh> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")))
    };

    let (ln, header) = next("header")?;
    if header.trim() != MESH_HEADER {
        return Err(err(ln + 1, format!("bad header {header:?}")));
    }

    let (ln, vline) = next("vertices count")?;
    let n: usize = parse_counted(vline, "vertices").map_err(|m| err(ln + 1, m))?;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = next("vertex line")?;
        let mut it = line.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln + 1, "bad vertex x".into()))?;
        let y: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln + 1, "bad vertex y".into()))?;
        vertices.push(Point::new(x, y));
    }

    let (ln, cline) = next("cells count")?;
    let m: usize = parse_counted(cline, "cells").map_err(|msg| err(ln + 1, msg))?;
    let mut cells = Vec::with_capacity(m);
    for ci in 0..m {
        let (ln, line) = next("cell line")?;
        let mut it = line.split_whitespace();
        let k: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln + 1, format!("cell {ci}: bad vertex count")))?;
        let mut cell = Vec::with_capacity(k);
        for _ in 0..k {
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(ln + 1, format!("cell {ci}: missing vertex index")))?;
            if v >= vertices.len() {
                return Err(err(
                    ln + 1,
                    format!("cell {ci}: vertex index {v} out of range (0..{})", vertices.len()),
                ));
            }
            cell.push(v);
        }
        cells.push(cell);
    }

    let (ln, bline) = next("boundary count")?;
    let b: usize = parse_counted(bline, "boundary").map_err(|msg| err(ln + 1, msg))?;
    let mut boundary = Vec::with_capacity(b);
    for bi in 0..b {
        let (ln, line) = next("boundary line")?;
        let mut it = line.split_whitespace();
        let a: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln + 1, format!("boundary edge {bi}: bad index")))?;
        let bb: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(ln + 1, format!("boundary edge {bi}: bad index")))?;
        let marker = it
            .next()
            .ok_or_else(|| err(ln + 1, format!("boundary edge {bi}: missing marker")))?;
        if a >= vertices.len() || bb >= vertices.len() {
            return Err(err(ln + 1, format!("boundary edge {bi}: index out of range")));
        }
        boundary.push(BoundaryEdge {
            a,
            b: bb,
            marker: marker.to_string(),
        });
    }

    PolyMesh::new(vertices, cells, boundary)
}

fn parse_counted(line: &str, keyword: &str) -> std::result::Result<usize, String> {
    let mut it = line.split_whitespace();
    match it.next() {
        Some(k) if k == keyword => {}
        other => return Err(format!("expected `{keyword} N`, found {other:?}")),
    }
    it.next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format!("bad {keyword} count"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_structured_quads, Rect};

    #[test]
    fn round_trip_structured() {
        let mesh = generate_structured_quads(Rect::unit(), 4, 4).unwrap();
        let text = mesh_to_string(&mesh);
        let back = mesh_from_str(&text, "test").unwrap();
        assert_eq!(mesh.vertices, back.vertices);
        assert_eq!(mesh.cells, back.cells);
        assert_eq!(mesh.boundary_edges, back.boundary_edges);
    }

    #[test]
    fn out_of_range_index_names_cell() {
        let text = "sfvem-mesh 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 9\nboundary 0\n";
        let e = mesh_from_str(text, "bad.mesh").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("cell 0"), "{msg}");
        assert!(msg.contains('9'), "{msg}");
    }

    #[test]
    fn bad_header_rejected() {
        assert!(mesh_from_str("nope\n", "x").is_err());
    }
}
