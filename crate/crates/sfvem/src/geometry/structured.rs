//! Structured quad meshes, the nonconvex heptagon split, and the polygon
//! families used by the element-eigenvalue scans.

use super::polymesh::{BoundaryEdge, PolyMesh};
use super::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn unit() -> Self {
        Rect {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        }
    }
}

/// Uniform `nx × ny` mesh of axis-aligned quads with side markers
/// `left`, `right`, `bottom`, `top`.
pub fn generate_structured_quads(rect: Rect, nx: usize, ny: usize) -> Result<PolyMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!(
            "structured mesh needs positive cell counts, got {nx} x {ny}"
        )));
    }
    let dx = (rect.x1 - rect.x0) / nx as f64;
    let dy = (rect.y1 - rect.y0) / ny as f64;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point::new(rect.x0 + i as f64 * dx, rect.y0 + j as f64 * dy));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut boundary = Vec::new();
    for i in 0..nx {
        boundary.push(BoundaryEdge {
            a: id(i, 0),
            b: id(i + 1, 0),
            marker: "bottom".into(),
        });
        boundary.push(BoundaryEdge {
            a: id(i, ny),
            b: id(i + 1, ny),
            marker: "top".into(),
        });
    }
    for j in 0..ny {
        boundary.push(BoundaryEdge {
            a: id(0, j),
            b: id(0, j + 1),
            marker: "left".into(),
        });
        boundary.push(BoundaryEdge {
            a: id(nx, j),
            b: id(nx, j + 1),
            marker: "right".into(),
        });
    }
    PolyMesh::new(vertices, cells, boundary)
}

/// Fractions of the cut segment at which the zig-zag deviates, and the
/// relative lateral offset. The cut runs between the midpoints of the first
/// and third edge of each quad; deviation alternates +, -, + so both halves
/// acquire at least one reflex vertex.
const SPLIT_FRACTIONS: [f64; 3] = [0.25, 0.5, 0.75];
const SPLIT_OFFSET: f64 = 0.15;

/// Splits every quad into two nonconvex heptagons along a zig-zag polyline.
pub fn split_quads_nonconvex(mesh: &PolyMesh) -> Result<PolyMesh> {
    for (ci, cell) in mesh.cells.iter().enumerate() {
        if cell.len() != 4 {
            return Err(Error::InvalidArgument(format!(
                "cell {ci} has {} vertices; the nonconvex split requires quads",
                cell.len()
            )));
        }
    }

    let mut vertices = mesh.vertices.clone();
    let mut cells: Vec<Vec<usize>> = Vec::with_capacity(2 * mesh.num_cells());

    // Midpoints of shared edges must reuse one vertex id.
    use std::collections::HashMap;
    let mut midpoint_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoint_id.entry(key).or_insert_with(|| {
            let p = Point::from((vertices[a].coords + vertices[b].coords) * 0.5);
            vertices.push(p);
            vertices.len() - 1
        })
    };

    for cell in &mesh.cells {
        let (v0, v1, v2, v3) = (cell[0], cell[1], cell[2], cell[3]);
        let s = midpoint(v0, v1, &mut vertices);
        let e = midpoint(v2, v3, &mut vertices);
        let ps = vertices[s];
        let pe = vertices[e];
        let dir = pe - ps;
        let lateral = super::Vector::new(-dir.y, dir.x);
        let mut zig = Vec::with_capacity(3);
        for (k, &t) in SPLIT_FRACTIONS.iter().enumerate() {
            let sign = if k == 1 { -1.0 } else { 1.0 };
            let p = ps + t * dir + sign * SPLIT_OFFSET * lateral;
            vertices.push(p);
            zig.push(vertices.len() - 1);
        }
        // Half containing v3, v0 walks the zig-zag forward; the other half
        // walks it backward. Both are 7-gons.
        cells.push(vec![v0, s, zig[0], zig[1], zig[2], e, v3]);
        cells.push(vec![s, v1, v2, e, zig[2], zig[1], zig[0]]);
    }

    // Boundary edges: originals split in two at the inserted midpoints.
    let mut boundary = Vec::new();
    for be in &mesh.boundary_edges {
        let key = (be.a.min(be.b), be.a.max(be.b));
        if let Some(&m) = midpoint_id.get(&key) {
            boundary.push(BoundaryEdge {
                a: be.a,
                b: m,
                marker: be.marker.clone(),
            });
            boundary.push(BoundaryEdge {
                a: m,
                b: be.b,
                marker: be.marker.clone(),
            });
        } else {
            boundary.push(be.clone());
        }
    }
    PolyMesh::new(vertices, cells, boundary)
}

/// Regular `n`-gon with unit circumradius centered at the origin.
pub fn regular_polygon(n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Point::new(a.cos(), a.sin())
        })
        .collect()
}

/// Unit square carrying `n ≥ 4` nodes: the four corners plus extra nodes
/// distributed round-robin over the sides, each side subdivided evenly.
///
/// This reproduces the element family used to probe spurious modes on a
/// quadrilateral whose node count is raised artificially.
pub fn central_node_quad(n: usize) -> Result<Vec<Point>> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "central quad family needs at least 4 nodes, got {n}"
        )));
    }
    let corners = [
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ];
    let mut per_side = [0usize; 4];
    for k in 0..(n - 4) {
        per_side[k % 4] += 1;
    }
    let mut pts = Vec::with_capacity(n);
    for side in 0..4 {
        let a = corners[side];
        let b = corners[(side + 1) % 4];
        pts.push(a);
        let m = per_side[side];
        for k in 1..=m {
            let t = k as f64 / (m + 1) as f64;
            pts.push(Point::from(a.coords + t * (b.coords - a.coords)));
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cross2;
    use approx::assert_relative_eq;

    #[test]
    fn four_by_four_counts() {
        let mesh = generate_structured_quads(Rect::unit(), 4, 4).unwrap();
        assert_eq!(mesh.num_cells(), 16);
        assert_eq!(mesh.num_vertices(), 25);
        assert_relative_eq!(mesh.total_area().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_quad_and_strip() {
        let mesh = generate_structured_quads(Rect::unit(), 1, 1).unwrap();
        assert_eq!(mesh.num_cells(), 1);
        let strip = generate_structured_quads(
            Rect {
                x0: 0.0,
                x1: 8.0,
                y0: 0.0,
                y1: 1.0,
            },
            8,
            1,
        )
        .unwrap();
        assert_eq!(strip.num_cells(), 8);
        assert!(generate_structured_quads(Rect::unit(), 0, 3).is_err());
    }

    fn reflex_count(mesh: &PolyMesh, cell: usize) -> usize {
        let pts = mesh.cell_points(cell);
        let n = pts.len();
        (0..n)
            .filter(|&i| {
                let p = pts[(i + n - 1) % n];
                let q = pts[i];
                let r = pts[(i + 1) % n];
                cross2(q - p, r - q) < 0.0
            })
            .count()
    }

    #[test]
    fn split_single_quad() {
        let mesh = generate_structured_quads(Rect::unit(), 1, 1).unwrap();
        let split = split_quads_nonconvex(&mesh).unwrap();
        assert_eq!(split.num_cells(), 2);
        for c in 0..2 {
            assert_eq!(split.cells[c].len(), 7);
            assert!(reflex_count(&split, c) >= 1);
        }
        assert_relative_eq!(split.total_area().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn split_beam_meshes() {
        let beam = Rect {
            x0: 0.0,
            x1: 8.0,
            y0: -0.5,
            y1: 0.5,
        };
        let mesh = generate_structured_quads(beam, 16, 2).unwrap();
        let split = split_quads_nonconvex(&mesh).unwrap();
        assert_eq!(split.num_cells(), 64);
        assert_relative_eq!(split.total_area().unwrap(), 8.0, epsilon = 1e-10);

        let fine = generate_structured_quads(beam, 64, 8).unwrap();
        let split = split_quads_nonconvex(&fine).unwrap();
        assert_eq!(split.num_cells(), 1024);
        for c in 0..split.num_cells() {
            assert_eq!(split.cells[c].len(), 7);
            assert!(reflex_count(&split, c) >= 1);
        }
    }

    #[test]
    fn split_rejects_non_quads() {
        let mesh = generate_structured_quads(Rect::unit(), 2, 2).unwrap();
        let split = split_quads_nonconvex(&mesh).unwrap();
        assert!(split_quads_nonconvex(&split).is_err());
    }

    #[test]
    fn regular_polygon_is_ccw() {
        let pts = regular_polygon(7);
        assert_eq!(pts.len(), 7);
        let g = crate::geometry::polygon_metrics(&pts).unwrap();
        assert!(g.area > 0.0);
        // Max pairwise distance of a unit-circumradius 7-gon: 2 sin(3π/7).
        assert_relative_eq!(
            g.diameter,
            2.0 * (3.0 * std::f64::consts::PI / 7.0).sin(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn central_quad_node_counts() {
        for n in 4..=14 {
            let pts = central_node_quad(n).unwrap();
            assert_eq!(pts.len(), n);
            let g = crate::geometry::polygon_metrics(&pts).unwrap();
            assert_relative_eq!(g.area, 1.0, epsilon = 1e-14);
        }
        assert!(central_node_quad(3).is_err());
    }
}
