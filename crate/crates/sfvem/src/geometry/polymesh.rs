//! Polygonal mesh container with tiling validation.

use super::metrics::{polygon_metrics, ElementGeometry};
use super::Point;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// One boundary edge (undirected vertex pair) with its condition marker.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub marker: String,
}

/// Decomposition of the domain into nonoverlapping polygons.
///
/// Cells are stored as counter-clockwise vertex loops; clockwise input is
/// reoriented on construction. Construction verifies that cells tile: every
/// interior edge is shared by exactly two cells with opposite orientation
/// while every remaining edge carries a boundary marker.
#[derive(Debug, Clone)]
pub struct PolyMesh {
    pub vertices: Vec<Point>,
    pub cells: Vec<Vec<usize>>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

impl PolyMesh {
    pub fn new(
        vertices: Vec<Point>,
        cells: Vec<Vec<usize>>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mut mesh = PolyMesh {
            vertices,
            cells,
            boundary_edges,
        };
        mesh.normalize_orientation()?;
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Point> {
        self.cells[cell].iter().map(|&i| self.vertices[i]).collect()
    }

    pub fn cell_geometry(&self, cell: usize) -> Result<ElementGeometry> {
        polygon_metrics(&self.cell_points(cell))
    }

    /// Maximum element diameter over the mesh.
    pub fn h_max(&self) -> Result<f64> {
        let mut h: f64 = 0.0;
        for c in 0..self.num_cells() {
            h = h.max(self.cell_geometry(c)?.diameter);
        }
        Ok(h)
    }

    pub fn total_area(&self) -> Result<f64> {
        let mut a = 0.0;
        for c in 0..self.num_cells() {
            a += self.cell_geometry(c)?.area;
        }
        Ok(a)
    }

    /// Vertices incident to boundary edges with the given marker.
    pub fn boundary_vertices(&self, marker: &str) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary_edges
            .iter()
            .filter(|e| e.marker == marker)
            .flat_map(|e| [e.a, e.b])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn markers(&self) -> Vec<String> {
        let mut m: Vec<String> = self
            .boundary_edges
            .iter()
            .map(|e| e.marker.clone())
            .collect();
        m.sort();
        m.dedup();
        m
    }

    fn normalize_orientation(&mut self) -> Result<()> {
        for (ci, cell) in self.cells.iter_mut().enumerate() {
            if cell.len() < 3 {
                return Err(Error::InvalidMesh(format!(
                    "cell {ci} has {} vertices",
                    cell.len()
                )));
            }
            for &v in cell.iter() {
                if v >= self.vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "cell {ci} references vertex {v} out of range ({} vertices)",
                        self.vertices.len()
                    )));
                }
            }
            let mut signed = 0.0;
            for i in 0..cell.len() {
                let p = self.vertices[cell[i]];
                let q = self.vertices[cell[(i + 1) % cell.len()]];
                signed += p.x * q.y - q.x * p.y;
            }
            if signed < 0.0 {
                cell.reverse();
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (ci, cell) in self.cells.iter().enumerate() {
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != cell.len() {
                return Err(Error::InvalidMesh(format!(
                    "cell {ci} repeats a vertex in its loop"
                )));
            }
            polygon_metrics(&self.cell_points(ci)).map_err(|e| {
                Error::InvalidMesh(format!("cell {ci} is not a valid polygon: {e}"))
            })?;
        }

        // Count undirected edges over all cells.
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for cell in &self.cells {
            for i in 0..cell.len() {
                let a = cell[i];
                let b = cell[(i + 1) % cell.len()];
                let key = (a.min(b), a.max(b));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        let mut marked: HashMap<(usize, usize), &str> = HashMap::new();
        for e in &self.boundary_edges {
            marked.insert((e.a.min(e.b), e.a.max(e.b)), &e.marker);
        }
        for (edge, count) in &edge_count {
            match count {
                1 => {
                    if !marked.contains_key(edge) {
                        return Err(Error::InvalidMesh(format!(
                            "edge ({}, {}) lies on the boundary but carries no marker",
                            edge.0, edge.1
                        )));
                    }
                }
                2 => {}
                n => {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) is shared by {n} cells",
                        edge.0, edge.1
                    )))
                }
            }
        }
        for edge in marked.keys() {
            match edge_count.get(edge) {
                Some(1) => {}
                Some(_) => {
                    return Err(Error::InvalidMesh(format!(
                        "marked edge ({}, {}) is interior",
                        edge.0, edge.1
                    )))
                }
                None => {
                    return Err(Error::InvalidMesh(format!(
                        "marked edge ({}, {}) does not exist in any cell",
                        edge.0, edge.1
                    )))
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_quads() -> PolyMesh {
        // Two unit quads side by side on [0,2]x[0,1].
        let vertices = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let cells = vec![vec![0, 1, 4, 5], vec![1, 2, 3, 4]];
        let boundary = [
            (0, 1, "bottom"),
            (1, 2, "bottom"),
            (2, 3, "right"),
            (3, 4, "top"),
            (4, 5, "top"),
            (5, 0, "left"),
        ]
        .into_iter()
        .map(|(a, b, m)| BoundaryEdge {
            a,
            b,
            marker: m.to_string(),
        })
        .collect();
        PolyMesh::new(vertices, cells, boundary).unwrap()
    }

    #[test]
    fn valid_mesh_accepted() {
        let mesh = two_quads();
        assert_eq!(mesh.num_cells(), 2);
        assert!((mesh.total_area().unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(mesh.boundary_vertices("left"), vec![0, 5]);
    }

    #[test]
    fn clockwise_cell_reoriented() {
        let mut mesh = two_quads();
        mesh.cells[0].reverse();
        let rebuilt = PolyMesh::new(
            mesh.vertices.clone(),
            mesh.cells.clone(),
            mesh.boundary_edges.clone(),
        )
        .unwrap();
        let g = rebuilt.cell_geometry(0).unwrap();
        assert!(g.area > 0.0);
    }

    #[test]
    fn unmarked_boundary_edge_rejected() {
        let mesh = two_quads();
        let mut boundary = mesh.boundary_edges.clone();
        boundary.pop();
        assert!(PolyMesh::new(mesh.vertices.clone(), mesh.cells.clone(), boundary).is_err());
    }

    #[test]
    fn out_of_range_index_rejected() {
        let mesh = two_quads();
        let mut cells = mesh.cells.clone();
        cells[1][0] = 99;
        assert!(PolyMesh::new(mesh.vertices.clone(), cells, mesh.boundary_edges.clone()).is_err());
    }
}
