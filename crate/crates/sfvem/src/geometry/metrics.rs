//! Per-element derived data: centroid, diameter, area, edge normals.

use super::{cross2, Point, Vector};
use crate::error::{Error, Result};

/// Geometric data of one polygonal element.
///
/// Vertices are stored counter-clockwise. Edge `i` joins vertex `i` to
/// vertex `(i + 1) % n` and carries the unit outward normal.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub vertices: Vec<Point>,
    pub centroid: Point,
    pub diameter: f64,
    pub area: f64,
    pub edge_lengths: Vec<f64>,
    pub edge_normals: Vec<Vector>,
}

impl ElementGeometry {
    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn perimeter(&self) -> f64 {
        self.edge_lengths.iter().sum()
    }

    /// Scaled local coordinates ξ = (x − x_E)/h_E, η = (y − y_E)/h_E.
    #[inline]
    pub fn scaled(&self, x: Point) -> (f64, f64) {
        (
            (x.x - self.centroid.x) / self.diameter,
            (x.y - self.centroid.y) / self.diameter,
        )
    }

    /// Endpoints of edge `i`.
    #[inline]
    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    pub fn signed_area(&self) -> f64 {
        0.5 * cross2(self.b - self.a, self.c - self.a)
    }
}

/// Computes area (shoelace), centroid, diameter, edge lengths and unit
/// outward normals of a simple counter-clockwise polygon.
///
/// Clockwise input is rejected when `strict` is set and silently reoriented
/// otherwise. Polygons with area below `1e-14 · h_E²` are rejected.
pub fn polygon_metrics(vertices: &[Point]) -> Result<ElementGeometry> {
    polygon_metrics_with(vertices, false)
}

pub fn polygon_metrics_with(vertices: &[Point], strict: bool) -> Result<ElementGeometry> {
    if vertices.len() < 3 {
        return Err(Error::DegeneratePolygon(format!(
            "{} vertices (need at least 3)",
            vertices.len()
        )));
    }
    let mut verts: Vec<Point> = vertices.to_vec();
    let signed = shoelace(&verts);
    if signed < 0.0 {
        if strict {
            return Err(Error::DegeneratePolygon(
                "clockwise orientation rejected in strict mode".into(),
            ));
        }
        verts.reverse();
    }

    let n = verts.len();
    let area = shoelace(&verts);
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            diameter = diameter.max((verts[i] - verts[j]).norm());
        }
    }
    if !(area > 1e-14 * diameter * diameter) {
        return Err(Error::DegeneratePolygon(format!(
            "area {area:.3e} below tolerance for diameter {diameter:.3e}"
        )));
    }

    // Centroid of the polygon interior (not the vertex average).
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        let w = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    let centroid = Point::new(cx / (6.0 * area), cy / (6.0 * area));

    let mut edge_lengths = Vec::with_capacity(n);
    let mut edge_normals = Vec::with_capacity(n);
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        let e = q - p;
        let len = e.norm();
        if len <= 1e-15 * diameter {
            return Err(Error::DegeneratePolygon(format!(
                "zero-length edge between vertices {i} and {}",
                (i + 1) % n
            )));
        }
        edge_lengths.push(len);
        // Outward normal of a CCW polygon: rotate the edge direction by -90°.
        edge_normals.push(Vector::new(e.y / len, -e.x / len));
    }

    Ok(ElementGeometry {
        vertices: verts,
        centroid,
        diameter,
        area,
        edge_lengths,
        edge_normals,
    })
}

/// Fans the polygon into `N_E` triangles with apex at the centroid.
///
/// Fails if the polygon is not star-convex with respect to the centroid
/// (some fan triangle has non-positive orientation); the caller may then
/// supply another interior apex via [`triangulate_fan_from`].
pub fn triangulate_fan(geom: &ElementGeometry) -> Result<Vec<Triangle>> {
    triangulate_fan_from(geom, geom.centroid)
}

pub fn triangulate_fan_from(geom: &ElementGeometry, apex: Point) -> Result<Vec<Triangle>> {
    let n = geom.num_vertices();
    let mut tris = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = geom.edge(i);
        let t = Triangle { a: apex, b: a, c: b };
        if t.signed_area() <= 0.0 {
            return Err(Error::NotStarConvex { vertex: i });
        }
        tris.push(t);
    }
    Ok(tris)
}

/// Signed fan triangles from the centroid, valid for any simple polygon.
///
/// Triangles may have negative orientation on nonconvex cells; their signed
/// contributions cancel so that summing any 2-form over them reproduces the
/// polygon integral exactly.
pub fn signed_fan_triangles(geom: &ElementGeometry) -> Vec<Triangle> {
    let n = geom.num_vertices();
    (0..n)
        .map(|i| {
            let (a, b) = geom.edge(i);
            Triangle {
                a: geom.centroid,
                b: a,
                c: b,
            }
        })
        .collect()
}

fn shoelace(verts: &[Point]) -> f64 {
    let n = verts.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    0.5 * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn unit_square_metrics() {
        let g = polygon_metrics(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        assert_relative_eq!(g.area, 1.0, epsilon = 1e-15);
        assert_relative_eq!(g.centroid.x, 0.5, epsilon = 1e-15);
        assert_relative_eq!(g.centroid.y, 0.5, epsilon = 1e-15);
        assert_relative_eq!(g.diameter, 2.0_f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn right_triangle_metrics() {
        let g = polygon_metrics(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_relative_eq!(g.area, 0.5, epsilon = 1e-15);
        assert_relative_eq!(g.centroid.x, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(g.centroid.y, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn l_polygon_against_fan_oracle() {
        // Nonconvex L: area 3 and centroid (5/6, 5/6) by decomposition into
        // the 2x2 square minus its upper-right unit square.
        let g = polygon_metrics(&pts(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ]))
        .unwrap();
        assert_relative_eq!(g.area, 3.0, epsilon = 1e-14);
        assert_relative_eq!(g.centroid.x, 5.0 / 6.0, epsilon = 1e-14);
        assert_relative_eq!(g.centroid.y, 5.0 / 6.0, epsilon = 1e-14);
        assert_relative_eq!(g.diameter, 8.0_f64.sqrt(), epsilon = 1e-14);

        // Signed-fan oracle: areas and first moments must agree.
        let tris = signed_fan_triangles(&g);
        let area: f64 = tris.iter().map(|t| t.signed_area()).sum();
        assert_relative_eq!(area, 3.0, epsilon = 1e-13);
        let mx: f64 = tris
            .iter()
            .map(|t| t.signed_area() * (t.a.x + t.b.x + t.c.x) / 3.0)
            .sum();
        assert_relative_eq!(mx / area, g.centroid.x, epsilon = 1e-13);
    }

    #[test]
    fn clockwise_is_reoriented() {
        let g = polygon_metrics(&pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)])).unwrap();
        assert!(g.area > 0.0);
        assert!(polygon_metrics_with(
            &pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]),
            true
        )
        .is_err());
    }

    #[test]
    fn degenerate_rejected() {
        assert!(polygon_metrics(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])).is_err());
        assert!(polygon_metrics(&pts(&[(0.0, 0.0), (1.0, 0.0)])).is_err());
    }

    #[test]
    fn normals_are_unit_outward_and_closed() {
        let g = polygon_metrics(&pts(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ]))
        .unwrap();
        let mut closure = Vector::zeros();
        for i in 0..g.num_vertices() {
            let n = g.edge_normals[i];
            assert_relative_eq!(n.norm(), 1.0, epsilon = 1e-12);
            closure += g.edge_lengths[i] * n;
        }
        assert!(closure.norm() <= 1e-12 * g.perimeter());
    }

    #[test]
    fn fan_square_and_hexagon() {
        let g = polygon_metrics(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap();
        let tris = triangulate_fan(&g).unwrap();
        assert_eq!(tris.len(), 4);
        for t in &tris {
            assert_relative_eq!(t.signed_area(), 0.25, epsilon = 1e-14);
        }

        let hexa: Vec<Point> = (0..6)
            .map(|k| {
                let a = std::f64::consts::PI / 3.0 * k as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let g = polygon_metrics(&hexa).unwrap();
        let tris = triangulate_fan(&g).unwrap();
        let total: f64 = tris.iter().map(|t| t.signed_area()).sum();
        assert_relative_eq!(total, g.area, epsilon = 1e-12 * g.area);
        for t in &tris {
            assert_relative_eq!(t.signed_area(), g.area / 6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fan_rejects_non_star_convex() {
        // A crescent-like polygon whose centroid lies outside.
        let poly = pts(&[
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 0.4),
            (0.4, 0.4),
            (0.4, 4.0),
            (0.0, 4.0),
        ]);
        let g = polygon_metrics(&poly).unwrap();
        // Centroid of this thin L sits outside the material region.
        let apex_ok = triangulate_fan(&g);
        assert!(apex_ok.is_err());
        // An interior apex provided by the caller succeeds.
        let tris = triangulate_fan_from(&g, Point::new(0.2, 0.2)).unwrap();
        let total: f64 = tris.iter().map(|t| t.signed_area()).sum();
        assert_relative_eq!(total, g.area, epsilon = 1e-12);
    }
}
