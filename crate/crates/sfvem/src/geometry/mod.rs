//! Polygon and mesh primitives, mesh generators, and mesh file I/O.

mod metrics;
mod polymesh;
mod sdf;
mod structured;
mod voronoi;

pub mod io;

pub use metrics::{
    polygon_metrics, polygon_metrics_with, signed_fan_triangles, triangulate_fan,
    triangulate_fan_from, ElementGeometry, Triangle,
};
pub use polymesh::{BoundaryEdge, PolyMesh};
pub use sdf::DomainSdf;
pub use structured::{
    central_node_quad, generate_structured_quads, regular_polygon, split_quads_nonconvex, Rect,
};
pub use voronoi::{generate_voronoi_lloyd, VoronoiOptions};

use nalgebra::{Point2, Vector2};

pub type Point = Point2<f64>;
pub type Vector = Vector2<f64>;

/// Signed double area of the triangle (a, b, c); positive when CCW.
#[inline]
pub(crate) fn cross2(a: Vector, b: Vector) -> f64 {
    a.x * b.y - a.y * b.x
}
