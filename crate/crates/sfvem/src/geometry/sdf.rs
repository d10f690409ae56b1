//! Signed-distance descriptions of the benchmark domains.
//!
//! Each domain is a boolean combination of half-plane and circle primitives.
//! The combined value is negative inside, positive outside. Per-primitive
//! distances drive the seed-reflection step of the Voronoi generator and the
//! classification of boundary edges into markers.

use super::{Point, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSdf {
    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Quarter plate `[0, l]²` with a quarter hole of radius `a` at the origin.
    QuarterPlateHole { l: f64, a: f64 },
    /// Annulus of inner radius `a`, outer radius `b`, centered at the origin.
    Annulus { a: f64, b: f64 },
}

impl DomainSdf {
    pub fn unit_square() -> Self {
        DomainSdf::Rectangle {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        }
    }

    pub fn num_primitives(&self) -> usize {
        match self {
            DomainSdf::Rectangle { .. } => 4,
            DomainSdf::QuarterPlateHole { .. } => 5,
            DomainSdf::Annulus { .. } => 2,
        }
    }

    /// Signed distance to primitive `j`; negative on the domain side.
    pub fn primitive_distance(&self, j: usize, p: Point) -> f64 {
        match *self {
            DomainSdf::Rectangle { x0, x1, y0, y1 } => match j {
                0 => x0 - p.x,
                1 => p.x - x1,
                2 => y0 - p.y,
                _ => p.y - y1,
            },
            DomainSdf::QuarterPlateHole { l, a } => match j {
                0 => -p.x,
                1 => p.x - l,
                2 => -p.y,
                3 => p.y - l,
                _ => a - p.coords.norm(),
            },
            DomainSdf::Annulus { a, b } => match j {
                0 => p.coords.norm() - b,
                _ => a - p.coords.norm(),
            },
        }
    }

    /// Unit gradient of primitive `j` at `p` (direction of increasing distance).
    pub fn primitive_gradient(&self, j: usize, p: Point) -> Vector {
        match *self {
            DomainSdf::Rectangle { .. } => match j {
                0 => Vector::new(-1.0, 0.0),
                1 => Vector::new(1.0, 0.0),
                2 => Vector::new(0.0, -1.0),
                _ => Vector::new(0.0, 1.0),
            },
            DomainSdf::QuarterPlateHole { .. } => match j {
                0 => Vector::new(-1.0, 0.0),
                1 => Vector::new(1.0, 0.0),
                2 => Vector::new(0.0, -1.0),
                3 => Vector::new(0.0, 1.0),
                _ => -radial(p),
            },
            DomainSdf::Annulus { .. } => match j {
                0 => radial(p),
                _ => -radial(p),
            },
        }
    }

    /// Combined signed distance: negative inside, positive outside.
    pub fn distance(&self, p: Point) -> f64 {
        (0..self.num_primitives())
            .map(|j| self.primitive_distance(j, p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.distance(p) < 0.0
    }

    pub fn bbox(&self) -> (Point, Point) {
        match *self {
            DomainSdf::Rectangle { x0, x1, y0, y1 } => (Point::new(x0, y0), Point::new(x1, y1)),
            DomainSdf::QuarterPlateHole { l, .. } => (Point::new(0.0, 0.0), Point::new(l, l)),
            DomainSdf::Annulus { b, .. } => (Point::new(-b, -b), Point::new(b, b)),
        }
    }

    /// Exact area of the continuous domain.
    pub fn area(&self) -> f64 {
        match *self {
            DomainSdf::Rectangle { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
            DomainSdf::QuarterPlateHole { l, a } => l * l - 0.25 * std::f64::consts::PI * a * a,
            DomainSdf::Annulus { a, b } => std::f64::consts::PI * (b * b - a * a),
        }
    }

    pub fn length_scale(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    /// Marker for a boundary edge with the given midpoint.
    ///
    /// Straight walls are matched within a tight tolerance; everything else
    /// is attributed to the nearest curved primitive. Edges that match no
    /// primitive within a tenth of the domain scale are reported as `None`.
    pub fn classify_boundary_edge(&self, mid: Point) -> Option<&'static str> {
        let scale = self.length_scale();
        let tol = 1e-7 * scale;
        match *self {
            DomainSdf::Rectangle { .. } => {
                let names = ["left", "right", "bottom", "top"];
                for j in 0..4 {
                    if self.primitive_distance(j, mid).abs() < tol {
                        return Some(names[j]);
                    }
                }
                None
            }
            DomainSdf::QuarterPlateHole { .. } => {
                let names = ["left", "right", "bottom", "top"];
                for j in 0..4 {
                    if self.primitive_distance(j, mid).abs() < tol {
                        return Some(names[j]);
                    }
                }
                if self.primitive_distance(4, mid).abs() < 0.1 * scale {
                    return Some("hole");
                }
                None
            }
            DomainSdf::Annulus { .. } => {
                let d_outer = self.primitive_distance(0, mid).abs();
                let d_inner = self.primitive_distance(1, mid).abs();
                if d_outer.min(d_inner) > 0.1 * scale {
                    return None;
                }
                Some(if d_inner < d_outer { "inner" } else { "outer" })
            }
        }
    }

    /// Projects a point lying near primitive `j` onto its zero level set.
    pub fn project_to_primitive(&self, j: usize, p: Point) -> Point {
        let d = self.primitive_distance(j, p);
        p - d * self.primitive_gradient(j, p)
    }
}

fn radial(p: Point) -> Vector {
    let r = p.coords.norm();
    if r == 0.0 {
        Vector::new(1.0, 0.0)
    } else {
        p.coords / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rectangle_sign_convention() {
        let d = DomainSdf::Rectangle {
            x0: 0.0,
            x1: 2.0,
            y0: 0.0,
            y1: 1.0,
        };
        assert!(d.distance(Point::new(1.0, 0.5)) < 0.0);
        assert!(d.distance(Point::new(-0.1, 0.5)) > 0.0);
        assert_relative_eq!(d.distance(Point::new(1.0, 0.9)), -0.1, epsilon = 1e-15);
        assert_relative_eq!(d.area(), 2.0);
    }

    #[test]
    fn annulus_sign_convention() {
        let d = DomainSdf::Annulus { a: 1.0, b: 5.0 };
        assert!(d.distance(Point::new(3.0, 0.0)) < 0.0);
        assert!(d.distance(Point::new(0.5, 0.0)) > 0.0);
        assert!(d.distance(Point::new(5.5, 0.0)) > 0.0);
        assert_relative_eq!(d.distance(Point::new(0.0, 1.0)), 0.0, epsilon = 1e-15);
        assert_eq!(d.classify_boundary_edge(Point::new(0.0, 1.01)), Some("inner"));
        assert_eq!(d.classify_boundary_edge(Point::new(4.99, 0.0)), Some("outer"));
    }

    #[test]
    fn quarter_plate_markers() {
        let d = DomainSdf::QuarterPlateHole { l: 5.0, a: 1.0 };
        assert!(d.contains(Point::new(2.0, 2.0)));
        assert!(!d.contains(Point::new(0.5, 0.5)));
        assert_eq!(d.classify_boundary_edge(Point::new(0.0, 3.0)), Some("left"));
        assert_eq!(d.classify_boundary_edge(Point::new(3.0, 0.0)), Some("bottom"));
        assert_eq!(d.classify_boundary_edge(Point::new(5.0, 2.0)), Some("right"));
        assert_eq!(d.classify_boundary_edge(Point::new(2.0, 5.0)), Some("top"));
        let m = Point::new(0.99 * (0.5f64).sqrt(), 0.99 * (0.5f64).sqrt());
        assert_eq!(d.classify_boundary_edge(m), Some("hole"));
    }

    #[test]
    fn projection_restores_boundary() {
        let d = DomainSdf::Annulus { a: 1.0, b: 5.0 };
        let p = d.project_to_primitive(1, Point::new(0.7, 0.8));
        assert_relative_eq!(p.coords.norm(), 1.0, epsilon = 1e-14);
    }
}
