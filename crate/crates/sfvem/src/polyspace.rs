//! Scaled polynomial bases on an element and the per-element selection of
//! the strain-projection degree.
//!
//! All polynomials live in the scaled coordinates ξ = (x − x_E)/h_E,
//! η = (y − y_E)/h_E. Monomials are ordered by total degree and, within a
//! degree, by descending ξ power: 1, ξ, η, ξ², ξη, η², ξ³, … Every matrix
//! layout downstream depends on this ordering.

use crate::geometry::{ElementGeometry, Point};
use nalgebra::{DMatrix, Matrix2x6, Vector2, Vector3};

/// Monomial bookkeeping shared by the bases and the moment tables.
pub mod monomials {
    /// Number of scalar monomials of total degree ≤ `deg`.
    pub const fn count(deg: usize) -> usize {
        (deg + 1) * (deg + 2) / 2
    }

    /// Exponents (r, k) of monomial `idx` in the canonical ordering.
    pub fn exponents(idx: usize) -> (usize, usize) {
        let mut d = 0;
        let mut base = 0;
        while base + d + 1 <= idx {
            base += d + 1;
            d += 1;
        }
        let k = idx - base;
        (d - k, k)
    }

    /// Index of ξ^r η^k.
    pub fn index(r: usize, k: usize) -> usize {
        let d = r + k;
        d * (d + 1) / 2 + k
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn ordering_round_trips() {
            // 1, ξ, η, ξ², ξη, η², ξ³, ξ²η, ...
            assert_eq!(exponents(0), (0, 0));
            assert_eq!(exponents(1), (1, 0));
            assert_eq!(exponents(2), (0, 1));
            assert_eq!(exponents(3), (2, 0));
            assert_eq!(exponents(4), (1, 1));
            assert_eq!(exponents(5), (0, 2));
            for idx in 0..count(8) {
                let (r, k) = exponents(idx);
                assert_eq!(index(r, k), idx);
            }
        }
    }
}

/// Dense scalar polynomial in (ξ, η) with coefficients in monomial order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    pub coeffs: Vec<f64>,
}

impl Poly2 {
    pub fn zero(max_deg: usize) -> Self {
        Poly2 {
            coeffs: vec![0.0; monomials::count(max_deg)],
        }
    }

    pub fn monomial(r: usize, k: usize) -> Self {
        let mut p = Poly2::zero(r + k);
        p.coeffs[monomials::index(r, k)] = 1.0;
        p
    }

    pub fn eval(&self, xi: f64, eta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| {
                let (r, k) = monomials::exponents(i);
                c * xi.powi(r as i32) * eta.powi(k as i32)
            })
            .sum()
    }

    /// d/dξ, staying in ξη-space (no h_E factor).
    pub fn dxi(&self) -> Poly2 {
        let mut out = Poly2::zero(0);
        out.coeffs.clear();
        out.coeffs.resize(self.coeffs.len().max(1), 0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (r, k) = monomials::exponents(i);
            if r > 0 {
                out.coeffs[monomials::index(r - 1, k)] += r as f64 * c;
            }
        }
        out
    }

    pub fn deta(&self) -> Poly2 {
        let mut out = Poly2::zero(0);
        out.coeffs.clear();
        out.coeffs.resize(self.coeffs.len().max(1), 0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (r, k) = monomials::exponents(i);
            if k > 0 {
                out.coeffs[monomials::index(r, k - 1)] += k as f64 * c;
            }
        }
        out
    }
}

/// The six linear vector fields m₁..m₆ on an element: two translations, the
/// rotation (−η, ξ), and the three independent stretch/shear fields (η, ξ),
/// (ξ, 0), (0, η).
#[derive(Debug, Clone)]
pub struct VectorLinearBasis {
    pub centroid: Point,
    pub diameter: f64,
}

impl VectorLinearBasis {
    pub fn new(geom: &ElementGeometry) -> Self {
        VectorLinearBasis {
            centroid: geom.centroid,
            diameter: geom.diameter,
        }
    }

    #[inline]
    pub fn scaled(&self, x: Point) -> (f64, f64) {
        (
            (x.x - self.centroid.x) / self.diameter,
            (x.y - self.centroid.y) / self.diameter,
        )
    }

    /// m_α(x) for α = 0..6 as the columns of a 2×6 matrix.
    pub fn eval(&self, x: Point) -> Matrix2x6<f64> {
        let (xi, eta) = self.scaled(x);
        Matrix2x6::from_columns(&[
            Vector2::new(1.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(-eta, xi),
            Vector2::new(eta, xi),
            Vector2::new(xi, 0.0),
            Vector2::new(0.0, eta),
        ])
    }

    /// Voigt strain S·m_α (constant per basis member, carries 1/h_E).
    pub fn strain(&self, alpha: usize) -> Vector3<f64> {
        let ih = 1.0 / self.diameter;
        match alpha {
            0 | 1 | 2 => Vector3::zeros(),
            3 => Vector3::new(0.0, 0.0, 2.0 * ih),
            4 => Vector3::new(ih, 0.0, 0.0),
            _ => Vector3::new(0.0, ih, 0.0),
        }
    }
}

/// The 3×3n_ℓ matrix N^p of Voigt-replicated scalar monomials of degree ≤ ℓ,
/// together with its divergence ∂N^p as polynomial coefficient data.
#[derive(Debug, Clone)]
pub struct StrainPolyBasis {
    pub ell: usize,
    pub centroid: Point,
    pub diameter: f64,
    /// divergence[c] = (row-1 polynomial, row-2 polynomial) of column c,
    /// in physical units (coefficients carry 1/h_E).
    divergence: Vec<(Poly2, Poly2)>,
}

impl StrainPolyBasis {
    pub fn new(geom: &ElementGeometry, ell: usize) -> Self {
        let ih = 1.0 / geom.diameter;
        let n_scalar = monomials::count(ell);
        let mut divergence = Vec::with_capacity(3 * n_scalar);
        for a in 0..n_scalar {
            let (r, k) = monomials::exponents(a);
            let m = Poly2::monomial(r, k);
            let dx = scale(m.dxi(), ih);
            let dy = scale(m.deta(), ih);
            // Voigt row 1 holds ε₁₁ content, row 2 holds ε₂₂, row 3 holds ε₁₂.
            divergence.push((dx.clone(), zero_like(&dx)));
            divergence.push((zero_like(&dy), dy.clone()));
            divergence.push((dy, dx2(&m, ih)));
        }
        StrainPolyBasis {
            ell,
            centroid: geom.centroid,
            diameter: geom.diameter,
            divergence,
        }
    }

    pub fn num_scalar(&self) -> usize {
        monomials::count(self.ell)
    }

    pub fn num_cols(&self) -> usize {
        3 * self.num_scalar()
    }

    #[inline]
    pub fn scaled(&self, x: Point) -> (f64, f64) {
        (
            (x.x - self.centroid.x) / self.diameter,
            (x.y - self.centroid.y) / self.diameter,
        )
    }

    /// N^p(x): 3 × 3n_ℓ.
    pub fn eval(&self, x: Point) -> DMatrix<f64> {
        let (xi, eta) = self.scaled(x);
        let n = self.num_scalar();
        let mut out = DMatrix::zeros(3, 3 * n);
        for a in 0..n {
            let (r, k) = monomials::exponents(a);
            let v = xi.powi(r as i32) * eta.powi(k as i32);
            out[(0, 3 * a)] = v;
            out[(1, 3 * a + 1)] = v;
            out[(2, 3 * a + 2)] = v;
        }
        out
    }

    /// ∂N^p column c as two scalar polynomials (x- and y-components of the
    /// divergence), identically zero for ℓ = 0.
    pub fn divergence(&self, col: usize) -> &(Poly2, Poly2) {
        &self.divergence[col]
    }

    /// Evaluates ∂N^p at a point: 2 × 3n_ℓ.
    pub fn eval_divergence(&self, x: Point) -> DMatrix<f64> {
        let (xi, eta) = self.scaled(x);
        let mut out = DMatrix::zeros(2, self.num_cols());
        for c in 0..self.num_cols() {
            let (p1, p2) = &self.divergence[c];
            out[(0, c)] = p1.eval(xi, eta);
            out[(1, c)] = p2.eval(xi, eta);
        }
        out
    }
}

fn scale(mut p: Poly2, s: f64) -> Poly2 {
    for c in &mut p.coeffs {
        *c *= s;
    }
    p
}

fn zero_like(p: &Poly2) -> Poly2 {
    Poly2 {
        coeffs: vec![0.0; p.coeffs.len()],
    }
}

fn dx2(m: &Poly2, ih: f64) -> Poly2 {
    scale(m.dxi(), ih)
}

/// Strategy for picking the strain-projection degree ℓ(E).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreePolicy {
    /// Smallest ℓ with N_E ≤ 2ℓ + 3 (sufficient bound; fails on regular
    /// polygons at equality).
    PaperSufficient,
    /// Smallest ℓ with N_E ≤ 2ℓ + 2, safe on every tested family.
    StrictRegular,
    /// Starts from the strict bound and escalates until the element
    /// eigenvalue check reports no spurious mode.
    Verified,
    /// Fixed ℓ for studies.
    Fixed(usize),
}

impl Default for DegreePolicy {
    fn default() -> Self {
        DegreePolicy::StrictRegular
    }
}

/// Base degree for an element with `n_vertices` vertices.
///
/// For `Verified` this returns the strict starting point; the element
/// builder escalates from there using the eigenvalue check.
pub fn select_degree(n_vertices: usize, policy: DegreePolicy) -> usize {
    assert!(n_vertices >= 3, "polygon needs at least 3 vertices");
    match policy {
        DegreePolicy::PaperSufficient => n_vertices.saturating_sub(3).div_ceil(2),
        DegreePolicy::StrictRegular | DegreePolicy::Verified => {
            n_vertices.saturating_sub(2).div_ceil(2)
        }
        DegreePolicy::Fixed(ell) => ell,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_metrics;
    use approx::assert_relative_eq;

    fn unit_square() -> ElementGeometry {
        polygon_metrics(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn degree_selection_matches_bounds() {
        assert_eq!(select_degree(3, DegreePolicy::PaperSufficient), 0);
        assert_eq!(select_degree(4, DegreePolicy::PaperSufficient), 1);
        assert_eq!(select_degree(5, DegreePolicy::PaperSufficient), 1);
        assert_eq!(select_degree(5, DegreePolicy::StrictRegular), 2);
        assert_eq!(select_degree(7, DegreePolicy::StrictRegular), 3);
        assert_eq!(select_degree(6, DegreePolicy::Fixed(1)), 1);
    }

    #[test]
    fn degree_selection_monotone_and_ordered() {
        let mut prev_paper = 0;
        let mut prev_strict = 0;
        for n in 3..=30 {
            let p = select_degree(n, DegreePolicy::PaperSufficient);
            let s = select_degree(n, DegreePolicy::StrictRegular);
            assert!(p >= prev_paper && s >= prev_strict);
            assert!(s >= p);
            assert!(n <= 2 * p + 3);
            assert!(n <= 2 * s + 2 || n == 3);
            prev_paper = p;
            prev_strict = s;
        }
    }

    #[test]
    fn vector_basis_at_centroid_and_corner() {
        let g = unit_square();
        let basis = VectorLinearBasis::new(&g);
        let at_c = basis.eval(g.centroid);
        assert_eq!(at_c.column(0), Vector2::new(1.0, 0.0));
        assert_eq!(at_c.column(1), Vector2::new(0.0, 1.0));
        for alpha in 2..6 {
            assert_relative_eq!(at_c.column(alpha).norm(), 0.0, epsilon = 1e-15);
        }
        // At (1,1): ξ = η = 1/(2√2), so m₄ = (η, ξ) = (1, 1)/(2√2).
        let v = basis.eval(Point::new(1.0, 1.0));
        let expect = 1.0 / (2.0 * 2.0_f64.sqrt());
        assert_relative_eq!(v[(0, 3)], expect, epsilon = 1e-15);
        assert_relative_eq!(v[(1, 3)], expect, epsilon = 1e-15);
    }

    #[test]
    fn rotation_field_is_orthogonal_to_radius() {
        let g = unit_square();
        let basis = VectorLinearBasis::new(&g);
        for &(x, y) in &[(0.3, 0.9), (1.0, 0.0), (0.1, 0.2)] {
            let p = Point::new(x, y);
            let m3 = basis.eval(p).column(2).into_owned();
            let r = p - g.centroid;
            assert_relative_eq!(m3.dot(&r), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn rigid_modes_have_zero_strain() {
        let g = unit_square();
        let basis = VectorLinearBasis::new(&g);
        for alpha in 0..3 {
            assert_eq!(basis.strain(alpha), Vector3::zeros());
        }
        assert_relative_eq!(basis.strain(3)[2], 2.0 / g.diameter, epsilon = 1e-15);
    }

    #[test]
    fn strain_basis_shapes() {
        let g = unit_square();
        let b0 = StrainPolyBasis::new(&g, 0);
        let id = b0.eval(Point::new(0.3, 0.8));
        assert_eq!(id.shape(), (3, 3));
        assert_relative_eq!((id - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-15);

        let b1 = StrainPolyBasis::new(&g, 1);
        let at_c = b1.eval(g.centroid);
        assert_eq!(at_c.shape(), (3, 9));
        for a in 0..3 {
            for b in 0..3 {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_relative_eq!(at_c[(a, b)], expect, epsilon = 1e-15);
                assert_relative_eq!(at_c[(a, 3 + b)], 0.0, epsilon = 1e-15);
                assert_relative_eq!(at_c[(a, 6 + b)], 0.0, epsilon = 1e-15);
            }
        }

        let b2 = StrainPolyBasis::new(&g, 2);
        assert_eq!(b2.num_cols(), 18);
    }

    #[test]
    fn divergence_table_matches_definition() {
        let g = unit_square();
        let b0 = StrainPolyBasis::new(&g, 0);
        for c in 0..3 {
            let (p1, p2) = b0.divergence(c);
            assert!(p1.coeffs.iter().all(|&v| v == 0.0));
            assert!(p2.coeffs.iter().all(|&v| v == 0.0));
        }
        // Column (ξ, 0, 0): divergence (1/h_E, 0).
        let b1 = StrainPolyBasis::new(&g, 1);
        let (p1, p2) = b1.divergence(3);
        assert_relative_eq!(p1.eval(0.4, -0.2), 1.0 / g.diameter, epsilon = 1e-15);
        assert_relative_eq!(p2.eval(0.4, -0.2), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn divergence_matches_finite_differences() {
        let g = polygon_metrics(&[
            Point::new(0.1, -0.2),
            Point::new(1.3, 0.1),
            Point::new(1.1, 1.4),
            Point::new(-0.3, 0.9),
        ])
        .unwrap();
        let basis = StrainPolyBasis::new(&g, 3);
        let h = 1e-6;
        for &(x, y) in &[(0.5, 0.5), (0.9, 0.2), (0.2, 0.8)] {
            let p = Point::new(x, y);
            let div = basis.eval_divergence(p);
            let np_xp = basis.eval(Point::new(x + h, y));
            let np_xm = basis.eval(Point::new(x - h, y));
            let np_yp = basis.eval(Point::new(x, y + h));
            let np_ym = basis.eval(Point::new(x, y - h));
            for c in 0..basis.num_cols() {
                // ∂ rows: (d/dx ε₁₁ + d/dy ε₁₂, d/dx ε₁₂ + d/dy ε₂₂) with the
                // Voigt slot layout of N^p.
                let d11dx = (np_xp[(0, c)] - np_xm[(0, c)]) / (2.0 * h);
                let d22dy = (np_yp[(1, c)] - np_ym[(1, c)]) / (2.0 * h);
                let d12dx = (np_xp[(2, c)] - np_xm[(2, c)]) / (2.0 * h);
                let d12dy = (np_yp[(2, c)] - np_ym[(2, c)]) / (2.0 * h);
                let fd1 = d11dx + d12dy;
                let fd2 = d12dx + d22dy;
                assert_relative_eq!(div[(0, c)], fd1, epsilon = 1e-6, max_relative = 1e-6);
                assert_relative_eq!(div[(1, c)], fd2, epsilon = 1e-6, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn basis_is_scale_and_translation_covariant() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.2, 1.1),
            Point::new(-0.1, 0.8),
        ];
        let g1 = polygon_metrics(&pts).unwrap();
        let s = 3.7;
        let t = Vector2::new(-2.0, 5.0);
        let moved: Vec<Point> = pts.iter().map(|p| Point::from(p.coords * s + t)).collect();
        let g2 = polygon_metrics(&moved).unwrap();
        let b1 = VectorLinearBasis::new(&g1);
        let b2 = VectorLinearBasis::new(&g2);
        let x1 = Point::new(0.4, 0.3);
        let x2 = Point::from(x1.coords * s + t);
        assert_relative_eq!((b1.eval(x1) - b2.eval(x2)).norm(), 0.0, epsilon = 1e-13);
    }
}
