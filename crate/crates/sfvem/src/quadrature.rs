//! 1-D Gauss and Gauss-Lobatto rules, scaled boundary cubature (SBC) over
//! polygons, and monomial moment tables.

use crate::error::{Error, Result};
use crate::geometry::{signed_fan_triangles, ElementGeometry, Point};
use crate::polyspace::monomials;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same rule mapped to [0, 1].
    pub fn unit_interval(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&t, &w)| (0.5 * (t + 1.0), 0.5 * w))
    }
}

#[derive(Hash, PartialEq, Eq, Clone, Copy)]
enum RuleKind {
    Legendre,
    Lobatto,
}

fn rule_cache() -> &'static RwLock<HashMap<(RuleKind, usize), Arc<Rule1D>>> {
    static CACHE: OnceLock<RwLock<HashMap<(RuleKind, usize), Arc<Rule1D>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(kind: RuleKind, n: usize, build: impl FnOnce() -> Rule1D) -> Arc<Rule1D> {
    if let Some(rule) = rule_cache().read().unwrap().get(&(kind, n)) {
        return rule.clone();
    }
    let rule = Arc::new(build());
    rule_cache()
        .write()
        .unwrap()
        .entry((kind, n))
        .or_insert(rule)
        .clone()
}

/// Legendre polynomial value and derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// `n`-point Gauss-Legendre rule, exact for degree ≤ 2n − 1.
pub fn gauss_legendre_1d(n: usize) -> Result<Arc<Rule1D>> {
    if n < 1 || n > 32 {
        return Err(Error::Quadrature(format!(
            "Gauss-Legendre supports 1..=32 points, got {n}"
        )));
    }
    Ok(cached(RuleKind::Legendre, n, || {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Newton from the Chebyshev-like initial guess.
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Rule1D { nodes, weights }
    }))
}

/// `n`-point Gauss-Lobatto rule including both endpoints, exact for
/// degree ≤ 2n − 3.
pub fn gauss_lobatto_1d(n: usize) -> Result<Arc<Rule1D>> {
    if n < 2 || n > 16 {
        return Err(Error::Quadrature(format!(
            "Gauss-Lobatto supports 2..=16 points, got {n}"
        )));
    }
    Ok(cached(RuleKind::Lobatto, n, || {
        let m = n - 1;
        let mut nodes = vec![0.0; n];
        nodes[0] = -1.0;
        nodes[n - 1] = 1.0;
        if n > 2 {
            // Interior nodes are the roots of P'_{n-1}, which interlace the
            // roots of P_{n-1}: bracket each one and polish with Newton.
            let inner = gauss_legendre_1d(m).unwrap();
            let dp_at = |x: f64| legendre(m, x).1;
            for i in 0..(n - 2) {
                let (mut lo, mut hi) = (inner.nodes[i], inner.nodes[i + 1]);
                let (mut flo, _fhi) = (dp_at(lo), dp_at(hi));
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = dp_at(mid);
                    if (fm > 0.0) == (flo > 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                let mut x = 0.5 * (lo + hi);
                for _ in 0..50 {
                    let (p, dp) = legendre(m, x);
                    // P''_m from the Legendre ODE.
                    let ddp = (2.0 * x * dp - (m * (m + 1)) as f64 * p) / (1.0 - x * x);
                    let dx = dp / ddp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                nodes[i + 1] = x;
            }
            // Symmetrize.
            for i in 0..n / 2 {
                let s = 0.5 * (nodes[i] - nodes[n - 1 - i]);
                nodes[i] = s;
                nodes[n - 1 - i] = -s;
            }
            if n % 2 == 1 {
                nodes[n / 2] = 0.0;
            }
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let (p, _) = legendre(m, x);
                2.0 / ((m * (m + 1)) as f64 * p * p)
            })
            .collect();
        Rule1D {
            nodes,
            weights,
        }
    }))
}

/// Integrates `f` over the element with the scaled boundary cubature:
/// Σ_i ℓ_i |e_i| ∫₀¹∫₀¹ ξ f(x_c + ξ(r_i(t) − x_c)) dξ dt, where ℓ_i is the
/// signed distance from the scaling center to the line of edge i. Signed
/// contributions keep the formula exact on nonconvex cells even when the
/// center lies outside.
pub fn sbc_integrate(
    geom: &ElementGeometry,
    f: impl Fn(Point) -> f64,
    order: usize,
) -> Result<f64> {
    sbc_integrate_from(geom, geom.centroid, f, order)
}

pub fn sbc_integrate_from(
    geom: &ElementGeometry,
    center: Point,
    f: impl Fn(Point) -> f64,
    order: usize,
) -> Result<f64> {
    if order < 1 {
        return Err(Error::Quadrature("SBC order must be at least 1".into()));
    }
    let rule = gauss_legendre_1d(order)?;
    let pts: Vec<(f64, f64)> = rule.unit_interval().collect();
    let mut total = 0.0;
    for i in 0..geom.num_vertices() {
        let (a, b) = geom.edge(i);
        let ell = geom.edge_normals[i].dot(&(a - center));
        let len = geom.edge_lengths[i];
        let mut acc = 0.0;
        for &(t, wt) in &pts {
            let r = Point::from(a.coords + t * (b.coords - a.coords));
            for &(xi, wxi) in &pts {
                let x = Point::from(center.coords + xi * (r.coords - center.coords));
                acc += wt * wxi * xi * f(x);
            }
        }
        total += ell * len * acc;
    }
    Ok(total)
}

/// Cached integrals ∫_E ξ^r η^k dx for r + k ≤ max_degree, in the scaled
/// coordinates of the element.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub max_degree: usize,
    values: Vec<f64>,
}

impl MomentTable {
    #[inline]
    pub fn get(&self, r: usize, k: usize) -> f64 {
        debug_assert!(r + k <= self.max_degree);
        self.values[monomials::index(r, k)]
    }

    #[inline]
    pub fn by_index(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn area(&self) -> f64 {
        self.values[0]
    }

    /// ∫_E p dx for a scalar polynomial in scaled coordinates.
    pub fn integrate_poly(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if c == 0.0 { 0.0 } else { c * self.values[i] })
            .sum()
    }
}

/// Collapsed-square Gauss points on the (possibly inverted) triangle
/// (a, b, c). Weights carry the signed area; exact for polynomials of total
/// degree ≤ 2n − 2.
pub fn triangle_rule(a: Point, b: Point, c: Point, n: usize) -> Vec<(Point, f64)> {
    // Duffy map x(u,v) = a + u(b-a) + uv(c-b) has Jacobian 2A·u.
    let rule = gauss_legendre_1d(n).expect("rule order in range");
    let pts: Vec<(f64, f64)> = rule.unit_interval().collect();
    let two_a = (b - a).x * (c - a).y - (b - a).y * (c - a).x;
    let mut out = Vec::with_capacity(n * n);
    for &(u, wu) in &pts {
        for &(v, wv) in &pts {
            let x = a.coords + u * (b.coords - a.coords) + u * v * (c.coords - b.coords);
            out.push((Point::from(x), wu * wv * u * two_a));
        }
    }
    out
}

/// Builds the moment table by signed fan triangulation from the centroid.
/// Signed triangles make the result exact for any simple polygon,
/// star-convex or not.
pub fn monomial_moments(geom: &ElementGeometry, max_degree: usize) -> MomentTable {
    let n_mono = monomials::count(max_degree);
    let mut values = vec![0.0; n_mono];
    // A monomial of degree d pulls back to u-degree d+1 under the Duffy map.
    let n_pts = (max_degree + 3).div_ceil(2);
    let mut xi_pow = vec![1.0; max_degree + 1];
    let mut eta_pow = vec![1.0; max_degree + 1];
    for tri in signed_fan_triangles(geom) {
        for (x, w) in triangle_rule(tri.a, tri.b, tri.c, n_pts) {
            let (xi, eta) = geom.scaled(x);
            for p in 1..=max_degree {
                xi_pow[p] = xi_pow[p - 1] * xi;
                eta_pow[p] = eta_pow[p - 1] * eta;
            }
            for idx in 0..n_mono {
                let (r, k) = monomials::exponents(idx);
                values[idx] += w * xi_pow[r] * eta_pow[k];
            }
        }
    }
    MomentTable { max_degree, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_metrics;
    use approx::assert_relative_eq;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn unit_square() -> ElementGeometry {
        polygon_metrics(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap()
    }

    fn l_polygon() -> ElementGeometry {
        polygon_metrics(&pts(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ]))
        .unwrap()
    }

    #[test]
    fn legendre_small_orders() {
        let r1 = gauss_legendre_1d(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert_eq!(r1.weights, vec![2.0]);
        let r2 = gauss_legendre_1d(2).unwrap();
        let inv_sqrt3 = 1.0 / 3.0_f64.sqrt();
        assert_relative_eq!(r2.nodes[0], -inv_sqrt3, epsilon = 1e-15);
        assert_relative_eq!(r2.nodes[1], inv_sqrt3, epsilon = 1e-15);
        assert_relative_eq!(r2.weights[0], 1.0, epsilon = 1e-15);
        assert!(gauss_legendre_1d(0).is_err());
        assert!(gauss_legendre_1d(33).is_err());
    }

    #[test]
    fn legendre_five_integrates_t8() {
        let r = gauss_legendre_1d(5).unwrap();
        let val: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(&t, &w)| w * t.powi(8))
            .sum();
        assert_relative_eq!(val, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn lobatto_small_orders() {
        let r2 = gauss_lobatto_1d(2).unwrap();
        assert_eq!(r2.nodes, vec![-1.0, 1.0]);
        assert_eq!(r2.weights, vec![1.0, 1.0]);
        let r3 = gauss_lobatto_1d(3).unwrap();
        assert_eq!(r3.nodes, vec![-1.0, 0.0, 1.0]);
        assert_relative_eq!(r3.weights[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(r3.weights[1], 4.0 / 3.0, epsilon = 1e-15);
        assert!(gauss_lobatto_1d(1).is_err());
        assert!(gauss_lobatto_1d(17).is_err());
    }

    #[test]
    fn lobatto_four_integrates_t4() {
        let r = gauss_lobatto_1d(4).unwrap();
        let val: f64 = r
            .nodes
            .iter()
            .zip(&r.weights)
            .map(|(&t, &w)| w * t.powi(4))
            .sum();
        assert_relative_eq!(val, 2.0 / 5.0, epsilon = 1e-14);
    }

    #[test]
    fn all_rules_hit_guaranteed_degrees() {
        for n in 1..=32 {
            let r = gauss_legendre_1d(n).unwrap();
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            for d in 0..=(2 * n - 1) {
                let got: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(&t, &w)| w * t.powi(d as i32))
                    .sum();
                let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
                assert_relative_eq!(got, exact, epsilon = 1e-13);
            }
            for i in 1..r.len() {
                assert!(r.nodes[i] > r.nodes[i - 1]);
            }
        }
        for n in 2..=16 {
            let r = gauss_lobatto_1d(n).unwrap();
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            assert_eq!(r.nodes[0], -1.0);
            assert_eq!(r.nodes[n - 1], 1.0);
            for d in 0..=(2 * n - 3) {
                let got: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(&t, &w)| w * t.powi(d as i32))
                    .sum();
                let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
                assert_relative_eq!(got, exact, epsilon = 1e-13);
            }
            for i in 1..r.len() {
                assert!(r.nodes[i] > r.nodes[i - 1]);
            }
        }
    }

    #[test]
    fn sbc_constant_and_linear_on_square() {
        let g = unit_square();
        assert_relative_eq!(sbc_integrate(&g, |_| 1.0, 2).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            sbc_integrate(&g, |p| p.x, 2).unwrap(),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn sbc_matches_fan_oracle_on_l_polygon() {
        // f = ξ²η³ integrated two independent ways.
        let g = l_polygon();
        let f = |p: Point| {
            let (xi, eta) = g.scaled(p);
            xi * xi * eta * eta * eta
        };
        let sbc = sbc_integrate(&g, f, 6).unwrap();
        let table = monomial_moments(&g, 5);
        let exact = table.get(2, 3);
        assert_relative_eq!(sbc, exact, max_relative = 1e-12);
    }

    #[test]
    fn moments_on_unit_square() {
        let g = unit_square();
        let t = monomial_moments(&g, 4);
        assert_relative_eq!(t.area(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(t.get(1, 0), 0.0, epsilon = 1e-15);
        assert_relative_eq!(t.get(0, 1), 0.0, epsilon = 1e-15);
        // ∫ ((x-1/2)/√2)² dx = (1/12)/2 = 1/24, and symmetry in η.
        assert_relative_eq!(t.get(2, 0), 1.0 / 24.0, epsilon = 1e-15);
        assert_relative_eq!(t.get(0, 2), 1.0 / 24.0, epsilon = 1e-15);
        assert_relative_eq!(t.get(1, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn moments_match_brute_force_on_random_hexagon() {
        // Irregular but fixed hexagon; the oracle refines each fan triangle
        // into 40² sub-triangles (≈10⁴ total), each integrated exactly, so
        // the two decompositions must agree to rounding.
        let g = polygon_metrics(&pts(&[
            (0.31, -0.05),
            (1.12, 0.08),
            (1.55, 0.81),
            (0.95, 1.43),
            (0.12, 1.22),
            (-0.23, 0.55),
        ]))
        .unwrap();
        let table = monomial_moments(&g, 4);
        let mut brute = vec![0.0; monomials::count(4)];
        let m = 40;
        for tri in crate::geometry::signed_fan_triangles(&g) {
            let at = |l1: f64, l2: f64| {
                Point::from(
                    tri.a.coords * (1.0 - l1 - l2) + tri.b.coords * l1 + tri.c.coords * l2,
                )
            };
            let mut subs = Vec::new();
            for i in 0..m {
                for j in 0..(m - i) {
                    let (l1, l2) = (i as f64 / m as f64, j as f64 / m as f64);
                    let s = 1.0 / m as f64;
                    subs.push((at(l1, l2), at(l1 + s, l2), at(l1, l2 + s)));
                    if j + i < m - 1 {
                        subs.push((at(l1 + s, l2), at(l1 + s, l2 + s), at(l1, l2 + s)));
                    }
                }
            }
            for (a, b, c) in subs {
                for (x, w) in triangle_rule(a, b, c, 4) {
                    let (xi, eta) = g.scaled(x);
                    for idx in 0..monomials::count(4) {
                        let (r, k) = monomials::exponents(idx);
                        brute[idx] += w * xi.powi(r as i32) * eta.powi(k as i32);
                    }
                }
            }
        }
        for idx in 0..monomials::count(4) {
            let (r, k) = monomials::exponents(idx);
            let got = table.get(r, k);
            assert!(
                (got - brute[idx]).abs() <= 1e-10 * table.area(),
                "moment ({r},{k}): table {got:.15e} vs refined {:.15e}",
                brute[idx]
            );
        }
    }

    #[test]
    fn sbc_and_moments_agree_to_degree_six() {
        let convex = polygon_metrics(&pts(&[
            (0.0, 0.0),
            (1.3, -0.1),
            (1.9, 0.7),
            (1.2, 1.6),
            (0.2, 1.3),
        ]))
        .unwrap();
        let heptagon = {
            use crate::geometry::{generate_structured_quads, split_quads_nonconvex, Rect};
            let quads = generate_structured_quads(Rect::unit(), 1, 1).unwrap();
            let split = split_quads_nonconvex(&quads).unwrap();
            split.cell_geometry(0).unwrap()
        };
        for (g, tol) in [(&convex, 1e-12), (&heptagon, 1e-10)] {
            let table = monomial_moments(g, 6);
            let scale = table.area();
            for idx in 0..monomials::count(6) {
                let (r, k) = monomials::exponents(idx);
                let sbc = sbc_integrate(
                    g,
                    |p| {
                        let (xi, eta) = g.scaled(p);
                        xi.powi(r as i32) * eta.powi(k as i32)
                    },
                    5,
                )
                .unwrap();
                let m = table.get(r, k);
                assert!(
                    (sbc - m).abs() <= tol * scale.max(m.abs()),
                    "deg ({r},{k}): sbc {sbc:.15e} vs moments {m:.15e}"
                );
            }
        }
    }

    #[test]
    fn moment_table_polynomial_contraction() {
        let g = unit_square();
        let t = monomial_moments(&g, 3);
        // p = 2 + 3ξ → ∫ = 2·|E|.
        let mut coeffs = vec![0.0; monomials::count(3)];
        coeffs[0] = 2.0;
        coeffs[1] = 3.0;
        assert_relative_eq!(t.integrate_poly(&coeffs), 2.0, epsilon = 1e-14);
    }
}
