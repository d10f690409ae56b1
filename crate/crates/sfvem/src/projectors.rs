//! Element projection operators.
//!
//! The energy projector Π maps a virtual displacement (known through its
//! vertex values) onto linear vector polynomials, pinned on rigid modes by a
//! vertex-average inner product. The L² strain projector Πm maps the virtual
//! strain onto degree-ℓ symmetric matrix polynomials; its volume term trades
//! the unknown interior values for the energy projection, which is what the
//! enlarged element space licenses.
//!
//! Element DOF ordering is the block layout: x-values at vertices 1..N_E,
//! then y-values.

use crate::error::{Error, Result};
use crate::geometry::{ElementGeometry, Point};
use crate::polyspace::{monomials, Poly2, StrainPolyBasis, VectorLinearBasis};
use crate::quadrature::{gauss_legendre_1d, gauss_lobatto_1d, MomentTable};
use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector3};

/// Both projectors of one element together with their factor matrices.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    pub ell: usize,
    /// 6×6 energy-projection Gram matrix.
    pub g_tilde: DMatrix<f64>,
    /// 6×2N_E energy-projection right-hand side.
    pub b_tilde: DMatrix<f64>,
    /// 6×2N_E energy projector: column i holds the m-basis coefficients of
    /// the projection of basis function i.
    pub pi: DMatrix<f64>,
    /// 3n_ℓ×3n_ℓ Gram matrix of N^p.
    pub g: DMatrix<f64>,
    /// 3n_ℓ×2N_E strain-projection right-hand side.
    pub b: DMatrix<f64>,
    /// 3n_ℓ×2N_E strain projector.
    pub pi_m: DMatrix<f64>,
    /// Smallest eigenvalue and spectral condition number of G.
    pub g_min_eig: f64,
    pub g_cond: f64,
}

/// Builds the energy projector: (G̃, B̃, Π) with Π = G̃⁻¹B̃.
pub fn build_energy_projector(
    geom: &ElementGeometry,
    c: &Matrix3<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let n = geom.num_vertices();
    let basis = VectorLinearBasis::new(geom);

    let mut g_tilde = DMatrix::zeros(6, 6);
    // Vertex-average rows pin the projection on rigid modes.
    for j in 0..n {
        let m = basis.eval(geom.vertices[j]);
        for alpha in 0..3 {
            for beta in 0..6 {
                g_tilde[(alpha, beta)] +=
                    m.column(beta).dot(&m.column(alpha).into_owned()) / n as f64;
            }
        }
    }
    for alpha in 3..6 {
        let cs_alpha = c * basis.strain(alpha);
        for beta in 0..6 {
            g_tilde[(alpha, beta)] = basis.strain(beta).dot(&cs_alpha) * geom.area;
        }
    }

    let mut b_tilde = DMatrix::zeros(6, 2 * n);
    for i in 0..n {
        let m = basis.eval(geom.vertices[i]);
        for alpha in 0..3 {
            b_tilde[(alpha, i)] = m[(0, alpha)] / n as f64;
            b_tilde[(alpha, n + i)] = m[(1, alpha)] / n as f64;
        }
    }
    // ∫_E S φ_i dx reduces to edge integrals of φ_i against the normal,
    // exact with the two-point Gauss-Lobatto rule since traces are linear.
    let lobatto = gauss_lobatto_1d(2)?;
    let mut w_n1 = vec![0.0; n];
    let mut w_n2 = vec![0.0; n];
    for e in 0..n {
        let len = geom.edge_lengths[e];
        let nrm = geom.edge_normals[e];
        let ends = [e, (e + 1) % n];
        for (&t, &w) in lobatto.nodes.iter().zip(lobatto.weights.iter()) {
            let phi = [0.5 * (1.0 - t), 0.5 * (1.0 + t)];
            for (loc, &v) in ends.iter().enumerate() {
                w_n1[v] += 0.5 * len * w * phi[loc] * nrm.x;
                w_n2[v] += 0.5 * len * w * phi[loc] * nrm.y;
            }
        }
    }
    for alpha in 3..6 {
        let cs = c * basis.strain(alpha);
        for i in 0..n {
            b_tilde[(alpha, i)] = w_n1[i] * cs[0] + w_n2[i] * cs[2];
            b_tilde[(alpha, n + i)] = w_n2[i] * cs[1] + w_n1[i] * cs[2];
        }
    }

    let lu = g_tilde.clone().lu();
    let pi = lu.solve(&b_tilde).ok_or_else(|| {
        Error::SingularProjector("energy projection Gram matrix is singular".into())
    })?;
    Ok((g_tilde, b_tilde, pi))
}

/// Builds the L² strain projector: (G, B, Πm) with Πm = G⁻¹B.
///
/// `pi` is the energy projector of the same element; `moments` must carry
/// degrees up to 2ℓ.
pub fn build_l2_strain_projector(
    geom: &ElementGeometry,
    ell: usize,
    pi: &DMatrix<f64>,
    moments: &MomentTable,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    assert!(
        moments.max_degree >= 2 * ell,
        "moment table degree {} too small for ell {}",
        moments.max_degree,
        ell
    );
    let n = geom.num_vertices();
    let basis = StrainPolyBasis::new(geom, ell);
    let ns = basis.num_scalar();
    let cols = 3 * ns;

    let mut g = DMatrix::zeros(cols, cols);
    for a in 0..ns {
        let (ra, ka) = monomials::exponents(a);
        for b in 0..ns {
            let (rb, kb) = monomials::exponents(b);
            let m = moments.get(ra + rb, ka + kb);
            for r in 0..3 {
                g[(3 * a + r, 3 * b + r)] = m;
            }
        }
    }

    // Boundary term: Σ_e ∫_e (N^{∂E} N^p)^T N^v ds, degree ℓ+1 per edge.
    let mut b = DMatrix::zeros(cols, 2 * n);
    let rule = gauss_legendre_1d((ell + 2).div_ceil(2))?;
    for e in 0..n {
        let (p, q) = geom.edge(e);
        let nrm = geom.edge_normals[e];
        let len = geom.edge_lengths[e];
        for (&t, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let x = Point::from(p.coords + 0.5 * (t + 1.0) * (q.coords - p.coords));
            let ds = 0.5 * len * w;
            let np = basis.eval(x);
            let phi = [0.5 * (1.0 - t), 0.5 * (1.0 + t)];
            let ends = [e, (e + 1) % n];
            for c in 0..cols {
                let a0 = nrm.x * np[(0, c)] + nrm.y * np[(2, c)];
                let a1 = nrm.y * np[(1, c)] + nrm.x * np[(2, c)];
                for (loc, &v) in ends.iter().enumerate() {
                    b[(c, v)] += ds * a0 * phi[loc];
                    b[(c, n + v)] += ds * a1 * phi[loc];
                }
            }
        }
    }

    // Volume term: ∫ (∂N^p)^T Π∇N^v dx, with the virtual function replaced
    // by its energy projection. The integrand is polynomial, so it contracts
    // exactly against the moment table.
    if ell >= 1 {
        let mono_xi = Poly2::monomial(1, 0);
        let mono_eta = Poly2::monomial(0, 1);
        for c in 0..cols {
            let (p1, p2) = basis.divergence(c);
            let i1 = moments.integrate_poly(&p1.coeffs);
            let i2 = moments.integrate_poly(&p2.coeffs);
            let ints = [
                i1,
                i2,
                moments.integrate_poly(&mul(p2, &mono_xi).coeffs)
                    - moments.integrate_poly(&mul(p1, &mono_eta).coeffs),
                moments.integrate_poly(&mul(p1, &mono_eta).coeffs)
                    + moments.integrate_poly(&mul(p2, &mono_xi).coeffs),
                moments.integrate_poly(&mul(p1, &mono_xi).coeffs),
                moments.integrate_poly(&mul(p2, &mono_eta).coeffs),
            ];
            for j in 0..(2 * n) {
                let mut acc = 0.0;
                for (beta, &int) in ints.iter().enumerate() {
                    acc += int * pi[(beta, j)];
                }
                b[(c, j)] -= acc;
            }
        }
    }

    let lu = g.clone().lu();
    let pi_m = lu
        .solve(&b)
        .ok_or_else(|| Error::SingularProjector("strain Gram matrix is singular".into()))?;
    Ok((g, b, pi_m))
}

fn mul(a: &Poly2, b: &Poly2) -> Poly2 {
    let mut max_deg = 0;
    for (i, &c) in a.coeffs.iter().enumerate() {
        if c != 0.0 {
            let (r, k) = monomials::exponents(i);
            max_deg = max_deg.max(r + k);
        }
    }
    let mut bdeg = 0;
    for (i, &c) in b.coeffs.iter().enumerate() {
        if c != 0.0 {
            let (r, k) = monomials::exponents(i);
            bdeg = bdeg.max(r + k);
        }
    }
    let mut out = Poly2::zero(max_deg + bdeg);
    for (i, &ca) in a.coeffs.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        let (ra, ka) = monomials::exponents(i);
        for (j, &cb) in b.coeffs.iter().enumerate() {
            if cb == 0.0 {
                continue;
            }
            let (rb, kb) = monomials::exponents(j);
            out.coeffs[monomials::index(ra + rb, ka + kb)] += ca * cb;
        }
    }
    out
}

impl ProjectorSet {
    /// Builds both projectors for an element at degree `ell`.
    pub fn build(
        geom: &ElementGeometry,
        c: &Matrix3<f64>,
        ell: usize,
        moments: &MomentTable,
    ) -> Result<Self> {
        let (g_tilde, b_tilde, pi) = build_energy_projector(geom, c)?;
        let (g, b, pi_m) = build_l2_strain_projector(geom, ell, &pi, moments)?;
        let eig = g.clone().symmetric_eigen();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for &v in eig.eigenvalues.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(ProjectorSet {
            ell,
            g_tilde,
            b_tilde,
            pi,
            g,
            b,
            pi_m,
            g_min_eig: lo,
            g_cond: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        })
    }

    /// True when G is poorly conditioned and a lower ℓ or finer mesh is
    /// advisable.
    pub fn g_ill_conditioned(&self) -> bool {
        !(self.g_cond < 1e12)
    }

    /// Text block with all factor matrices, for golden-file comparisons.
    pub fn dump(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        for (name, m) in [
            ("G_tilde", &self.g_tilde),
            ("B_tilde", &self.b_tilde),
            ("Pi", &self.pi),
            ("G", &self.g),
            ("B", &self.b),
            ("Pi_m", &self.pi_m),
        ] {
            let _ = writeln!(s, "{name} {} {}", m.nrows(), m.ncols());
            for r in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:.16e}", m[(r, c)])).collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        s
    }
}

/// Evaluates the projected displacement Σ_β (Π·dofs)_β m_β(x).
pub fn project_displacement(
    pi: &DMatrix<f64>,
    geom: &ElementGeometry,
    dofs: &DVector<f64>,
    x: Point,
) -> Vector2<f64> {
    let basis = VectorLinearBasis::new(geom);
    eval_projected_displacement(&(pi * dofs), &basis, x)
}

/// Same, from precomputed coefficients (hot loops).
pub fn eval_projected_displacement(
    coeff: &DVector<f64>,
    basis: &VectorLinearBasis,
    x: Point,
) -> Vector2<f64> {
    let m = basis.eval(x);
    let mut out = Vector2::zeros();
    for beta in 0..6 {
        out += coeff[beta] * m.column(beta);
    }
    out
}

/// Evaluates the projected Voigt strain N^p(x)·(Πm·dofs).
pub fn project_strain(
    pi_m: &DMatrix<f64>,
    geom: &ElementGeometry,
    ell: usize,
    dofs: &DVector<f64>,
    x: Point,
) -> Vector3<f64> {
    let basis = StrainPolyBasis::new(geom, ell);
    eval_projected_strain(&(pi_m * dofs), &basis, x)
}

/// Same, from precomputed coefficients (hot loops).
pub fn eval_projected_strain(
    coeff: &DVector<f64>,
    basis: &StrainPolyBasis,
    x: Point,
) -> Vector3<f64> {
    let (xi, eta) = basis.scaled(x);
    let ns = basis.num_scalar();
    let mut out = Vector3::zeros();
    for a in 0..ns {
        let (r, k) = monomials::exponents(a);
        let v = xi.powi(r as i32) * eta.powi(k as i32);
        out[0] += v * coeff[3 * a];
        out[1] += v * coeff[3 * a + 1];
        out[2] += v * coeff[3 * a + 2];
    }
    out
}

/// ∫_E (N^p)^T C N^p dx contracted from the moment table (the matrix H in
/// the element stiffness).
pub fn strain_mass_matrix(
    basis: &StrainPolyBasis,
    c: &Matrix3<f64>,
    moments: &MomentTable,
) -> DMatrix<f64> {
    let ns = basis.num_scalar();
    let mut h = DMatrix::zeros(3 * ns, 3 * ns);
    for a in 0..ns {
        let (ra, ka) = monomials::exponents(a);
        for bcol in 0..ns {
            let (rb, kb) = monomials::exponents(bcol);
            let m = moments.get(ra + rb, ka + kb);
            for r in 0..3 {
                for s in 0..3 {
                    h[(3 * a + r, 3 * bcol + s)] = c[(r, s)] * m;
                }
            }
        }
    }
    h
}

/// DOF vector (x-block then y-block) of a vector field sampled at vertices.
pub fn dofs_of(geom: &ElementGeometry, f: impl Fn(Point) -> Vector2<f64>) -> DVector<f64> {
    let n = geom.num_vertices();
    let mut dofs = DVector::zeros(2 * n);
    for (i, &v) in geom.vertices.iter().enumerate() {
        let val = f(v);
        dofs[i] = val.x;
        dofs[n + i] = val.y;
    }
    dofs
}
