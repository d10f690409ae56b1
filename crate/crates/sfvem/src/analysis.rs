//! Element-eigenvalue spurious-mode scans, discrete error norms, and
//! convergence-rate fitting.

use crate::assembly::{
    element_stiffness, material_matrix, ElementData, Hypothesis, MaterialModel, Solution,
};
use crate::error::{Error, Result};
use crate::geometry::{central_node_quad, polygon_metrics, regular_polygon, Point, PolyMesh};
use crate::polyspace::{StrainPolyBasis, VectorLinearBasis};
use crate::projectors::{eval_projected_displacement, eval_projected_strain, ProjectorSet};
use crate::quadrature::{monomial_moments, sbc_integrate};
use nalgebra::{DMatrix, DVector, Vector2, Vector3};
use rayon::prelude::*;

/// Relative zero-eigenvalue threshold separating rigid-mode residuals from
/// physical modes.
pub const EIGEN_TOL_REL: f64 = 1e-9;

/// Outcome of one element-eigenvalue analysis.
#[derive(Debug, Clone)]
pub struct EigenReport {
    pub element_id: usize,
    pub n_vertices: usize,
    pub ell: usize,
    /// Ascending eigenvalues of K_E.
    pub eigenvalues: Vec<f64>,
    pub tol_rel: f64,
    /// Near-zero eigenvalues beyond the three rigid-body modes.
    pub spurious: usize,
}

/// Solves the element-eigenvalue problem K_E d = λ d and counts near-zero
/// modes beyond the three rigid-body ones.
pub fn spurious_mode_count(k_e: &DMatrix<f64>, tol_rel: f64) -> Result<EigenReport> {
    let eig = k_e.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lmax = *vals.last().unwrap();
    if !(lmax > 0.0) {
        return Err(Error::Solver(
            "element stiffness has no positive eigenvalue".into(),
        ));
    }
    let below = vals.iter().filter(|&&l| l < tol_rel * lmax).count();
    Ok(EigenReport {
        element_id: 0,
        n_vertices: k_e.nrows() / 2,
        ell: 0,
        eigenvalues: vals,
        tol_rel,
        spurious: below.saturating_sub(3),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementFamily {
    /// Square element with nodes added round-robin along its sides.
    CentralQuad,
    /// Regular polygons of unit circumradius.
    RegularPolygon,
}

impl ElementFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ElementFamily::CentralQuad => "central_quad",
            ElementFamily::RegularPolygon => "regular_polygon",
        }
    }

    pub fn polygon(&self, n: usize) -> Result<Vec<Point>> {
        match self {
            ElementFamily::CentralQuad => central_node_quad(n),
            ElementFamily::RegularPolygon => {
                if n < 3 {
                    return Err(Error::InvalidArgument("polygon needs n >= 3".into()));
                }
                Ok(regular_polygon(n))
            }
        }
    }

    pub fn min_vertices(&self) -> usize {
        match self {
            ElementFamily::CentralQuad => 4,
            ElementFamily::RegularPolygon => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub family: &'static str,
    pub ell: usize,
    pub n_vertices: usize,
    pub spurious: usize,
}

/// Spurious-mode counts over a family of elements for every requested ℓ.
/// The material is immaterial for the count; a unit plane-stress law is
/// used.
pub fn eigen_scan(
    family: ElementFamily,
    ells: &[usize],
    ne_range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<ScanRow>> {
    let c = material_matrix(1.0, 0.3, Hypothesis::PlaneStress)?;
    let mut rows = Vec::new();
    for &ell in ells {
        for n in ne_range.clone() {
            if n < family.min_vertices() {
                continue;
            }
            let geom = polygon_metrics(&family.polygon(n)?)?;
            let moments = monomial_moments(&geom, 2 * ell.max(1));
            let set = ProjectorSet::build(&geom, &c, ell, &moments)?;
            let k = element_stiffness(&geom, &c, ell, &set);
            let report = spurious_mode_count(&k, EIGEN_TOL_REL)?;
            rows.push(ScanRow {
                family: family.name(),
                ell,
                n_vertices: n,
                spurious: report.spurious,
            });
        }
    }
    Ok(rows)
}

/// Smallest vertex count with a spurious mode, per ℓ.
pub fn first_failures(rows: &[ScanRow]) -> std::collections::BTreeMap<usize, usize> {
    let mut out = std::collections::BTreeMap::new();
    for row in rows {
        if row.spurious > 0 {
            out.entry(row.ell)
                .and_modify(|n: &mut usize| *n = (*n).min(row.n_vertices))
                .or_insert(row.n_vertices);
        }
    }
    out
}

/// Discrete error measures of one solved mesh.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub mesh_id: String,
    pub n_cells: usize,
    pub h_max: f64,
    pub linf: f64,
    pub l2: f64,
    pub energy: f64,
}

/// Max over mesh vertices of |u(x) − u_h(x)|.
pub fn error_linf(
    mesh: &PolyMesh,
    sol: &Solution,
    exact_u: &dyn Fn(Point) -> Vector2<f64>,
) -> f64 {
    let mut max = 0.0f64;
    for v in 0..mesh.num_vertices() {
        let diff = exact_u(mesh.vertices[v]) - sol.displacement(v);
        max = max.max(diff.norm());
    }
    max
}

fn element_dofs(sol: &Solution, cell: &[usize]) -> DVector<f64> {
    let n = cell.len();
    let mut dofs = DVector::zeros(2 * n);
    for (i, &v) in cell.iter().enumerate() {
        dofs[i] = sol.u[2 * v];
        dofs[n + i] = sol.u[2 * v + 1];
    }
    dofs
}

/// √Σ_E ∫_E |u − Π∇u_h|² dx with the SBC rule.
pub fn error_l2(
    elements: &[ElementData],
    sol: &Solution,
    exact_u: &(dyn Fn(Point) -> Vector2<f64> + Sync),
    order: usize,
) -> Result<f64> {
    let terms: Vec<Result<f64>> = elements
        .par_iter()
        .map(|e| {
            let dofs = element_dofs(sol, &e.cell);
            let coeff = &e.pi * &dofs;
            let basis = VectorLinearBasis::new(&e.geom);
            sbc_integrate(
                &e.geom,
                |x| {
                    let diff = exact_u(x) - eval_projected_displacement(&coeff, &basis, x);
                    diff.norm_squared()
                },
                order,
            )
        })
        .collect();
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total.max(0.0).sqrt())
}

/// √Σ_E ∫_E (ε̄ − Πm ε)ᵀ C (ε̄ − Πm ε) dx with the SBC rule; the exact
/// strain comes from the exact stress through the material law.
pub fn error_energy(
    elements: &[ElementData],
    sol: &Solution,
    material: &MaterialModel,
    exact_stress: &(dyn Fn(Point) -> Vector3<f64> + Sync),
    order: usize,
) -> Result<f64> {
    let c = material.c;
    let terms: Vec<Result<f64>> = elements
        .par_iter()
        .map(|e| {
            let dofs = element_dofs(sol, &e.cell);
            let coeff = &e.pi_m * &dofs;
            let basis = StrainPolyBasis::new(&e.geom, e.ell);
            sbc_integrate(
                &e.geom,
                |x| {
                    let exact = material.strain_from_stress(exact_stress(x));
                    let diff = exact - eval_projected_strain(&coeff, &basis, x);
                    (c * diff).dot(&diff)
                },
                order,
            )
        })
        .collect();
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total.max(0.0).sqrt())
}

/// Least-squares slope of log(error) against log(h).
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    pub used: usize,
    pub excluded: usize,
}

pub fn fit_convergence(pairs: &[(f64, f64)]) -> Result<SlopeFit> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut excluded = 0;
    for &(h, e) in pairs {
        if e > 0.0 && h > 0.0 {
            pts.push((h.ln(), e.ln()));
        } else {
            excluded += 1;
        }
    }
    if pts.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs at least 3 positive (h, error) pairs, got {}",
            pts.len()
        )));
    }
    for w in pairs.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::InvalidArgument(
                "mesh sizes h must be strictly decreasing".into(),
            ));
        }
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let residual = (pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        used: pts.len(),
        excluded,
    })
}

/// CSV block for convergence tables.
pub fn convergence_csv(rows: &[ErrorReport]) -> String {
    let mut s = String::from("mesh_id,n_cells,h_max,err_linf,err_l2,err_energy\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r.mesh_id, r.n_cells, r.h_max, r.linf, r.l2, r.energy
        ));
    }
    s
}

/// CSV block for eigen scans.
pub fn eigen_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from("family,ell,NE,spurious\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.family, r.ell, r.n_vertices, r.spurious
        ));
    }
    s
}

/// Gnuplot-friendly data block: `h linf l2 energy` per mesh.
pub fn gnuplot_data(rows: &[ErrorReport]) -> String {
    let mut s = String::from("# h_max err_linf err_l2 err_energy\n");
    for r in rows {
        s.push_str(&format!(
            "{:.12e} {:.12e} {:.12e} {:.12e}\n",
            r.h_max, r.linf, r.l2, r.energy
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{
        assemble_global, solve, DirichletSpec, ElementKind, FieldFn, ProblemDefinition,
    };
    use crate::geometry::{generate_structured_quads, Rect};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    #[test]
    fn synthetic_slopes_are_recovered() {
        let pairs: Vec<(f64, f64)> = (0..5)
            .map(|i| {
                let h = 0.5f64.powi(i);
                (h, h * h)
            })
            .collect();
        let fit = fit_convergence(&pairs).unwrap();
        assert_relative_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert!(fit.residual < 1e-12);

        let pairs: Vec<(f64, f64)> = (0..4)
            .map(|i| {
                let h = 0.7f64.powi(i);
                (h, 3.0 * h)
            })
            .collect();
        let fit = fit_convergence(&pairs).unwrap();
        assert_relative_eq!(fit.slope, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nonpositive_errors_are_excluded() {
        let pairs = vec![(1.0, 1.0), (0.5, 0.25), (0.25, 0.0625), (0.125, 0.0)];
        let fit = fit_convergence(&pairs).unwrap();
        assert_eq!(fit.excluded, 1);
        assert_eq!(fit.used, 3);
        assert!(fit_convergence(&[(1.0, 1.0), (0.5, 0.5)]).is_err());
        assert!(fit_convergence(&[(1.0, 1.0), (1.0, 0.5), (0.5, 0.2)]).is_err());
    }

    #[test]
    fn quad_element_spurious_thresholds() {
        // ℓ = 0 fails on any non-triangle; ℓ = 1 first fails at 6 nodes.
        let rows = eigen_scan(ElementFamily::CentralQuad, &[0, 1], 4..=7).unwrap();
        let find = |ell, ne| {
            rows.iter()
                .find(|r| r.ell == ell && r.n_vertices == ne)
                .unwrap()
                .spurious
        };
        assert!(find(0, 4) > 0);
        assert_eq!(find(1, 4), 0);
        assert_eq!(find(1, 5), 0);
        assert!(find(1, 6) > 0);
    }

    #[test]
    fn regular_triangle_is_clean_at_ell_zero() {
        let rows = eigen_scan(ElementFamily::RegularPolygon, &[0], 3..=4).unwrap();
        assert_eq!(rows[0].spurious, 0);
        assert!(rows[1].spurious > 0);
    }

    #[test]
    fn errors_vanish_on_exact_linear_solution() {
        let mesh = generate_structured_quads(Rect::unit(), 3, 3).unwrap();
        let material =
            crate::assembly::MaterialModel::new(1.0, 0.3, Hypothesis::PlaneStress).unwrap();
        let c = material.c;
        let field: FieldFn = Arc::new(|p: Point| Vector2::new(p.x, p.x + p.y));
        let mut problem = ProblemDefinition::new(material.clone());
        for marker in ["left", "right", "bottom", "top"] {
            problem.dirichlet.push(DirichletSpec {
                marker: marker.into(),
                components: [true, true],
                value: field.clone(),
            });
        }
        let sys = assemble_global(
            &mesh,
            &problem,
            crate::polyspace::DegreePolicy::StrictRegular,
            ElementKind::StabilizationFree,
        )
        .unwrap();
        let sol = solve(&sys).unwrap();
        let exact_u = |p: Point| Vector2::new(p.x, p.x + p.y);
        let strain = Vector3::new(1.0, 1.0, 1.0);
        let sigma = c * strain;
        let exact_s = move |_p: Point| sigma;
        assert!(error_linf(&mesh, &sol, &exact_u) <= 1e-12);
        assert!(error_l2(&sys.elements, &sol, &exact_u, 3).unwrap() <= 1e-12);
        assert!(error_energy(&sys.elements, &sol, &material, &exact_s, 3).unwrap() <= 1e-12);
    }

    #[test]
    fn csv_headers() {
        assert!(convergence_csv(&[]).starts_with("mesh_id,n_cells,h_max"));
        assert!(eigen_csv(&[]).starts_with("family,ell,NE,spurious"));
    }
}
