//! Material law, element stiffness and load, global assembly, boundary
//! conditions, and the linear solve.
//!
//! Global DOFs are interleaved: vertex `v` owns DOFs `2v` (x) and `2v+1`
//! (y). Element-local vectors use the block layout (x-values then y-values);
//! `local_to_global` is the documented permutation between the two.

mod sparse;

pub use sparse::{conjugate_gradient, reverse_cuthill_mckee, EnvelopeCholesky, SymCsr};

use crate::error::{Error, Result};
use crate::geometry::{ElementGeometry, Point, PolyMesh};
use crate::polyspace::{select_degree, DegreePolicy, StrainPolyBasis, VectorLinearBasis};
use crate::projectors::{strain_mass_matrix, ProjectorSet};
use crate::quadrature::{gauss_legendre_1d, monomial_moments};
use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector3};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

pub type FieldFn = Arc<dyn Fn(Point) -> Vector2<f64> + Send + Sync>;
pub type StressFn = Arc<dyn Fn(Point) -> Vector3<f64> + Send + Sync>;
/// Traction as a function of position and unit outward normal.
pub type TractionFn = Arc<dyn Fn(Point, Vector2<f64>) -> Vector2<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    PlaneStress,
    PlaneStrain,
}

/// 3×3 Voigt constitutive matrix for an isotropic material.
pub fn material_matrix(e_young: f64, nu: f64, hypothesis: Hypothesis) -> Result<Matrix3<f64>> {
    if e_young <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Young's modulus must be positive, got {e_young}"
        )));
    }
    match hypothesis {
        Hypothesis::PlaneStress => {
            if nu.abs() >= 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "plane stress requires |nu| < 1, got {nu}"
                )));
            }
            let f = e_young / (1.0 - nu * nu);
            Ok(Matrix3::new(
                f,
                f * nu,
                0.0,
                f * nu,
                f,
                0.0,
                0.0,
                0.0,
                f * (1.0 - nu) / 2.0,
            ))
        }
        Hypothesis::PlaneStrain => {
            if nu >= 0.5 || nu <= -1.0 {
                return Err(Error::InvalidArgument(format!(
                    "plane strain requires -1 < nu < 0.5, got {nu}"
                )));
            }
            let f = e_young / ((1.0 + nu) * (1.0 - 2.0 * nu));
            Ok(Matrix3::new(
                f * (1.0 - nu),
                f * nu,
                0.0,
                f * nu,
                f * (1.0 - nu),
                0.0,
                0.0,
                0.0,
                f * (1.0 - 2.0 * nu) / 2.0,
            ))
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaterialModel {
    pub e_young: f64,
    pub nu: f64,
    pub hypothesis: Hypothesis,
    pub c: Matrix3<f64>,
}

impl MaterialModel {
    pub fn new(e_young: f64, nu: f64, hypothesis: Hypothesis) -> Result<Self> {
        Ok(MaterialModel {
            e_young,
            nu,
            hypothesis,
            c: material_matrix(e_young, nu, hypothesis)?,
        })
    }

    /// Voigt strain from Voigt stress (inverts C).
    pub fn strain_from_stress(&self, sigma: Vector3<f64>) -> Vector3<f64> {
        self.c
            .lu()
            .solve(&sigma)
            .expect("constitutive matrix is invertible")
    }
}

/// Dirichlet data on one marker: which components are pinned and their value.
#[derive(Clone)]
pub struct DirichletSpec {
    pub marker: String,
    pub components: [bool; 2],
    pub value: FieldFn,
}

/// Traction data on one marker.
#[derive(Clone)]
pub struct TractionSpec {
    pub marker: String,
    pub value: TractionFn,
}

impl TractionSpec {
    pub fn constant(marker: impl Into<String>, t: Vector2<f64>) -> Self {
        TractionSpec {
            marker: marker.into(),
            value: Arc::new(move |_, _| t),
        }
    }

    pub fn free(marker: impl Into<String>) -> Self {
        Self::constant(marker, Vector2::zeros())
    }
}

#[derive(Clone)]
pub struct ExactSolution {
    pub displacement: FieldFn,
    pub stress: StressFn,
}

/// Pins selected components of the mesh vertex nearest to `near`, at the
/// value of `value` evaluated at the actual vertex position. Used to remove
/// rigid modes from pure-traction problems.
#[derive(Clone)]
pub struct PointPin {
    pub near: Point,
    pub components: [bool; 2],
    pub value: FieldFn,
}

/// Complete boundary-value problem on a mesh.
#[derive(Clone)]
pub struct ProblemDefinition {
    pub material: MaterialModel,
    pub body_force: Option<FieldFn>,
    pub dirichlet: Vec<DirichletSpec>,
    pub tractions: Vec<TractionSpec>,
    pub point_pins: Vec<PointPin>,
    /// Markers listed here win corner conflicts in order; unlisted markers
    /// must agree wherever they meet.
    pub marker_priority: Vec<String>,
    pub exact: Option<ExactSolution>,
}

impl ProblemDefinition {
    pub fn new(material: MaterialModel) -> Self {
        ProblemDefinition {
            material,
            body_force: None,
            dirichlet: Vec::new(),
            tractions: Vec::new(),
            point_pins: Vec::new(),
            marker_priority: Vec::new(),
            exact: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    /// Stiffness from the higher-degree strain projection alone.
    StabilizationFree,
    /// First-order consistency plus a trace-scaled stabilization on the
    /// projection complement (the comparison baseline).
    Stabilized,
}

/// Stiffness of the stabilization-free element: K = (Πm)ᵀ H Πm.
pub fn element_stiffness(
    geom: &ElementGeometry,
    c: &Matrix3<f64>,
    ell: usize,
    set: &ProjectorSet,
) -> DMatrix<f64> {
    let basis = StrainPolyBasis::new(geom, ell);
    let moments = monomial_moments(geom, 2 * ell);
    let h = strain_mass_matrix(&basis, c, &moments);
    set.pi_m.transpose() * h * &set.pi_m
}

/// Stiffness of the stabilized baseline element: the ℓ = 0 consistency term
/// plus τ (I − P)ᵀ(I − P) with τ = tr(K_c)/2 and P the DOF-space projection
/// onto the energy-projected subspace.
pub fn element_stiffness_stabilized(geom: &ElementGeometry, c: &Matrix3<f64>) -> Result<DMatrix<f64>> {
    let n = geom.num_vertices();
    let moments = monomial_moments(geom, 0);
    let set = ProjectorSet::build(geom, c, 0, &moments)?;
    let basis = StrainPolyBasis::new(geom, 0);
    let h = strain_mass_matrix(&basis, c, &moments);
    let k_c = set.pi_m.transpose() * h * &set.pi_m;

    // DOF values of the linear basis fields.
    let vb = VectorLinearBasis::new(geom);
    let mut d = DMatrix::zeros(2 * n, 6);
    for (i, &v) in geom.vertices.iter().enumerate() {
        let m = vb.eval(v);
        for beta in 0..6 {
            d[(i, beta)] = m[(0, beta)];
            d[(n + i, beta)] = m[(1, beta)];
        }
    }
    let p = &d * &set.pi;
    let i_minus_p = DMatrix::identity(2 * n, 2 * n) - p;
    let tau = 0.5 * k_c.trace();
    Ok(k_c + tau * i_minus_p.transpose() * i_minus_p)
}

/// Body-force part of the element load: each vertex receives |E|/N_E times
/// the centroid value (the constant surrogate for the L² projection of f).
pub fn element_force(geom: &ElementGeometry, f_centroid: Vector2<f64>) -> DVector<f64> {
    let n = geom.num_vertices();
    let w = geom.area / n as f64;
    let mut out = DVector::zeros(2 * n);
    for i in 0..n {
        out[i] = w * f_centroid.x;
        out[n + i] = w * f_centroid.y;
    }
    out
}

/// Load contributions of a traction on one edge, integrated against the
/// linear trace with a three-point Gauss rule (exact when t̄ is constant:
/// each endpoint receives |e| t̄ / 2). `normal` is the unit outward normal
/// of the edge.
pub fn traction_load(
    a: Point,
    b: Point,
    normal: Vector2<f64>,
    t: &dyn Fn(Point, Vector2<f64>) -> Vector2<f64>,
) -> [Vector2<f64>; 2] {
    let rule = gauss_legendre_1d(3).expect("3-point rule");
    let len = (b - a).norm();
    let mut out = [Vector2::zeros(), Vector2::zeros()];
    for (&s, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let phi = [0.5 * (1.0 - s), 0.5 * (1.0 + s)];
        let x = Point::from(a.coords + 0.5 * (s + 1.0) * (b.coords - a.coords));
        let tv = t(x, normal);
        for loc in 0..2 {
            out[loc] += 0.5 * len * w * phi[loc] * tv;
        }
    }
    out
}

/// Per-element data retained for error evaluation.
#[derive(Debug, Clone)]
pub struct ElementData {
    pub cell: Vec<usize>,
    pub geom: ElementGeometry,
    pub ell: usize,
    pub pi: DMatrix<f64>,
    pub pi_m: DMatrix<f64>,
    pub g_cond: f64,
}

/// Assembled global system before constraint elimination.
#[derive(Debug)]
pub struct GlobalSystem {
    pub n_vertices: usize,
    pub k: SymCsr,
    pub load: DVector<f64>,
    pub constraints: BTreeMap<usize, f64>,
    pub elements: Vec<ElementData>,
}

pub fn local_to_global(cell: &[usize]) -> Vec<usize> {
    let mut map = Vec::with_capacity(2 * cell.len());
    for &v in cell {
        map.push(2 * v);
    }
    for &v in cell {
        map.push(2 * v + 1);
    }
    map
}

/// Number of eigenvalues of a symmetric matrix below `tol_rel · λ_max`.
pub fn count_zero_modes(k: &DMatrix<f64>, tol_rel: f64) -> Result<usize> {
    let eig = k.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if lmax <= 0.0 {
        return Err(Error::Solver("element stiffness has no positive eigenvalue".into()));
    }
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l < tol_rel * lmax)
        .count())
}

/// Builds one element: selects ℓ per policy (escalating under `Verified`),
/// constructs projectors, and returns stiffness plus retained data.
fn build_element(
    cell_id: usize,
    cell: &[usize],
    geom: ElementGeometry,
    material: &MaterialModel,
    policy: DegreePolicy,
    kind: ElementKind,
) -> Result<(DMatrix<f64>, ElementData)> {
    let c = &material.c;
    match kind {
        ElementKind::Stabilized => {
            let k = element_stiffness_stabilized(&geom, c)?;
            let moments = monomial_moments(&geom, 0);
            let set = ProjectorSet::build(&geom, c, 0, &moments)?;
            Ok((
                k,
                ElementData {
                    cell: cell.to_vec(),
                    geom,
                    ell: 0,
                    pi: set.pi,
                    pi_m: set.pi_m,
                    g_cond: set.g_cond,
                },
            ))
        }
        ElementKind::StabilizationFree => {
            let base = select_degree(geom.num_vertices(), policy);
            let max_ell = if policy == DegreePolicy::Verified {
                base + 6
            } else {
                base
            };
            let mut ell = base;
            loop {
                let moments = monomial_moments(&geom, 2 * ell);
                let set = ProjectorSet::build(&geom, c, ell, &moments)?;
                let k = element_stiffness(&geom, c, ell, &set);
                if policy == DegreePolicy::Verified {
                    let zeros = count_zero_modes(&k, 1e-9)?;
                    if zeros > 3 && ell < max_ell {
                        ell += 1;
                        continue;
                    }
                    if zeros != 3 {
                        return Err(Error::RankDeficit {
                            element: cell_id,
                            expected: 3,
                            found: zeros,
                        });
                    }
                }
                return Ok((
                    k,
                    ElementData {
                        cell: cell.to_vec(),
                        geom,
                        ell,
                        pi: set.pi,
                        pi_m: set.pi_m,
                        g_cond: set.g_cond,
                    },
                ));
            }
        }
    }
}

/// Assembles stiffness and load over the mesh. Elements are built in
/// parallel and reduced in element order, so the result is independent of
/// the thread count.
pub fn assemble_global(
    mesh: &PolyMesh,
    problem: &ProblemDefinition,
    policy: DegreePolicy,
    kind: ElementKind,
) -> Result<GlobalSystem> {
    let built: Vec<Result<(DMatrix<f64>, ElementData)>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|ci| {
            let geom = mesh.cell_geometry(ci)?;
            build_element(ci, &mesh.cells[ci], geom, &problem.material, policy, kind)
        })
        .collect();

    let n_dofs = 2 * mesh.num_vertices();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut load = DVector::zeros(n_dofs);
    let mut elements = Vec::with_capacity(mesh.num_cells());
    for item in built {
        let (k_e, data) = item?;
        let map = local_to_global(&data.cell);
        for (li, &gi) in map.iter().enumerate() {
            for (lj, &gj) in map.iter().enumerate() {
                if gi <= gj {
                    let v = k_e[(li, lj)];
                    if v != 0.0 {
                        triplets.push((gi, gj, v));
                    }
                }
            }
        }
        if let Some(f) = &problem.body_force {
            let fe = element_force(&data.geom, f(data.geom.centroid));
            for (li, &gi) in map.iter().enumerate() {
                load[gi] += fe[li];
            }
        }
        elements.push(data);
    }

    // Traction terms. The outward normal of a boundary edge follows the
    // counter-clockwise traversal of its (unique) owning cell.
    let mut edge_dir: std::collections::HashMap<(usize, usize), (usize, usize)> =
        std::collections::HashMap::new();
    for cell in &mesh.cells {
        for i in 0..cell.len() {
            let u = cell[i];
            let v = cell[(i + 1) % cell.len()];
            edge_dir.entry((u.min(v), u.max(v))).or_insert((u, v));
        }
    }
    for spec in &problem.tractions {
        for edge in mesh
            .boundary_edges
            .iter()
            .filter(|e| e.marker == spec.marker)
        {
            let key = (edge.a.min(edge.b), edge.a.max(edge.b));
            let (u, v) = *edge_dir.get(&key).ok_or_else(|| {
                Error::BoundaryCondition(format!(
                    "marked edge ({}, {}) not found in any cell",
                    edge.a, edge.b
                ))
            })?;
            let a = mesh.vertices[u];
            let b = mesh.vertices[v];
            let d = b - a;
            let normal = Vector2::new(d.y, -d.x) / d.norm();
            let contrib = traction_load(a, b, normal, &*spec.value);
            for (vtx, c) in [(u, contrib[0]), (v, contrib[1])] {
                load[2 * vtx] += c.x;
                load[2 * vtx + 1] += c.y;
            }
        }
    }

    // Dirichlet constraints with marker-priority corner resolution.
    let priority = |marker: &str| -> usize {
        problem
            .marker_priority
            .iter()
            .position(|m| m == marker)
            .unwrap_or(usize::MAX)
    };
    let mut chosen: BTreeMap<usize, (usize, f64, usize)> = BTreeMap::new(); // dof -> (prio, value, vertex)
    for spec in &problem.dirichlet {
        let prio = priority(&spec.marker);
        for edge in mesh
            .boundary_edges
            .iter()
            .filter(|e| e.marker == spec.marker)
        {
            for &v in &[edge.a, edge.b] {
                let val = (spec.value)(mesh.vertices[v]);
                for comp in 0..2 {
                    if !spec.components[comp] {
                        continue;
                    }
                    let dof = 2 * v + comp;
                    let new = if comp == 0 { val.x } else { val.y };
                    match chosen.get(&dof) {
                        None => {
                            chosen.insert(dof, (prio, new, v));
                        }
                        Some(&(old_prio, old_val, _)) => {
                            let differ =
                                (old_val - new).abs() > 1e-9 * (1.0 + old_val.abs().max(new.abs()));
                            if differ && old_prio == prio {
                                return Err(Error::ConflictingConstraint {
                                    vertex: v,
                                    component: comp,
                                    a: old_val,
                                    b: new,
                                });
                            }
                            if prio < old_prio {
                                chosen.insert(dof, (prio, new, v));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut constraints: BTreeMap<usize, f64> =
        chosen.into_iter().map(|(d, (_, v, _))| (d, v)).collect();

    // Point pins (rigid-mode removal); marker constraints win overlaps.
    for pin in &problem.point_pins {
        let mut best = (f64::INFINITY, 0usize);
        for (v, p) in mesh.vertices.iter().enumerate() {
            let d = (p - pin.near).norm();
            if d < best.0 {
                best = (d, v);
            }
        }
        let v = best.1;
        let val = (pin.value)(mesh.vertices[v]);
        for comp in 0..2 {
            if pin.components[comp] {
                constraints.entry(2 * v + comp).or_insert(if comp == 0 {
                    val.x
                } else {
                    val.y
                });
            }
        }
    }

    // Every boundary edge must carry some condition.
    for edge in &mesh.boundary_edges {
        let has_dirichlet = problem.dirichlet.iter().any(|s| s.marker == edge.marker);
        let has_traction = problem.tractions.iter().any(|s| s.marker == edge.marker);
        if !has_dirichlet && !has_traction {
            return Err(Error::BoundaryCondition(format!(
                "boundary marker `{}` has no condition attached",
                edge.marker
            )));
        }
    }

    Ok(GlobalSystem {
        n_vertices: mesh.num_vertices(),
        k: SymCsr::from_upper_triplets(n_dofs, &triplets),
        load,
        constraints,
        elements,
    })
}

/// Constrained system after symmetric elimination.
pub struct ReducedSystem {
    /// Global dof of each reduced unknown.
    pub free: Vec<usize>,
    pub k: SymCsr,
    pub rhs: DVector<f64>,
}

/// Eliminates constrained DOFs symmetrically, moving known values to the
/// right-hand side.
pub fn apply_dirichlet(system: &GlobalSystem) -> Result<ReducedSystem> {
    let n = system.k.n;
    if system.constraints.is_empty() {
        return Err(Error::BoundaryCondition(
            "no Dirichlet constraints; rigid modes are unconstrained".into(),
        ));
    }
    let mut index = vec![None; n];
    let mut free = Vec::new();
    for dof in 0..n {
        if !system.constraints.contains_key(&dof) {
            index[dof] = Some(free.len());
            free.push(dof);
        }
    }
    let mut rhs = DVector::zeros(free.len());
    for (ri, &dof) in free.iter().enumerate() {
        rhs[ri] = system.load[dof];
    }
    let mut triplets = Vec::new();
    for (ri, &dof) in free.iter().enumerate() {
        for k in system.k.row_ptr[dof]..system.k.row_ptr[dof + 1] {
            let j = system.k.col_idx[k];
            let v = system.k.vals[k];
            match index[j] {
                Some(rj) => {
                    if ri <= rj {
                        triplets.push((ri, rj, v));
                    }
                }
                None => {
                    rhs[ri] -= v * system.constraints[&j];
                }
            }
        }
    }
    let k = SymCsr::from_upper_triplets(free.len(), &triplets);
    Ok(ReducedSystem { free, k, rhs })
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Full nodal vector (interleaved), constrained values included.
    pub u: DVector<f64>,
    /// Relative residual of the reduced solve.
    pub residual: f64,
    /// (dof, reaction) at constrained DOFs.
    pub reactions: Vec<(usize, f64)>,
    /// Strain energy ½ uᵀKu.
    pub energy: f64,
}

impl Solution {
    pub fn displacement(&self, vertex: usize) -> Vector2<f64> {
        Vector2::new(self.u[2 * vertex], self.u[2 * vertex + 1])
    }
}

/// Threshold between the dense and the envelope Cholesky paths.
const DENSE_LIMIT: usize = 1200;
/// Threshold between direct factorization and conjugate gradients.
const DIRECT_LIMIT: usize = 200_000;

/// Solves the constrained system with a direct symmetric factorization
/// (dense or RCM-reordered envelope Cholesky), falling back to conjugate
/// gradients with a 1e-12 relative tolerance above the direct limit.
pub fn solve(system: &GlobalSystem) -> Result<Solution> {
    let reduced = apply_dirichlet(system)?;
    let nf = reduced.free.len();
    let x = if nf == 0 {
        DVector::zeros(0)
    } else if nf <= DENSE_LIMIT {
        let mut dense = DMatrix::zeros(nf, nf);
        for i in 0..nf {
            for k in reduced.k.row_ptr[i]..reduced.k.row_ptr[i + 1] {
                dense[(i, reduced.k.col_idx[k])] = reduced.k.vals[k];
            }
        }
        match dense.clone().cholesky() {
            Some(ch) => ch.solve(&reduced.rhs),
            None => {
                let min_eig = dense
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                return Err(Error::Solver(format!(
                    "reduced system is not positive definite \
                     (smallest eigenvalue {min_eig:.3e}); spurious modes or missing constraints"
                )));
            }
        }
    } else if nf <= DIRECT_LIMIT {
        // Permute for profile, factor, solve, permute back.
        let perm = reverse_cuthill_mckee(&reduced.k);
        let mut inv = vec![0usize; nf];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut trip = Vec::with_capacity(reduced.k.vals.len());
        for i in 0..nf {
            for k in reduced.k.row_ptr[i]..reduced.k.row_ptr[i + 1] {
                let j = reduced.k.col_idx[k];
                if i <= j {
                    trip.push((inv[i].min(inv[j]), inv[i].max(inv[j]), reduced.k.vals[k]));
                }
            }
        }
        let kp = SymCsr::from_upper_triplets(nf, &trip);
        let chol = EnvelopeCholesky::factor(&kp)?;
        let bp = DVector::from_fn(nf, |i, _| reduced.rhs[perm[i]]);
        let xp = chol.solve(&bp);
        DVector::from_fn(nf, |i, _| xp[inv[i]])
    } else {
        conjugate_gradient(&reduced.k, &reduced.rhs, 1e-12, 40 * nf)?
    };

    let residual = if nf == 0 {
        0.0
    } else {
        let r = reduced.k.mat_vec(&x) - &reduced.rhs;
        let denom = reduced.rhs.norm().max(f64::MIN_POSITIVE);
        r.norm() / denom
    };

    let n = system.k.n;
    let mut u = DVector::zeros(n);
    for (&dof, &val) in &system.constraints {
        u[dof] = val;
    }
    for (ri, &dof) in reduced.free.iter().enumerate() {
        u[dof] = x[ri];
    }
    let ku = system.k.mat_vec(&u);
    let reactions: Vec<(usize, f64)> = system
        .constraints
        .keys()
        .map(|&dof| (dof, ku[dof] - system.load[dof]))
        .collect();
    let energy = 0.5 * u.dot(&ku);
    Ok(Solution {
        u,
        residual,
        reactions,
        energy,
    })
}

/// Writes the solution dump (`sfvem-solution 1`, lines `vertex ux uy`).
pub fn save_solution(path: impl AsRef<std::path::Path>, sol: &Solution) -> Result<()> {
    use std::fmt::Write as _;
    let n = sol.u.len() / 2;
    let mut s = String::from("sfvem-solution 1\n");
    for v in 0..n {
        let _ = writeln!(s, "{v} {} {}", sol.u[2 * v], sol.u[2 * v + 1]);
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Writes the reaction dump (`sfvem-reactions 1`, lines `vertex rx ry`).
pub fn save_reactions(path: impl AsRef<std::path::Path>, sol: &Solution) -> Result<()> {
    use std::fmt::Write as _;
    let mut per_vertex: BTreeMap<usize, [f64; 2]> = BTreeMap::new();
    for &(dof, r) in &sol.reactions {
        per_vertex.entry(dof / 2).or_insert([0.0, 0.0])[dof % 2] = r;
    }
    let mut s = String::from("sfvem-reactions 1\n");
    for (v, r) in per_vertex {
        let _ = writeln!(s, "{v} {} {}", r[0], r[1]);
    }
    std::fs::write(path, s)?;
    Ok(())
}
