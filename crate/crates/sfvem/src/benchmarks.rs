//! Benchmark problem definitions with their analytic solutions.
//!
//! Every case carries closures for the exact displacement and stress. The
//! fields are self-checked on construction: equilibrium (div σ = 0) by
//! finite differences at interior sample points, strain/stress consistency
//! by differentiating the displacement, and the boundary conditions at
//! sampled boundary points.

use crate::assembly::{
    DirichletSpec, ExactSolution, FieldFn, Hypothesis, MaterialModel, PointPin,
    ProblemDefinition, StressFn, TractionSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{
    generate_structured_quads, generate_voronoi_lloyd, split_quads_nonconvex, DomainSdf, Point,
    PolyMesh, Rect,
};
use nalgebra::{Vector2, Vector3};
use std::sync::Arc;

/// How the meshes of a case are produced.
#[derive(Debug, Clone)]
pub enum MeshFamily {
    /// Lloyd-relaxed Voronoi meshes of the domain.
    Voronoi(DomainSdf),
    /// Structured quads split into nonconvex heptagons; sizes are heptagon
    /// counts of the form 2·(8k)·k for the 8×1 beam.
    NonconvexBeam(Rect),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// The three fixed 16-element patch meshes.
    Patch,
    /// A refinement sequence for rate measurement.
    Converge,
}

#[derive(Clone)]
pub struct BenchmarkCase {
    pub name: &'static str,
    pub kind: CaseKind,
    pub family: MeshFamily,
    pub problem: ProblemDefinition,
    pub default_sizes: Vec<usize>,
    pub default_lloyd: usize,
    pub expected_l2_slope: f64,
    pub expected_energy_slope: f64,
}

impl BenchmarkCase {
    /// Generates the mesh of the given size.
    pub fn mesh(&self, size: usize, lloyd: usize, seed: u64) -> Result<PolyMesh> {
        match &self.family {
            MeshFamily::Voronoi(domain) => generate_voronoi_lloyd(domain, size, lloyd, seed),
            MeshFamily::NonconvexBeam(rect) => {
                // size = 2·nx·ny heptagons with nx = 8·ny on the 8:1 beam.
                let ny = ((size as f64 / 16.0).sqrt()).round().max(1.0) as usize;
                let nx = (size as f64 / (2.0 * ny as f64)).round().max(1.0) as usize;
                let quads = generate_structured_quads(*rect, nx, ny)?;
                split_quads_nonconvex(&quads)
            }
        }
    }

    pub fn exact(&self) -> &ExactSolution {
        self.problem.exact.as_ref().expect("benchmark carries exact fields")
    }
}

/// Registry for the CLI.
pub fn case_by_name(name: &str) -> Result<BenchmarkCase> {
    match name {
        "patch" => case_patch(),
        "beam" => case_cantilever(),
        "beam-nonconvex" => case_cantilever_nonconvex(),
        "plate-hole" => case_plate_hole(),
        "cylinder" => case_cylinder(),
        other => Err(Error::InvalidArgument(format!(
            "unknown case `{other}` (expected patch|beam|beam-nonconvex|plate-hole|cylinder)"
        ))),
    }
}

pub const CASE_NAMES: [&str; 5] = ["patch", "beam", "beam-nonconvex", "plate-hole", "cylinder"];

/// Affine displacement patch test on the unit square.
pub fn case_patch() -> Result<BenchmarkCase> {
    let material = MaterialModel::new(1.0, 0.3, Hypothesis::PlaneStress)?;
    let c = material.c;
    let displacement: FieldFn = Arc::new(|p: Point| Vector2::new(p.x, p.x + p.y));
    let sigma = c * Vector3::new(1.0, 1.0, 1.0);
    let stress: StressFn = Arc::new(move |_| sigma);

    let mut problem = ProblemDefinition::new(material);
    for marker in ["left", "right", "bottom", "top"] {
        problem.dirichlet.push(DirichletSpec {
            marker: marker.into(),
            components: [true, true],
            value: displacement.clone(),
        });
    }
    problem.exact = Some(ExactSolution {
        displacement,
        stress,
    });
    let case = BenchmarkCase {
        name: "patch",
        kind: CaseKind::Patch,
        family: MeshFamily::Voronoi(DomainSdf::unit_square()),
        problem,
        default_sizes: vec![16, 16, 16],
        default_lloyd: 3,
        expected_l2_slope: f64::NAN,
        expected_energy_slope: f64::NAN,
    };
    verify_case(&case)?;
    Ok(case)
}

/// Cantilever parameters shared by the convex and nonconvex runs.
struct Cantilever {
    length: f64,
    depth: f64,
    e_young: f64,
    nu: f64,
    /// Signed resultant of the end shear (negative = downward).
    load: f64,
}

impl Cantilever {
    fn paper() -> Self {
        Cantilever {
            length: 8.0,
            depth: 1.0,
            e_young: 2e5,
            nu: 0.3,
            load: -1000.0,
        }
    }

    fn inertia(&self) -> f64 {
        self.depth.powi(3) / 12.0
    }

    /// Shear field magnitude: σ_xx = pf (L − x) y / I has end resultant
    /// −pf, so pf = −load.
    fn pf(&self) -> f64 {
        -self.load
    }

    fn displacement(&self, p: Point) -> Vector2<f64> {
        let (l, d, e, nu) = (self.length, self.depth, self.e_young, self.nu);
        let i = self.inertia();
        let pf = self.pf();
        let (x, y) = (p.x, p.y);
        let ux = pf / (e * i)
            * (y * (l * x - 0.5 * x * x) - nu * y.powi(3) / 6.0
                - (1.0 + nu) * (d * d * y / 4.0 - y.powi(3) / 3.0));
        let uy = -pf / (e * i)
            * (nu * (l - x) * y * y / 2.0 + 0.5 * l * x * x - x.powi(3) / 6.0);
        Vector2::new(ux, uy)
    }

    fn stress(&self, p: Point) -> Vector3<f64> {
        let (l, d) = (self.length, self.depth);
        let i = self.inertia();
        let pf = self.pf();
        Vector3::new(
            pf * (l - p.x) * p.y / i,
            0.0,
            -pf * (d * d / 4.0 - p.y * p.y) / (2.0 * i),
        )
    }

    /// Tip deflection at (L, 0).
    pub fn tip_deflection(&self) -> f64 {
        -self.pf() * self.length.powi(3) / (3.0 * self.e_young * self.inertia())
    }
}

fn cantilever_problem() -> Result<ProblemDefinition> {
    let beam = Cantilever::paper();
    let material = MaterialModel::new(beam.e_young, beam.nu, Hypothesis::PlaneStress)?;
    let displacement: FieldFn = {
        let b = Cantilever::paper();
        Arc::new(move |p| b.displacement(p))
    };
    let stress: StressFn = {
        let b = Cantilever::paper();
        Arc::new(move |p| b.stress(p))
    };

    let mut problem = ProblemDefinition::new(material);
    problem.dirichlet.push(DirichletSpec {
        marker: "left".into(),
        components: [true, true],
        value: displacement.clone(),
    });
    // End shear: the exact traction of the shear-loaded beam (its resultant
    // is the applied load).
    let s = stress.clone();
    problem.tractions.push(TractionSpec {
        marker: "right".into(),
        value: Arc::new(move |p, n| voigt_traction(s(p), n)),
    });
    problem.tractions.push(TractionSpec::free("top"));
    problem.tractions.push(TractionSpec::free("bottom"));
    problem.marker_priority = vec!["left".into()];
    problem.exact = Some(ExactSolution {
        displacement,
        stress,
    });
    Ok(problem)
}

/// Shear-end-loaded cantilever on Lloyd Voronoi meshes.
pub fn case_cantilever() -> Result<BenchmarkCase> {
    let beam = Cantilever::paper();
    let rect = DomainSdf::Rectangle {
        x0: 0.0,
        x1: beam.length,
        y0: -beam.depth / 2.0,
        y1: beam.depth / 2.0,
    };
    let case = BenchmarkCase {
        name: "beam",
        kind: CaseKind::Converge,
        family: MeshFamily::Voronoi(rect),
        problem: cantilever_problem()?,
        default_sizes: vec![150, 350, 800, 1800, 3500],
        default_lloyd: 25,
        expected_l2_slope: 2.0,
        expected_energy_slope: 1.0,
    };
    verify_case(&case)?;
    Ok(case)
}

/// The same cantilever on nonconvex heptagon meshes.
pub fn case_cantilever_nonconvex() -> Result<BenchmarkCase> {
    let beam = Cantilever::paper();
    let case = BenchmarkCase {
        name: "beam-nonconvex",
        kind: CaseKind::Converge,
        family: MeshFamily::NonconvexBeam(Rect {
            x0: 0.0,
            x1: beam.length,
            y0: -beam.depth / 2.0,
            y1: beam.depth / 2.0,
        }),
        problem: cantilever_problem()?,
        default_sizes: vec![64, 256, 1024],
        default_lloyd: 0,
        expected_l2_slope: 2.0,
        expected_energy_slope: 1.0,
    };
    verify_case(&case)?;
    Ok(case)
}

/// Kirsch fields: infinite plate with a traction-free hole of radius `a`
/// under remote uniaxial tension `s0` along x, plane strain.
struct Kirsch {
    a: f64,
    s0: f64,
    e_young: f64,
    nu: f64,
}

impl Kirsch {
    fn paper() -> Self {
        Kirsch {
            a: 1.0,
            s0: 1.0,
            e_young: 2e7,
            nu: 0.3,
        }
    }

    fn stress(&self, p: Point) -> Vector3<f64> {
        let r2 = p.coords.norm_squared();
        let r = r2.sqrt();
        let th = p.y.atan2(p.x);
        let (a2, s0) = (self.a * self.a, self.s0);
        let q = a2 / r2;
        let q2 = q * q;
        let c2 = (2.0 * th).cos();
        let s2 = (2.0 * th).sin();
        let srr = 0.5 * s0 * (1.0 - q) + 0.5 * s0 * (1.0 - 4.0 * q + 3.0 * q2) * c2;
        let stt = 0.5 * s0 * (1.0 + q) - 0.5 * s0 * (1.0 + 3.0 * q2) * c2;
        let srt = -0.5 * s0 * (1.0 + 2.0 * q - 3.0 * q2) * s2;
        let _ = r;
        // Rotate the polar tensor into Cartesian axes.
        let (c, s) = (th.cos(), th.sin());
        let sxx = srr * c * c + stt * s * s - 2.0 * srt * s * c;
        let syy = srr * s * s + stt * c * c + 2.0 * srt * s * c;
        let sxy = (srr - stt) * s * c + srt * (c * c - s * s);
        Vector3::new(sxx, syy, sxy)
    }

    fn displacement(&self, p: Point) -> Vector2<f64> {
        let mu = self.e_young / (2.0 * (1.0 + self.nu));
        let kappa = 3.0 - 4.0 * self.nu;
        let r = p.coords.norm();
        let th = p.y.atan2(p.x);
        let (a, s0) = (self.a, self.s0);
        let a2r = a * a / r;
        let c2 = (2.0 * th).cos();
        let s2 = (2.0 * th).sin();
        let ur = s0 / (4.0 * mu)
            * (0.5 * (kappa - 1.0) * r
                + a2r
                + (r + (kappa + 1.0) * a2r - a.powi(4) / r.powi(3)) * c2);
        let ut = -s0 / (4.0 * mu) * (r + (kappa - 1.0) * a2r + a.powi(4) / r.powi(3)) * s2;
        let (c, s) = (th.cos(), th.sin());
        Vector2::new(ur * c - ut * s, ur * s + ut * c)
    }
}

/// Quarter plate with a circular hole, exact tractions on the outer edges
/// and symmetry pinning on the straight cuts.
pub fn case_plate_hole() -> Result<BenchmarkCase> {
    let k = Kirsch::paper();
    let material = MaterialModel::new(k.e_young, k.nu, Hypothesis::PlaneStrain)?;
    let displacement: FieldFn = {
        let k = Kirsch::paper();
        Arc::new(move |p| k.displacement(p))
    };
    let stress: StressFn = {
        let k = Kirsch::paper();
        Arc::new(move |p| k.stress(p))
    };

    let mut problem = ProblemDefinition::new(material);
    let zero: FieldFn = Arc::new(|_| Vector2::zeros());
    // Symmetry: u_x = 0 on the left cut, u_y = 0 on the bottom cut.
    problem.dirichlet.push(DirichletSpec {
        marker: "left".into(),
        components: [true, false],
        value: zero.clone(),
    });
    problem.dirichlet.push(DirichletSpec {
        marker: "bottom".into(),
        components: [false, true],
        value: zero,
    });
    let s = stress.clone();
    problem.tractions.push(TractionSpec {
        marker: "right".into(),
        value: Arc::new(move |p, n| voigt_traction(s(p), n)),
    });
    let s = stress.clone();
    problem.tractions.push(TractionSpec {
        marker: "top".into(),
        value: Arc::new(move |p, n| voigt_traction(s(p), n)),
    });
    problem.tractions.push(TractionSpec::free("hole"));
    problem.marker_priority = vec!["left".into(), "bottom".into()];
    problem.exact = Some(ExactSolution {
        displacement,
        stress,
    });

    let case = BenchmarkCase {
        name: "plate-hole",
        kind: CaseKind::Converge,
        family: MeshFamily::Voronoi(DomainSdf::QuarterPlateHole { l: 5.0, a: k.a }),
        problem,
        default_sizes: vec![250, 600, 1500, 3000, 6000],
        default_lloyd: 25,
        expected_l2_slope: 2.0,
        expected_energy_slope: 1.0,
    };
    verify_case(&case)?;
    Ok(case)
}

/// Lamé fields for the pressurized thick cylinder, plane strain.
struct Lame {
    a: f64,
    b: f64,
    pressure: f64,
    e_young: f64,
    nu: f64,
}

impl Lame {
    fn paper() -> Self {
        // The paper fixes geometry and pressure; the elastic constants are
        // not stated and only enter the error scaling.
        Lame {
            a: 1.0,
            b: 5.0,
            pressure: 1e5,
            e_young: 2e5,
            nu: 0.3,
        }
    }

    fn coeff_a(&self) -> f64 {
        self.pressure * self.a * self.a / (self.b * self.b - self.a * self.a)
    }

    fn coeff_b(&self) -> f64 {
        self.coeff_a() * self.b * self.b
    }

    fn stress(&self, p: Point) -> Vector3<f64> {
        let r2 = p.coords.norm_squared();
        let srr = self.coeff_a() - self.coeff_b() / r2;
        let stt = self.coeff_a() + self.coeff_b() / r2;
        let th = p.y.atan2(p.x);
        let (c, s) = (th.cos(), th.sin());
        Vector3::new(
            srr * c * c + stt * s * s,
            srr * s * s + stt * c * c,
            (srr - stt) * s * c,
        )
    }

    fn displacement(&self, p: Point) -> Vector2<f64> {
        let r = p.coords.norm();
        let ur = (1.0 + self.nu) / self.e_young
            * (self.coeff_a() * (1.0 - 2.0 * self.nu) * r + self.coeff_b() / r);
        Vector2::new(ur * p.x / r, ur * p.y / r)
    }
}

/// Full annulus under internal pressure; rigid modes removed by pinning
/// three DOFs at their exact values.
pub fn case_cylinder() -> Result<BenchmarkCase> {
    let lame = Lame::paper();
    let material = MaterialModel::new(lame.e_young, lame.nu, Hypothesis::PlaneStrain)?;
    let displacement: FieldFn = {
        let l = Lame::paper();
        Arc::new(move |p| l.displacement(p))
    };
    let stress: StressFn = {
        let l = Lame::paper();
        Arc::new(move |p| l.stress(p))
    };

    let mut problem = ProblemDefinition::new(material);
    let s = stress.clone();
    problem.tractions.push(TractionSpec {
        marker: "inner".into(),
        value: Arc::new(move |p, n| voigt_traction(s(p), n)),
    });
    problem.tractions.push(TractionSpec::free("outer"));
    let mid = 0.5 * (lame.a + lame.b);
    problem.point_pins.push(PointPin {
        near: Point::new(mid, 0.0),
        components: [true, true],
        value: displacement.clone(),
    });
    problem.point_pins.push(PointPin {
        near: Point::new(-mid, 0.0),
        components: [false, true],
        value: displacement.clone(),
    });
    problem.exact = Some(ExactSolution {
        displacement,
        stress,
    });

    let case = BenchmarkCase {
        name: "cylinder",
        kind: CaseKind::Converge,
        family: MeshFamily::Voronoi(DomainSdf::Annulus {
            a: lame.a,
            b: lame.b,
        }),
        problem,
        default_sizes: vec![250, 600, 1500, 3000, 6000],
        default_lloyd: 25,
        expected_l2_slope: 2.0,
        expected_energy_slope: 1.0,
    };
    verify_case(&case)?;
    Ok(case)
}

/// Tip midpoint of the cantilever and its analytic deflection.
pub fn cantilever_tip() -> (Point, f64) {
    let b = Cantilever::paper();
    (Point::new(b.length, 0.0), b.tip_deflection())
}

/// Traction vector σ·n from a Voigt stress.
pub fn voigt_traction(sigma: Vector3<f64>, n: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(
        sigma[0] * n.x + sigma[2] * n.y,
        sigma[2] * n.x + sigma[1] * n.y,
    )
}

/// Self-check of the analytic fields: equilibrium, stress/strain
/// consistency, and boundary conditions at sampled points.
pub fn verify_case(case: &BenchmarkCase) -> Result<()> {
    let exact = case
        .problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("benchmark lacks exact fields".into()))?;
    let pts = interior_samples(case);
    let scale = typical_stress_scale(case, &pts, exact);
    let fd = fd_step(case);

    for &p in &pts {
        // div σ + f = 0 (all benchmarks are body-force-free).
        let dx = {
            let sp = (exact.stress)(Point::new(p.x + fd, p.y));
            let sm = (exact.stress)(Point::new(p.x - fd, p.y));
            (sp - sm) / (2.0 * fd)
        };
        let dy = {
            let sp = (exact.stress)(Point::new(p.x, p.y + fd));
            let sm = (exact.stress)(Point::new(p.x, p.y - fd));
            (sp - sm) / (2.0 * fd)
        };
        let div = Vector2::new(dx[0] + dy[2], dx[2] + dy[1]);
        if div.norm() > 1e-6 * scale / lenscale(case) {
            return Err(Error::InvalidArgument(format!(
                "{}: equilibrium residual {:.3e} at ({:.3}, {:.3})",
                case.name,
                div.norm(),
                p.x,
                p.y
            )));
        }

        // ε(u) from finite differences must match C⁻¹σ.
        let du_dx = ((exact.displacement)(Point::new(p.x + fd, p.y))
            - (exact.displacement)(Point::new(p.x - fd, p.y)))
            / (2.0 * fd);
        let du_dy = ((exact.displacement)(Point::new(p.x, p.y + fd))
            - (exact.displacement)(Point::new(p.x, p.y - fd)))
            / (2.0 * fd);
        let eps_fd = Vector3::new(du_dx.x, du_dy.y, du_dx.y + du_dy.x);
        let eps = case.problem.material.strain_from_stress((exact.stress)(p));
        let strain_scale = eps.norm().max(scale / case.problem.material.e_young);
        if (eps_fd - eps).norm() > 1e-5 * strain_scale {
            return Err(Error::InvalidArgument(format!(
                "{}: strain mismatch {:.3e} at ({:.3}, {:.3})",
                case.name,
                (eps_fd - eps).norm(),
                p.x,
                p.y
            )));
        }
    }

    // Traction-free and loaded boundaries match σ·n to 1e-8 relative.
    for (p, n, t_expected) in boundary_samples(case, exact) {
        let t = voigt_traction((exact.stress)(p), n);
        if (t - t_expected).norm() > 1e-8 * scale {
            return Err(Error::InvalidArgument(format!(
                "{}: boundary traction residual {:.3e} at ({:.3}, {:.3})",
                case.name,
                (t - t_expected).norm(),
                p.x,
                p.y
            )));
        }
    }
    Ok(())
}

fn lenscale(case: &BenchmarkCase) -> f64 {
    match &case.family {
        MeshFamily::Voronoi(d) => d.length_scale(),
        MeshFamily::NonconvexBeam(r) => ((r.x1 - r.x0).powi(2) + (r.y1 - r.y0).powi(2)).sqrt(),
    }
}

fn fd_step(case: &BenchmarkCase) -> f64 {
    1e-6 * lenscale(case)
}

fn interior_samples(case: &BenchmarkCase) -> Vec<Point> {
    // A fixed low-discrepancy-ish sweep, filtered to the interior with a
    // margin that keeps finite-difference stencils inside.
    let mut pts = Vec::new();
    let (lo, hi, margin, inside): (Point, Point, f64, Box<dyn Fn(Point) -> bool>) =
        match &case.family {
            MeshFamily::Voronoi(d) => {
                let (lo, hi) = d.bbox();
                let m = 0.02 * d.length_scale();
                let dd = *d;
                (lo, hi, m, Box::new(move |p| dd.distance(p) < -m))
            }
            MeshFamily::NonconvexBeam(r) => {
                let lo = Point::new(r.x0, r.y0);
                let hi = Point::new(r.x1, r.y1);
                let m = 0.02 * (r.y1 - r.y0);
                let r = *r;
                (
                    lo,
                    hi,
                    m,
                    Box::new(move |p| {
                        p.x > r.x0 + m && p.x < r.x1 - m && p.y > r.y0 + m && p.y < r.y1 - m
                    }),
                )
            }
        };
    let _ = margin;
    let n = 12;
    for i in 0..n {
        for j in 0..n {
            let fx = (i as f64 + 0.5) / n as f64;
            let fy = (j as f64 + 0.5) / n as f64;
            let p = Point::new(lo.x + fx * (hi.x - lo.x), lo.y + fy * (hi.y - lo.y));
            if inside(p) {
                pts.push(p);
            }
        }
    }
    pts
}

/// Sampled boundary points with their outward normal and the traction each
/// case prescribes there (zero on free boundaries, σ·n where loads are
/// prescribed from the exact fields — those are identities by construction,
/// so the informative checks are the traction-free ones).
fn boundary_samples(
    case: &BenchmarkCase,
    exact: &ExactSolution,
) -> Vec<(Point, Vector2<f64>, Vector2<f64>)> {
    let mut out = Vec::new();
    let ts = |p: Point, n: Vector2<f64>| voigt_traction((exact.stress)(p), n);
    match case.name {
        "beam" | "beam-nonconvex" => {
            let b = Cantilever::paper();
            for i in 0..16 {
                let x = (i as f64 + 0.5) / 16.0 * b.length;
                // Free top and bottom fibers.
                out.push((
                    Point::new(x, b.depth / 2.0),
                    Vector2::new(0.0, 1.0),
                    Vector2::zeros(),
                ));
                out.push((
                    Point::new(x, -b.depth / 2.0),
                    Vector2::new(0.0, -1.0),
                    Vector2::zeros(),
                ));
            }
            for i in 0..8 {
                let y = -b.depth / 2.0 + (i as f64 + 0.5) / 8.0 * b.depth;
                let p = Point::new(b.length, y);
                let n = Vector2::new(1.0, 0.0);
                out.push((p, n, ts(p, n)));
            }
        }
        "plate-hole" => {
            let k = Kirsch::paper();
            for i in 0..16 {
                let th = (i as f64 + 0.5) / 16.0 * std::f64::consts::FRAC_PI_2;
                let p = Point::new(k.a * th.cos(), k.a * th.sin());
                let n = -Vector2::new(th.cos(), th.sin());
                out.push((p, n, Vector2::zeros()));
            }
        }
        "cylinder" => {
            let l = Lame::paper();
            for i in 0..16 {
                let th = (i as f64 + 0.5) / 16.0 * std::f64::consts::TAU;
                let e_r = Vector2::new(th.cos(), th.sin());
                // Outer rim is free; inner rim carries pressure p (σ·n with
                // n = −e_r equals +p e_r).
                out.push((
                    Point::new(l.b * e_r.x, l.b * e_r.y),
                    e_r,
                    Vector2::zeros(),
                ));
                out.push((
                    Point::new(l.a * e_r.x, l.a * e_r.y),
                    -e_r,
                    l.pressure * e_r,
                ));
            }
        }
        _ => {}
    }
    out
}

fn typical_stress_scale(
    case: &BenchmarkCase,
    pts: &[Point],
    exact: &ExactSolution,
) -> f64 {
    let _ = case;
    pts.iter()
        .map(|&p| (exact.stress)(p).norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE)
}
