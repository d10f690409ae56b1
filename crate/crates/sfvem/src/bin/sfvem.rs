//! Command-line driver reproducing the benchmark experiments.
//!
//! Exit codes: 0 success, 1 result outside the acceptance gates, 2 input or
//! validation error.

use clap::{Parser, Subcommand, ValueEnum};
use sfvem::analysis::{
    convergence_csv, eigen_csv, eigen_scan, error_energy, error_l2, error_linf, first_failures,
    fit_convergence, gnuplot_data, ElementFamily, ErrorReport,
};
use sfvem::assembly::{assemble_global, solve, ElementKind};
use sfvem::benchmarks::{case_by_name, BenchmarkCase, CaseKind};
use sfvem::geometry::{self, generate_structured_quads, Rect};
use sfvem::polyspace::DegreePolicy;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sfvem", version, about = "Stabilization-free VEM for plane elasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// Smallest ℓ with N_E ≤ 2ℓ+3.
    Paper,
    /// Smallest ℓ with N_E ≤ 2ℓ+2 (default).
    Strict,
    /// Strict start plus per-element eigenvalue verification.
    Verified,
}

impl From<PolicyArg> for DegreePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Paper => DegreePolicy::PaperSufficient,
            PolicyArg::Strict => DegreePolicy::StrictRegular,
            PolicyArg::Verified => DegreePolicy::Verified,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Linear displacement patch test on uniform, random and Lloyd meshes.
    Patch {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lloyd iterations for the relaxed mesh.
        #[arg(long, default_value_t = 3)]
        lloyd: usize,
        /// Run the patch problem on a user mesh instead of the built-in trio.
        #[arg(long)]
        mesh_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
        ell_policy: PolicyArg,
        #[arg(long, default_value = "sfvem-out")]
        out: PathBuf,
    },
    /// Element-eigenvalue spurious-mode scan over both element families.
    Eigenscan {
        #[arg(long, default_value = "sfvem-out")]
        out: PathBuf,
    },
    /// Convergence study of a named case.
    Converge {
        #[arg(long)]
        case: String,
        /// Comma-separated element counts; defaults to the case recipe.
        #[arg(long, value_delimiter = ',')]
        meshes: Option<Vec<usize>>,
        #[arg(long)]
        lloyd: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
        ell_policy: PolicyArg,
        /// Also run the stabilized baseline element.
        #[arg(long)]
        compare_stabilized: bool,
        #[arg(long, default_value = "sfvem-out")]
        out: PathBuf,
    },
    /// Solve a named case's boundary-value problem on a mesh file.
    Solve {
        #[arg(long)]
        mesh_file: PathBuf,
        #[arg(long)]
        case: String,
        #[arg(long, default_value = "sfvem-out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SFVEM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Patch {
            seed,
            lloyd,
            mesh_file,
            ell_policy,
            out,
        } => cmd_patch(seed, lloyd, mesh_file, ell_policy.into(), &out),
        Command::Eigenscan { out } => cmd_eigenscan(&out),
        Command::Converge {
            case,
            meshes,
            lloyd,
            seed,
            ell_policy,
            compare_stabilized,
            out,
        } => cmd_converge(
            &case,
            meshes,
            lloyd,
            seed,
            ell_policy.into(),
            compare_stabilized,
            &out,
        ),
        Command::Solve {
            mesh_file,
            case,
            out,
        } => cmd_solve(&mesh_file, &case, &out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run_case_on_mesh(
    case: &BenchmarkCase,
    mesh: &geometry::PolyMesh,
    mesh_id: &str,
    policy: DegreePolicy,
    kind: ElementKind,
) -> sfvem::Result<ErrorReport> {
    let sys = assemble_global(mesh, &case.problem, policy, kind)?;
    let sol = solve(&sys)?;
    let exact = case.exact();
    let u = exact.displacement.clone();
    let s = exact.stress.clone();
    Ok(ErrorReport {
        mesh_id: mesh_id.to_string(),
        n_cells: mesh.num_cells(),
        h_max: mesh.h_max()?,
        linf: error_linf(mesh, &sol, &*u),
        l2: error_l2(&sys.elements, &sol, &*u, 3)?,
        energy: error_energy(&sys.elements, &sol, &case.problem.material, &*s, 3)?,
    })
}

const PATCH_GATE: f64 = 1e-10;

fn cmd_patch(
    seed: u64,
    lloyd: usize,
    mesh_file: Option<PathBuf>,
    policy: DegreePolicy,
    out: &Path,
) -> sfvem::Result<bool> {
    std::fs::create_dir_all(out)?;
    let case = case_by_name("patch")?;
    let mut rows = Vec::new();
    match mesh_file {
        Some(path) => {
            let mesh = geometry::io::load_mesh(&path)?;
            rows.push(run_case_on_mesh(
                &case,
                &mesh,
                "user",
                policy,
                ElementKind::StabilizationFree,
            )?);
        }
        None => {
            let uniform = generate_structured_quads(Rect::unit(), 4, 4)?;
            let random = case.mesh(16, 0, seed)?;
            let relaxed = case.mesh(16, lloyd, seed)?;
            for (id, mesh) in [("uniform", uniform), ("random", random), ("lloyd", relaxed)] {
                rows.push(run_case_on_mesh(
                    &case,
                    &mesh,
                    id,
                    policy,
                    ElementKind::StabilizationFree,
                )?);
            }
        }
    }
    std::fs::write(out.join("patch.csv"), convergence_csv(&rows))?;
    println!("{:<10} {:>12} {:>12} {:>12}", "mesh", "Linf", "L2", "energy");
    let mut ok = true;
    for r in &rows {
        println!(
            "{:<10} {:>12.3e} {:>12.3e} {:>12.3e}",
            r.mesh_id, r.linf, r.l2, r.energy
        );
        ok &= r.linf <= PATCH_GATE && r.l2 <= PATCH_GATE && r.energy <= PATCH_GATE;
    }
    println!(
        "patch test: {}",
        if ok { "PASS" } else { "FAIL (error above 1e-10)" }
    );
    Ok(ok)
}

/// First spurious-mode vertex counts reproduced by the scan.
pub const CENTRAL_QUAD_THRESHOLDS: [(usize, usize); 4] = [(0, 4), (1, 6), (2, 9), (3, 11)];
pub const REGULAR_POLYGON_THRESHOLDS: [(usize, usize); 4] = [(0, 4), (1, 5), (2, 7), (3, 9)];

fn cmd_eigenscan(out: &Path) -> sfvem::Result<bool> {
    std::fs::create_dir_all(out)?;
    let ells = [0usize, 1, 2, 3];
    let mut rows = eigen_scan(ElementFamily::CentralQuad, &ells, 4..=14)?;
    rows.extend(eigen_scan(ElementFamily::RegularPolygon, &ells, 3..=14)?);
    std::fs::write(out.join("eigenscan.csv"), eigen_csv(&rows))?;

    let mut ok = true;
    for (family, expected) in [
        (ElementFamily::CentralQuad, &CENTRAL_QUAD_THRESHOLDS),
        (ElementFamily::RegularPolygon, &REGULAR_POLYGON_THRESHOLDS),
    ] {
        let fam_rows: Vec<_> = rows
            .iter()
            .filter(|r| r.family == family.name())
            .cloned()
            .collect();
        let failures = first_failures(&fam_rows);
        for &(ell, expect) in expected.iter() {
            let got = failures.get(&ell).copied();
            let pass = got == Some(expect);
            ok &= pass;
            println!(
                "{:<16} ell={} first spurious at N_E={:<3} expected {:<3} {}",
                family.name(),
                ell,
                got.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                expect,
                if pass { "PASS" } else { "FAIL" }
            );
        }
    }
    Ok(ok)
}

struct BandCheck {
    label: String,
    slope: f64,
    lo: f64,
    hi: f64,
}

impl BandCheck {
    fn pass(&self) -> bool {
        self.slope >= self.lo && self.slope <= self.hi
    }
}

fn cmd_converge(
    case_name: &str,
    meshes: Option<Vec<usize>>,
    lloyd: Option<usize>,
    seed: u64,
    policy: DegreePolicy,
    compare_stabilized: bool,
    out: &Path,
) -> sfvem::Result<bool> {
    let case = case_by_name(case_name)?;
    if case.kind == CaseKind::Patch {
        return Err(sfvem::Error::InvalidArgument(
            "use `sfvem patch` for the patch test".into(),
        ));
    }
    std::fs::create_dir_all(out)?;
    let sizes = meshes.unwrap_or_else(|| case.default_sizes.clone());
    let lloyd = lloyd.unwrap_or(case.default_lloyd);

    let mut kinds = vec![(ElementKind::StabilizationFree, "sf")];
    if compare_stabilized {
        kinds.push((ElementKind::Stabilized, "stabilized"));
    }
    let mut checks: Vec<BandCheck> = Vec::new();
    for (kind, tag) in kinds {
        let mut rows = Vec::new();
        for (i, &n) in sizes.iter().enumerate() {
            let mesh = case.mesh(n, lloyd, seed.wrapping_add(i as u64 * 1_000_003))?;
            let id = format!("{}-{}", tag, n);
            let row = run_case_on_mesh(&case, &mesh, &id, policy, kind)?;
            println!(
                "{:<18} cells={:<6} h={:.4e} Linf={:.4e} L2={:.4e} energy={:.4e}",
                id, row.n_cells, row.h_max, row.linf, row.l2, row.energy
            );
            rows.push(row);
        }
        let base = format!("{case_name}-{tag}");
        std::fs::write(out.join(format!("{base}.csv")), convergence_csv(&rows))?;
        std::fs::write(out.join(format!("{base}.dat")), gnuplot_data(&rows))?;

        let l2_fit = fit_convergence(
            &rows.iter().map(|r| (r.h_max, r.l2)).collect::<Vec<_>>(),
        )?;
        let en_fit = fit_convergence(
            &rows.iter().map(|r| (r.h_max, r.energy)).collect::<Vec<_>>(),
        )?;
        checks.push(BandCheck {
            label: format!("{base} L2"),
            slope: l2_fit.slope,
            lo: case.expected_l2_slope - 0.2,
            hi: case.expected_l2_slope + 0.2,
        });
        checks.push(BandCheck {
            label: format!("{base} energy"),
            slope: en_fit.slope,
            lo: case.expected_energy_slope - 0.15,
            hi: case.expected_energy_slope + 0.15,
        });
    }
    let mut ok = true;
    for c in &checks {
        println!(
            "{:<28} slope {:+.3} band [{:.2}, {:.2}] {}",
            c.label,
            c.slope,
            c.lo,
            c.hi,
            if c.pass() { "PASS" } else { "FAIL" }
        );
        ok &= c.pass();
    }
    Ok(ok)
}

fn cmd_solve(mesh_file: &Path, case_name: &str, out: &Path) -> sfvem::Result<bool> {
    std::fs::create_dir_all(out)?;
    let mesh = geometry::io::load_mesh(mesh_file)?;
    let case = case_by_name(case_name)?;
    let sys = assemble_global(
        &mesh,
        &case.problem,
        DegreePolicy::StrictRegular,
        ElementKind::StabilizationFree,
    )?;
    let sol = solve(&sys)?;
    sfvem::assembly::save_solution(out.join("solution.sol"), &sol)?;
    sfvem::assembly::save_reactions(out.join("reactions.rea"), &sol)?;
    println!(
        "dofs={} residual={:.3e} energy={:.6e}",
        sol.u.len(),
        sol.residual,
        sol.energy
    );
    let worst_cond = sys
        .elements
        .iter()
        .map(|e| e.g_cond)
        .fold(0.0f64, f64::max);
    println!("worst element G condition number: {worst_cond:.3e}");
    Ok(true)
}
