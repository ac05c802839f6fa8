//! Convergence studies, identity verification and the induction benchmark.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context, Result};
use friedrichs_core::assembly::{assemble_global, assemble_monolithic};
use friedrichs_core::basis::HybridField;
use friedrichs_core::dense::Lu;
use friedrichs_core::discretization::{Discretization, SchemeOptions};
use friedrichs_core::identities::{ah_direct, ah_reformulated, coercivity_rhs, ibp_sides, relative_gap};
use friedrichs_core::mesh::{generate_cartesian, generate_simplicial, Extent};
use friedrichs_core::model::{FriedrichsModel, InductionParams, RotatingCylinder, ScalarDar, VectorDar};
use friedrichs_core::post::{cell_averages, check_conservation, error_vs_interpolant, l2_error, ConservationReport, ErrorReport};
use friedrichs_core::solve::{solve_system, Bicgstab, LinearSolver, SolveReport};
use friedrichs_core::PolyMesh;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{stabilizer_name, MeshFamily, ModelId, SolverChoice, StudyConfig};
use crate::dat::{emit_dat, HEADER};
use crate::direct::SparseLu;
use crate::io::load_mesh;
use crate::voronoi::bcc_voronoi;
use crate::vtk::{write_vtk, CellArray};

/// `log(e1/e2) / log(h1/h2)`.
pub fn eoc(h1: f64, e1: f64, h2: f64, e2: f64) -> f64 {
    (e1 / e2).ln() / (h1 / h2).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EocRow {
    pub h: f64,
    pub error: f64,
    /// Rate against the previous row; `None` on the first.
    pub eoc: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EocTable {
    pub degree: usize,
    pub rows: Vec<EocRow>,
}

impl EocTable {
    /// Sorts the `(h, error)` pairs by decreasing `h` and fills in the rates.
    pub fn new(degree: usize, mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut rows: Vec<EocRow> = Vec::with_capacity(pairs.len());
        for (h, error) in pairs {
            let eoc = rows.last().map(|p| eoc(p.h, p.error, h, error));
            rows.push(EocRow { h, error, eoc });
        }
        EocTable { degree, rows }
    }

    pub fn final_eoc(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.eoc)
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.h, r.error)).collect()
    }
}

/// Box on which a model is posed: the unit cube for the manufactured
/// problems, the cube of side 1 centred on the rotation axis for induction.
pub fn domain(cfg: &StudyConfig) -> Extent {
    match cfg.model {
        ModelId::Induction => Extent::new([-0.5; 3], [0.5; 3]),
        _ => Extent::unit(cfg.dim),
    }
}

/// The mesh of the given family at one refinement level.
pub fn build_mesh(cfg: &StudyConfig, refinement: usize) -> Result<PolyMesh> {
    let extent = domain(cfg);
    let mesh = match &cfg.mesh_family {
        MeshFamily::Cart => generate_cartesian(refinement, cfg.dim, extent)?,
        MeshFamily::Tet => generate_simplicial(refinement, cfg.dim, extent)?,
        MeshFamily::Voronoi => bcc_voronoi(refinement, &extent, cfg.jitter, cfg.seed)?,
        MeshFamily::Files(files) => {
            let path = files
                .get(refinement.wrapping_sub(1))
                .ok_or_else(|| anyhow!("no mesh file for refinement {refinement}"))?;
            load_mesh(path)?
        }
    };
    Ok(mesh)
}

/// Model for the configuration; `omega` is only used by induction.
pub fn build_model(cfg: &StudyConfig, omega: f64) -> Result<Box<dyn FriedrichsModel>> {
    Ok(match cfg.model {
        ModelId::ScalarDar => Box::new(ScalarDar::manufactured(cfg.dim)),
        ModelId::VectorDar => Box::new(VectorDar::manufactured()),
        ModelId::Induction => Box::new(VectorDar::induction(&induction_params(cfg, omega))?),
    })
}

fn induction_params(cfg: &StudyConfig, omega: f64) -> InductionParams {
    InductionParams {
        sigma_mu: cfg.sigma_mu,
        omega,
        radius: cfg.radius,
        lambda: cfg.lambda,
        b0: cfg.b0,
    }
}

pub fn make_solver(cfg: &StudyConfig, dim: usize) -> Box<dyn LinearSolver> {
    let iterative = Box::new(Bicgstab {
        tol: cfg.tolerance,
        max_iterations: None,
    });
    match cfg.solver {
        SolverChoice::Direct => Box::new(SparseLu),
        SolverChoice::Bicgstab => iterative,
        SolverChoice::Auto if dim <= cfg.direct_limit => Box::new(SparseLu),
        SolverChoice::Auto => iterative,
    }
}

/// A solved problem with its solver statistics.
pub struct Solved {
    pub field: HybridField,
    pub report: SolveReport,
    pub wall: Duration,
}

pub fn solve_problem(cfg: &StudyConfig, disc: &Discretization<'_>) -> Result<Solved> {
    let start = Instant::now();
    let system = assemble_global(disc)?;
    let solver = make_solver(cfg, system.matrix.dim());
    let (field, report) = solve_system(disc, &system, solver.as_ref())?;
    Ok(Solved {
        field,
        report,
        wall: start.elapsed(),
    })
}

/// Default quadrature degree for the induction model. The velocity profile
/// changes over a distance `1/λ` around the cylinder wall, much thinner than
/// the cells, and the `2k + 2` rule samples `∇β` there too coarsely.
pub const INDUCTION_QUAD_DEGREE: usize = 14;

fn options(cfg: &StudyConfig, degree: usize) -> SchemeOptions {
    let mut o = SchemeOptions::new(degree).with_stabilization(cfg.stabilizer);
    o.jump_floor = cfg.jump_floor;
    o.quad_degree = match (cfg.quad_degree, cfg.model) {
        (None, ModelId::Induction) => Some(o.quad_degree().max(INDUCTION_QUAD_DEGREE)),
        (q, _) => q,
    };
    o
}

#[derive(Clone, Debug)]
pub struct RowData {
    pub error: ErrorReport,
    /// `‖u − u_T‖` against the exact solution.
    pub l2_true: f64,
    pub solve: SolveReport,
    pub wall: Duration,
    pub conservation: Option<ConservationReport>,
}

#[derive(Clone, Debug)]
pub struct StudyRecord {
    pub degree: usize,
    pub refinement: usize,
    pub h: f64,
    pub elements: usize,
    pub faces: usize,
    /// Failures are kept as messages and left out of the tables.
    pub outcome: std::result::Result<RowData, String>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub model: ModelId,
    pub family: String,
    pub stabilizer: &'static str,
    pub records: Vec<StudyRecord>,
    pub tables: Vec<EocTable>,
    pub warnings: Vec<String>,
}

impl ConvergenceStudy {
    pub fn table(&self, degree: usize) -> Option<&EocTable> {
        self.tables.iter().find(|t| t.degree == degree)
    }

    /// `<model>_<family>-data_rates-<k>.dat`
    pub fn dat_name(&self, degree: usize) -> String {
        format!("{}_{}-data_rates-{degree}.dat", self.model, self.family)
    }

    pub fn max_conservation(&self) -> f64 {
        self.records
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .filter_map(|d| d.conservation.as_ref())
            .fold(0.0, |m, c| m.max(c.max()))
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "convergence: model {} family {} stabilizer {}", self.model, self.family, self.stabilizer);
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for r in &self.records {
            match &r.outcome {
                Ok(d) => {
                    let _ = write!(
                        s,
                        "k={} n={} h={:.4e} cells={} faces={} dofs={} solver={} it={} res={:.2e} time={:.2}s error={:.6e} flat={:.6e} l2={:.6e}",
                        r.degree,
                        r.refinement,
                        r.h,
                        r.elements,
                        r.faces,
                        d.solve.dim,
                        d.solve.solver,
                        d.solve.iterations,
                        d.solve.relative_residual,
                        d.wall.as_secs_f64(),
                        d.error.energy,
                        d.error.flat,
                        d.l2_true,
                    );
                    if let Some(c) = &d.conservation {
                        let _ = write!(s, " conservation={:.2e}/{:.2e}/{:.2e}", c.interface, c.balance, c.boundary);
                    }
                    s.push('\n');
                }
                Err(e) => {
                    let _ = writeln!(s, "k={} n={} FAILED: {e}", r.degree, r.refinement);
                }
            }
        }
        for t in &self.tables {
            let _ = writeln!(s, "\nk = {}\n{:>14} {:>14} {:>8}", t.degree, "h", "error", "eoc");
            for row in &t.rows {
                let e = row.eoc.map(|v| format!("{v:8.3}")).unwrap_or_default();
                let _ = writeln!(s, "{:14.6e} {:14.6e} {e:>8}", row.h, row.error);
            }
        }
        s
    }

    /// Write one `.dat` file per nonempty table plus `report.txt`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        for t in self.tables.iter().filter(|t| !t.rows.is_empty()) {
            let path = dir.join(self.dat_name(t.degree));
            emit_dat(&path, HEADER, &t.pairs())?;
            written.push(path);
        }
        let path = dir.join("report.txt");
        fs::write(&path, self.report())?;
        written.push(path);
        Ok(written)
    }
}

fn solve_row(cfg: &StudyConfig, mesh: &PolyMesh, model: &dyn FriedrichsModel, degree: usize) -> Result<(RowData, Vec<String>)> {
    let disc = Discretization::new(mesh, model, options(cfg, degree))?;
    let solved = solve_problem(cfg, &disc)?;
    let exact = model
        .exact_solution()
        .ok_or_else(|| anyhow!("model {} has no exact solution", cfg.model))?;
    let error = error_vs_interpolant(&disc, exact, &solved.field)?;
    let l2_true = l2_error(&disc, exact, &solved.field)?;
    let conservation = if cfg.check_conservation {
        Some(check_conservation(&disc, &solved.field)?)
    } else {
        None
    };
    let data = RowData {
        error,
        l2_true,
        solve: solved.report,
        wall: solved.wall,
        conservation,
    };
    Ok((data, disc.refs.warnings.clone()))
}

/// Solve the manufactured problem on every (refinement, degree) pair and
/// tabulate `|||I_h u − u_h|||_h`. Writes the tables when `cfg.out` is set.
pub fn run_convergence(cfg: &StudyConfig) -> Result<ConvergenceStudy> {
    cfg.validate()?;
    if cfg.model == ModelId::Induction {
        return Err(anyhow!("the induction model has no manufactured solution; use the induction study"));
    }
    let model = build_model(cfg, 0.0)?;
    let mut records = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    for &n in &cfg.refinements {
        let mesh = build_mesh(cfg, n)?;
        for &k in &cfg.degrees {
            let outcome = match solve_row(cfg, &mesh, model.as_ref(), k) {
                Ok((d, w)) => {
                    for msg in w {
                        if !warnings.contains(&msg) {
                            warnings.push(msg);
                        }
                    }
                    Ok(d)
                }
                Err(e) => Err(format!("{e:#}")),
            };
            records.push(StudyRecord {
                degree: k,
                refinement: n,
                h: mesh.meshsize(),
                elements: mesh.n_elements(),
                faces: mesh.n_faces(),
                outcome,
            });
        }
    }
    let tables = cfg
        .degrees
        .iter()
        .map(|&k| {
            let pairs = records
                .iter()
                .filter(|r| r.degree == k)
                .filter_map(|r| r.outcome.as_ref().ok().map(|d| (r.h, d.error.energy)))
                .collect();
            EocTable::new(k, pairs)
        })
        .collect();
    let study = ConvergenceStudy {
        model: cfg.model,
        family: cfg.mesh_family.name().to_string(),
        stabilizer: stabilizer_name(cfg.stabilizer),
        records,
        tables,
        warnings,
    };
    if let Some(dir) = &cfg.out {
        study.write(dir)?;
    }
    Ok(study)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Largest value among checks whose name contains `pattern`.
    pub fn max_of(&self, pattern: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.contains(pattern))
            .fold(0.0, |m, c| m.max(c.value))
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {} {:.3e} (threshold {:.0e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
        }
        s
    }
}

pub const IDENTITY_TOL: f64 = 1e-12;
pub const SOLVE_TOL: f64 = 1e-9;
/// Largest mesh on which the dense monolithic oracle is run.
pub const MONOLITHIC_MAX_ELEMENTS: usize = 16;

fn random_field(disc: &Discretization<'_>, rng: &mut ChaCha8Rng) -> HybridField {
    let mut f = disc.space.zero_field();
    for c in &mut f.coeffs {
        *c = rng.gen_range(-1.0..1.0);
    }
    f
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Identity residuals on `pairs` random field pairs:
/// `[blocks vs direct, IBP, reformulation, coercivity]`.
pub fn identity_residuals(disc: &Discretization<'_>, pairs: usize, seed: u64) -> Result<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, _) = assemble_monolithic(disc)?;
    let mut gaps = [0.0_f64; 4];
    for _ in 0..pairs {
        let w = random_field(disc, &mut rng);
        let v = random_field(disc, &mut rng);
        let direct = ah_direct(disc, &w, &v)?;
        gaps[0] = gaps[0].max(relative_gap(direct, a.bilinear(&v.coeffs, &w.coeffs), 0.0));
        let (l, r, scale) = ibp_sides(disc, &w, &v)?;
        gaps[1] = gaps[1].max(relative_gap(l, r, scale));
        gaps[2] = gaps[2].max(relative_gap(direct, ah_reformulated(disc, &w, &v)?, 0.0));
        let c = coercivity_rhs(disc, &v)?;
        gaps[3] = gaps[3].max(relative_gap(ah_direct(disc, &v, &v)?, c, 0.0));
    }
    Ok(gaps)
}

/// `‖u_condensed − u_monolithic‖ / ‖u_monolithic‖`, both solved densely.
pub fn monolithic_gap(disc: &Discretization<'_>, condensed: &HybridField) -> Result<f64> {
    let (a, b) = assemble_monolithic(disc)?;
    let x = Lu::factor(a)
        .map_err(|e| anyhow!("monolithic matrix singular at column {}", e.column))?
        .solve(&b);
    let diff: Vec<f64> = x.iter().zip(&condensed.coeffs).map(|(p, q)| p - q).collect();
    Ok(norm(&diff) / norm(&x).max(f64::MIN_POSITIVE))
}

/// Run the identity suite and the solve checks for every configured
/// refinement and degree.
pub fn run_verify(cfg: &StudyConfig, seed: u64) -> Result<VerifyReport> {
    cfg.validate()?;
    let omega = match cfg.model {
        ModelId::Induction => reynolds_to_omega(cfg, cfg.rm[0]),
        _ => 0.0,
    };
    let model = build_model(cfg, omega)?;
    let mut report = VerifyReport::default();
    for &n in &cfg.refinements {
        let mesh = build_mesh(cfg, n)?;
        for &k in &cfg.degrees {
            let disc = Discretization::new(&mesh, model.as_ref(), options(cfg, k))?;
            for w in &disc.refs.warnings {
                if !report.warnings.contains(w) {
                    report.warnings.push(w.clone());
                }
            }
            let tag = format!("{} {}{n} k={k} {}", cfg.model, cfg.mesh_family.name(), stabilizer_name(cfg.stabilizer));
            let row_seed = seed ^ ((n as u64) << 32) ^ ((k as u64) << 48);
            let gaps = identity_residuals(&disc, cfg.pairs, row_seed)?;
            let names = ["assembly-vs-direct", "global-ibp", "reformulation", "coercivity"];
            for (name, g) in names.iter().zip(gaps) {
                report.checks.push(Check {
                    name: format!("{tag} {name}"),
                    value: g,
                    threshold: IDENTITY_TOL,
                });
            }
            let solved = solve_problem(cfg, &disc)?;
            if mesh.n_elements() <= MONOLITHIC_MAX_ELEMENTS {
                report.checks.push(Check {
                    name: format!("{tag} condensed-vs-monolithic"),
                    value: monolithic_gap(&disc, &solved.field)?,
                    threshold: SOLVE_TOL,
                });
            }
            let c = check_conservation(&disc, &solved.field)?;
            for (name, v) in [("flux-continuity", c.interface), ("local-balance", c.balance), ("boundary-flux", c.boundary)] {
                report.checks.push(Check {
                    name: format!("{tag} {name}"),
                    value: v,
                    threshold: SOLVE_TOL,
                });
            }
        }
    }
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.txt"), report.report())?;
    }
    Ok(report)
}

/// Angular velocity giving magnetic Reynolds number `rm` on the unit cube.
pub fn reynolds_to_omega(cfg: &StudyConfig, rm: f64) -> f64 {
    RotatingCylinder::omega_for_reynolds(rm, cfg.sigma_mu, 1.0, cfg.radius, cfg.lambda)
}

/// `σμ ‖β‖_∞ L` for the given angular velocity, recomputed from the field.
pub fn omega_to_reynolds(cfg: &StudyConfig, omega: f64) -> f64 {
    let unit = RotatingCylinder {
        omega: 1.0,
        radius: cfg.radius,
        lambda: cfg.lambda,
    };
    cfg.sigma_mu * omega.abs() * unit.max_profile(std::f64::consts::FRAC_1_SQRT_2)
}

/// Mean over cells whose barycenter lies within `radius / 2` of the `z`
/// axis of `|B̄_T| / |B0|`, where `B̄_T` is the cell average of the
/// magnetic field (components 3..6).
pub fn expulsion_metric(mesh: &PolyMesh, averages: &[friedrichs_core::small::SmallVec], radius: f64, b0_norm: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (t, avg) in averages.iter().enumerate() {
        let x = mesh.element(t).barycenter;
        if (x[0] * x[0] + x[1] * x[1]).sqrt() < 0.5 * radius {
            let b = (avg[3] * avg[3] + avg[4] * avg[4] + avg[5] * avg[5]).sqrt();
            sum += b;
            count += 1;
        }
    }
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64 / b0_norm
    }
}

#[derive(Clone, Debug)]
pub struct InductionRun {
    pub rm: f64,
    pub omega: f64,
    pub expulsion: f64,
    pub solve: SolveReport,
    pub wall: Duration,
    pub conservation: Option<ConservationReport>,
    pub vtk: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct InductionStudy {
    pub family: String,
    pub refinement: usize,
    pub degree: usize,
    pub runs: Vec<InductionRun>,
    pub warnings: Vec<String>,
}

impl InductionStudy {
    pub fn dat_name(&self) -> String {
        format!("induction_{}-expulsion-{}.dat", self.family, self.degree)
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "induction: family {} n={} k={}", self.family, self.refinement, self.degree);
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for r in &self.runs {
            let _ = write!(
                s,
                "Rm={} omega={:.6e} E={:.6} solver={} it={} res={:.2e} time={:.2}s",
                r.rm,
                r.omega,
                r.expulsion,
                r.solve.solver,
                r.solve.iterations,
                r.solve.relative_residual,
                r.wall.as_secs_f64()
            );
            if let Some(c) = &r.conservation {
                let _ = write!(s, " conservation={:.2e}/{:.2e}/{:.2e}", c.interface, c.balance, c.boundary);
            }
            s.push('\n');
        }
        s
    }
}

/// Solve the rotating-cylinder problem for each Rm on the first configured
/// refinement and degree; export cell averages when `cfg.out` is set.
pub fn run_induction(cfg: &StudyConfig) -> Result<InductionStudy> {
    let mut cfg = cfg.clone();
    cfg.model = ModelId::Induction;
    cfg.validate()?;
    let n = cfg.refinements[0];
    let k = cfg.degrees[0];
    let mesh = build_mesh(&cfg, n)?;
    let mut study = InductionStudy {
        family: cfg.mesh_family.name().to_string(),
        refinement: n,
        degree: k,
        runs: Vec::new(),
        warnings: Vec::new(),
    };
    if k >= 1 {
        // Piecewise gradients ∇φ with C¹ φ vanishing on the boundary are
        // annihilated by every term when β = 0 (no divergence constraint).
        study.warnings.push(format!(
            "k = {k}: the curl form does not control ∇·B; gradient modes are only weakly determined and E may be unreliable"
        ));
    }
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
    }
    for &rm in &cfg.rm {
        let omega = reynolds_to_omega(&cfg, rm);
        let model = build_model(&cfg, omega)?;
        let disc = Discretization::new(&mesh, model.as_ref(), options(&cfg, k))?;
        for w in &disc.refs.warnings {
            if !study.warnings.contains(w) {
                study.warnings.push(w.clone());
            }
        }
        let solved = solve_problem(&cfg, &disc)?;
        let averages = cell_averages(&disc, &solved.field)?;
        let expulsion = expulsion_metric(&mesh, &averages, cfg.radius, cfg.b0.norm());
        if expulsion.is_nan() && study.runs.is_empty() {
            study.warnings.push("no cell barycenter lies within R/2 of the axis; E is undefined".into());
        }
        let conservation = if cfg.check_conservation {
            Some(check_conservation(&disc, &solved.field)?)
        } else {
            None
        };
        let vtk = match &cfg.out {
            Some(dir) => {
                let path = dir.join(format!("induction_rm-{rm}.vtk"));
                let b: Vec<f64> = averages.iter().flat_map(|a| [a[0], a[1], a[2]]).collect();
                let bb: Vec<f64> = averages.iter().flat_map(|a| [a[3], a[4], a[5]]).collect();
                let arrays = [
                    CellArray { name: "B", components: 3, values: &bb },
                    CellArray { name: "b", components: 3, values: &b },
                ];
                write_vtk(&path, &mesh, &format!("induction Rm = {rm}"), &arrays)?;
                Some(path)
            }
            None => None,
        };
        study.runs.push(InductionRun {
            rm: omega_to_reynolds(&cfg, omega),
            omega,
            expulsion,
            solve: solved.report,
            wall: solved.wall,
            conservation,
            vtk,
        });
    }
    if let Some(dir) = &cfg.out {
        let rows: Vec<(f64, f64)> = study.runs.iter().map(|r| (r.rm, r.expulsion)).collect();
        emit_dat(&dir.join(study.dat_name()), "Rm expulsion", &rows)?;
        fs::write(dir.join("report.txt"), study.report())?;
    }
    Ok(study)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eoc_of_power_law() {
        let pairs: Vec<(f64, f64)> = [0.5, 0.25, 0.125].iter().map(|&h: &f64| (h, 3.0 * h.powf(2.5))).collect();
        let t = EocTable::new(1, pairs.into_iter().rev().collect());
        assert_eq!(t.rows[0].h, 0.5);
        assert!(t.rows[0].eoc.is_none());
        for r in &t.rows[1..] {
            assert!((r.eoc.unwrap() - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_row_has_blank_rate() {
        let t = EocTable::new(0, vec![(0.5, 0.25)]);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.final_eoc(), None);
    }
}
