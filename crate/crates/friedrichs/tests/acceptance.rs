//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Everything runs inside a single test so the heavy studies are executed
//! sequentially and the repeat runs of the determinism check see the same
//! machine state.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use friedrichs::config::{MeshFamily, ModelId};
use friedrichs::harness::{
    build_mesh, build_model, identity_residuals, run_convergence, run_induction, run_verify, ConvergenceStudy,
    InductionStudy, IDENTITY_TOL, SOLVE_TOL,
};
use friedrichs::StudyConfig;
use friedrichs_core::discretization::{Discretization, SchemeOptions};

struct Outcome {
    criterion: usize,
    passed: bool,
    detail: String,
}

/// Written to the process stderr handle rather than through `println!`, so
/// the lines appear even when the harness captures test output.
fn record(out: &mut Vec<Outcome>, criterion: usize, passed: bool, detail: String) {
    let _ = writeln!(
        std::io::stderr(),
        "criterion {criterion}: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    out.push(Outcome { criterion, passed, detail });
}

fn cfg(text: &str) -> StudyConfig {
    StudyConfig::from_text(text).unwrap()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Final-pair rates of a study, one per degree.
fn final_rates(study: &ConvergenceStudy) -> Vec<(usize, f64)> {
    study
        .tables
        .iter()
        .map(|t| (t.degree, t.final_eoc().unwrap_or(f64::NAN)))
        .collect()
}

fn failures(study: &ConvergenceStudy) -> usize {
    study.records.iter().filter(|r| r.outcome.is_err()).count()
}

fn rates_text(rates: &[(usize, f64)]) -> String {
    rates
        .iter()
        .map(|(k, r)| format!("k={k} eoc={r:.3}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// The studies of criteria 4 to 7, writing their tables under `dir`.
struct Studies {
    scalar_low: ConvergenceStudy,
    scalar_high: ConvergenceStudy,
    vector: ConvergenceStudy,
    voronoi: ConvergenceStudy,
    induction: InductionStudy,
    times: [Duration; 4],
}

fn run_studies(dir: &Path) -> Studies {
    let out = |sub: &str| format!("out = {}\n", dir.join(sub).display());
    let t = Instant::now();
    let scalar_low =
        run_convergence(&cfg(&format!("mesh-family = tet\ndegrees = 0, 1\nrefinements = 2, 4, 8, 16\n{}", out("scalar-low"))))
            .unwrap();
    let scalar_high =
        run_convergence(&cfg(&format!("mesh-family = tet\ndegrees = 2, 3\nrefinements = 2, 4, 8\n{}", out("scalar-high"))))
            .unwrap();
    let t4 = t.elapsed();
    let t = Instant::now();
    let vector = run_convergence(&cfg(&format!(
        "model = vector-dar\nmesh-family = tet\ndegrees = 0, 1\nrefinements = 2, 4, 8\n{}",
        out("vector")
    )))
    .unwrap();
    let t5 = t.elapsed();
    let t = Instant::now();
    let voronoi =
        run_convergence(&cfg(&format!("mesh-family = voro\ndegrees = 0, 1\nrefinements = 2, 4, 8\n{}", out("voronoi"))))
            .unwrap();
    let t6 = t.elapsed();
    let t = Instant::now();
    let induction = run_induction(&cfg(&format!(
        "model = induction\nmesh-family = tet\ndegrees = 0\nrefinements = 8\nrm = 0, 0.1, 0.5\nradius = 0.3\nlambda = 100\nsigma-mu = 1\nb0 = 1, 0, 0\n{}",
        out("induction")
    )))
    .unwrap();
    let t7 = t.elapsed();
    Studies {
        scalar_low,
        scalar_high,
        vector,
        voronoi,
        induction,
        times: [t4, t5, t6, t7],
    }
}

/// Relative paths and contents of every `.dat` file under `dir`.
fn dat_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "dat") {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn acceptance_criteria() {
    let mut out = Vec::new();

    // 1: identities on cart 2³ and tet(n=1), k = 0..2, both models, 10 pairs.
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for model in [ModelId::ScalarDar, ModelId::VectorDar] {
        for (family, n) in [(MeshFamily::Cart, 2), (MeshFamily::Tet, 1)] {
            let c = StudyConfig {
                model,
                mesh_family: family,
                ..StudyConfig::default()
            };
            let mesh = build_mesh(&c, n).unwrap();
            let m = build_model(&c, 0.0).unwrap();
            for k in 0..=2 {
                let disc = Discretization::new(&mesh, m.as_ref(), SchemeOptions::new(k)).unwrap();
                let gaps = identity_residuals(&disc, 10, 0x5eed + k as u64).unwrap();
                worst = gaps[1..].iter().fold(worst, |a, &b| a.max(b));
            }
        }
    }
    let t1 = start.elapsed();
    record(
        &mut out,
        1,
        worst <= IDENTITY_TOL && t1 < Duration::from_secs(30),
        format!("max relative gap {worst:.2e} <= {IDENTITY_TOL:.0e}, {:.1}s < 30s", secs(t1)),
    );

    // 2 and the small-mesh part of 3: condensed vs monolithic solves.
    let start = Instant::now();
    let mut mono = 0.0_f64;
    let mut small_conservation = [0.0_f64; 2];
    for (s, stab) in ["paper", "upwind"].iter().enumerate() {
        for model in ["scalar-dar", "vector-dar"] {
            for (family, n) in [("cart", 2), ("tet", 1), ("voro", 1)] {
                let c = cfg(&format!(
                    "model = {model}\nmesh-family = {family}\nrefinements = {n}\ndegrees = 0, 1, 2\nstabilizer = {stab}\npairs = 1\n"
                ));
                let r = run_verify(&c, 1).unwrap();
                mono = mono.max(r.max_of("condensed-vs-monolithic"));
                for p in ["flux-continuity", "local-balance", "boundary-flux"] {
                    small_conservation[s] = small_conservation[s].max(r.max_of(p));
                }
            }
        }
    }
    let t2 = start.elapsed();
    record(
        &mut out,
        2,
        mono <= SOLVE_TOL && t2 < Duration::from_secs(30),
        format!("max relative gap {mono:.2e} <= {SOLVE_TOL:.0e}, {:.1}s < 30s", secs(t2)),
    );

    // 4 to 7, written to a first directory.
    let first = tempfile::tempdir().unwrap();
    let s = run_studies(first.path());

    // 3: conservation over every solved problem, plus an upwind study.
    let upwind = run_convergence(&cfg("mesh-family = tet\ndegrees = 0, 1\nrefinements = 2, 4\nstabilizer = upwind\n")).unwrap();
    let upwind_vector =
        run_convergence(&cfg("model = vector-dar\nmesh-family = tet\ndegrees = 0, 1\nrefinements = 2, 4\nstabilizer = upwind\n"))
            .unwrap();
    assert_eq!(upwind.stabilizer, "upwind");
    let penalty_max = [&s.scalar_low, &s.scalar_high, &s.vector, &s.voronoi]
        .iter()
        .map(|st| st.max_conservation())
        .chain(s.induction.runs.iter().filter_map(|r| r.conservation.as_ref().map(|c| c.max())))
        .fold(small_conservation[0], f64::max);
    let upwind_max = upwind
        .max_conservation()
        .max(upwind_vector.max_conservation())
        .max(small_conservation[1]);
    let unsolved = failures(&s.scalar_low) + failures(&s.scalar_high) + failures(&s.vector) + failures(&s.voronoi);
    record(
        &mut out,
        3,
        penalty_max <= SOLVE_TOL && upwind_max <= SOLVE_TOL && unsolved == 0,
        format!("penalty {penalty_max:.2e}, upwind {upwind_max:.2e} <= {SOLVE_TOL:.0e}, {unsolved} failed solves"),
    );

    // 4: scalar DAR on tets.
    let low = final_rates(&s.scalar_low);
    let high = final_rates(&s.scalar_high);
    let ok4 = low.iter().all(|&(k, r)| r >= k as f64 + 0.4 && r <= k as f64 + 1.6)
        && high.iter().all(|&(k, r)| r >= k as f64 + 0.4)
        && s.times[0] < Duration::from_secs(600);
    record(
        &mut out,
        4,
        ok4,
        format!("{}; {}; {:.0}s < 600s", rates_text(&low), rates_text(&high), secs(s.times[0])),
    );

    // 5: vector DAR on tets.
    let v = final_rates(&s.vector);
    let ok5 = v.iter().all(|&(k, r)| if k == 0 { (r - 1.0).abs() <= 0.35 } else { r >= 1.4 })
        && s.times[1] < Duration::from_secs(600);
    record(&mut out, 5, ok5, format!("{}; {:.0}s < 600s", rates_text(&v), secs(s.times[1])));

    // 6: scalar DAR on the Voronoi family.
    let p = final_rates(&s.voronoi);
    let ok6 = p.iter().all(|&(k, r)| r >= k as f64 + 0.4);
    record(&mut out, 6, ok6, format!("{}; {:.0}s", rates_text(&p), secs(s.times[2])));

    // 7: induction benchmark.
    let e: Vec<f64> = s.induction.runs.iter().map(|r| r.expulsion).collect();
    let ok7 = e.len() == 3
        && (e[0] - 1.0).abs() <= 0.05
        && e[0] > e[1]
        && e[1] > e[2]
        && s.times[3] < Duration::from_secs(300);
    let listed = e.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" > ");
    record(&mut out, 7, ok7, format!("E = {listed}; {:.0}s < 300s", secs(s.times[3])));

    // 8: the same studies again, compared byte for byte.
    let second = tempfile::tempdir().unwrap();
    run_studies(second.path());
    let a = dat_files(first.path());
    let b = dat_files(second.path());
    let expected = 2 + 2 + 2 + 2 + 1;
    let ok8 = a.len() == expected && a == b;
    record(&mut out, 8, ok8, format!("{} .dat files, {} identical", a.len(), a.iter().zip(&b).filter(|(x, y)| x == y).count()));

    let failed: Vec<String> = out
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{}: {}", o.criterion, o.detail))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
