use std::process::Command;

use friedrichs::dat::parse_dat;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_friedrichs"))
}

#[test]
fn verify_passes_on_small_meshes() {
    let out = bin()
        .args(["verify", "--mesh-family", "tet", "--refinements", "1", "--degrees", "0,1", "--model", "vector-dar"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.lines().any(|l| l.starts_with("PASS") && l.contains("coercivity")));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn convergence_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["convergence", "--mesh-family", "cart", "--refinements", "1,2", "--degrees", "0", "--stabilizer", "upwind"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("scalar-dar_cart-data_rates-0.dat")).unwrap();
    let (header, rows) = parse_dat(&text).unwrap();
    assert_eq!(header, "meshsize H1TypeError");
    assert_eq!(rows.len(), 2);
    assert!(rows[0].0 > rows[1].0 && rows[0].1 > rows[1].1);
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("stabilizer upwind"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "mesh-family = cart\nrefinements = 1\ndegrees = 2\n").unwrap();
    let out = bin().arg("convergence").arg("--config").arg(&cfg).args(["--degrees", "0"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success());
    assert!(stdout.contains("k=0 n=1"));
    assert!(!stdout.contains("k=2"));
}

#[test]
fn induction_exports_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["induction", "--mesh-family", "cart", "--refinements", "6", "--rm", "0,0.5"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = parse_dat(&std::fs::read_to_string(dir.path().join("induction_cart-expulsion-0.dat")).unwrap()).unwrap();
    assert_eq!(header, "Rm expulsion");
    assert_eq!(rows.len(), 2);
    assert!((rows[0].1 - 1.0).abs() < 1e-8);
    assert!((rows[1].0 - 0.5).abs() < 1e-12);
    for rm in ["0", "0.5"] {
        let vtk = std::fs::read_to_string(dir.path().join(format!("induction_rm-{rm}.vtk"))).unwrap();
        assert!(vtk.contains("VECTORS B double") && vtk.contains("VECTORS b double"));
    }
}

#[test]
fn bad_input_exits_with_code_two() {
    for args in [
        vec!["convergence", "--model", "plasma"],
        vec!["convergence", "--solver", "cholesky"],
        vec!["convergence", "--model", "induction"],
        vec!["verify", "--mesh-family", "missing.mesh", "--refinements", "1"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    assert_ne!(bin().arg("frobnicate").output().unwrap().status.code(), Some(0));
}
