use std::fs;
use std::process::{Command, Output};

fn srlimit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srlimit"))
        .args(args)
        .env_remove("SRLIMIT_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn groups_list_names_the_builtins() {
    let o = srlimit(&["groups", "list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for g in ["affine", "e11", "heisenberg"] {
        assert!(s.contains(g), "{s}");
    }
    assert!(s.contains("x1 >= "), "{s}");
}

#[test]
fn verify_tables_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tables.json");
    let o = srlimit(&["verify-tables", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"independent_mismatches\": 1"), "{text}");
    assert!(text.contains("\"sides_with\": \"derived\""));
}

#[test]
fn curve_curvature_reports_the_limit() {
    let o = srlimit(&["curve-curvature", "--group", "affine", "--gamma", "1", "t", "0", "--t", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("\"classification\": \"NonHorizontal\""), "{s}");
    assert!(stderr(&o).contains("1 passed, 0 failed"), "{}", stderr(&o));
}

#[test]
fn curve_curvature_on_a_surface() {
    let o = srlimit(&[
        "curve-curvature", "--group", "e11", "--gamma", "cos(t)", "2*sin(t)", "0.2*cos(t)*sin(t)",
        "--interval", "0", "2*pi", "--closed", "--t", "0.4", "--t", "5*pi/4", "--on", "x3 - 0.1*x1*x2",
        "--patch", "u1", "u2", "0.1*u1*u2", "--domain", "-2", "2", "-2", "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("geodesic_limit"));
    assert!(stderr(&o).contains("4 passed, 0 failed"), "{}", stderr(&o));
}

#[test]
fn domain_violation_is_an_engine_error() {
    let o = srlimit(&["curve-curvature", "--group", "affine", "--gamma", "t", "t", "0", "--interval", "-1", "1", "--t", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("x1 >= ") && e.contains("affine"), "{e}");
}

#[test]
fn unknown_group_is_an_engine_error() {
    let o = srlimit(&["curve-curvature", "--group", "sol", "--gamma", "t", "0", "0", "--t", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sol"));
}

#[test]
fn surface_curvature_routes_agree() {
    let o = srlimit(&[
        "surface-curvature", "--group", "e11", "--u", "x3 - 0.1*x1*x2", "--patch", "u1", "u2", "0.1*u1*u2",
        "--domain", "-1", "1", "-1", "1", "--at", "0.2,0.3", "--at", "-0.5,0.1", "--l-grid", "1,4,100",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let e = stderr(&o);
    assert!(e.contains(" 0 failed"), "{e}");
    assert!(e.contains("8 checked"), "{e}");
}

#[test]
fn gauss_bonnet_on_a_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disk.toml");
    fs::write(
        &path,
        r#"
name = "disk"
group = "e11"
[[surfaces]]
name = "disk"
u = "x3"
patch = ["u1*cos(u2)", "u1*sin(u2)", "0"]
domain = [[0, 1], [0, "2*pi"]]
periodic = [false, true]
boundary = ["u1_max"]
chi = 1
"#,
    )
    .unwrap();
    let csv = dir.path().join("gb.csv");
    let o = srlimit(&["gauss-bonnet", path.to_str().unwrap(), "--l-grid", "1,9", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("2 checked, 2 passed"), "{}", stderr(&o));
    let rows = fs::read_to_string(&csv).unwrap();
    assert!(rows.lines().filter(|l| l.contains("gb_residual") && l.contains("reference")).count() == 2, "{rows}");
}

#[test]
fn invalid_scenario_reports_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "name = \"bad\"\ngroup = \"e11\"\n[[surfaces]]\nname = \"s\"\nu = \"x3\"\npatch = [\"u1\", \"u2\", \"0\"]\ndomain = [[0, 1], [0, 1]]\nboundary = [\"u1_max\"]\n").unwrap();
    let o = srlimit(&["gauss-bonnet", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("surfaces[0]"), "{e}");
}

#[test]
fn limit_identities_on_a_bundled_surface() {
    let o = srlimit(&["limit-identities", "--bundled", "e11-limit-gb", "--surface", "annulus"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("2 checked, 2 passed"), "{}", stderr(&o));
}

#[test]
fn report_is_reproducible_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o1 = srlimit(&["report", "--bundled", "affine-curves,e11-curves", "--out", a.path().to_str().unwrap()]);
    assert!(o1.status.success(), "{}", stderr(&o1));
    let o2 = Command::new(env!("CARGO_BIN_EXE_srlimit"))
        .args(["report", "--bundled", "affine-curves,e11-curves", "--out", b.path().to_str().unwrap()])
        .env("SRLIMIT_WORKERS", "1")
        .output()
        .unwrap();
    assert!(o2.status.success());
    for f in ["report.json", "report.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let json = fs::read_to_string(a.path().join("report.json")).unwrap();
    assert!(json.contains("\"schema_version\": 1"));
    assert!(stdout(&o1).contains("total:"));
}

#[test]
fn report_without_scenarios_is_an_error() {
    let o = srlimit(&["report"]);
    assert_eq!(o.status.code(), Some(1));
}
