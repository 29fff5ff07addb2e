use std::path::PathBuf;
use std::process::{Command, Output};

fn lrgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrgeom")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn shipped(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json")).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn koszul_check_on_the_double_cone_has_64_passing_entries() {
    let o = lrgeom(&["example", "double-cone", "--check", "koszul"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("pass  koszul (")).count(), 64);
    assert!(text.contains("# summary: 64 pass, 0 fail, 0 error, 0 info"));
}

#[test]
fn corrupted_syzygy_exits_one_with_a_column_witness() {
    let o = lrgeom(&["verify", &data("broken.json")]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("fail  syzygy column 2"), "{text}");
    assert!(text.contains("[2,1] column 2 on u1 ="), "{text}");
}

#[test]
fn solver_prints_the_orbit_space_christoffel_rows() {
    let o = lrgeom(&["solve-lc", &shipped("a2-orbit")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[1] row = [(u2*f_2 + 3*u3*f_3 + f)/(f), (1/3*u2*f_3)/(f)]"), "{text}");
    assert!(text.contains("[2] row = [(3*u2^2*f_2 - 6*u2*f)/(f), (u2^2*f_3 - 9*u3*f_2)/(f)]"), "{text}");
}

#[test]
fn curvature_subcommand_prints_the_curvature_displays() {
    let o = lrgeom(&["curvature", &shipped("two-dim-metric")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("R(Dq,Dp)"));
}

#[test]
fn list_examples_names_every_scenario() {
    let o = lrgeom(&["list-examples"]);
    assert_eq!(o.status.code(), Some(0));
    for name in lrgeom::examples::names() {
        assert!(stdout(&o).contains(name));
    }
}

#[test]
fn input_errors_exit_two() {
    let o = lrgeom(&["example", "no-such-example"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown example"));

    let o = lrgeom(&["example", "dirac-qp", "--check", "koszul"]);
    assert_eq!(o.status.code(), Some(2));

    let o = lrgeom(&["verify", &data("missing.json")]);
    assert_eq!(o.status.code(), Some(2));

    let o = lrgeom(&["verify", &data("jet-in-ideal.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("/ring/ideal/0") && err.contains("ideals must be jet-free"), "{err}");

    let o = lrgeom(&["verify", &data("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("/presentation/generators/0/coeffs"), "{err}");

    assert_eq!(lrgeom(&[]).status.code(), Some(2));
    assert_eq!(lrgeom(&["--order", "revlex", "list-examples"]).status.code(), Some(2));
}

#[test]
fn json_report_is_written_to_the_given_path() {
    let dir = std::env::temp_dir().join(format!("lrgeom-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = lrgeom(&["--json", path.to_str().unwrap(), "example", "plane-poisson"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["scenario"], "plane-poisson");
    assert_eq!(report["header"]["order"], "grevlex");
    assert!(report["entries"].as_array().unwrap().len() > 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn order_flag_is_reflected_in_the_header() {
    let o = lrgeom(&["--order", "lex", "example", "sphere-idempotent"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# lrgeom ") && stdout(&o).contains("order=lex"));
}

#[test]
fn dump_reproduces_the_shipped_file() {
    let o = lrgeom(&["example", "gauge-cone", "--dump"]);
    assert_eq!(stdout(&o), std::fs::read_to_string(shipped("gauge-cone")).unwrap());
}
