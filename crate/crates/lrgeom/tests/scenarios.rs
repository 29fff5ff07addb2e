use std::path::PathBuf;

use lrgeom::examples;
use lrgeom::report::Status;
use lrgeom::runner::{run, RunError, RunOptions, Selection};
use lrgeom::scenario::{load, parse_scenario, parse_scenario_file, ScenarioError};

fn shipped_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// Set `LRGEOM_BLESS=1` to rewrite the shipped files from the builders.
#[test]
fn shipped_scenarios_match_the_builders() {
    let bless = std::env::var_os("LRGEOM_BLESS").is_some();
    for name in examples::names() {
        let text = examples::build(name).unwrap().to_json();
        let path = shipped_dir().join(format!("{name}.json"));
        if bless {
            std::fs::write(&path, &text).unwrap();
        }
        let shipped = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(shipped, text, "{name} differs from its builder; rerun with LRGEOM_BLESS=1");
    }
}

#[test]
fn serialization_round_trips_to_the_normal_form() {
    for name in examples::names() {
        let file = examples::build(name).unwrap();
        let parsed = parse_scenario_file(&file.to_json()).unwrap();
        assert_eq!(parsed, file.normalized(), "{name}");
        assert_eq!(parsed.to_json(), file.to_json(), "{name}");
    }
}

#[test]
fn sparse_input_normalizes_with_defaults() {
    let text = r#"{"schema": 1, "name": "tiny", "ring": {"vars": ["x"]},
        "presentation": {"generators": [{"name": "D", "coeffs": ["1"]}]}}"#;
    let file = parse_scenario_file(text).unwrap();
    let again = parse_scenario_file(&file.to_json()).unwrap();
    assert_eq!(again, file.normalized());
    assert!(file.presentation.faithful);
    assert!(file.tasks.is_empty());
}

#[test]
fn shipped_double_cone_has_four_generators_and_four_syzygies() {
    let text = std::fs::read_to_string(shipped_dir().join("double-cone.json")).unwrap();
    let sc = parse_scenario(&text, None).unwrap();
    assert_eq!(sc.pres.len(), 4);
    assert_eq!(sc.pres.syzygies.len(), 4);
    assert_eq!(sc.references.len(), 1);
}

#[test]
fn jets_inside_the_ideal_are_rejected() {
    let mut file = examples::build("double-cone").unwrap();
    file.ring.ideal.push("u1*a_1".into());
    let err = load(file, None).unwrap_err();
    assert!(matches!(err, ScenarioError::JetInIdeal { .. }));
    assert_eq!(err.pointer(), Some("/ring/ideal/1"));
    assert!(err.to_string().contains("ideals must be jet-free"));
}

#[test]
fn malformed_input_reports_a_json_pointer() {
    let text = r#"{"schema": 1, "name": "bad", "ring": {"vars": ["x"]},
        "presentation": {"generators": [{"name": "D", "coeffs": [1]}]}}"#;
    let err = parse_scenario_file(text).unwrap_err();
    assert_eq!(err.pointer(), Some("/presentation/generators/0/coeffs/0"));

    let text = r#"{"schema": 1, "name": "bad", "ring": {"vars": ["x"], "colour": 3},
        "presentation": {"generators": []}}"#;
    let err = parse_scenario_file(text).unwrap_err();
    assert!(err.to_string().contains("colour"), "{err}");

    let text = r#"{"schema": 1, "name": "bad", "ring": {"vars": ["x"]},
        "presentation": {"generators": [{"name": "D", "coeffs": ["x +* 1"]}]}}"#;
    let err = parse_scenario(text, None).unwrap_err();
    assert_eq!(err.pointer(), Some("/presentation/generators/0/coeffs/0"));
}

#[test]
fn wrong_schema_version_is_rejected() {
    let mut file = examples::build("dirac-qp").unwrap();
    file.schema = 2;
    let err = parse_scenario_file(&file.to_json()).unwrap_err();
    assert!(matches!(err, ScenarioError::Schema(2)));
}

#[test]
fn task_selection_is_validated() {
    let sc = load(examples::build("dirac-qp").unwrap(), None).unwrap();
    let only = |t: &str| RunOptions { selection: Selection::Only(t.into()), lazy: false };
    assert!(matches!(run(&sc, &only("frobnicate")), Err(RunError::UnknownTask(_))));
    assert!(matches!(run(&sc, &only("koszul")), Err(RunError::TaskNotListed { .. })));
    assert!(run(&sc, &only("dirac")).is_ok());
}

#[test]
fn corrupted_syzygy_fails_with_a_column_witness() {
    let mut file = examples::build("double-cone-embedding").unwrap();
    file.presentation.syzygies[1][0] = "u3 + 1".into();
    let sc = load(file, None).unwrap();
    let report = run(&sc, &RunOptions::default()).unwrap();
    let failed: Vec<_> = report.entries.iter().filter(|e| e.status == Status::Fail).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().any(|e| e.task.contains("syzygy") && !e.witnesses.is_empty()), "{failed:?}");
}

#[test]
fn every_built_in_example_passes_and_is_deterministic() {
    for name in examples::names() {
        let sc = load(examples::build(name).unwrap(), None).unwrap();
        let first = run(&sc, &RunOptions::default()).unwrap();
        let bad: Vec<_> = first.entries.iter().filter(|e| !e.passed()).map(|e| &e.task).collect();
        assert!(bad.is_empty(), "{name}: {bad:?}");
        if name != "double-cone" {
            let second = run(&sc, &RunOptions::default()).unwrap();
            assert_eq!(first.to_json(), second.to_json(), "{name}");
        }
    }
}

#[test]
fn lex_order_gives_the_same_verdicts() {
    for name in ["sphere-idempotent", "cone-flat-families", "gauge-cone"] {
        let sc = load(examples::build(name).unwrap(), Some(lrgeom::poly::MonomialOrder::Lex)).unwrap();
        let report = run(&sc, &RunOptions::default()).unwrap();
        assert!(report.all_passed(), "{name}\n{}", report.to_text());
        assert!(report.to_text().contains("order=lex"));
    }
}
