//! Behavior and functional files.

use macrobell::bell::{cglmp3, i3322};
use macrobell::behavior::{isotropic_chsh, named_behavior};
use macrobell::io::{
    behavior_from_json, behavior_to_json, functional_from_json, functional_to_json, read_behavior, read_functional,
    write_behavior, write_functional,
};
use macrobell::Error;

#[test]
fn behavior_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for b in [isotropic_chsh(0.3).unwrap(), named_behavior("generalized_pr_d3").unwrap(), named_behavior("white_noise:3322").unwrap()] {
        let path = dir.path().join("b.json");
        write_behavior(&path, &b).unwrap();
        assert_eq!(read_behavior(&path).unwrap(), b);
    }
}

#[test]
fn functional_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for f in [i3322(), cglmp3()] {
        let path = dir.path().join("f.json");
        write_functional(&path, &f).unwrap();
        let g = read_functional(&path).unwrap();
        assert_eq!(g.coefficients(), f.coefficients());
        assert_eq!(g.classical_bound(), f.classical_bound());
    }
}

#[test]
fn missing_bound_is_computed() {
    let text = functional_to_json(&i3322());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("classical_bound");
    let f = functional_from_json(&v.to_string()).unwrap();
    assert_eq!(f.classical_bound(), 0.0);
}

#[test]
fn invalid_tables_are_rejected() {
    let good = behavior_to_json(&isotropic_chsh(0.5).unwrap());
    assert!(behavior_from_json(&good).is_ok());
    let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();
    v["table"][0][0][0][0] = serde_json::json!(0.9);
    assert!(matches!(behavior_from_json(&v.to_string()), Err(Error::NotNormalized { .. })));
    assert!(matches!(behavior_from_json("{\"table\": []}"), Err(Error::Parse(_))));
    assert!(matches!(read_behavior("/nonexistent/behavior.json"), Err(Error::Io(_))));
}
