//! JSON files for behaviors and functionals.
//!
//! Behavior: `{"scenario": {"mA", "mB", "dA", "dB"}, "table": [x][y][a][b]}`.
//! Functional: `{"name", "scenario", "coefficients": [x][y][a][b], "classical_bound"}`.
//! Numbers are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use crate::bell::BellFunctional;
use crate::behavior::{Behavior, Scenario};
use crate::error::{Error, Result};
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;

type Nested = Vec<Vec<Vec<Vec<f64>>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BehaviorFile {
    scenario: Scenario,
    table: Nested,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalFile {
    name: String,
    scenario: Scenario,
    coefficients: Nested,
    classical_bound: Option<f64>,
}

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_scenario(out: &mut String, s: Scenario) {
    let _ = write!(out, "{{\"mA\": {}, \"mB\": {}, \"dA\": {}, \"dB\": {}}}", s.m_a, s.m_b, s.d_a, s.d_b);
}

fn write_tensor(out: &mut String, s: Scenario, values: &[f64]) {
    out.push('[');
    for x in 0..s.m_a {
        out.push_str(if x == 0 { "\n    [" } else { ",\n    [" });
        for y in 0..s.m_b {
            out.push_str(if y == 0 { "\n      [" } else { ",\n      [" });
            for a in 0..s.d_a {
                out.push_str(if a == 0 { "[" } else { ", [" });
                for b in 0..s.d_b {
                    if b > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&format_f64(values[s.index(x, y, a, b)]));
                }
                out.push(']');
            }
            out.push(']');
        }
        out.push_str("\n    ]");
    }
    out.push_str("\n  ]");
}

fn flatten(s: Scenario, nested: &Nested, what: &str) -> Result<Vec<f64>> {
    let bad = || Error::ShapeMismatch(format!("{what} does not have shape {s}"));
    if nested.len() != s.m_a {
        return Err(bad());
    }
    let mut flat = Vec::with_capacity(s.table_len());
    for xs in nested {
        if xs.len() != s.m_b {
            return Err(bad());
        }
        for ys in xs {
            if ys.len() != s.d_a {
                return Err(bad());
            }
            for row in ys {
                if row.len() != s.d_b {
                    return Err(bad());
                }
                flat.extend_from_slice(row);
            }
        }
    }
    Ok(flat)
}

pub fn behavior_to_json(b: &Behavior) -> String {
    let mut out = String::from("{\n  \"scenario\": ");
    write_scenario(&mut out, b.scenario());
    out.push_str(",\n  \"table\": ");
    write_tensor(&mut out, b.scenario(), b.table());
    out.push_str("\n}\n");
    out
}

pub fn behavior_from_json(text: &str) -> Result<Behavior> {
    let file: BehaviorFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.scenario.check()?;
    Behavior::new(file.scenario, flatten(file.scenario, &file.table, "table")?)
}

pub fn functional_to_json(f: &BellFunctional) -> String {
    let mut out = String::new();
    let name = serde_json::to_string(f.name()).expect("strings serialize");
    let _ = write!(out, "{{\n  \"name\": {name},\n  \"scenario\": ");
    write_scenario(&mut out, f.scenario());
    out.push_str(",\n  \"coefficients\": ");
    write_tensor(&mut out, f.scenario(), f.coefficients());
    let _ = write!(out, ",\n  \"classical_bound\": {}\n}}\n", format_f64(f.classical_bound()));
    out
}

/// Parses a functional; a missing `classical_bound` is computed by enumeration.
pub fn functional_from_json(text: &str) -> Result<BellFunctional> {
    let file: FunctionalFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.scenario.check()?;
    let coeff = flatten(file.scenario, &file.coefficients, "coefficients")?;
    match file.classical_bound {
        Some(bound) => BellFunctional::with_bound(file.name, file.scenario, coeff, bound),
        None => BellFunctional::new(file.name, file.scenario, coeff),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_behavior(path: impl AsRef<Path>) -> Result<Behavior> {
    behavior_from_json(&read(path.as_ref())?)
}

pub fn write_behavior(path: impl AsRef<Path>, b: &Behavior) -> Result<()> {
    write(path.as_ref(), &behavior_to_json(b))
}

pub fn read_functional(path: impl AsRef<Path>) -> Result<BellFunctional> {
    functional_from_json(&read(path.as_ref())?)
}

pub fn write_functional(path: impl AsRef<Path>, f: &BellFunctional) -> Result<()> {
    write(path.as_ref(), &functional_to_json(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{chsh, i3322};
    use crate::behavior::{isotropic_chsh, pr_box};

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn behavior_round_trip_exact() {
        let b = isotropic_chsh(0.9).unwrap();
        let back = behavior_from_json(&behavior_to_json(&b)).unwrap();
        assert_eq!(back, b);
        assert_eq!(behavior_from_json(&behavior_to_json(&pr_box())).unwrap(), pr_box());
    }

    #[test]
    fn functional_round_trip() {
        for f in [chsh(), i3322()] {
            assert_eq!(functional_from_json(&functional_to_json(&f)).unwrap(), f);
        }
    }

    #[test]
    fn missing_bound_is_computed() {
        let text = functional_to_json(&chsh()).replace(",\n  \"classical_bound\": 2.0000000000000000e0", "");
        assert_eq!(functional_from_json(&text).unwrap().classical_bound(), 2.0);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(behavior_from_json("{"), Err(Error::Parse(_))));
        let bad = r#"{"scenario": {"mA": 1, "mB": 1, "dA": 2, "dB": 2}, "table": [[[[0.5, 0.5]]]]}"#;
        assert!(matches!(behavior_from_json(bad), Err(Error::ShapeMismatch(_))));
        let unnormalized = r#"{"scenario": {"mA": 1, "mB": 1, "dA": 2, "dB": 2}, "table": [[[[0.5, 0.5], [0.5, 0.5]]]]}"#;
        assert!(matches!(behavior_from_json(unnormalized), Err(Error::NotNormalized { .. })));
    }
}
