// Validation of a well-formed model and of two broken ones.

use std::error::Error;

use xpg::{fixtures, parse_model, validate};

const OVERLAPPING: &str = r#"{
  "features": [{"name": "x", "domain": {"kind": "finite", "values": ["a", "b", "c"]}}],
  "classes": ["no", "yes"],
  "root": 1,
  "nodes": [{"id": 1, "feature": 1}, {"id": 2, "class": "no"}, {"id": 3, "class": "yes"}],
  "edges": [
    {"from": 1, "to": 2, "literal": {"values": ["a", "b"]}},
    {"from": 1, "to": 3, "literal": {"values": ["b", "c"]}}
  ]
}"#;

const GAP: &str = r#"{
  "features": [{"name": "t", "domain": {"kind": "numeric"}}],
  "classes": ["low", "high"],
  "root": 1,
  "nodes": [{"id": 1, "feature": 1}, {"id": 2, "class": "low"}, {"id": 3, "class": "high"}],
  "edges": [
    {"from": 1, "to": 2, "literal": {"intervals": [[null, 10, true, true]]}},
    {"from": 1, "to": 3, "literal": {"intervals": [[20, null, false, true]]}}
  ]
}"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let report = validate(&fixtures::hardware_tree());
    println!("hardware tree: {}", if report.is_ok() { "OK" } else { "ERROR" });
    assert!(report.is_ok());

    for (name, text) in [("overlapping literals", OVERLAPPING), ("numeric gap", GAP)] {
        let report = validate(&parse_model(text)?);
        println!("{name}:");
        for issue in &report.errors {
            println!("  error: {issue}");
        }
        assert!(!report.is_ok());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("example failed");
}
