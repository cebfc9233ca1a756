//! Validates experiment configurations without running them, the same
//! checks the `wqed --validate-only` flag performs.
//!
//! Writes three small configs to a temporary directory: a clean one, a
//! structurally broken one, and one whose physics preconditions fail,
//! then prints each report.

use std::fs;

use waveguide_qed::runner;

fn main() -> waveguide_qed::Result<()> {
    let dir = std::env::temp_dir().join("wqed-validate-demo");
    fs::create_dir_all(&dir)?;

    let cases = [
        (
            "clean.json",
            r#"{
  "kind": "scatter",
  "pulse": {"shape": "gaussian", "center": 0.0, "tau": 20.0},
  "emitter": {"gamma_w_es": 0.5, "gamma_b_es": 0.0, "gamma_w_ef": 0.5, "gamma_b_ef": 0.0}
}"#,
        ),
        ("malformed.json", "{\"kind\": \"scatter\""),
        (
            "divergent.json",
            r#"{
  "kind": "scatter",
  "pulse": {"shape": "gaussian", "center": 0.0, "tau": 1.0},
  "emitter": {"gamma_w_es": 0.5, "gamma_b_es": 0.0, "gamma_w_ef": 0.5, "gamma_b_ef": 0.0},
  "method": {"method": "adiabatic", "order": 3}
}"#,
        ),
    ];

    for (name, text) in cases {
        let path = dir.join(name);
        fs::write(&path, text)?;
        let report = runner::validate(&path);
        println!("{name}: valid = {}, exit code = {}", report.valid, report.exit_code);
        for issue in &report.issues {
            println!("  [{}] {}", issue.code, issue.message);
        }
    }
    Ok(())
}
