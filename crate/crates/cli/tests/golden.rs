//! Golden-file regression suite. Each case runs the binary and compares its
//! output with the file under `tests/golden/`. Keys, statuses, rationals and
//! other strings must match exactly; floating-point numbers may drift by
//! rounding only. Set `UPDATE_GOLDEN=1` to rewrite the files.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

const REL: f64 = 1e-9;
const ABS: f64 = 1e-12;

struct Case {
    name: &'static str,
    spec: Option<Value>,
    args: &'static [&'static str],
    /// Output file under `--out`; `None` reads stdout.
    file: Option<&'static str>,
}

fn cases() -> Vec<Case> {
    vec![
        Case {
            name: "chebyshev_n3.csv",
            spec: None,
            args: &["spectral", "--chebyshev", "3", "12"],
            file: None,
        },
        Case {
            name: "torus_q3_levels.csv",
            spec: Some(json!({"builder": "fuzzy_torus", "q": 3, "p": 1})),
            args: &["spectral", "SPEC"],
            file: None,
        },
        Case {
            name: "group_z4_form.json",
            spec: Some(json!({"builder": "group", "group": "Z4", "ell": "cocycle_norm"})),
            args: &["build", "SPEC", "--out", "out"],
            file: Some("form.json"),
        },
        Case {
            name: "clifford3_report.json",
            spec: Some(json!({"builder": "clifford", "modes": 3})),
            args: &["verify", "SPEC", "--seed", "5"],
            file: None,
        },
        Case {
            name: "ou4_report.json",
            spec: Some(json!({"builder": "ou", "levels": 4, "mu": 1.0, "lambda": 0.5})),
            args: &["verify", "SPEC", "--seed", "9", "--samples", "50"],
            file: None,
        },
        Case {
            name: "spin_l2_report.json",
            spec: Some(json!({"sites": 2, "coupling": [1.0], "beta": 1.0})),
            args: &["spin-build", "SPEC", "--out", "out"],
            file: Some("spin_report.json"),
        },
        Case {
            name: "coarse_default.csv",
            spec: None,
            args: &["coarse-demo", "--format", "csv", "--k-max", "6"],
            file: None,
        },
    ]
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(case: &Case, dir: &Path) -> String {
    if let Some(spec) = &case.spec {
        std::fs::write(dir.join("spec.json"), spec.to_string()).unwrap();
    }
    let args: Vec<&str> = case
        .args
        .iter()
        .map(|a| if *a == "SPEC" { "spec.json" } else { a })
        .collect();
    let o = Command::new(env!("CARGO_BIN_EXE_ncdf"))
        .args(&args)
        .current_dir(dir)
        .output()
        .unwrap();
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}: {}",
        case.name,
        String::from_utf8_lossy(&o.stderr)
    );
    match case.file {
        Some(f) => std::fs::read_to_string(dir.join("out").join(f)).unwrap(),
        None => String::from_utf8(o.stdout).unwrap(),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ABS + REL * a.abs().max(b.abs())
}

fn cell_matches(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    // rationals and integer pairs must match exactly; a float on either side
    // allows rounding drift
    if !(a.contains(['.', 'e']) || b.contains(['.', 'e'])) {
        return false;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => close(x, y),
        _ => false,
    }
}

fn json_diff(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if !close(x, y) {
                out.push(format!("{path}: {x} vs {y}"));
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            let (kx, ky): (Vec<_>, Vec<_>) = (x.keys().collect(), y.keys().collect());
            if kx != ky {
                out.push(format!("{path}: keys {kx:?} vs {ky:?}"));
                return;
            }
            for k in kx {
                json_diff(&format!("{path}.{k}"), &x[k], &y[k], out);
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{path}: length {} vs {}", x.len(), y.len()));
                return;
            }
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                json_diff(&format!("{path}[{i}]"), p, q, out);
            }
        }
        _ if a == b => {}
        _ => out.push(format!("{path}: {a} vs {b}")),
    }
}

fn diff(name: &str, got: &str, want: &str) -> Vec<String> {
    let mut out = Vec::new();
    if name.ends_with(".json") {
        let (g, w): (Value, Value) = (serde_json::from_str(got).unwrap(), serde_json::from_str(want).unwrap());
        json_diff("$", &g, &w, &mut out);
        return out;
    }
    let (gl, wl): (Vec<_>, Vec<_>) = (got.lines().collect(), want.lines().collect());
    if gl.len() != wl.len() {
        return vec![format!("line count {} vs {}", gl.len(), wl.len())];
    }
    for (i, (g, w)) in gl.iter().zip(&wl).enumerate() {
        let (gc, wc): (Vec<_>, Vec<_>) = (g.split(',').collect(), w.split(',').collect());
        if gc.len() != wc.len() || gc.iter().zip(&wc).any(|(a, b)| !cell_matches(a, b)) {
            out.push(format!("line {}: {g} vs {w}", i + 1));
        }
    }
    out
}

#[test]
fn outputs_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for case in cases() {
        let d = tempfile::tempdir().unwrap();
        let got = run(&case, d.path());
        let path = golden_dir().join(case.name);
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        let d = diff(case.name, &got, &want);
        if !d.is_empty() {
            failures.push(format!("{}:\n  {}", case.name, d.join("\n  ")));
        }
    }
    assert!(failures.is_empty(), "golden mismatches:\n{}", failures.join("\n"));
}

#[test]
fn comparison_is_strict_where_it_should_be() {
    assert!(cell_matches("1/2", "1/2"));
    assert!(!cell_matches("1/2", "1/3"));
    assert!(!cell_matches("4", "5"));
    assert!(cell_matches("2.0000000000000004", "2"));
    assert!(cell_matches("0.00000000000000037", "0.0000000000000002"));
    assert!(!cell_matches("1.5", "1.6"));
    let mut out = Vec::new();
    json_diff(
        "$",
        &json!({"status": "pass", "r": 1e-16}),
        &json!({"status": "fail", "r": 2e-16}),
        &mut out,
    );
    assert_eq!(out.len(), 1);
}
