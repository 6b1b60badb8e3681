use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const UNIFORM: &str = "0.3333333333333333,0.3333333333333333,0.3333333333333333";
const SKEWED: &str = "0.4,0.35,0.25";

fn dfcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfcert"))
        .args(args)
        .output()
        .expect("spawn dfcert")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn assert_schema(name: &str, value: &Value) {
    let path: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "..",
        "schemas",
        &format!("{name}.schema.json"),
    ]
    .iter()
    .collect();
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} report violates schema: {errors:?}");
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn simulate_uniform_barycenter() {
    let out = dfcert(&["simulate", "--gamma", UNIFORM, "--x0", "1,1,1", "--steps", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,x_1,x_2,x_3");
    assert_eq!(lines.len(), 5);
    let body = |l: &str| l.split_once(',').unwrap().1.to_string();
    for l in &lines[2..] {
        assert_eq!(body(l), body(lines[1]));
    }
    // 17 significant digits
    assert!(lines[1].contains("3.3333333333333331e-1"));
}

#[test]
fn simulate_edge_cases() {
    let out = dfcert(&["simulate", "--gamma", SKEWED, "--x0", "0.2,0.3,0.5", "--steps", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);

    let out = dfcert(&["simulate", "--gamma", SKEWED, "--x0", "0.5,0.6,-0.1", "--steps", "3"]);
    assert_eq!(code(&out), 3);
    assert!(!out.stderr.is_empty());

    let out = dfcert(&["simulate", "--gamma", SKEWED, "--x0", "0.5,0.5", "--steps", "3"]);
    assert_eq!(code(&out), 3);

    let out = dfcert(&["simulate", "--gamma", SKEWED, "--x0", "a,b,c"]);
    assert_eq!(code(&out), 2);

    let out = dfcert(&[
        "simulate",
        "--gamma",
        SKEWED,
        "--x0",
        "0.2,0.3,0.5",
        "--steps",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_schema("trajectory", &v);
    assert_eq!(v["states"].as_array().unwrap().len(), 3);
}

#[test]
fn certify_uniform() {
    let out = dfcert(&["certify", "--gamma", UNIFORM]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_schema("certificate", &v);
    assert_eq!(v["verdict"], "UniqueExpStable");
    assert_eq!(v["index_sum"], 1);
    assert_eq!(v["euler_characteristic"], 1);
    assert_eq!(v["schema_version"], "1.0.0");
    let pts = v["interior_fixed_points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    for c in floats(&pts[0]["location"]) {
        assert!((c - 1.0 / 3.0).abs() <= 1e-13);
    }
    for l in floats(&pts[0]["eigenvalues"]) {
        assert!((l - 0.5).abs() <= 1e-10);
    }
    for c in v["corner_reports"].as_array().unwrap() {
        assert!((c["eigenvalue"].as_f64().unwrap() - 2.0).abs() <= 1e-12);
    }
}

#[test]
fn certify_is_byte_deterministic() {
    let a = dfcert(&["certify", "--gamma", SKEWED, "--seed", "17"]);
    let b = dfcert(&["certify", "--gamma", SKEWED, "--seed", "17"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn certify_exit_codes() {
    let star = r#"{"interaction_matrix": [[0, 0.3333333333333333, 0.3333333333333333, 0.3333333333333334],
        [1,0,0,0],[1,0,0,0],[1,0,0,0]]}"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star.json");
    std::fs::write(&path, star).unwrap();
    let out = dfcert(&["certify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 6, "{}", String::from_utf8_lossy(&out.stderr));

    let out = dfcert(&["certify", "--gamma", "0.5,0.25,0.25"]);
    assert_eq!(code(&out), 6);

    let out = dfcert(&["certify", "--gamma", SKEWED, "--multistarts", "0"]);
    assert_eq!(code(&out), 5);
    let v = json(&out);
    assert_schema("certificate", &v);
    assert_eq!(v["verdict"], "Inconclusive");

    let out = dfcert(&["certify", "--gamma", SKEWED, "--format", "csv"]);
    assert_eq!(code(&out), 2);

    let out = dfcert(&["certify"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn certify_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.json");
    std::fs::write(
        &path,
        r#"{"interaction_matrix": [[0,1,0],[0,0,1],[1,0,0]], "seed": 4, "solver": {"multistart_count": 10}}"#,
    )
    .unwrap();
    let out_path = dir.path().join("cert.json");
    let out = dfcert(&[
        "certify",
        "--config",
        path.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_schema("certificate", &v);
    assert_eq!(v["seed"], 4);
    assert_eq!(v["interior_fixed_points"][0]["basin_hits"], 11);

    std::fs::write(
        &path,
        r#"{"gamma": [0.4, 0.35, 0.25], "solver": {"picard_tol": "tight"}}"#,
    )
    .unwrap();
    let out = dfcert(&["certify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn spectrum_reports() {
    let out = dfcert(&["spectrum", "--gamma", UNIFORM, "--point", "1,1,1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_schema("spectrum", &v);
    for l in floats(&v["reduced_eigenvalues"]) {
        assert!((l - 0.5).abs() <= 1e-10);
    }
    assert!(v["column_sum_max_abs"].as_f64().unwrap() <= 1e-11);
    assert_eq!(v["full_jacobian"].as_array().unwrap().len(), 3);
    assert_eq!(v["reduced_jacobian"].as_array().unwrap().len(), 2);

    let out = dfcert(&["spectrum", "--gamma", SKEWED, "--x0", "0.1,0.25,0.65"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["column_sum_max_abs"].as_f64().unwrap() <= 1e-11);

    let out = dfcert(&[
        "spectrum",
        "--gamma",
        SKEWED,
        "--point",
        "0.995,0.003,0.002",
        "--delta",
        "0.01",
    ]);
    assert_eq!(code(&out), 3);
    let out = dfcert(&["spectrum", "--gamma", SKEWED, "--point", "1,0,0"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn fixed_point_reports() {
    let out = dfcert(&["fixed-point", "--gamma", SKEWED]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_schema("fixed_point", &v);
    let interior: Vec<&Value> = v["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["is_corner"] == false)
        .collect();
    assert_eq!(interior.len(), 1);
    let loc = floats(&interior[0]["location"]);
    for (got, want) in loc.iter().zip([15.0 / 31.0, 10.0 / 31.0, 6.0 / 31.0]) {
        assert!((got - want).abs() <= 1e-13);
    }

    let other = json(&dfcert(&["fixed-point", "--gamma", SKEWED, "--seed", "99"]));
    let loc2: Vec<f64> = other["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["is_corner"] == false)
        .map(|r| floats(&r["location"]))
        .unwrap();
    for (a, b) in loc.iter().zip(&loc2) {
        assert!((a - b).abs() <= 1e-12);
    }

    let u = json(&dfcert(&["fixed-point", "--gamma", UNIFORM]));
    let loc = u["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["is_corner"] == false)
        .map(|r| floats(&r["location"]))
        .unwrap();
    for c in loc {
        assert!((c - 1.0 / 3.0).abs() <= 1e-13);
    }
}

#[test]
fn rate_reports() {
    let out = dfcert(&["rate", "--gamma", UNIFORM, "--x0", "0.4,0.3,0.3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_schema("rate", &v);
    let spectral = v["spectral_rate"].as_f64().unwrap();
    let empirical = v["empirical_rate"].as_f64().unwrap();
    assert!((spectral - 0.5).abs() <= 1e-10);
    assert!((empirical - spectral).abs() / spectral <= 0.1);
    assert!(v["relative_gap"].as_f64().unwrap() <= 0.1);

    let out = dfcert(&["rate", "--gamma", UNIFORM, "--x0", "1,1,1"]);
    assert_eq!(code(&out), 3);
    let out = dfcert(&["rate", "--gamma", UNIFORM, "--x0", "0.4,0.3,0.3", "--steps", "10"]);
    assert_eq!(code(&out), 3);
    let out = dfcert(&["rate", "--gamma", UNIFORM, "--x0", "1,0,0"]);
    assert_eq!(code(&out), 3);
}
