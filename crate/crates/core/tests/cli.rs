use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subshift"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).expect("valid json")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("subshift-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn count_examples() {
    assert_eq!(stdout(&["count", "--tmk", "1,2", "--n", "4"]), "8\n");
    assert_eq!(
        stdout(&["count", "--tmk", "2,2", "--n", "5", "--format", "csv"]),
        "n,count\n5,9\n"
    );
    let v = json(&["count", "--tmk", "1,21", "--n", "30", "--format", "json"]);
    let count = v["count"].as_str().unwrap();
    // beyond 64 bits, kept as a decimal string
    assert!(count.parse::<u64>().is_err());
    assert!(count.chars().all(|c| c.is_ascii_digit()));
}

#[test]
fn enumerate_orders() {
    assert_eq!(
        stdout(&["enumerate", "--tmk", "2,2", "--n", "3"]),
        "000\n001\n010\n100\n"
    );
    assert_eq!(
        stdout(&[
            "enumerate",
            "--tmk",
            "1,2",
            "--n",
            "3",
            "--order",
            "constructive"
        ]),
        "000\n010\n100\n001\n101\n"
    );
    let v = json(&["enumerate", "--tmk", "1,2", "--n", "2", "--format", "json"]);
    assert_eq!(v["blocks"], serde_json::json!(["00", "01", "10"]));
}

#[test]
fn sequence_sources() {
    assert_eq!(
        stdout(&["sequence", "--three-symbol", "--n-max", "4"]),
        "3,7,17,41\n"
    );
    assert_eq!(
        stdout(&["sequence", "--tmk", "1,21", "--n-max", "3"]),
        "21,41,461\n"
    );
    let csv = stdout(&[
        "sequence", "--tmk", "1,2", "--n-max", "3", "--format", "csv",
    ]);
    assert_eq!(csv, "n,count\n1,2\n2,3\n3,5\n");
    let spec = temp_file("three.txt", "# F = {11, 22}\nk=3\n11\n22\n");
    assert_eq!(
        stdout(&["sequence", "--spec", spec.to_str().unwrap(), "--n-max", "5"]),
        "3,7,17,41,99\n"
    );
}

#[test]
fn entropy_output() {
    let text = stdout(&["entropy", "--tmk", "1,21", "--base", "e"]);
    assert!(text.contains("lambda0=5 "), "{text}");
    assert!(text.contains("entropy=1.6094379124341"), "{text}");

    let v = json(&[
        "entropy", "--tmk", "2,5", "--method", "both", "--format", "json",
    ]);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["method"], "polynomial");
    assert_eq!(reports[1]["method"], "transfer-matrix");
    for r in reports {
        assert!((r["lambda0"].as_f64().unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(r["log_base"], "e");
    }

    let spec = temp_file("golden.txt", "k=2\n11\n");
    let v = json(&[
        "entropy",
        "--spec",
        spec.to_str().unwrap(),
        "--base",
        "2",
        "--format",
        "json",
    ]);
    let h = v["reports"][0]["entropy"].as_f64().unwrap();
    assert!((h - 0.694_241_913_630_617).abs() < 1e-9);
}

#[test]
fn design_examples() {
    assert_eq!(
        stdout(&["design", "--target-ratio", "5", "--m", "1"])
            .lines()
            .next()
            .unwrap(),
        "m=1 k=21 lambda0=5 exact entropy=1.6094379124341 deviation=0"
    );
    assert_eq!(
        stdout(&["design", "--target-ratio", "1.5", "--m", "1"]),
        "no matching T(m,k) in range\n"
    );
    let v = json(&[
        "design",
        "--target-entropy",
        "0.6931471805599453",
        "--m-range",
        "1..3",
        "--k-range",
        "2..30",
        "--format",
        "json",
    ]);
    let mut cells: Vec<(u64, u64)> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["m"].as_u64().unwrap(), r["k"].as_u64().unwrap()))
        .collect();
    cells.sort();
    assert_eq!(cells, [(1, 3), (2, 5), (3, 9)]);
}

#[test]
fn table_formats() {
    let csv = stdout(&[
        "table",
        "--m-range",
        "1..1",
        "--k-range",
        "2..3",
        "--format",
        "csv",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,k,lambda0,entropy");
    assert_eq!(lines[2], "1,3,2,0.693147180559945");
    assert!(lines[1].starts_with("1,2,1.61803398874989,0.481211825059603"));
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--tmk", "2,3", "--n-max", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("all methods agree"));

    let spec = temp_file("verify.txt", "k=3\n11\n22\n");
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--n-max",
        "12",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["agree"], true);
    assert!(v["recurrence"]
        .as_str()
        .unwrap()
        .contains("2*a(n-1) + a(n-2)"));
}

#[test]
fn error_exit_codes() {
    let bad = run(&["count", "--tmk", "1,1", "--n", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());

    let spec = temp_file("bad.txt", "k=2\n12\n");
    let bad = run(&["count", "--spec", spec.to_str().unwrap(), "--n", "3"]);
    assert_eq!(bad.status.code(), Some(1));

    let bad = run(&["enumerate", "--tmk", "1,2", "--n", "40"]);
    assert_eq!(bad.status.code(), Some(1));

    let spec = temp_file("golden2.txt", "k=2\n11\n");
    let bad = run(&[
        "entropy",
        "--spec",
        spec.to_str().unwrap(),
        "--method",
        "poly",
    ]);
    assert_eq!(bad.status.code(), Some(1));

    let empty = temp_file("empty-shift.txt", "k=2\n0\n1\n");
    let bad = run(&["entropy", "--spec", empty.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn edge_export() {
    let path = std::env::temp_dir().join(format!("subshift-edges-{}.txt", std::process::id()));
    stdout(&[
        "count",
        "--tmk",
        "2,2",
        "--n",
        "3",
        "--export-edges",
        path.to_str().unwrap(),
    ]);
    let edges = std::fs::read_to_string(&path).unwrap();
    assert_eq!(edges, "00 00 0\n00 01 1\n01 10 0\n10 00 0\n");
}

#[test]
fn output_is_deterministic() {
    let cases: &[&[&str]] = &[
        &[
            "verify", "--tmk", "3,5", "--n-max", "18", "--format", "json",
        ],
        &["table", "--m-range", "1..4", "--k-range", "2..12"],
        &[
            "entropy", "--tmk", "3,4", "--method", "both", "--format", "json",
        ],
        &["enumerate", "--tmk", "2,3", "--n", "6"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

/// Checks the subset of JSON Schema used by the files under `schema/`.
fn conforms(value: &Value, schema: &Value) -> Result<(), String> {
    if let Some(c) = schema.get("const") {
        if value != c {
            return Err(format!("{value} != const {c}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            return Err(format!("{value} not in {options:?}"));
        }
    }
    if let Some(alts) = schema.get("oneOf").and_then(Value::as_array) {
        let ok = alts.iter().filter(|s| conforms(value, s).is_ok()).count();
        if ok != 1 {
            return Err(format!("{value} matches {ok} alternatives"));
        }
    }
    if let Some(ty) = schema.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "number" => value.is_number(),
            "integer" => value.is_u64() || value.is_i64(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            other => return Err(format!("unsupported type {other}")),
        };
        if !ok {
            return Err(format!("{value} is not {ty}"));
        }
    }
    if let (Some(pattern), Some(s)) = (schema.get("pattern"), value.as_str()) {
        // only the digit patterns are used
        let digits = s
            .strip_prefix('-')
            .filter(|_| pattern.as_str().unwrap().contains("-?"))
            .unwrap_or(s);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("{s:?} does not match {pattern}"));
        }
    }
    if let Some(obj) = value.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for req in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            if !obj.contains_key(req.as_str().unwrap()) {
                return Err(format!("missing {req}"));
            }
        }
        for (key, v) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(s) => conforms(v, s).map_err(|e| format!("{key}: {e}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("unexpected key {key}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            conforms(v, items).map_err(|e| format!("[{i}]: {e}"))?;
        }
    }
    Ok(())
}

#[test]
fn json_outputs_match_schemas() {
    let schema_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema");
    let spec = temp_file("schema-spec.txt", "k=3\n11\n22\n");
    let spec = spec.to_str().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("count", vec!["count", "--tmk", "1,21", "--n", "40"]),
        (
            "enumerate",
            vec![
                "enumerate",
                "--tmk",
                "2,2",
                "--n",
                "5",
                "--order",
                "constructive",
            ],
        ),
        (
            "sequence",
            vec!["sequence", "--three-symbol", "--n-max", "10"],
        ),
        (
            "entropy",
            vec!["entropy", "--tmk", "2,3", "--method", "both"],
        ),
        ("entropy", vec!["entropy", "--spec", spec]),
        ("verify", vec!["verify", "--spec", spec, "--n-max", "10"]),
        ("verify", vec!["verify", "--tmk", "1,2", "--n-max", "10"]),
        (
            "design",
            vec![
                "design",
                "--target-entropy",
                "1",
                "--m-range",
                "1..3",
                "--k-range",
                "2..20",
                "--tol",
                "0.1",
            ],
        ),
        (
            "table",
            vec![
                "table",
                "--m-range",
                "1..2",
                "--k-range",
                "2..4",
                "--base",
                "10",
            ],
        ),
    ];
    for (name, mut args) in cases {
        args.extend(["--format", "json"]);
        let schema: Value = serde_json::from_str(
            &std::fs::read_to_string(schema_dir.join(format!("{name}.schema.json"))).unwrap(),
        )
        .unwrap();
        let value = json(&args);
        if let Err(e) = conforms(&value, &schema) {
            panic!("{args:?} does not conform to {name}.schema.json: {e}");
        }
    }
}
