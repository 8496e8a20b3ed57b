use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn wiretap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wiretap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

/// Trivial state, `Y = X` through flip 0.1, `Z` uniform noise.
const BLIND_EVE: &str = r#"{"alphabets": {"S": 1, "X": 2, "Y": 2, "Z": 2},
 "state_dist": [1.0],
 "kernel": [[[[0.45, 0.45], [0.05, 0.05]], [[0.05, 0.05], [0.45, 0.45]]]]}"#;

/// As above with `Z = Y`.
const EVE_IS_BOB: &str = r#"{"alphabets": {"S": 1, "X": 2, "Y": 2, "Z": 2},
 "state_dist": [1.0],
 "kernel": [[[[0.9, 0.0], [0.0, 0.1]], [[0.1, 0.0], [0.0, 0.9]]]]}"#;

/// `X = V` uniform.
const COPY_DESIGN: &str = r#"{"mode": "NonCausal", "sizes": {"U": 1, "V": 2},
 "input_dist": [[[0.5, 0.5]]],
 "selector": [[[[1.0, 0.0], [0.0, 1.0]]]]}"#;

/// `S` is `U` flipped with probability 0.1; `V` is independent of both.
const COVER_DESIGN: &str = r#"{"mode": "NonCausal", "sizes": {"U": 2, "V": 2},
 "input_dist": [[[0.225, 0.225], [0.025, 0.025]], [[0.025, 0.025], [0.225, 0.225]]],
 "selector": [[[[1.0], [1.0]], [[1.0], [1.0]]], [[[1.0], [1.0]], [[1.0], [1.0]]]]}"#;

/// `S` uniform and independent of `(U, V)`.
const INDEPENDENT_DESIGN: &str = r#"{"mode": "NonCausal", "sizes": {"U": 2, "V": 1},
 "input_dist": [[[0.25], [0.25]], [[0.25], [0.25]]],
 "selector": [[[[1.0]], [[1.0]]], [[[1.0]], [[1.0]]]]}"#;

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let ok = wiretap(&["validate", "builtin:fig6"]);
    assert_eq!(code(&ok), 0);
    let v: Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["degraded"], true);

    let bad = BLIND_EVE.replace("[0.05, 0.05]], [[0.05", "[0.05, 0.03]], [[0.05");
    let path = write(&dir, "bad.json", &bad);
    let o = wiretap(&["validate", &path]);
    assert_eq!(code(&o), 2);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"], "not-stochastic");
    let msg = v["message"].as_str().unwrap();
    assert!(msg.contains("s=0") && msg.contains("x=0"), "{msg}");

    let missing = dir.path().join("nope.json");
    assert_eq!(code(&wiretap(&["validate", missing.to_str().unwrap()])), 1);
}

#[test]
fn region_fig6_endpoints_and_outputs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig6.csv");
    let o = wiretap(&[
        "region",
        "builtin:fig6",
        "--bound",
        "D_Region_T4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows = csv_rows(&text);
    let sm = rows.iter().map(|r| r[0]).fold(0.0, f64::max);
    let sk = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!(
        (sm - 0.469).abs() < 1e-3 && (sk - 0.469).abs() < 1e-3,
        "{sm} {sk}"
    );
    assert!(text.lines().take(5).all(|l| l.starts_with("# ")));
    let err = stderr(&o);
    let reported: f64 = err
        .split("SM endpoint ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((reported - sm).abs() < 1e-6, "{err}");

    let designs: Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{}.designs.json", out.display())).unwrap(),
    )
    .unwrap();
    for r in &rows {
        assert!(designs["designs"][(r[2] as usize).to_string()].is_object());
    }
    assert_eq!(designs["frontier"], "union");
}

#[test]
fn region_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.csv");
    let o = out.to_str().unwrap();
    let args = [
        "region",
        "builtin:fig5",
        "--bound",
        "C_Case2A",
        "--grid",
        "4",
        "--seed",
        "9",
        "--out",
        o,
    ];
    assert_eq!(code(&wiretap(&args)), 0);
    let first = std::fs::read(&out).unwrap();
    let first_designs = std::fs::read(format!("{o}.designs.json")).unwrap();
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "1"]);
    assert_eq!(code(&wiretap(&threaded)), 0);
    assert_eq!(std::fs::read(&out).unwrap(), first);

    // Replay the embedded invocation.
    let text = String::from_utf8(first.clone()).unwrap();
    let inv = text
        .lines()
        .find_map(|l| l.strip_prefix("# invocation: "))
        .unwrap();
    let replay: Vec<&str> = inv.split_whitespace().skip(1).collect();
    std::fs::remove_file(&out).unwrap();
    assert_eq!(code(&wiretap(&replay)), 0);
    assert_eq!(std::fs::read(&out).unwrap(), first);
    assert_eq!(
        std::fs::read(format!("{o}.designs.json")).unwrap(),
        first_designs
    );
}

#[test]
fn region_without_secrecy_is_origin() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "zy.json", EVE_IS_BOB);
    let o = wiretap(&[
        "region",
        &ch,
        "--bound",
        "NC_Inner_T1",
        "--u-size",
        "2",
        "--v-size",
        "2",
        "--grid",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&stdout(&o)), vec![vec![0.0, 0.0, 0.0]]);
}

#[test]
fn region_errors() {
    let o = wiretap(&["region", "builtin:fig6", "--bound", "T9"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("NC_Inner_T1") && stderr(&o).contains("StateRepro_Outer"));
    let o = wiretap(&[
        "region",
        "builtin:fig5",
        "--bound",
        "C_Case2A",
        "--u-size",
        "2",
    ]);
    assert_eq!(code(&o), 3);
    let o = wiretap(&[
        "region",
        "builtin:fig5",
        "--bound",
        "NC_Inner_T1",
        "--grid",
        "1",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn compare_reports_key_orderings() {
    let o = wiretap(&[
        "compare",
        "builtin:fig5",
        "--bounds",
        "C_Case2A,C_Case2B",
        "--u-size",
        "2",
        "--v-size",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(
        stdout(&o).contains("SK: C_Case2A < C_Case2B"),
        "{}",
        stdout(&o)
    );
    let o = wiretap(&[
        "compare",
        "builtin:fig6",
        "--bounds",
        "C_ED_Cor4,C_ED_Cor5",
        "--u-size",
        "2",
        "--v-size",
        "2",
    ]);
    assert!(
        stdout(&o).contains("SK: C_ED_Cor4 > C_ED_Cor5"),
        "{}",
        stdout(&o)
    );

    let dir = TempDir::new().unwrap();
    let out = dir.path().join("one.json");
    let o = wiretap(&[
        "compare",
        "builtin:fig6",
        "--bounds",
        "D_Region_T4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["dominates"], serde_json::json!([[true]]));
    assert!(v["provenance"]["config_sha256"].is_string());
}

#[test]
fn capacity_gp_xor() {
    let o = wiretap(&[
        "capacity",
        "builtin:gp-xor",
        "--bound",
        "NC_Inner_T1",
        "--axis",
        "sm",
        "--u-size",
        "1",
        "--v-size",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(v["gate_tol"].as_f64().unwrap(), 1e-9);
}

#[test]
fn simulate_reports() {
    let dir = TempDir::new().unwrap();
    let blind = write(&dir, "blind.json", BLIND_EVE);
    let zy = write(&dir, "zy.json", EVE_IS_BOB);
    let aux = write(&dir, "aux.json", COPY_DESIGN);
    let run = |ch: &str, extra: &[&str]| {
        let mut args = vec![
            "simulate",
            ch,
            "--aux-file",
            &aux,
            "--n",
            "2",
            "--rates",
            "0,0,0.5,0.5",
        ];
        args.extend_from_slice(extra);
        wiretap(&args)
    };
    let o = run(&blind, &["--mode", "exact"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["leakage_bits"].as_f64().unwrap(), 0.0);
    for key in [
        "error_prob",
        "key_tv",
        "covering_div_bits",
        "halfwidths",
        "seed",
        "n",
    ] {
        assert!(!v[key].is_null(), "{key}");
    }
    assert_eq!(v["rates"]["RK"].as_f64().unwrap(), 0.5);

    let v: Value = serde_json::from_str(&stdout(&run(&zy, &["--mode", "exact"]))).unwrap();
    assert!(v["leakage_bits"].as_f64().unwrap() > 0.0);

    let o = run(&blind, &["--mode", "mc", "--trials", "500", "--seed", "3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mode"], "monte-carlo");
    assert_eq!(v["trials"].as_u64().unwrap(), 500);

    let o = run(&blind, &["--mode", "exact", "--guard", "10"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("--mode mc"));

    let o = wiretap(&[
        "simulate",
        &blind,
        "--aux-file",
        &aux,
        "--n",
        "2",
        "--rates",
        "0,-0.5,0.5,0.5",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn softcover_columns() {
    let dir = TempDir::new().unwrap();
    let cover = write(&dir, "cover.json", COVER_DESIGN);
    let o = wiretap(&[
        "softcover",
        &cover,
        "--n",
        "3",
        "--R1",
        "1.5",
        "--R2",
        "0.5",
        "--sweep",
        "n",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("# I(U;S): ") && text.contains("# I(UV;S): "));
    let d: Vec<f64> = csv_rows(&text).iter().map(|r| r[5]).collect();
    assert_eq!(d.len(), 3);
    assert!(d[1] < d[0] && d[2] < d[1], "{d:?}");

    // One codeword at n = 1: the divergence is I(UV;S).
    let o = wiretap(&["softcover", &cover, "--n", "1"]);
    let text = stdout(&o);
    let i_uvs: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# I(UV;S): "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((csv_rows(&text)[0][5] - i_uvs).abs() < 1e-10);

    let indep = write(&dir, "indep.json", INDEPENDENT_DESIGN);
    let o = wiretap(&["softcover", &indep, "--n", "2", "--sweep", "R1=0,0.5,1"]);
    assert!(csv_rows(&stdout(&o)).iter().all(|r| r[5].abs() < 1e-12));

    let o = wiretap(&[
        "softcover",
        &cover,
        "--n",
        "6",
        "--R1",
        "3",
        "--R2",
        "1",
        "--guard",
        "1000",
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn transform_writes_loadable_channel() {
    let dir = TempDir::new().unwrap();
    let ch = write(&dir, "ch.json", BLIND_EVE);
    let side = write(
        &dir,
        "side.json",
        r#"{"alphabets": {"S": 1, "Sa": 1, "Sb": 2, "Se": 1}, "kernel": [[[[0.5], [0.5]]]]}"#,
    );
    let out = dir.path().join("reduced.json");
    let o = wiretap(&[
        "transform",
        &ch,
        "--side",
        &side,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = wiretap(&["validate", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["alphabets"]["Y"], 4);
    assert!(Path::new(&out).exists());
}
