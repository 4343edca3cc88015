use std::path::Path;
use std::process::{Command, Output};

fn opspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opspace")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

/// `a_i = e_{i1}` in `M_2`: column norm √2, row norm 1.
const COLUMN_FAMILY: &str = r#"{"n": 2, "k": 1, "d": 2, "entries": {
  "1": [[1, 0], [0, 0], [0, 0], [0, 0]],
  "2": [[0, 0], [0, 0], [1, 0], [0, 0]]
}}"#;

fn value_on(line_prefix: &str, out: &str) -> f64 {
    let line = out.lines().find(|l| l.starts_with(line_prefix)).unwrap();
    line.split_whitespace().last().unwrap().parse().unwrap()
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(opspace(&["--help"]).status.code(), Some(0));
    assert_eq!(opspace(&["verify", "--help"]).status.code(), Some(0));
    assert_eq!(opspace(&["frobnicate"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let out = opspace(&["verify", "nosuch", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("unknown suite"));
    let out = opspace(&[
        "verify",
        "prop11",
        "--trials",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unmet_precondition_is_guard_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = opspace(&[
        "verify",
        "prop11",
        "--radius",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}

#[test]
fn norm_of_column_family() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "fam.json", COLUMN_FAMILY);
    let out = opspace(&["norm", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!((value_on("alpha {}", &text) - 2f64.sqrt()).abs() < 1e-12, "{text}");
    assert!((value_on("alpha {1}", &text) - 1.0).abs() < 1e-12, "{text}");
    assert!((value_on("bracket", &text) - 2f64.sqrt()).abs() < 1e-12, "{text}");

    let out = opspace(&["norm", &input, "--alpha", "1"]);
    let text = stdout(&out);
    assert!(text.contains("alpha {1}") && !text.contains("bracket"), "{text}");
}

#[test]
fn assembled_operator_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "fam.json",
        r#"{"n": 2, "k": 2, "d": 1, "entries": {"1,1": [[1, 0]], "1,2": [[2, 0]], "2,1": [[3, 0]], "2,2": [[-1, 0]]}}"#,
    );
    let report = dir.path().join("norm.json");
    let out = opspace(&["norm", &input, "--assemble", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("agrees"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let (b, a) = (json["bracket"].as_f64().unwrap(), json["assembled"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-10);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("norm.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["hash"], json["manifest_hash"]);
}

#[test]
fn zero_family_and_dual() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "zero.json", r#"{"n": 3, "k": 2, "d": 2, "entries": {}}"#);
    let out = opspace(&["norm", &input, "--dual"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(value_on("bracket", &text), 0.0);
    assert!(text.lines().any(|l| l.starts_with("dual")));
}

#[test]
fn parse_diagnostics_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"n": 2, "k": 1, "d": 1, "entries": {"3": [[1, 0]]}}"#, "\"3\""),
        (
            r#"{"n": 2, "k": 1, "d": 1, "entries": {"1": [[1, 0], [2, 0]]}}"#,
            "\"1\"",
        ),
        (r#"{"n": 0, "k": 1, "d": 1, "entries": {}}"#, "'n'"),
        (r#"{"n": 2, "k": 1, "d": 1, "entries": {}, "extra": 1}"#, "extra"),
        ("{\"n\": 2,\n \"k\": }", "line 2"),
    ];
    for (text, needle) in cases {
        let input = write(dir.path(), "bad.json", text);
        let out = opspace(&["norm", &input]);
        assert_eq!(out.status.code(), Some(3), "{text}");
        assert!(stderr(&out).contains(needle), "{text}: {}", stderr(&out));
    }
    let out = opspace(&["norm", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn cuntz_convergence_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cuntz.csv");
    let out = opspace(&[
        "converge",
        "cuntz",
        "--n",
        "4",
        "--depths",
        "4..14",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("depth,value,limit,gap"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.windows(2).all(|w| w[0][1] <= w[1][1] && w[0][3] >= w[1][3]));
    let last = rows.last().unwrap();
    assert_eq!(last[2], 1.5);
    assert!((1.45..=1.5).contains(&last[1]));
    assert!(dir.path().join("cuntz.csv.manifest.json").exists());

    let out = opspace(&["converge", "semicircular", "--n", "2", "--depths", "2..=4"]);
    let text = stdout(&out);
    assert!(
        text.lines()
            .skip(1)
            .all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() == 0.25),
        "{text}"
    );
}

#[test]
fn verify_writes_reports_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = opspace(&[
        "verify",
        "theorem0k",
        "--quick",
        "--trials",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("theorem0k.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(report["config"]["trials"], 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["hash"], report["manifest_hash"]);
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.starts_with("theorem0k") && summary.contains("manifest "));
}
