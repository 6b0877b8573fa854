use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const PAIR: &str = r#"{"units":["x","y"],"arrows":[{"id":"x>y","src":"x","tgt":"y","inv":"y>x"},{"id":"y>x","src":"y","tgt":"x"}]}"#;
const COCYCLE: &str = r#"{"cocycle":{"x>y":1,"y>x":-1}}"#;
const Z2: &str = r#"{"elements":["e","s"],"table":[["e","s"],["s","e"]]}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn kmslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmslab"))
        .args(args)
        .env_remove("KMSLAB_SEED")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn classify_pair_groupoid() {
    let w = Workspace::new();
    let g = w.file("g.json", PAIR);
    let c = w.file("c.json", COCYCLE);
    let out = kmslab(&[
        "kms",
        "classify",
        "--groupoid",
        s(&g),
        "--cocycle",
        s(&c),
        "--q",
        "1/2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["states"].as_array().unwrap().len(), 1);
    assert_eq!(v["expected_count"], 1);
    // measure ratio μ(x)/μ(y) = q^{-1} from c(x>y) = 1
    assert_eq!(v["measure_vertices"][0]["x"], "2/3");
    assert_eq!(v["measure_vertices"][0]["y"], "1/3");
    let table = kmslab(&[
        "kms",
        "classify",
        "--groupoid",
        s(&g),
        "--cocycle",
        s(&c),
        "--q",
        "1/2",
        "--table",
    ]);
    assert!(String::from_utf8_lossy(&table.stdout).contains("x=2/3, y=1/3"));
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(
        kmslab(&["kms", "classify", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(kmslab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failing_state_is_a_diagnostic() {
    let w = Workspace::new();
    let g = w.file("g.json", PAIR);
    let c = w.file("c.json", COCYCLE);
    let st = w.file("s.json", r#"{"x":["1/2","0"],"y":["1/2","0"]}"#);
    let out = kmslab(&[
        "kms",
        "check",
        "--groupoid",
        s(&g),
        "--cocycle",
        s(&c),
        "--q",
        "1/2",
        "--state",
        s(&st),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["linear"]["pass"], false);
    assert_eq!(v["linear"]["witness"]["kind"], "pair");
    assert_eq!(v["positive"]["pass"], true);

    let good = w.file("t.json", r#"{"x":["2/3","0"],"y":["1/3","0"]}"#);
    for mode in ["exact", "float"] {
        let out = kmslab(&[
            "--mode",
            mode,
            "kms",
            "check",
            "--groupoid",
            s(&g),
            "--cocycle",
            s(&c),
            "--q",
            "1/2",
            "--state",
            s(&good),
        ]);
        assert_eq!(json(&out)["passed"], true, "{mode}");
    }
}

#[test]
fn exit_codes_separate_schema_and_domain_errors() {
    let w = Workspace::new();
    let g = w.file("g.json", PAIR);
    let broken = w.file("b.json", r#"{"units":[1]}"#);
    let out = kmslab(&["measures", "--groupoid", s(&broken), "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["pointer"], "/units/0");

    let not_cocycle = w.file("c.json", r#"{"cocycle":{"x>y":1,"y>x":1}}"#);
    let out = kmslab(&[
        "validate",
        "--groupoid",
        s(&g),
        "--cocycle",
        s(&not_cocycle),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "NotACocycle");
    assert!(v["error"]["message"].as_str().unwrap().contains("x>y"));

    let out = kmslab(&["measures", "--groupoid", s(&g), "--q", "0"]);
    assert_eq!(out.status.code(), Some(1));

    let missing = w.dir.path().join("absent.json");
    assert_eq!(
        kmslab(&["measures", "--groupoid", s(&missing), "--q", "1"])
            .status
            .code(),
        Some(2)
    );

    let out = kmslab(&[
        "--positivity",
        "cholesky",
        "measures",
        "--groupoid",
        s(&g),
        "--q",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn action_documents() {
    let w = Workspace::new();
    let full = format!(
        r#"{{"action":{{"group":{Z2},"space":["1","2"],"map":[["e","1","1"],["e","2","2"],["s","1","2"],["s","2","1"]]}}}}"#
    );
    let g = w.file("a.json", &full);
    let out = kmslab(&["validate", "--groupoid", s(&g)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["documents"]["groupoid"]["arrows"], 4);
    let partial = full.replace(r#",["s","2","1"]"#, "");
    let g = w.file("b.json", &partial);
    let out = kmslab(&["validate", "--groupoid", s(&g)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "NotAnAction");
}

#[test]
fn element_literals() {
    let w = Workspace::new();
    let g = w.file("g.json", PAIR);
    let out = kmslab(&[
        "validate",
        "--groupoid",
        s(&g),
        "--element",
        "3*d(x>y) + (1+2i)*d(y) - 1/2 d(x>y)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(
        v["documents"]["element"]["x>y"],
        serde_json::json!(["5/2", "0"])
    );
    assert_eq!(
        v["documents"]["element"]["y"],
        serde_json::json!(["1", "2"])
    );
    let out = kmslab(&["validate", "--groupoid", s(&g), "--element", "3*d(nowhere)"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trace_decomposition() {
    let w = Workspace::new();
    let sys = w.file(
        "sys.json",
        r#"{"points":["a","b","c"],"map":[["a","b"],["b","a"],["c","c"]]}"#,
    );
    let vals = w.file(
        "v.json",
        r#"{"a":[["0","0"],["0","0"],["1/2","0"],["0","0"],["0","0"]],
            "c":[["1/2","0"],["1/2","0"],["1/2","0"],["1/2","0"],["1/2","0"]]}"#,
    );
    let out = kmslab(&[
        "traces",
        "decompose",
        "--system",
        s(&sys),
        "--values",
        s(&vals),
        "--cutoff",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e["weight"] == "1/2"));

    // ĉ(±1) on a period-2 orbit lies off the lattice 2ℤ
    let bad = w.file(
        "bad.json",
        r#"{"b":[["0","0"],["1/4","0"],["1/2","0"],["1/4","0"],["0","0"]]}"#,
    );
    let out = kmslab(&[
        "traces",
        "decompose",
        "--system",
        s(&sys),
        "--values",
        s(&bad),
        "--cutoff",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["violation"]["kind"], "support");

    let short = w.file("short.json", r#"{"a":[["1","0"]]}"#);
    let out = kmslab(&[
        "traces",
        "decompose",
        "--system",
        s(&sys),
        "--values",
        s(&short),
        "--cutoff",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extremal_traces_count() {
    let w = Workspace::new();
    let group = w.file("g.json", Z2);
    let space = w.file("x.json", r#"["p","u","v"]"#);
    let action = w.file(
        "a.json",
        r#"[["e","p","p"],["s","p","p"],["e","u","u"],["e","v","v"],["s","u","v"],["s","v","u"]]"#,
    );
    let out = kmslab(&[
        "traces",
        "extremal",
        "--group",
        s(&group),
        "--space",
        s(&space),
        "--action",
        s(&action),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // |Γ_p| + |Γ_u| = 2 + 1
    assert_eq!(json(&out)["count"], 3);
}

#[test]
fn characters_of_z2() {
    let w = Workspace::new();
    let group = w.file("g.json", Z2);
    let out = kmslab(&["characters", "--group", s(&group)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["degrees"], serde_json::json!([1, 1]));
}

#[test]
fn axb_report_for_rationals() {
    let out = kmslab(&[
        "axb",
        "report",
        "--field",
        "Q",
        "--primes-up-to",
        "50",
        "--beta",
        "3",
        "--bound",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["convex_combination"]["holds"], true);
    assert_eq!(v["class_number"], 1);
    let out = kmslab(&[
        "axb",
        "report",
        "--field",
        "K",
        "--primes-up-to",
        "50",
        "--beta",
        "3",
        "--bound",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = kmslab(&[
        "axb",
        "report",
        "--field",
        "Q",
        "--primes-up-to",
        "50",
        "--beta",
        "1",
        "--bound",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_and_compare() {
    let w = Workspace::new();
    let g = w.file("g.json", PAIR);
    let out = kmslab(&["kms", "oracle", "--groupoid", s(&g), "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["dimension"], 0);
    let out = kmslab(&["kms", "compare", "--groupoid", s(&g), "--q", "2"]);
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn seeded_output_is_reproducible() {
    let w = Workspace::new();
    let g = w.file("g.json", PAIR);
    let args = [
        "--mode",
        "float",
        "kms",
        "classify",
        "--groupoid",
        s(&g),
        "--q",
        "1/3",
    ];
    let a = kmslab(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_kmslab"))
        .args(args)
        .env("KMSLAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_kmslab"))
        .args(args)
        .env("KMSLAB_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
