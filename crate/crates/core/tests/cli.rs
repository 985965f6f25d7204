use std::path::PathBuf;
use std::process::{Command, Output};

use latpoly::cli::{parse_weights, serialize_weights};
use latpoly::Error;
use proptest::prelude::*;

fn latpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latpoly")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("latpoly-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn compute_dmr_example() {
    let o = latpoly(&["compute", "--model", "dmr", "--param", "r=2", "--L", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "kappa^2 + kappa*omega");
}

#[test]
fn compute_dmr_from_t_and_engine_override() {
    let closed = latpoly(&["compute", "--model", "dmr", "--t", "6", "--L", "3"]);
    let brute = latpoly(&["compute", "--model", "dmr", "--t", "6", "--L", "3", "--engines", "brute"]);
    assert_eq!(closed.status.code(), Some(0));
    assert_eq!(stdout(&closed), stdout(&brute));
}

#[test]
fn dmr_small_strip_is_rejected() {
    let o = latpoly(&["compute", "--model", "dmr", "--param", "r=2", "--L", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("L >= 2"), "{}", stderr(&o));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(latpoly(&["compute", "--t", "nope"]).status.code(), Some(2));
    assert_eq!(latpoly(&["compute", "--t", "3", "--L", "2", "--engines", "abacus"]).status.code(), Some(2));
    assert_eq!(latpoly(&["compute", "--t", "3", "--L", "2", "--y-start", "5"]).status.code(), Some(2));
    assert_eq!(latpoly(&["compute", "--model", "dmr", "--param", "r=2", "--param", "zeta=1", "--L", "3"]).status.code(), Some(2));
}

#[test]
fn default_crosscheck_agrees() {
    let o = latpoly(&["crosscheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("all engines agree"));
}

#[test]
fn model_crosscheck_includes_closed_form() {
    let o = latpoly(&["crosscheck", "--model", "four", "--L", "4", "--t", "6", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["agree"], true);
    let dyck = doc["queries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|q| q["query"]["t"] == 6 && q["query"]["y_start"] == 0 && q["query"]["y_end"] == 0)
        .unwrap();
    assert!(dyck["results"]["closed-form"].is_string());
}

#[test]
fn weights_file_drives_compute() {
    let path = temp_file("w.json", r#"{"b": 0, "lambda": 1, "down_decorations": {"1": "kappa-1", "2": "omega-1"}}"#);
    let o = latpoly(&["compute", "--weights", path.to_str().unwrap(), "--t", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "kappa^2 + kappa*omega");
}

#[test]
fn weights_schema_error_exit_2() {
    let path = temp_file("bad.json", r#"{"b": 0, "lambda": 1, "colour": "red"}"#);
    let o = latpoly(&["compute", "--weights", path.to_str().unwrap(), "--t", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/colour"), "{}", stderr(&o));
}

#[test]
fn bench_csv() {
    let o = latpoly(&["bench", "--t", "6", "--L", "2", "--engines", "brute,rho-ct"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("query,engine,micros,terms"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7 * 2);
    for r in &rows {
        assert_eq!(r.len(), 4);
        assert!(r[2].parse::<f64>().unwrap() > 0.0);
        r[3].parse::<usize>().unwrap();
    }
}

#[test]
fn gf_json() {
    let o = latpoly(&["gf", "--L", "1", "--order", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["coefficients"]["2"], "1");
    assert_eq!(doc["coefficients"]["3"], "0");
}

#[test]
fn schema_error_pointers() {
    let cases = [
        (r#"{"lambda": 1}"#, "/b"),
        (r#"{"b": 1.5, "lambda": 1}"#, "/b"),
        (r#"{"b": 0, "lambda": "2/"}"#, "/lambda"),
        (r#"{"b": 0, "lambda": 1, "down_decorations": {"0": "k"}}"#, "/down_decorations/0"),
        (r#"{"b": 0, "lambda": 1, "down_decorations": {"one": "k"}}"#, "/down_decorations/one"),
        (r#"{"b": 0, "lambda": 1, "across_decorations": {"1": {"sym": "k", "sign": 1}}}"#, "/across_decorations/1/sign"),
        (r#"{"b": 0, "lambda": 1, "L": 1, "across_decorations": {"3": "k"}}"#, "/across_decorations/3"),
    ];
    for (text, want) in cases {
        match parse_weights(text) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, want, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

fn arb_weights_json() -> impl Strategy<Value = String> {
    let value = prop_oneof![
        (-3i64..=3).prop_map(|v| v.to_string()),
        (-3i64..=3, 1i64..=4).prop_map(|(a, b)| format!("\"{a}/{b}\"")),
        "[a-e]".prop_map(|s| format!("\"{s}^2 - {s}/3\"")),
        ("[a-e]", -2i64..=2).prop_map(|(s, k)| format!("{{\"sym\": \"{s}\", \"shift\": {k}}}")),
    ];
    (
        -2i64..=2,
        1i64..=3,
        proptest::collection::btree_map(0usize..=4, value.clone(), 0..=3),
        proptest::collection::btree_map(1usize..=4, value, 0..=3),
    )
        .prop_map(|(b, l, across, down)| {
            let obj = |m: std::collections::BTreeMap<usize, String>| {
                m.into_iter().map(|(h, v)| format!("\"{h}\": {v}")).collect::<Vec<_>>().join(", ")
            };
            format!(
                "{{\"b\": {b}, \"lambda\": {l}, \"across_decorations\": {{{}}}, \"down_decorations\": {{{}}}}}",
                obj(across),
                obj(down)
            )
        })
}

proptest! {
    #[test]
    fn serialization_round_trips(text in arb_weights_json()) {
        let w = parse_weights(&text).unwrap();
        let once = serialize_weights(&w);
        let back = parse_weights(&once).unwrap();
        prop_assert_eq!(&back, &w);
        prop_assert_eq!(serialize_weights(&back), once);
    }
}
