use std::process::Command;

use convexity_gate::cli::{run, THREADS_ENV};
use convexity_gate::hypothesis;
use convexity_gate::io::{read_matrix, read_report, read_violation, read_witness};
use convexity_gate::numerics::{Mode, Rational, Scalar, Tolerances};
use convexity_gate::stochastic;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["convexity-gate"];
    argv.extend_from_slice(args);
    let (code, out) = run(argv);
    let json = serde_json::from_str(&out).unwrap_or_else(|e| panic!("not JSON ({e}): {out}"));
    (code, json)
}

fn error_field(v: &Value) -> &str {
    v["error"]["field"].as_str().expect("error object")
}

fn identity_file() -> tempfile::NamedTempFile {
    let file = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    std::fs::write(file.path(), r#"{"n": 2, "entries": [[1, 0], [0, 1]]}"#).unwrap();
    file
}

#[test]
fn check_circulant_reports_failing_clause() {
    let (code, v) = call(&["check-circulant", "--weights", "1/4,1/6,1/4,1/3"]);
    assert_eq!(code, 1);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["closed_form"]["holds"], false);
    assert_eq!(
        v["closed_form"]["failing_clauses"],
        serde_json::json!(["lambda1+lambda3 == lambda2+lambda4"])
    );
    assert_eq!(v["dft"]["invertible"], false);
    let w = read_witness(&v["witness"], "witness").unwrap();
    assert_eq!((w.a.clone(), w.b.clone()), (vec![1, 2], vec![3, 4]));
    assert_eq!(w.mode, Mode::Exact);
}

#[test]
fn check_circulant_invertible_and_float() {
    let (code, v) = call(&["check-circulant", "--weights", "3/4,1/4"]);
    assert_eq!(code, 0);
    assert_eq!(v["closed_form"]["holds"], true);
    let (code, v) = call(&["check-circulant", "--weights", "0.5,0.25,0.25,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["mode"], "float");
    assert_eq!(v["dft"]["exact"], false);
    assert!(v["closed_form"].is_null());
}

#[test]
fn count_candidates_example() {
    let (code, v) = call(&["count-candidates", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 12);
}

#[test]
fn search_finds_negsquare_witness() {
    let file = identity_file();
    let path = file.path().to_str().unwrap();
    let args = [
        "search", "--matrix", path, "--function", "negsquare", "--interval", "-10,10", "--budget", "1000",
        "--seed", "1",
    ];
    let (code, v) = call(&args);
    assert_eq!(code, 1);
    let record = read_violation(&v["witness"], "witness").unwrap();
    assert_eq!(record.mode, Mode::Exact);
    let w = record.to_witness::<Rational>();
    assert!(w.recheck(&Tolerances::default()));
    assert!(w.evaluation.gap <= Rational::ratio(-9, 10));

    let (code, v) = call(&["search", "--matrix", path, "--function", "power:2", "--interval", "-10,10", "--seed", "1"]);
    assert_eq!(code, 0);
    assert!(v["witness"].is_null());
}

#[test]
fn verify_report_round_trips() {
    let file = identity_file();
    let path = file.path().to_str().unwrap();
    let (code, v) = call(&["verify", "--matrix", path, "--function", "exp", "--interval", "-1,1", "--seed", "5", "--samples", "64"]);
    assert_eq!(code, 0);
    let report = read_report(&v, "report").unwrap();
    assert_eq!(report.mode, Mode::Float);
    assert_eq!(report.violations, 0);
    assert_eq!(report.argmin_x.len(), 2);

    let (code, v) = call(&["verify", "--matrix", path, "--function", "negsquare", "--interval", "-1,1", "--seed", "5", "--samples", "64"]);
    assert_eq!(code, 1);
    assert!(read_report(&v, "report").unwrap().violations > 0);
}

#[test]
fn function_json_and_interval_from_file() {
    let file = identity_file();
    let f = r#"{"kind": "scaled", "params": {"c": "-1/2", "inner": {"kind": "abs"}}, "interval": ["-inf", 3]}"#;
    let (code, v) = call(&["search", "--matrix", file.path().to_str().unwrap(), "--function", f, "--seed", "2", "--budget", "300"]);
    assert_eq!(code, 1);
    let record = read_violation(&v["witness"], "witness").unwrap();
    assert_eq!(record.interval.hi(), Some(&Rational::from_int(3)));
}

#[test]
fn check_matrix_round_trip_through_build() {
    let (code, built) = call(&["build-circulant", "--weights", "1/3,1/6,1/3,1/6"]);
    assert_eq!(code, 0);
    let raw = read_matrix(&built, "matrix").unwrap();
    assert_eq!(raw.mode, Some(Mode::Exact));
    let inline = built.to_string();
    let (code, v) = call(&["check-matrix", "--matrix", &inline]);
    assert_eq!(code, 0);
    assert_eq!(v["rank"], 2);
    let w = read_witness(&v["witness"], "witness").unwrap();
    let p = stochastic::validate(raw.to_matrix::<Rational>(), &Tolerances::default()).unwrap();
    let pair = w.pair().unwrap();
    assert!(hypothesis::check_pair(&p, &pair, &Tolerances::default()).unwrap().is_some());
}

#[test]
fn check_matrix_without_witness() {
    let u = r#"{"n": 3, "entries": [["1/3","1/3","1/3"],["1/3","1/3","1/3"],["1/3","1/3","1/3"]]}"#;
    let (code, v) = call(&["check-matrix", "--matrix", u]);
    assert_eq!(code, 1);
    assert!(v["witness"].is_null());
    assert_eq!(v["pairs_visited"], 12);
}

#[test]
fn explore_open_output_reads_back() {
    let (code, v) = call(&["explore-open", "--n", "4", "--samples", "8", "--seed", "3"]);
    let matrices = v["matrices"].as_array().unwrap();
    assert_eq!(code, if matrices.is_empty() { 0 } else { 1 });
    for m in matrices {
        let raw = read_matrix(m, "matrix").unwrap();
        let p = stochastic::validate(raw.to_matrix::<Rational>(), &Tolerances::default()).unwrap();
        let search = hypothesis::find_witness(&p, &Tolerances::default()).unwrap();
        assert!(search.rank >= 2 && search.witness.is_none());
    }
}

#[test]
fn input_errors_exit_two_with_field() {
    let file = identity_file();
    let path = file.path().to_str().unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["check-circulant", "--weights", "1/4,0.75"], "weights[1]"),
        (vec!["check-circulant", "--weights", "1/2,1/3"], "weights"),
        (vec!["check-circulant", "--mode", "float", "--weights", "1/2,1/2"], "weights[0]"),
        (vec!["verify", "--matrix", path, "--function", "exp"], "seed"),
        (vec!["verify", "--matrix", path, "--function", "exp", "--seed", "1", "--mode", "exact"], "function"),
        (vec!["verify", "--matrix", path, "--function", "cosh", "--seed", "1"], "function"),
        (vec!["search", "--matrix", path, "--function", "abs", "--interval", "1,-1", "--seed", "1"], "interval"),
        (vec!["check-matrix", "--matrix", r#"{"n": 2, "entries": [[1, 1], [0, 0]]}"#], "matrix"),
        (vec!["check-matrix", "--matrix", r#"{"n": 2, "entries": [["1/2", 0.5], [0.5, 0.5]]}"#], "matrix.entries[0][1]"),
        (vec!["check-matrix", "--matrix", "/nonexistent/m.json"], "matrix"),
        (vec!["check-matrix", "--matrix", path, "--gap-tol=-1"], "gap_tol"),
        (vec!["explore-open", "--n", "1", "--seed", "0"], "n"),
        (vec!["count-candidates", "--n", "x"], "n"),
    ];
    for (args, field) in cases {
        let (code, v) = call(&args);
        assert_eq!(code, 2, "{args:?}: {v}");
        assert_eq!(error_field(&v), field, "{args:?}: {v}");
    }
}

#[test]
fn binary_output_is_identical_across_thread_counts() {
    let file = identity_file();
    let path = file.path().to_str().unwrap();
    let bin = env!("CARGO_BIN_EXE_convexity-gate");
    let outputs: Vec<(Option<i32>, Vec<u8>)> = ["1", "4", "1"]
        .iter()
        .map(|threads| {
            let out = Command::new(bin)
                .args(["verify", "--matrix", path, "--function", "power:4", "--interval", "-3,3", "--seed", "11", "--samples", "500", "--mode", "float"])
                .env(THREADS_ENV, threads)
                .output()
                .unwrap();
            (out.status.code(), out.stdout)
        })
        .collect();
    assert_eq!(outputs[0].0, Some(0));
    assert!(outputs.iter().all(|o| o == &outputs[0]));
}
