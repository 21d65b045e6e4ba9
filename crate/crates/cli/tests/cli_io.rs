//! End-to-end tests of the `ipsketch` binary: sketching files, estimating
//! from sketch files, join statistics, the benchmark subcommand, and exit
//! codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ipsketch::formats::write_vector_text;
use ipsketch_core::SparseVector;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ipsketch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawning ipsketch")
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_vector(dir: &Path, name: &str, vector: &SparseVector) -> String {
    let path = dir.join(name);
    fs::write(&path, write_vector_text(vector)).unwrap();
    path.to_string_lossy().into_owned()
}

fn example_vectors() -> (SparseVector, SparseVector) {
    let a = SparseVector::new(
        16,
        vec![
            (1, 6.0),
            (3, 2.0),
            (4, 6.0),
            (5, 1.0),
            (6, 4.0),
            (7, 2.0),
            (8, 2.0),
            (9, 8.0),
            (11, 3.0),
        ],
    )
    .unwrap();
    let b = SparseVector::new(
        16,
        vec![
            (2, 1.0),
            (4, 5.0),
            (5, 1.0),
            (8, 2.0),
            (10, 4.0),
            (11, 2.5),
            (12, 6.0),
            (15, 6.0),
            (16, 3.7),
        ],
    )
    .unwrap();
    (a, b)
}

#[test]
fn sketch_and_estimate_round_trip() {
    let dir = TempDir::new().unwrap();
    let (a, b) = example_vectors();
    let a_path = write_vector(dir.path(), "a.vec", &a);
    let b_path = write_vector(dir.path(), "b.vec", &b);
    let sa = dir.path().join("a.sketch");
    let sb = dir.path().join("b.sketch");
    for (input, out) in [(&a_path, &sa), (&b_path, &sb)] {
        let output = run(&[
            "sketch",
            "--input",
            input,
            "--method",
            "wmh",
            "--samples",
            "4000",
            "--discretization",
            "100000",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_success(&output);
    }
    let output = run(&["estimate", sa.to_str().unwrap(), sb.to_str().unwrap()]);
    assert_success(&output);
    let estimate: f64 = String::from_utf8_lossy(&output.stdout).trim().parse().unwrap();
    let truth = a.inner(&b).unwrap();
    assert!(
        (estimate - truth).abs() < 0.5 * truth,
        "estimate {estimate} far from truth {truth}"
    );
}

#[test]
fn json_sketches_are_read_back() {
    let dir = TempDir::new().unwrap();
    let (a, _) = example_vectors();
    let a_path = write_vector(dir.path(), "a.vec", &a);
    let sketch_path = dir.path().join("a.json");
    let output = run(&[
        "sketch",
        "--input",
        &a_path,
        "--method",
        "mh",
        "--samples",
        "64",
        "--seed",
        "3",
        "--json",
        "--out",
        sketch_path.to_str().unwrap(),
    ]);
    assert_success(&output);
    let text = fs::read_to_string(&sketch_path).unwrap();
    assert!(text.contains("\"method\":\"MH\""));
    let output = run(&[
        "estimate",
        sketch_path.to_str().unwrap(),
        sketch_path.to_str().unwrap(),
    ]);
    assert_success(&output);
}

#[test]
fn join_stats_from_csv_tables() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("a.csv"),
        "1,6.0\n3,2.0\n4,6.0\n5,1.0\n6,4.0\n7,2.0\n8,2.0\n9,8.0\n11,3.0\n",
    )
    .unwrap();
    fs::write(dir.path().join("b.csv"), "2\n4\n5\n8\n10\n11\n12\n15\n16\n").unwrap();
    let sketch = |input: &str, column: &str, out: &str| {
        let output = run(&[
            "sketch",
            "--input",
            &dir.path().join(input).to_string_lossy(),
            "--format",
            "csv",
            "--column",
            column,
            "--dimension",
            "16",
            "--method",
            "kmv",
            "--samples",
            "32",
            "--seed",
            "11",
            "--out",
            &dir.path().join(out).to_string_lossy(),
        ]);
        assert_success(&output);
    };
    sketch("a.csv", "value", "va.sketch");
    sketch("a.csv", "key", "ka.sketch");
    sketch("b.csv", "key", "kb.sketch");
    let output = run(&[
        "join-stats",
        &dir.path().join("va.sketch").to_string_lossy(),
        &dir.path().join("ka.sketch").to_string_lossy(),
        &dir.path().join("kb.sketch").to_string_lossy(),
    ]);
    assert_success(&output);
    let stdout = String::from_utf8_lossy(&output.stdout);
    // KMV with budget 32 over a 14-key union is exact.
    assert!(stdout.contains("join_size 4"), "stdout: {stdout}");
    assert!(stdout.contains("sum 12"), "stdout: {stdout}");
    assert!(stdout.contains("mean 3"), "stdout: {stdout}");
}

#[test]
fn synth_bench_output_is_deterministic() {
    let args = [
        "synth-bench",
        "--n",
        "500",
        "--nnz",
        "80",
        "--overlap",
        "0.1",
        "--budgets",
        "60,90",
        "--methods",
        "mh,jl",
        "--trials",
        "2",
        "--seed",
        "5",
    ];
    let first = run(&args);
    assert_success(&first);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "bench CSV must be reproducible");
    let text = String::from_utf8_lossy(&first.stdout);
    assert!(text.starts_with("method,budget,m,trial,truth,estimate,scaled_error,gamma,seed\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn validation_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    // Duplicate keys in the CSV.
    fs::write(dir.path().join("dup.csv"), "1,2.0\n1,3.0\n").unwrap();
    let output = run(&[
        "sketch",
        "--input",
        &dir.path().join("dup.csv").to_string_lossy(),
        "--format",
        "csv",
        "--column",
        "value",
        "--dimension",
        "16",
        "--method",
        "mh",
        "--samples",
        "8",
        "--seed",
        "1",
        "--out",
        &dir.path().join("out.sketch").to_string_lossy(),
    ]);
    assert_eq!(output.status.code(), Some(2));

    // Mismatched sketch seeds.
    let (a, _) = example_vectors();
    let a_path = write_vector(dir.path(), "a.vec", &a);
    for (seed, name) in [("1", "s1"), ("2", "s2")] {
        let output = run(&[
            "sketch",
            "--input",
            &a_path,
            "--method",
            "mh",
            "--samples",
            "8",
            "--seed",
            seed,
            "--out",
            &dir.path().join(name).to_string_lossy(),
        ]);
        assert_success(&output);
    }
    let output = run(&[
        "estimate",
        &dir.path().join("s1").to_string_lossy(),
        &dir.path().join("s2").to_string_lossy(),
    ]);
    assert_eq!(output.status.code(), Some(2));

    // Infeasible overlap configuration.
    let output = run(&[
        "synth-bench",
        "--n",
        "100",
        "--nnz",
        "80",
        "--overlap",
        "0.0",
        "--trials",
        "1",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_files_exit_one() {
    let output = run(&["estimate", "/nonexistent/a", "/nonexistent/b"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn empty_columns_produce_empty_sketches_that_estimate_zero() {
    let dir = TempDir::new().unwrap();
    // A value column that is entirely zero encodes to the empty vector.
    fs::write(dir.path().join("zero.csv"), "1,0.0\n2,0.0\n").unwrap();
    fs::write(dir.path().join("keys.csv"), "1\n2\n3\n").unwrap();
    let sketch = |input: &str, column: &str, out: &str| {
        let output = run(&[
            "sketch",
            "--input",
            &dir.path().join(input).to_string_lossy(),
            "--format",
            "csv",
            "--column",
            column,
            "--dimension",
            "16",
            "--method",
            "wmh",
            "--samples",
            "16",
            "--discretization",
            "10000",
            "--seed",
            "4",
            "--out",
            &dir.path().join(out).to_string_lossy(),
        ]);
        assert_success(&output);
    };
    sketch("zero.csv", "value", "zero.sketch");
    sketch("keys.csv", "key", "keys.sketch");
    let output = run(&[
        "estimate",
        &dir.path().join("zero.sketch").to_string_lossy(),
        &dir.path().join("keys.sketch").to_string_lossy(),
    ]);
    assert_success(&output);
    let estimate: f64 = String::from_utf8_lossy(&output.stdout).trim().parse().unwrap();
    assert_eq!(estimate, 0.0);
}
