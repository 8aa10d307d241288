use std::fs;
use std::process::{Command, Output};

use squaresort::harness::{read_bench_csv, read_io_csv};

fn squaresort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squaresort"))
        .args(args)
        .output()
        .expect("failed to run squaresort")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn empty_size_grid_gives_header_only() {
    let o = squaresort(&["iosweep", "--sizes="]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "size B M io ratio seed\n");
}

#[test]
fn iosweep_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("io.csv");
    let o = squaresort(&[
        "iosweep",
        "--sizes",
        "2^10..2^12",
        "--blocks",
        "16",
        "--seeds",
        "5,6",
        "--scope",
        "transpose-only",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_io_csv(&path).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.block == 16 && r.cache == 256 && r.ratio > 0.0));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("B=16 M=256: ratio min="), "{stderr}");
}

#[test]
fn short_cache_fails_unless_allowed() {
    let args = [
        "iosweep",
        "--sizes",
        "1000",
        "--blocks",
        "16",
        "--cache-rule",
        "fixed:128",
    ];
    let o = squaresort(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tall-cache"));

    let mut allowed = args.to_vec();
    allowed.push("--allow-short-cache");
    assert!(squaresort(&allowed).status.success());
}

#[test]
fn bench_writes_one_file_per_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = squaresort(&[
        "bench",
        "--algo",
        "squaresort,mergesort-baseline",
        "--dist",
        "binary,uniform-sqrt",
        "--sizes",
        "1e3,2^12",
        "--repeats",
        "2",
        "--cutoff",
        "100",
        "--naive-threshold",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "mergesort-baseline-binary.csv",
            "mergesort-baseline-uniform-sqrt.csv",
            "squaresort-binary.csv",
            "squaresort-uniform-sqrt.csv"
        ]
    );
    let rows = read_bench_csv(&dir.path().join("squaresort-binary.csv")).unwrap();
    assert_eq!(rows.iter().map(|r| r.size).collect::<Vec<_>>(), [1000, 4096]);
}

#[test]
fn bench_to_stdout_labels_series() {
    let o = squaresort(&[
        "bench",
        "--algo",
        "host-library-sort",
        "--dist",
        "permutation",
        "--sizes",
        "100",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("# host-library-sort-permutation"));
    assert_eq!(lines.next(), Some("size time_ns norm"));
    assert!(lines.next().unwrap().starts_with("100 "));
}

#[test]
fn cutoff_sweep_covers_every_cutoff() {
    let dir = tempfile::tempdir().unwrap();
    let o = squaresort(&[
        "cutoff-sweep",
        "--sizes",
        "1e3,1e4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for c in [100, 256, 493, 958] {
        let rows = read_bench_csv(&dir.path().join(format!("cutoff-{c}-permutation.csv"))).unwrap();
        assert_eq!(rows.len(), 2);
    }
}

#[test]
fn verify_reports_each_check() {
    let o = squaresort(&["verify", "--suite", "transpose", "--trials", "50", "--seed", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS transpose-equivalence 0/50 failures"));

    let o = squaresort(&["verify", "--suite", "sort", "--trials", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS sort-")).count(), 4);
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(squaresort(&["bench", "--sizes", "lots"]).status.code(), Some(2));
    assert_eq!(squaresort(&["bench", "--algo", "bogosort"]).status.code(), Some(2));
    assert_eq!(squaresort(&["iosweep", "--cache-rule", "huge"]).status.code(), Some(2));
    assert_eq!(squaresort(&["bench", "--cutoff", "0"]).status.code(), Some(1));
    assert_eq!(squaresort(&["bench", "--sizes", "1"]).status.code(), Some(1));
}
