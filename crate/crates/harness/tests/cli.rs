use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use snapshot_ilp_harness::report::COLUMNS;

fn snapilp(args: &[&str], extra: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snapilp"))
        .args(args)
        .args(extra)
        .output()
        .unwrap()
}

fn tasks() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tasks")
}

#[test]
fn learn_prints_the_pool() {
    let out = snapilp(&["learn", "--cost", "mdl", "--seed", "0"], &[&tasks().join("kinship")]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("# hypothesis"));
    let last = stdout.lines().last().unwrap();
    assert!(last.starts_with("gp(A,B):-parent(A,C),parent(C,B).\tmdl(3)"), "{last}");
}

#[test]
fn ensemble_emits_one_csv_row() {
    let out = snapilp(&["ensemble", "--cost", "lexfnsize", "--filter", "final"], &[&tasks().join("path")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], COLUMNS.join(","));
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[0], "path");
    // Final-only membership: the ensemble is the baseline.
    assert_eq!(row[2], row[3]);
    assert_eq!(row[8], "0.000000");
}

#[test]
fn exit_codes() {
    assert_eq!(snapilp(&["frobnicate"], &[]).status.code(), Some(1));
    assert_eq!(snapilp(&["gen-tasks"], &[]).status.code(), Some(1));
    assert_eq!(snapilp(&["learn", "--cost", "nope"], &[&tasks().join("kinship")]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(snapilp(&["learn"], &[&dir.path().join("missing")]).status.code(), Some(2));

    // Background rules that derive more atoms than the cap allows.
    let t = dir.path().join("big");
    fs::create_dir(&t).unwrap();
    let mut bk = String::from("pair(X,Y):-n(X),n(Y).\n");
    let mut exs = String::new();
    for i in 0..20 {
        bk.push_str(&format!("n(c{i}).\n"));
        exs.push_str(&format!("{}(t(c{i})).\n", if i % 2 == 0 { "pos" } else { "neg" }));
    }
    fs::write(t.join("bk.pl"), bk).unwrap();
    fs::write(t.join("exs.pl"), exs).unwrap();
    fs::write(
        t.join("bias.toml"),
        "target = \"t/1\"\nbody = [\"n/1\"]\nmax_clauses = 1\nmax_body = 1\nmax_vars = 1\n",
    )
    .unwrap();
    let cfg = dir.path().join("bench.toml");
    fs::write(&cfg, "tasks = [\"big\"]\nseeds = [0]\n[experiment]\natom_cap = 5\n").unwrap();
    let out = snapilp(&["bench", "--out"], &[&dir.path().join("res"), Path::new("--config"), &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res");
    let out = snapilp(
        &["bench", "--cost", "mdl,lexfnsize", "--trials", "2", "--no-bagging", "--out"],
        &[&res, &tasks().join("kinship"), &tasks().join("path")],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(res.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    assert!(res.join("results.json").exists());
    let timings = fs::read_to_string(res.join("timings.csv")).unwrap();
    assert!(timings.starts_with("task,cost_fn,seed,t_phase1_s"));

    for f in ["results.csv", "results.json"] {
        let out = snapilp(&["report"], &[&res.join(f)]);
        assert!(out.status.success());
        let table = String::from_utf8(out.stdout).unwrap();
        assert!(table.starts_with("group\tn\tmean_improvement"));
        assert!(table.lines().any(|l| l.starts_with("all\t8\t")), "{table}");
    }
}

#[test]
fn sweep_alpha_covers_the_grid() {
    let out = snapilp(&["sweep-alpha", "--cost", "mdl"], &[&tasks().join("kinship")]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let alphas: Vec<&str> = stdout.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(alphas, ["0.0005", "0.001", "0.0013", "0.0017", "0.005", "0.03", "0.06"]);
}

#[test]
fn bag_reports_each_bag() {
    let out = snapilp(&["bag", "--bags", "2"], &[&tasks().join("kinship")]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.matches("# bag seed").count(), 2);
    assert!(stdout.contains("# bag seed 43") && stdout.contains("# bag seed 44"));
    assert!(stdout.contains("# test accuracy"));
}
