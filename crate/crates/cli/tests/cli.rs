use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rwsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwsched")).args(args).output().expect("binary runs")
}

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../systems").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_picks_tests_by_task_kind() {
    let o = rwsched(&["analyze", sample("write_only.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("writeonly: PASS"));
    assert!(out.contains("oblivious: FAIL"));
    assert!(!out.contains("rw:"));

    let o = rwsched(&["analyze", sample("two_task_rw.toml").to_str().unwrap(), "--tests", "rw,writeonly"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("rw: PASS (U_sum = 2/3, threshold = 1"));
    assert!(out.contains("writeonly: not applicable"));
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "m = 1\n[[tasks]]\nid = 0\nkind = \"read-write\"\nT = 4\nphases = { R = 2, C = 2, W = 2 }\n").unwrap();
    let o = rwsched(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error"));

    assert_eq!(rwsched(&["analyze", "/nonexistent.toml"]).status.code(), Some(1));
    assert_eq!(rwsched(&["analyze", sample("two_task_rw.toml").to_str().unwrap(), "--tests", "nope"]).status.code(), Some(1));
    assert_eq!(rwsched(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rwsched(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_is_an_internal_error() {
    let o = rwsched(&["transform", sample("two_task_rw.toml").to_str().unwrap(), "-o", "/nonexistent-dir/out.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transform_then_simulate_without_misses() {
    let dir = tempfile::tempdir().unwrap();
    let placed = dir.path().join("placed.toml");
    let trace = dir.path().join("trace.csv");
    let o = rwsched(&["transform", sample("two_task_rw.toml").to_str().unwrap(), "-o", placed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(&placed).unwrap().contains("[[tasks.placement.steady]]"));

    let o = rwsched(&[
        "simulate",
        placed.to_str().unwrap(),
        "--sched",
        "gedf-rw",
        "--horizon",
        "150",
        "--check-lemmas",
        "-o",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("0 deadline misses"));
    let csv = fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# rwsched-trace v1"));
    assert_eq!(lines.next(), Some("tick,event,processor,task,job"));
    assert!(!csv.contains(",miss,"));
}

#[test]
fn plain_gedf_reports_the_first_miss() {
    let o = rwsched(&["simulate", sample("two_task_rw.toml").to_str().unwrap(), "--sched", "gedf", "--horizon", "15"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("first miss: task 1 job 1 at 15"));
    assert!(stdout(&o).contains("15,miss,,1,1"));
}

#[test]
fn release_models_are_validated() {
    let sys = sample("two_task_rw.toml");
    let sys = sys.to_str().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["simulate", sys, "--sched", "gedf", "--horizon", "60"];
        args.extend_from_slice(extra);
        rwsched(&args).status.code()
    };
    assert_eq!(run(&["--release", "offsets", "--offsets", "0,3"]), Some(0));
    assert_eq!(run(&["--release", "offsets", "--offsets", "0"]), Some(1));
    assert_eq!(run(&["--release", "sporadic:9", "--max-gap", "4"]), Some(0));
    assert_eq!(run(&["--release", "sporadic:x"]), Some(1));
    assert_eq!(run(&["--horizon", "0"]), Some(1));
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = rwsched(&[
            "experiment", "--alpha", "0.5", "--util", "heavy", "--susp", "long", "--m", "2", "--per-cap", "20",
            "--seed", "5", "-o", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("# rwsched-curves v1\ncap,test,accepted,samples,fraction\n"));
    assert_eq!(text.lines().count(), 2 + 20 * 2);
    assert_eq!(rwsched(&["experiment", "--alpha", "two"]).status.code(), Some(1));
    assert_eq!(rwsched(&["experiment", "--alpha", "0"]).status.code(), Some(1));
}

#[test]
fn case_study_responses() {
    let o = rwsched(&["casestudy", "--case", "uni2", "--sched", "gedf-rw", "--jobs", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# rwsched-responses v1\ntask,job,release,completion,response,period,deadline_met\n"));
    assert_eq!(out.lines().count(), 2 + 20);
    assert!(out.lines().skip(2).all(|l| l.ends_with(",true")));
}
