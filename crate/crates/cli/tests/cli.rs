use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aspmt2smt")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn car(extra: &[&str], t: &str) -> Output {
    let path = fixture("car.aspmt");
    let mut args = vec![path.to_str().unwrap(), "-c", "st=3", "-c", t, "-c", "ms=4", "-c", "ar=3", "-c", "l=10"];
    args.extend(extra);
    run(&args)
}

fn temp_program(text: &str) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.aspmt");
    std::fs::write(&path, text).unwrap();
    let s = path.to_str().unwrap().to_string();
    (dir, s)
}

#[test]
fn car_listing() {
    let o = car(&[], "t=4");
    assert_eq!(o.status.code(), Some(10), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    for want in ["location(3) = 10.0", "speed(3) = 0.0", "time(3) = 4.0", "time(0) = 0.0"] {
        assert!(lines.contains(&want), "missing `{want}` in\n{out}");
    }
    assert_eq!(lines.iter().filter(|l| l.contains(" = ")).count(), 21);
    assert!(lines[lines.len() - 2].starts_with("z3 time in milliseconds: "));
    assert!(lines[lines.len() - 1].starts_with("Total time in milliseconds: "));
    assert!(!stderr(&o).contains("violates"), "{}", stderr(&o));
    let names: Vec<&str> = lines.iter().filter_map(|l| l.split(" = ").next()).take(21).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn car_without_enough_time_is_unsatisfiable() {
    let o = car(&[], "t=3");
    assert_eq!(o.status.code(), Some(20));
    assert_eq!(stdout(&o).trim(), "UNSATISFIABLE");
}

#[test]
fn bucket_reaches_ten() {
    let o = run(&[fixture("bucket.aspmt").to_str().unwrap(), "-c", "c=10"]);
    assert_eq!(o.status.code(), Some(10), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "amt(0) = 5"), "{out}");
    assert!(out.lines().any(|l| l == "amt(10) = 10"), "{out}");
}

#[test]
fn check_only_rejects_a_rule_that_is_not_isolated() {
    let (_dir, path) = temp_program(":- constants f :: int[0..9]; g :: int[0..9].\nf = X <- g = 2*X.\n");
    let o = run(&[&path, "--check-only"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("not variable isolated") && err.contains("X"), "{err}");
    assert!(err.contains("2:1"), "diagnostic lacks the rule position: {err}");
}

#[test]
fn check_only_accepts_the_car() {
    let o = car(&["--check-only"], "t=4");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "OK");
}

#[test]
fn dumped_smt_gives_the_same_verdict() {
    for (t, verdict) in [("t=4", "sat"), ("t=3", "unsat")] {
        let o = car(&["--check-only", "--dump-smt"], t);
        let script = stdout(&o).trim_end().strip_suffix("OK").unwrap().to_string();
        let (_dir, path) = temp_program(&script);
        let z3 = Command::new("z3").arg(&path).output().unwrap();
        assert_eq!(String::from_utf8_lossy(&z3.stdout).lines().next(), Some(verdict), "{t}");
    }
}

#[test]
fn dumps_precede_the_result() {
    let o = car(&["--dump-ground", "--dump-completion", "--dump-eliminated"], "t=4");
    let out = stdout(&o);
    let ground = out.find("time(0) = 0.").unwrap();
    let completion = out.find("<->").unwrap();
    let listing = out.find("\naccel(0) = ").unwrap();
    assert!(out[listing..].contains("z3 time in milliseconds"));
    assert!(ground < completion && completion < listing, "{out}");
}

#[test]
fn oracle_mode_lists_stable_models() {
    let (_dir, path) = temp_program(":- constants f :: int[1..2]; g :: int[1..2].\n{f = 1}.\n{f = 2}.\ng = 2 <- f = 2.\n{g = 1}.\n");
    let o = run(&[&path, "--mode", "oracle"]);
    assert_eq!(o.status.code(), Some(10), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "Stable model 1:\n  f = 1\n  g = 1\nStable model 2:\n  f = 2\n  g = 2\n"
    );
}

#[test]
fn bad_arguments_are_diagnosed() {
    let path = fixture("bucket.aspmt");
    let path = path.to_str().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&[path, "-c", "c=10", "-c", "c=11"], "bound twice"),
        (&[path, "-c", "c"], "NAME=INT"),
        (&[path, "-c", "c=10", "--mode", "fast"], "solve"),
        (&[path, "-c", "c=10", "--elim-order", "random"], "leftmost"),
    ];
    for (args, needle) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
    let o = run(&["/nonexistent.aspmt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn a_missing_solver_is_reported() {
    let o = car(&["--solver-path", "/nonexistent/z3"], "t=4");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/z3"), "{}", stderr(&o));
}
