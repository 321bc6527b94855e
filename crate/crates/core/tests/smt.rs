mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use aspmt::smt::{run_solver, SmtError, SolverConfig, SolverOutcome};
use aspmt::{compile, Options};
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn pump_script_matches_the_golden_file() {
    let compiled = compile(&golden("pump.aspmt"), &BTreeMap::new(), &Options::default()).unwrap();
    assert_eq!(compiled.script.to_string(), golden("pump.smt2"));
}

#[test]
fn fixture_logics() {
    let logics: Vec<(&str, String)> = fixtures()
        .into_iter()
        .map(|(name, source, b)| (name, compile(&source, &b, &Options::default()).unwrap().script.logic.unwrap()))
        .collect();
    assert_eq!(
        logics,
        [("car", "QF_NRA"), ("bucket", "QF_LIA"), ("shuttle", "QF_NRA"), ("ball", "QF_NRA")]
            .map(|(n, l)| (n, l.to_string()))
    );
}

#[test]
fn dumped_scripts_reproduce_the_verdict() {
    for (name, source, b) in fixtures() {
        let compiled = compile(&source, &b, &Options::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dump.smt2");
        std::fs::write(&path, compiled.script.to_string()).unwrap();
        let out = std::process::Command::new("z3").arg(&path).output().unwrap();
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(text.lines().next(), Some("sat"), "{name}");
        assert!(matches!(run_solver(&compiled.script, &z3()).unwrap().outcome, SolverOutcome::Sat(_)), "{name}");
    }
}

#[test]
fn a_missing_solver_is_a_launch_error() {
    let compiled = compile(&golden("pump.aspmt"), &BTreeMap::new(), &Options::default()).unwrap();
    let cfg = SolverConfig { path: "/nonexistent/z3".into(), time_limit: None };
    assert!(matches!(run_solver(&compiled.script, &cfg), Err(SmtError::Launch { .. })));
}

#[test]
fn a_hanging_solver_is_stopped() {
    let dir = tempfile::tempdir().unwrap();
    let fake = dir.path().join("slow");
    std::fs::write(&fake, "#!/bin/sh\nsleep 30\n").unwrap();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&fake, std::fs::Permissions::from_mode(0o755)).unwrap();
    }
    let compiled = compile(&golden("pump.aspmt"), &BTreeMap::new(), &Options::default()).unwrap();
    let cfg = SolverConfig { path: fake, time_limit: Some(Duration::from_millis(200)) };
    let run = run_solver(&compiled.script, &cfg).unwrap();
    assert!(matches!(run.outcome, SolverOutcome::Unknown(_)), "{:?}", run.outcome);
    assert!(run.elapsed < Duration::from_secs(10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emission_is_deterministic(seed in any::<u64>()) {
        let src = random_program(&mut StdRng::seed_from_u64(seed));
        let a = compile(&src, &BTreeMap::new(), &Options::default()).unwrap().script.to_string();
        let b = compile(&src, &BTreeMap::new(), &Options::default()).unwrap().script.to_string();
        prop_assert_eq!(a, b);
    }
}
