use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use aspmt::engine::{engine, Outcome, Request};
use aspmt::pipeline::{Options, Stage};
use aspmt::smt::SolverConfig;
use clap::Parser;
use num_bigint::BigInt;

/// Compile a tight ASPMT program to SMT-LIB and solve it.
#[derive(Parser, Debug)]
#[command(name = "aspmt2smt", version)]
struct Cli {
    /// Input program.
    input: PathBuf,

    /// Bind a constant used in the program, e.g. `-c st=3`.
    #[arg(short = 'c', value_name = "NAME=INT", value_parser = parse_binding)]
    bindings: Vec<(String, BigInt)>,

    /// SMT solver executable.
    #[arg(long, value_name = "PATH", default_value = "z3")]
    solver_path: PathBuf,

    /// Kill the solver after this many seconds.
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,

    /// Stop after the checks and compilation; same as `--mode check-only`.
    #[arg(long)]
    check_only: bool,

    /// Back end: solve, oracle or check-only.
    #[arg(long, default_value = "solve")]
    mode: String,

    /// Order in which eligible equalities are eliminated.
    #[arg(long, default_value = "leftmost")]
    elim_order: String,

    /// Algorithm used for the tightness check.
    #[arg(long, default_value = "dfs")]
    cycle_detector: String,

    #[arg(long)]
    dump_ground: bool,
    #[arg(long)]
    dump_completion: bool,
    #[arg(long)]
    dump_eliminated: bool,
    #[arg(long)]
    dump_smt: bool,
}

fn parse_binding(s: &str) -> Result<(String, BigInt), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=INT, got `{s}`"))?;
    let value = value.trim().parse().map_err(|_| format!("`{value}` is not an integer"))?;
    Ok((name.trim().to_string(), value))
}

fn wanted(cli: &Cli, stage: Stage) -> bool {
    match stage {
        Stage::Ground => cli.dump_ground,
        Stage::Completion => cli.dump_completion,
        Stage::Eliminated => cli.dump_eliminated,
        Stage::Smt => cli.dump_smt,
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let start = Instant::now();
    let source = std::fs::read_to_string(&cli.input).with_context(|| format!("cannot read {}", cli.input.display()))?;
    let mut bindings = BTreeMap::new();
    for (name, value) in &cli.bindings {
        if bindings.insert(name.clone(), value.clone()).is_some() {
            bail!("constant `{name}` is bound twice");
        }
    }
    let time_limit = match cli.time_limit {
        Some(t) if !(t > 0.0 && t.is_finite()) => bail!("--time-limit must be a positive number of seconds"),
        t => t.map(Duration::from_secs_f64),
    };
    let mode = if cli.check_only { "check-only" } else { cli.mode.as_str() };
    let engine = engine(mode)?;
    let req = Request {
        source,
        bindings,
        options: Options { elim_order: cli.elim_order.clone(), cycle_detector: cli.cycle_detector.clone(), ..Options::default() },
        solver: SolverConfig { path: cli.solver_path.clone(), time_limit },
    };
    let mut sink = |stage: Stage, text: &str| {
        if wanted(cli, stage) {
            print!("{text}");
        }
    };
    let outcome = engine.run(&req, &mut sink)?;
    match &outcome {
        Outcome::Sat { listing, solver, solver_time } => {
            for (c, v) in listing {
                println!("{c} = {v}");
            }
            println!("{solver} time in milliseconds: {}", solver_time.as_millis());
            println!("Total time in milliseconds: {}", start.elapsed().as_millis());
        }
        Outcome::Unsat => println!("UNSATISFIABLE"),
        Outcome::Unknown(why) => println!("UNKNOWN ({why})"),
        Outcome::StableModels(models) if models.is_empty() => println!("UNSATISFIABLE"),
        Outcome::StableModels(models) => {
            for (i, m) in models.iter().enumerate() {
                println!("Stable model {}:", i + 1);
                for (c, v) in m {
                    println!("  {c} = {v}");
                }
            }
        }
        Outcome::Checked => println!("OK"),
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
