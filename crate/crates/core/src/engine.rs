//! Interchangeable back ends selected by name.

use std::collections::BTreeMap;
use std::time::Duration;

use num_bigint::BigInt;

use crate::error::Error;
use crate::eval::{failing_assertions, Interpretation};
use crate::frontend::ast::GroundConst;
use crate::oracle::stable_models;
use crate::pipeline::{compile_with, front, ground_text, Options, Sink, Stage};
use crate::smt::model::{format_ground_value, to_value};
use crate::smt::{decode_model, run_solver, SmtError, SolverConfig, SolverOutcome};

pub struct Request {
    pub source: String,
    pub bindings: BTreeMap<String, BigInt>,
    pub options: Options,
    pub solver: SolverConfig,
}

/// Printed assignment of every ground constant.
pub type Listing = Vec<(GroundConst, String)>;

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Sat { listing: Listing, solver: String, solver_time: Duration },
    Unsat,
    Unknown(String),
    StableModels(Vec<Listing>),
    Checked,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Sat { .. } => 10,
            Outcome::Unsat => 20,
            Outcome::Unknown(_) => 30,
            Outcome::StableModels(ms) if ms.is_empty() => 20,
            Outcome::StableModels(_) => 10,
            Outcome::Checked => 0,
        }
    }
}

pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, req: &Request, sink: &mut Sink<'_>) -> Result<Outcome, Error>;
}

/// Compiles the program and asks the SMT solver for one model.
pub struct SolveEngine;

/// Enumerates stable models by brute force; integer and boolean domains only.
pub struct OracleEngine;

/// Runs every check and compilation stage without invoking a solver.
pub struct CheckEngine;

impl Engine for SolveEngine {
    fn name(&self) -> &'static str {
        "solve"
    }

    fn run(&self, req: &Request, sink: &mut Sink<'_>) -> Result<Outcome, Error> {
        let compiled = compile_with(&req.source, &req.bindings, &req.options, sink)?;
        let run = run_solver(&compiled.script, &req.solver)?;
        match run.outcome {
            SolverOutcome::Sat(model) => {
                let assignment = model.assignment(&compiled.table)?;
                let interp: Interpretation =
                    assignment.iter().filter_map(|(c, v)| Some((c.clone(), to_value(v)?))).collect();
                match failing_assertions(&compiled.theory.assertions(), &interp) {
                    Ok(failed) if failed.is_empty() => {}
                    Ok(failed) => log::warn!("solver model violates: {}", failed.join("; ")),
                    Err(e) => log::warn!("cannot check the solver model: {e}"),
                }
                Ok(Outcome::Sat {
                    listing: decode_model(&model, &compiled.table)?,
                    solver: req.solver.name(),
                    solver_time: run.elapsed,
                })
            }
            SolverOutcome::Unsat => Ok(Outcome::Unsat),
            SolverOutcome::Unknown(why) => Ok(Outcome::Unknown(why)),
            SolverOutcome::Error(e) => Err(Error::Smt(SmtError::Solver(e))),
        }
    }
}

impl Engine for OracleEngine {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn run(&self, req: &Request, sink: &mut Sink<'_>) -> Result<Outcome, Error> {
        let ground = front(&req.source, &req.bindings, &req.options)?;
        sink(Stage::Ground, &ground_text(&ground));
        let models = stable_models(&ground)?;
        let listings = models
            .iter()
            .map(|m| {
                let mut l: Listing = ground
                    .constants
                    .iter()
                    .map(|gc| (gc.constant.clone(), format_ground_value(&m[&gc.constant], &gc.sort)))
                    .collect();
                l.sort_by(|a, b| a.0.cmp(&b.0));
                l
            })
            .collect();
        Ok(Outcome::StableModels(listings))
    }
}

impl Engine for CheckEngine {
    fn name(&self) -> &'static str {
        "check-only"
    }

    fn run(&self, req: &Request, sink: &mut Sink<'_>) -> Result<Outcome, Error> {
        compile_with(&req.source, &req.bindings, &req.options, sink)?;
        Ok(Outcome::Checked)
    }
}

pub fn engines() -> Vec<Box<dyn Engine>> {
    vec![Box::new(SolveEngine), Box::new(OracleEngine), Box::new(CheckEngine)]
}

pub fn engine(name: &str) -> Result<Box<dyn Engine>, Error> {
    engines().into_iter().find(|e| e.name() == name).ok_or_else(|| Error::UnknownStrategy {
        kind: "mode",
        name: name.to_string(),
        available: engines().iter().map(|e| e.name()).collect::<Vec<_>>().join(", "),
    })
}
