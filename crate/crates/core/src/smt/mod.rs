//! SMT-LIB emission, solver subprocess driver and model decoding.

pub mod emit;
pub mod model;
pub mod sexp;
pub mod solver;

use thiserror::Error;

pub use emit::{emit_script, quantified_equivalence, Printer, SmtScript, SmtSort, SymbolTable};
pub use model::{decode_model, format_value, ModelValue, SolverModel};
pub use solver::{run_solver, Session, SolverConfig, SolverOutcome, SolverRun, Verdict};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmtError {
    #[error("constants {first} and {second} both map to the solver symbol `{symbol}`")]
    SymbolCollision { symbol: String, first: String, second: String },
    #[error("constant {0} is not declared")]
    UnknownConstant(String),
    #[error("variable {0} remains in a solver formula")]
    FreeVariable(String),
    #[error("cannot express in SMT-LIB: {0}")]
    Unsupported(String),
    #[error("malformed solver output: {0}")]
    Parse(String),
    #[error("the solver model has no value for `{0}`")]
    MissingSymbol(String),
    #[error("cannot run solver `{path}`: {message}")]
    Launch { path: String, message: String },
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error talking to the solver: {0}")]
    Io(String),
}
