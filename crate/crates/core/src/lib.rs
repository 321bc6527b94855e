//! Compilation of ASP modulo theories programs with functions into SMT-LIB.
//!
//! The pipeline parses a program, checks that it lies in the supported fragment,
//! grounds its object variables, completes it, eliminates the remaining
//! variables and emits an SMT-LIB script. A brute-force stable model oracle
//! over finite domains serves as a reference.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod graph;
pub mod grounder;
pub mod oracle;
pub mod pipeline;
pub mod smt;
pub mod transform;
pub mod varelim;

pub use engine::{engine, engines, Engine, Outcome, Request};
pub use error::Error;
pub use pipeline::{compile, compile_with, Compiled, Options, Stage};
