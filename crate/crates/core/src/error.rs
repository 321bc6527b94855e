use thiserror::Error;

use crate::analysis::Violation;
use crate::frontend::ast::GroundConst;
use crate::frontend::FrontendError;
use crate::grounder::GroundError;
use crate::oracle::OracleError;
use crate::smt::SmtError;
use crate::varelim::ElimError;

fn lines(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

fn cycle(cs: &[GroundConst]) -> String {
    let mut names: Vec<String> = cs.iter().map(ToString::to_string).collect();
    if let Some(first) = names.first().cloned() {
        names.push(first);
    }
    names.join(" -> ")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error("{}", lines(.0))]
    Check(Vec<Violation>),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("program is not tight: dependency cycle {}", cycle(.0))]
    NotTight(Vec<GroundConst>),
    #[error(transparent)]
    Elim(#[from] ElimError),
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("unknown {kind} `{name}`; available: {available}")]
    UnknownStrategy { kind: &'static str, name: String, available: String },
}
