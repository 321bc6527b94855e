//! The compilation stages from source text to an SMT-LIB script.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::analysis::{
    build_constant_dependency_graph, check_av_separated, check_f_plain, check_tight_with,
    check_variable_isolated, Tightness,
};
use crate::error::Error;
use crate::frontend::ast::*;
use crate::frontend::{parse_program, print};
use crate::graph::{cycle_detector, cycle_detectors, CycleDetector};
use crate::grounder::{ground_with_cap, GroundProgram, DEFAULT_INSTANCE_CAP};
use crate::smt::{emit_script, SmtScript, SymbolTable};
use crate::transform::{completion, Completion};
use crate::varelim::{self, eliminate, EliminatedTheory, EliminationOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub elim_order: String,
    pub cycle_detector: String,
    pub instance_cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { elim_order: "leftmost".into(), cycle_detector: "dfs".into(), instance_cap: DEFAULT_INSTANCE_CAP }
    }
}

impl Options {
    pub fn order(&self) -> Result<Box<dyn EliminationOrder>, Error> {
        varelim::order(&self.elim_order).map_err(|_| Error::UnknownStrategy {
            kind: "elimination order",
            name: self.elim_order.clone(),
            available: varelim::orders().iter().map(|o| o.name()).collect::<Vec<_>>().join(", "),
        })
    }

    pub fn detector(&self) -> Result<Box<dyn CycleDetector<GroundConst>>, Error> {
        cycle_detector(&self.cycle_detector).ok_or_else(|| Error::UnknownStrategy {
            kind: "cycle detector",
            name: self.cycle_detector.clone(),
            available: cycle_detectors::<GroundConst>().iter().map(|d| d.name()).collect::<Vec<_>>().join(", "),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ground,
    Completion,
    Eliminated,
    Smt,
}

/// Receives the text of each intermediate stage as it is produced.
pub type Sink<'a> = dyn FnMut(Stage, &str) + 'a;

/// Rejects programs that are not f-plain or not av-separated.
pub fn check_source(program: &Program) -> Result<(), Error> {
    let mut v = check_f_plain(program);
    v.extend(check_av_separated(program));
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Check(v))
    }
}

/// Rejects ground programs with a rule that is not variable-isolated, or that are not tight.
pub fn check_ground(ground: &GroundProgram, detector: &dyn CycleDetector<GroundConst>) -> Result<(), Error> {
    let mut seen = BTreeSet::new();
    let mut v = Vec::new();
    for rule in ground.rules() {
        if let Err(e) = check_variable_isolated(rule) {
            if seen.insert(rule.origin) {
                v.push(e);
            }
        }
    }
    if !v.is_empty() {
        return Err(Error::Check(v));
    }
    match check_tight_with(&build_constant_dependency_graph(ground), detector) {
        Tightness::Tight => Ok(()),
        Tightness::Cycle(c) => Err(Error::NotTight(c)),
    }
}

pub fn ground_text(ground: &GroundProgram) -> String {
    ground.rules().iter().map(|r| format!("{}\n", print::rule(r))).collect()
}

/// Parses, checks and grounds a program.
pub fn front(source: &str, bindings: &BTreeMap<String, BigInt>, options: &Options) -> Result<GroundProgram, Error> {
    let program = parse_program(source, bindings)?;
    check_source(&program)?;
    let ground = ground_with_cap(&program, options.instance_cap)?;
    check_ground(&ground, options.detector()?.as_ref())?;
    Ok(ground)
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub ground: GroundProgram,
    pub completion: Completion,
    pub theory: EliminatedTheory,
    pub script: SmtScript,
    pub table: SymbolTable,
}

/// Every stage through SMT-LIB emission, reporting each stage to `sink`.
pub fn compile_with(
    source: &str,
    bindings: &BTreeMap<String, BigInt>,
    options: &Options,
    sink: &mut Sink<'_>,
) -> Result<Compiled, Error> {
    let ground = front(source, bindings, options)?;
    log::info!("grounded {} rules over {} constants", ground.rules().len(), ground.constants.len());
    sink(Stage::Ground, &ground_text(&ground));
    let completion = completion(&ground);
    log::info!("completion has {} constraints", completion.constraints.len());
    sink(Stage::Completion, &completion.to_string());
    let theory = eliminate(&completion, options.order()?.as_ref())?;
    sink(Stage::Eliminated, &theory.to_string());
    let script = emit_script(&theory.assertions(), &ground.constants)?;
    log::info!("emitted {} assertions in {}", script.assertions.len(), script.logic.as_deref().unwrap_or("no logic"));
    sink(Stage::Smt, &script.to_string());
    let table = SymbolTable::new(&ground.constants)?;
    Ok(Compiled { ground, completion, theory, script, table })
}

pub fn compile(source: &str, bindings: &BTreeMap<String, BigInt>, options: &Options) -> Result<Compiled, Error> {
    compile_with(source, bindings, options, &mut |_, _| {})
}
