//! Elimination of solver-side variables from completed definitions.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::analysis::{bare_definitions, conjuncts, variable_dependency_graph};
use crate::frontend::ast::*;
use crate::frontend::print;
use crate::transform::{Body, Completion, CompletionConstraint, CompletionEquivalence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElimError {
    #[error("{span}: cannot eliminate variable {variable} while defining {context}: no eligible equality remains")]
    Stuck { span: Span, variable: String, context: String },
    #[error("unknown elimination order `{0}`")]
    UnknownOrder(String),
}

/// A candidate defining equality: conjunct index, variable and its replacement.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub index: usize,
    pub variable: String,
    pub term: Term,
}

/// Tie-break among eligible defining equalities.
pub trait EliminationOrder: Send + Sync {
    fn name(&self) -> &'static str;
    fn choose(&self, candidates: Vec<Candidate>) -> Option<Candidate>;
}

pub struct Leftmost;
pub struct Rightmost;

impl EliminationOrder for Leftmost {
    fn name(&self) -> &'static str {
        "leftmost"
    }
    fn choose(&self, candidates: Vec<Candidate>) -> Option<Candidate> {
        candidates.into_iter().next()
    }
}

impl EliminationOrder for Rightmost {
    fn name(&self) -> &'static str {
        "rightmost"
    }
    fn choose(&self, candidates: Vec<Candidate>) -> Option<Candidate> {
        candidates.into_iter().last()
    }
}

pub fn orders() -> Vec<Box<dyn EliminationOrder>> {
    vec![Box::new(Leftmost), Box::new(Rightmost)]
}

pub fn order(name: &str) -> Result<Box<dyn EliminationOrder>, ElimError> {
    orders()
        .into_iter()
        .find(|o| o.name() == name)
        .ok_or_else(|| ElimError::UnknownOrder(name.to_string()))
}

/// Every eligible defining equality in `conjuncts`, left to right.
///
/// `x = t` is eligible when no variable of `t` depends on `x` through the
/// other conjuncts; the conjunct itself is not counted.
pub fn eligible(conjuncts: &[Formula]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (index, c) in conjuncts.iter().enumerate() {
        let defs = bare_definitions(c);
        if defs.is_empty() {
            continue;
        }
        let others: Vec<Formula> = conjuncts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, f)| f.clone())
            .collect();
        let vdg = variable_dependency_graph(&others);
        for (x, t) in defs {
            let blocked = t.vars().iter().any(|u| vdg.reaches(u, &x));
            if !blocked {
                out.push(Candidate { index, variable: x, term: t });
            }
        }
    }
    out
}

/// The leftmost eligible defining equality.
pub fn select_eliminable(conjuncts: &[Formula]) -> Option<(String, Term)> {
    Leftmost.choose(eligible(conjuncts)).map(|c| (c.variable, c.term))
}

/// Substitutes `var := by`, then removes the trivial conjuncts this creates.
pub fn substitute(f: &Formula, var: &str, by: &Term) -> Formula {
    simplify(&f.substitute(var, by))
}

/// Truth-constant propagation, `t = t` to truth, `not not` of truth to truth,
/// and removal of repeated conjuncts.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Cmp(CmpOp::Eq, a, b) if a == b => Formula::top(),
        Formula::Cmp(..) | Formula::Falsum => f.clone(),
        Formula::Not(g) => {
            let g = simplify(g);
            if g.is_top() {
                Formula::Falsum
            } else if g.is_bottom() {
                Formula::top()
            } else {
                Formula::not(g)
            }
        }
        Formula::And(gs) => {
            let mut out = Vec::new();
            for g in gs.iter().map(simplify) {
                if g.is_bottom() {
                    return Formula::Falsum;
                }
                let items = match g {
                    Formula::And(inner) => inner,
                    g => vec![g],
                };
                for g in items {
                    if !out.contains(&g) {
                        out.push(g);
                    }
                }
            }
            Formula::conjoin(out)
        }
        Formula::Or(gs) => {
            let mut out = Vec::new();
            for g in gs.iter().map(simplify) {
                if g.is_top() {
                    return Formula::top();
                }
                if !g.is_bottom() {
                    out.push(g);
                }
            }
            if out.is_empty() {
                Formula::Falsum
            } else {
                Formula::disjoin(out)
            }
        }
        Formula::Implies(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if a.is_bottom() || b.is_top() {
                Formula::top()
            } else if a.is_top() {
                b
            } else if b.is_bottom() {
                simplify(&Formula::not(a))
            } else {
                Formula::implies(a, b)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub variable: String,
    pub term: Term,
    pub step: usize,
}

/// The working conjunction of one disjunct together with its substitution log.
#[derive(Clone, Debug)]
pub struct EliminationState {
    pub conjuncts: Vec<Formula>,
    pub log: Vec<Step>,
}

impl EliminationState {
    fn new(conjuncts: Vec<Formula>) -> Self {
        let mut s = EliminationState { conjuncts: Vec::new(), log: Vec::new() };
        s.set(conjuncts);
        s
    }

    fn set(&mut self, items: Vec<Formula>) {
        let f = simplify(&Formula::And(conjuncts(&items)));
        self.conjuncts = match f {
            Formula::And(gs) => gs,
            g => vec![g],
        };
    }

    fn is_false(&self) -> bool {
        self.conjuncts.iter().any(Formula::is_bottom)
    }

    pub fn remaining(&self) -> BTreeSet<String> {
        let mut v = BTreeSet::new();
        self.conjuncts.iter().for_each(|c| c.collect_vars(&mut v));
        v
    }

    fn apply(&mut self, var: &str, by: &Term, extra: Option<&mut Formula>) {
        let step = self.log.len();
        self.log.push(Step { variable: var.to_string(), term: by.clone(), step });
        let items = self.conjuncts.iter().map(|c| c.substitute(var, by)).collect();
        self.set(items);
        if let Some(h) = extra {
            *h = simplify(&h.substitute(var, by));
        }
    }

    /// Chooses the next defining equality, preferring those that keep `last` in place.
    fn pick(&self, order: &dyn EliminationOrder, last: Option<&str>) -> Option<Candidate> {
        let (deferred, preferred): (Vec<Candidate>, Vec<Candidate>) = eligible(&self.conjuncts)
            .into_iter()
            .partition(|c| Some(c.variable.as_str()) == last);
        order.choose(preferred).or_else(|| order.choose(deferred))
    }

    fn formula(&self) -> Formula {
        Formula::conjoin(self.conjuncts.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminatedEquivalence {
    pub constant: GroundConst,
    /// Left-to-right direction: disjunction of variable-free bodies.
    pub forward: Formula,
    /// Right-to-left direction: conjunction of variable-free implications.
    pub backward: Formula,
    pub log: Vec<Vec<Step>>,
}

impl EliminatedEquivalence {
    pub fn formula(&self) -> Formula {
        simplify(&Formula::And(vec![self.forward.clone(), self.backward.clone()]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminatedConstraint {
    pub formula: Formula,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EliminatedTheory {
    pub equivalences: Vec<EliminatedEquivalence>,
    pub constraints: Vec<EliminatedConstraint>,
}

impl EliminatedTheory {
    /// Every assertion of the theory, labelled.
    pub fn assertions(&self) -> Vec<(String, Formula)> {
        let mut out: Vec<(String, Formula)> = self
            .equivalences
            .iter()
            .map(|e| (e.constant.to_string(), e.formula()))
            .collect();
        out.extend(
            self.constraints.iter().map(|c| (format!("constraint at {}", c.span), c.formula.clone())),
        );
        out
    }
}

fn stuck(body: &Body, state: &EliminationState, context: String) -> ElimError {
    ElimError::Stuck {
        span: body.span,
        variable: state.remaining().into_iter().next().unwrap_or_default(),
        context,
    }
}

fn eliminate_all(
    body: &Body,
    state: &mut EliminationState,
    order: &dyn EliminationOrder,
    context: &dyn Fn() -> String,
) -> Result<(), ElimError> {
    while !state.remaining().is_empty() && !state.is_false() {
        let c = state.pick(order, None).ok_or_else(|| stuck(body, state, context()))?;
        state.apply(&c.variable, &c.term, None);
    }
    Ok(())
}

pub fn eliminate_equivalence(
    eq: &CompletionEquivalence,
    order: &dyn EliminationOrder,
) -> Result<EliminatedEquivalence, ElimError> {
    let f = eq.constant.to_term();
    let v = eq.value_var.as_str();
    let context = || format!("{}", eq.constant);
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    let mut log = Vec::new();

    for body in &eq.bodies {
        let mut state = EliminationState::new(body.conjuncts.clone());
        state.apply(v, &f, None);
        eliminate_all(body, &mut state, order, &context)?;
        forward.push(if state.is_false() { Formula::Falsum } else { state.formula() });
        log.push(state.log);
    }

    for body in &eq.bodies {
        let mut state = EliminationState::new(body.conjuncts.clone());
        let mut head = eq.head();
        while !state.remaining().is_empty() && !state.is_false() {
            match state.pick(order, Some(v)) {
                Some(c) => state.apply(&c.variable, &c.term, Some(&mut head)),
                None if state.remaining().contains(v) || head.contains_var(v) => {
                    // No body equality defines the value variable: use the head.
                    state.apply(v, &f, Some(&mut head));
                }
                None => return Err(stuck(body, &state, context())),
            }
        }
        if head.contains_var(v) {
            state.apply(v, &f, Some(&mut head));
        }
        let g = if state.is_false() {
            Formula::top()
        } else {
            simplify(&Formula::implies(state.formula(), head))
        };
        backward.push(g);
        log.push(state.log);
    }

    let forward = simplify(&Formula::Or(forward));
    let backward = simplify(&Formula::And(backward));
    let out = EliminatedEquivalence { constant: eq.constant.clone(), forward, backward, log };
    debug_assert!(out.formula().vars().is_empty());
    if let Some(var) = out.formula().vars().into_iter().next() {
        return Err(ElimError::Stuck { span: Span::default(), variable: var, context: context() });
    }
    Ok(out)
}

pub fn eliminate_constraint(
    c: &CompletionConstraint,
    order: &dyn EliminationOrder,
) -> Result<EliminatedConstraint, ElimError> {
    let mut state = EliminationState::new(c.body.conjuncts.clone());
    eliminate_all(&c.body, &mut state, order, &|| "a constraint".to_string())?;
    let formula = if state.is_false() {
        Formula::top()
    } else {
        simplify(&Formula::not(state.formula()))
    };
    Ok(EliminatedConstraint { formula, span: c.body.span })
}

pub fn eliminate(completion: &Completion, order: &dyn EliminationOrder) -> Result<EliminatedTheory, ElimError> {
    Ok(EliminatedTheory {
        equivalences: completion
            .equivalences
            .iter()
            .map(|e| eliminate_equivalence(e, order))
            .collect::<Result<_, _>>()?,
        constraints: completion
            .constraints
            .iter()
            .map(|c| eliminate_constraint(c, order))
            .collect::<Result<_, _>>()?,
    })
}

impl fmt::Display for EliminatedTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equivalences {
            writeln!(f, "% {}", e.constant)?;
            writeln!(f, "{}", print::formula(&e.formula()))?;
        }
        for c in &self.constraints {
            writeln!(f, "% constraint at {}", c.span)?;
            writeln!(f, "{}", print::formula(&c.formula))?;
        }
        Ok(())
    }
}
