//! Partial grounding: ASP variables are replaced by the objects of their sorts,
//! solver-side variables are left in place.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::frontend::ast::*;
use crate::frontend::print;

pub const DEFAULT_INSTANCE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroundError {
    #[error("{span}: grounding would create more than {cap} rule instances")]
    TooManyInstances { span: Span, cap: usize },
    #[error("{span}: variable {variable} occurs in the argument `{term}`; only variables over declared object sorts may appear in arguments")]
    VariableInArgument { span: Span, variable: String, term: String },
    #[error("{span}: division by zero while grounding")]
    DivisionByZero { span: Span },
    #[error("{span}: ASP variable {variable} ranges over an empty sort")]
    EmptyDomain { span: Span, variable: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundConstant {
    pub constant: GroundConst,
    pub sort: ValueSort,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundProgram {
    /// Declarations of the source program with ground rules.
    pub program: Program,
    pub constants: Vec<GroundConstant>,
}

impl GroundProgram {
    pub fn rules(&self) -> &[Rule] {
        &self.program.rules
    }

    pub fn sort_of(&self, c: &GroundConst) -> Option<&ValueSort> {
        self.constants.iter().find(|g| &g.constant == c).map(|g| &g.sort)
    }
}

/// Every ground constant, in declaration order and then argument order.
pub fn enumerate_ground_constants(program: &Program) -> Vec<GroundConstant> {
    let mut out = Vec::new();
    for decl in &program.constants {
        let domains: Vec<Vec<Value>> =
            decl.arg_sorts.iter().map(|s| program.objects_of(s)).collect();
        for args in cartesian(&domains) {
            out.push(GroundConstant {
                constant: GroundConst::new(&decl.name, args),
                sort: decl.value_sort.clone(),
            });
        }
    }
    out
}

fn cartesian(domains: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for prefix in &out {
            for v in d {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub fn ground(program: &Program) -> Result<GroundProgram, GroundError> {
    ground_with_cap(program, DEFAULT_INSTANCE_CAP)
}

pub fn ground_with_cap(program: &Program, cap: usize) -> Result<GroundProgram, GroundError> {
    let constants = enumerate_ground_constants(program);
    let ctx = Context {
        arg_domains: program
            .constants
            .iter()
            .map(|c| {
                let doms: Vec<BTreeSet<Value>> = c
                    .arg_sorts
                    .iter()
                    .map(|s| program.objects_of(s).into_iter().collect())
                    .collect();
                (c.name.clone(), doms)
            })
            .collect(),
    };

    let mut rules = Vec::new();
    let mut candidates = 0usize;
    for rule in &program.rules {
        for split in split_disjunctions(rule) {
            let asp_vars: Vec<String> =
                split.vars().into_iter().filter(|v| program.is_asp_variable(v)).collect();
            let domains: Vec<Vec<Value>> =
                asp_vars.iter().map(|v| program.variable_domain(v)).collect();
            if let Some(i) = domains.iter().position(Vec::is_empty) {
                return Err(GroundError::EmptyDomain { span: rule.span, variable: asp_vars[i].clone() });
            }
            let count = domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()));
            candidates = match count.and_then(|c| candidates.checked_add(c)) {
                Some(n) if n <= cap => n,
                _ => return Err(GroundError::TooManyInstances { span: rule.span, cap }),
            };
            for assignment in cartesian(&domains) {
                let subst: BTreeMap<String, Term> = asp_vars
                    .iter()
                    .cloned()
                    .zip(assignment.iter().map(Value::to_term))
                    .collect();
                if let Some(r) = ctx.instantiate(&split, &subst)? {
                    rules.push(r);
                }
            }
        }
    }

    let mut out = program.clone();
    out.rules = rules;
    Ok(GroundProgram { program: out, constants })
}

/// Splits top-level body disjunctions into separate rules.
fn split_disjunctions(rule: &Rule) -> Vec<Rule> {
    let mut bodies: Vec<Vec<Formula>> = vec![Vec::new()];
    for conjunct in &rule.body {
        let alternatives = alternatives(conjunct);
        let mut next = Vec::new();
        for b in &bodies {
            for alt in &alternatives {
                let mut nb = b.clone();
                nb.extend(alt.iter().cloned());
                next.push(nb);
            }
        }
        bodies = next;
    }
    bodies
        .into_iter()
        .map(|body| Rule { body, ..rule.clone() })
        .collect()
}

fn alternatives(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::Or(gs) => gs.iter().flat_map(alternatives).collect(),
        Formula::And(gs) => {
            let mut out = vec![Vec::new()];
            for g in gs {
                let alts = alternatives(g);
                let mut next = Vec::new();
                for prefix in &out {
                    for alt in &alts {
                        let mut p: Vec<Formula> = prefix.clone();
                        p.extend(alt.iter().cloned());
                        next.push(p);
                    }
                }
                out = next;
            }
            out
        }
        other => vec![vec![other.clone()]],
    }
}

struct Context {
    arg_domains: BTreeMap<String, Vec<BTreeSet<Value>>>,
}

/// Three-valued result of simplifying a ground formula.
enum Simplified {
    True,
    False,
    Open(Formula),
}

impl Context {
    fn instantiate(
        &self,
        rule: &Rule,
        subst: &BTreeMap<String, Term>,
    ) -> Result<Option<Rule>, GroundError> {
        let span = rule.span;
        let head = match &rule.head {
            Head::Falsum => Head::Falsum,
            Head::Assign { func, value } => {
                let func = self.term(func, subst, span)?;
                let value = self.term(value, subst, span)?;
                if !self.in_domain(&func) {
                    log::debug!("{span}: dropping instance with head {} outside its sort", print::term(&func));
                    return Ok(None);
                }
                self.check_args(&value, span)?;
                Head::Assign { func, value }
            }
        };
        let mut body = Vec::new();
        for b in &rule.body {
            let f = self.formula(b, subst, span)?;
            match self.simplify(&f) {
                Simplified::True => {}
                Simplified::False => {
                    log::debug!("{span}: dropping instance with false body literal");
                    return Ok(None);
                }
                Simplified::Open(g) => body.push(g),
            }
        }
        let mut smt_sorts = rule.smt_sorts.clone();
        smt_sorts.retain(|v, _| !subst.contains_key(v));
        Ok(Some(Rule {
            head,
            body,
            choice: rule.choice,
            span,
            origin: rule.origin,
            smt_sorts,
        }))
    }

    fn term(&self, t: &Term, subst: &BTreeMap<String, Term>, span: Span) -> Result<Term, GroundError> {
        let mut t = t.clone();
        t.rename_in_place(subst);
        let t = t.fold().map_err(|_| GroundError::DivisionByZero { span })?;
        self.check_args(&t, span)?;
        Ok(t)
    }

    fn formula(
        &self,
        f: &Formula,
        subst: &BTreeMap<String, Term>,
        span: Span,
    ) -> Result<Formula, GroundError> {
        let mut err = None;
        let out = f.map_terms(&mut |t| match self.term(t, subst, span) {
            Ok(t) => t,
            Err(e) => {
                err.get_or_insert(e);
                t.clone()
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    fn check_args(&self, t: &Term, span: Span) -> Result<(), GroundError> {
        let mut bad = None;
        t.for_each_app(&mut |name, args| {
            for a in args {
                if let Some(v) = a.vars().into_iter().next() {
                    bad.get_or_insert((v, Term::App(name.to_string(), args.to_vec())));
                }
            }
        });
        match bad {
            Some((variable, term)) => Err(GroundError::VariableInArgument {
                span,
                variable,
                term: print::term(&term),
            }),
            None => Ok(()),
        }
    }

    /// True when every application in `t` has arguments inside their sorts.
    fn in_domain(&self, t: &Term) -> bool {
        let mut ok = true;
        t.for_each_app(&mut |name, args| {
            let Some(domains) = self.arg_domains.get(name) else { return };
            for (a, d) in args.iter().zip(domains) {
                match a.as_value() {
                    Some(v) if d.contains(&v) => {}
                    Some(_) => ok = false,
                    None => {}
                }
            }
        });
        ok
    }

    fn simplify(&self, f: &Formula) -> Simplified {
        match f {
            Formula::Cmp(op, a, b) => {
                if !self.in_domain(a) || !self.in_domain(b) {
                    return Simplified::False;
                }
                match (a.as_value(), b.as_value()) {
                    (Some(x), Some(y)) => {
                        if compare_values(*op, &x, &y) {
                            Simplified::True
                        } else {
                            Simplified::False
                        }
                    }
                    _ => Simplified::Open(f.clone()),
                }
            }
            Formula::Falsum => Simplified::False,
            Formula::Not(g) => match self.simplify(g) {
                Simplified::True => Simplified::False,
                Simplified::False => Simplified::True,
                Simplified::Open(g) => Simplified::Open(Formula::not(g)),
            },
            Formula::And(gs) => {
                let mut out = Vec::new();
                for g in gs {
                    match self.simplify(g) {
                        Simplified::True => {}
                        Simplified::False => return Simplified::False,
                        Simplified::Open(g) => out.push(g),
                    }
                }
                if out.is_empty() {
                    Simplified::True
                } else {
                    Simplified::Open(Formula::conjoin(out))
                }
            }
            Formula::Or(gs) => {
                let mut out = Vec::new();
                for g in gs {
                    match self.simplify(g) {
                        Simplified::True => return Simplified::True,
                        Simplified::False => {}
                        Simplified::Open(g) => out.push(g),
                    }
                }
                if out.is_empty() {
                    Simplified::False
                } else {
                    Simplified::Open(Formula::disjoin(out))
                }
            }
            Formula::Implies(a, b) => match (self.simplify(a), self.simplify(b)) {
                (Simplified::False, _) | (_, Simplified::True) => Simplified::True,
                (Simplified::True, b) => b,
                (Simplified::Open(a), Simplified::False) => Simplified::Open(Formula::not(a)),
                (Simplified::Open(a), Simplified::Open(b)) => {
                    Simplified::Open(Formula::implies(a, b))
                }
            },
        }
    }
}

/// Compares ground values. Objects and booleans only support `=`.
pub fn compare_values(op: CmpOp, a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Num(x), Value::Num(y)) => op.holds(x.cmp(y)),
        _ => match op {
            CmpOp::Eq => a == b,
            _ => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    const CAR_DECLS: &str = ":- sorts step; astep.
        :- objects 0..3 :: step; 0..2 :: astep.
        :- constants time(step) :: real[0..4]; accel(astep) :: boolean;
           duration(astep) :: real[0..4]; decel(astep) :: boolean;
           speed(step) :: real[0..4]; location(step) :: real[0..10].
        :- variables S :: astep; B :: boolean.";

    fn program(rules: &str) -> Program {
        parse_program(&format!("{CAR_DECLS} {rules}"), &BTreeMap::new()).unwrap()
    }

    #[test]
    fn smt_variables_survive_grounding() {
        let g = ground(&program("{duration(S)=X}.")).unwrap();
        assert_eq!(g.rules().len(), 3);
        for (i, r) in g.rules().iter().enumerate() {
            assert_eq!(
                r.head,
                Head::Assign {
                    func: Term::app("duration", vec![Term::num(i as i64)]),
                    value: Term::var("X")
                }
            );
        }
    }

    #[test]
    fn boolean_variables_are_expanded() {
        let g = ground(&program("{accel(S)=B}.")).unwrap();
        assert_eq!(g.rules().len(), 6);
    }

    #[test]
    fn ground_arithmetic_is_folded_and_out_of_sort_heads_dropped() {
        let g = ground(&program(":- variables T :: step. speed(T+1) = 0 <- speed(T) = 1.")).unwrap();
        assert_eq!(g.rules().len(), 3);
        assert_eq!(
            g.rules()[2].head,
            Head::Assign { func: Term::app("speed", vec![Term::num(3)]), value: Term::num(0) }
        );
    }

    #[test]
    fn ground_comparisons_are_evaluated() {
        let g = ground(&program(":- variables T :: step. speed(T) = 0 <- T > 1 & T != 3.")).unwrap();
        assert_eq!(g.rules().len(), 1);
        assert!(g.rules()[0].body.is_empty());
    }

    #[test]
    fn negated_out_of_sort_literal_is_true() {
        let g = ground(&program(":- variables T :: step. speed(T) = 0 <- not speed(T+1) = 2.")).unwrap();
        assert_eq!(g.rules().len(), 4);
        assert!(g.rules()[3].body.is_empty());
        assert_eq!(g.rules()[0].body.len(), 1);
    }

    #[test]
    fn variable_free_rule_is_unchanged() {
        let p = program("time(0) = 0.");
        let g = ground(&p).unwrap();
        assert_eq!(g.rules(), p.rules.as_slice());
    }

    #[test]
    fn disjunctive_bodies_are_split() {
        let g = ground(&program("speed(0) = 0 <- accel(0) = true | decel(0) = true.")).unwrap();
        assert_eq!(g.rules().len(), 2);
    }

    #[test]
    fn smt_variable_in_argument_is_an_error() {
        let err = ground(&program("speed(X) = 0.")).unwrap_err();
        assert!(matches!(err, GroundError::VariableInArgument { .. }));
    }

    #[test]
    fn instance_cap_is_enforced() {
        let p = program("{accel(S)=B}.");
        assert!(matches!(ground_with_cap(&p, 5), Err(GroundError::TooManyInstances { .. })));
        assert!(ground_with_cap(&p, 6).is_ok());
    }

    #[test]
    fn constants_enumerate_in_declaration_then_argument_order() {
        let cs = enumerate_ground_constants(&program(""));
        assert_eq!(cs.len(), 21);
        let names: Vec<String> = cs.iter().take(5).map(|c| c.constant.to_string()).collect();
        assert_eq!(names, ["time(0)", "time(1)", "time(2)", "time(3)", "accel(0)"]);
    }
}
