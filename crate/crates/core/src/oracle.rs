//! Brute-force functional stable models over finite domains.
//!
//! An interpretation `I` is stable for `F` when `I` satisfies `F` and no other
//! interpretation `Î` of the same constants satisfies `F*` evaluated jointly with `I`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analysis::conjuncts;
use crate::eval::{Env, EvalError, Evaluator, Interpretation, Joint, Lookup, PRIME};
use crate::frontend::ast::*;
use crate::grounder::{compare_values, GroundProgram};
use crate::transform::Completion;

pub const DEFAULT_CANDIDATE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{count} candidate interpretations exceed the cap of {cap}")]
    TooManyCandidates { count: String, cap: usize },
    #[error("constant {0} has a real value sort; the oracle needs finite domains")]
    RealDomain(String),
    #[error("{span}: cannot bound the values of variable {variable}")]
    UnboundedVariable { span: Span, variable: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Intensional constants with their finite domains, in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSignature {
    pub constants: Vec<(GroundConst, Vec<Value>)>,
}

impl FiniteSignature {
    pub fn from_ground(ground: &GroundProgram) -> Result<FiniteSignature, OracleError> {
        let constants = ground
            .constants
            .iter()
            .map(|gc| {
                let dom = gc.sort.finite_values().ok_or_else(|| OracleError::RealDomain(gc.constant.to_string()))?;
                Ok((gc.constant.clone(), dom))
            })
            .collect::<Result<_, OracleError>>()?;
        Ok(FiniteSignature { constants })
    }

    fn names(&self) -> BTreeSet<String> {
        self.constants.iter().map(|(c, _)| c.name.clone()).collect()
    }

    /// Number of total interpretations, when it fits the cap.
    pub fn check_cap(&self, cap: usize) -> Result<usize, OracleError> {
        let mut count: u128 = 1;
        for (_, dom) in &self.constants {
            count = count.saturating_mul(dom.len() as u128);
        }
        if count > cap as u128 {
            return Err(OracleError::TooManyCandidates { count: count.to_string(), cap });
        }
        Ok(count as usize)
    }

    /// Every total interpretation, odometer order with the last constant fastest.
    pub fn interpretations(&self) -> Interpretations<'_> {
        let done = self.constants.iter().any(|(_, d)| d.is_empty());
        Interpretations { sig: self, digits: vec![0; self.constants.len()], done }
    }
}

pub struct Interpretations<'a> {
    sig: &'a FiniteSignature,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Interpretations<'_> {
    type Item = Interpretation;

    fn next(&mut self) -> Option<Interpretation> {
        if self.done {
            return None;
        }
        let item = self
            .sig
            .constants
            .iter()
            .zip(&self.digits)
            .map(|((c, dom), &i)| (c.clone(), dom[i].clone()))
            .collect();
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.sig.constants[k].1.len() {
                break;
            }
            self.digits[k] = 0;
        }
        Some(item)
    }
}

fn prime_term(t: &Term, names: &BTreeSet<String>) -> Term {
    match t {
        Term::App(n, args) => {
            let args = args.iter().map(|a| prime_term(a, names)).collect();
            let n = if names.contains(n) { format!("{n}{PRIME}") } else { n.clone() };
            Term::App(n, args)
        }
        Term::Arith(op, a, b) => Term::arith(*op, prime_term(a, names), prime_term(b, names)),
        other => other.clone(),
    }
}

/// The `F*` transform with the constants in `intensional` replaced by their primed copies.
pub fn star_transform(f: &Formula, intensional: &BTreeSet<String>) -> Formula {
    match f {
        Formula::Cmp(..) => {
            let primed = f.map_terms(&mut |t| prime_term(t, intensional));
            Formula::And(vec![primed, f.clone()])
        }
        Formula::Falsum => Formula::Falsum,
        Formula::And(gs) => Formula::And(gs.iter().map(|g| star_transform(g, intensional)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| star_transform(g, intensional)).collect()),
        Formula::Not(g) => star_transform(&Formula::implies((**g).clone(), Formula::Falsum), intensional),
        Formula::Implies(a, b) => Formula::And(vec![
            Formula::implies(star_transform(a, intensional), star_transform(b, intensional)),
            f.clone(),
        ]),
    }
}

fn holds(lookup: &dyn Lookup, f: &Formula) -> Result<bool, OracleError> {
    Ok(Evaluator::exact(lookup).holds(f)?)
}

/// Stability of `i` for the ground formula `f`, given its precomputed star transform.
fn stable_with_star(i: &Interpretation, f: &Formula, star: &Formula, sig: &FiniteSignature) -> Result<bool, OracleError> {
    if !holds(i, f)? {
        return Ok(false);
    }
    for j in sig.interpretations() {
        if &j == i {
            continue;
        }
        if holds(&Joint { base: i, primed: &j }, star)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when `i` satisfies `f` and no different interpretation of the signature satisfies `f*` jointly with `i`.
pub fn is_stable(i: &Interpretation, f: &Formula, sig: &FiniteSignature) -> Result<bool, OracleError> {
    sig.check_cap(DEFAULT_CANDIDATE_CAP)?;
    let star = star_transform(f, &sig.names());
    stable_with_star(i, f, &star, sig)
}

/// All stable models of a ground formula, in enumeration order.
pub fn enumerate_stable_models(f: &Formula, sig: &FiniteSignature) -> Result<Vec<Interpretation>, OracleError> {
    sig.check_cap(DEFAULT_CANDIDATE_CAP)?;
    let star = star_transform(f, &sig.names());
    let mut out = Vec::new();
    for i in sig.interpretations() {
        if stable_with_star(&i, f, &star, sig)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// True when `t` is affine in `x` with coefficients free of `x`.
fn affine(t: &Term, x: &str) -> bool {
    match t {
        Term::Arith(ArithOp::Add | ArithOp::Sub, a, b) => affine(a, x) && affine(b, x),
        Term::Arith(ArithOp::Mul, a, b) => {
            (!a.contains_var(x) && affine(b, x)) || (!b.contains_var(x) && affine(a, x))
        }
        Term::Arith(ArithOp::Div, a, b) => !b.contains_var(x) && affine(a, x),
        Term::App(_, args) => args.iter().all(|a| !a.contains_var(x)),
        _ => true,
    }
}

/// Assignments to the variables of `body` under which it holds in `i`.
///
/// Values are read off equalities with a single unknown variable, solved exactly
/// when that variable occurs affinely. A variable no conjunct determines is
/// enumerated over its sort when that sort is finite.
pub struct Solver<'a> {
    pub interp: &'a Interpretation,
    pub sorts: &'a BTreeMap<String, ValueSort>,
    pub span: Span,
}

impl Solver<'_> {
    pub fn solutions(&self, body: &[Formula], env: Env) -> Result<Vec<Env>, OracleError> {
        let items = conjuncts(body);
        let mut vars = BTreeSet::new();
        items.iter().for_each(|c| c.collect_vars(&mut vars));
        let mut out = Vec::new();
        self.extend(&items, &vars, env, &mut out)?;
        Ok(out)
    }

    fn extend(&self, items: &[Formula], vars: &BTreeSet<String>, env: Env, out: &mut Vec<Env>) -> Result<(), OracleError> {
        let unknown: Vec<&String> = vars.iter().filter(|v| !env.contains_key(*v)).collect();
        if unknown.is_empty() {
            if Evaluator::exact(self.interp).formula(&Formula::And(items.to_vec()), &env)? {
                out.push(env);
            }
            return Ok(());
        }
        for c in items {
            let eq = c.double_negated().unwrap_or(c);
            let Formula::Cmp(CmpOp::Eq, a, b) = eq else { continue };
            let mut free = eq.vars();
            free.retain(|v| !env.contains_key(v));
            if free.len() != 1 {
                continue;
            }
            let x = free.into_iter().next().unwrap();
            match self.solve(a, b, &x, &env)? {
                Pinned::Value(v) => {
                    if !self.admissible(&x, &v) {
                        return Ok(());
                    }
                    let mut env = env;
                    env.insert(x, v);
                    return self.extend(items, vars, env, out);
                }
                Pinned::Never => return Ok(()),
                Pinned::Free => continue,
            }
        }
        let x = unknown[0];
        let domain = self
            .sorts
            .get(x)
            .and_then(ValueSort::finite_values)
            .ok_or_else(|| OracleError::UnboundedVariable { span: self.span, variable: x.clone() })?;
        for v in domain {
            let mut env = env.clone();
            env.insert(x.clone(), v);
            self.extend(items, vars, env, out)?;
        }
        Ok(())
    }

    fn admissible(&self, x: &str, v: &Value) -> bool {
        match (self.sorts.get(x), v) {
            (Some(ValueSort::Int { .. }), Value::Num(n)) => n.is_integer(),
            (Some(ValueSort::Int { .. }), _) => false,
            (Some(ValueSort::Boolean), v) => matches!(v, Value::Bool(_)),
            _ => true,
        }
    }

    fn solve(&self, a: &Term, b: &Term, x: &str, env: &Env) -> Result<Pinned, OracleError> {
        let ev = Evaluator::exact(self.interp);
        for (side, other) in [(a, b), (b, a)] {
            if side.as_var() == Some(x) && !other.contains_var(x) {
                return Ok(Pinned::Value(ev.term(other, env)?));
            }
        }
        if !(affine(a, x) && affine(b, x)) {
            return Ok(Pinned::Free);
        }
        let at = |n: i64| -> Result<Option<Rational>, OracleError> {
            let mut e = env.clone();
            e.insert(x.to_string(), Value::Num(int(n)));
            match (ev.term(a, &e)?, ev.term(b, &e)?) {
                (Value::Num(p), Value::Num(q)) => Ok(Some(p - q)),
                _ => Ok(None),
            }
        };
        let (Some(g0), Some(g1)) = (at(0)?, at(1)?) else { return Ok(Pinned::Free) };
        let slope = g1 - &g0;
        Ok(if slope == int(0) {
            if g0 == int(0) { Pinned::Free } else { Pinned::Never }
        } else {
            Pinned::Value(Value::Num(-g0 / slope))
        })
    }
}

enum Pinned {
    Value(Value),
    Never,
    Free,
}

/// The rule instances that can matter for `i`: those whose body holds in `i`.
///
/// Instances with a false body are satisfied by `F` and `F*` alike, and an
/// instance of a choice rule whose head value differs from `i` is as well.
pub fn relevant_instances(ground: &GroundProgram, i: &Interpretation) -> Result<Formula, OracleError> {
    let mut parts = Vec::new();
    for rule in ground.rules() {
        let mut env = Env::new();
        if rule.choice {
            if let Head::Assign { func, value: Term::Var(v) } = &rule.head {
                env.insert(v.clone(), Evaluator::exact(i).term(func, &Env::new())?);
            }
        }
        let solver = Solver { interp: i, sorts: &rule.smt_sorts, span: rule.span };
        let f = rule.to_formula();
        for sigma in solver.solutions(&rule.body, env)? {
            let mut g = f.clone();
            for (x, v) in &sigma {
                g = g.substitute(x, &v.to_term());
            }
            parts.push(g);
        }
    }
    Ok(Formula::And(parts))
}

pub fn stable_models(ground: &GroundProgram) -> Result<Vec<Interpretation>, OracleError> {
    stable_models_with_cap(ground, DEFAULT_CANDIDATE_CAP)
}

pub fn stable_models_with_cap(ground: &GroundProgram, cap: usize) -> Result<Vec<Interpretation>, OracleError> {
    let sig = FiniteSignature::from_ground(ground)?;
    sig.check_cap(cap)?;
    let names = sig.names();
    let mut out = Vec::new();
    for i in sig.interpretations() {
        let f = relevant_instances(ground, &i)?;
        let star = star_transform(&f, &names);
        if stable_with_star(&i, &f, &star, &sig)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Whether `i` satisfies the completion, with the quantifiers over solver
/// variables resolved through the body equalities.
pub fn satisfies_completion(completion: &Completion, i: &Interpretation) -> Result<bool, OracleError> {
    for eq in &completion.equivalences {
        let own = i.get(&eq.constant).ok_or_else(|| EvalError::MissingConstant(eq.constant.to_string()))?;
        let mut supported = false;
        for body in &eq.bodies {
            let solver = Solver { interp: i, sorts: &body.sorts, span: body.span };
            let env = Env::from([(eq.value_var.clone(), own.clone())]);
            supported |= !solver.solutions(&body.conjuncts, env)?.is_empty();
            for sigma in solver.solutions(&body.conjuncts, Env::new())? {
                if !compare_values(CmpOp::Eq, &sigma[&eq.value_var], own) {
                    return Ok(false);
                }
            }
        }
        if !supported {
            return Ok(false);
        }
    }
    for c in &completion.constraints {
        let solver = Solver { interp: i, sorts: &c.body.sorts, span: c.body.span };
        if !solver.solutions(&c.body.conjuncts, Env::new())?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Interpretations satisfying the completion, by exhaustive enumeration.
pub fn completion_models(completion: &Completion, ground: &GroundProgram) -> Result<Vec<Interpretation>, OracleError> {
    let sig = FiniteSignature::from_ground(ground)?;
    sig.check_cap(DEFAULT_CANDIDATE_CAP)?;
    let mut out = Vec::new();
    for i in sig.interpretations() {
        if satisfies_completion(completion, &i)? {
            out.push(i);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Term {
        Term::app("f", vec![])
    }

    fn sig12() -> FiniteSignature {
        FiniteSignature { constants: vec![(GroundConst::new("f", vec![]), vec![Value::Num(int(1)), Value::Num(int(2))])] }
    }

    fn values(models: &[Interpretation]) -> Vec<Value> {
        models.iter().map(|m| m[&GroundConst::new("f", vec![])].clone()).collect()
    }

    #[test]
    fn star_of_an_atom_pairs_it_with_its_primed_copy() {
        let names = BTreeSet::from(["f".to_string()]);
        let a = Formula::eq(f(), Term::num(1));
        let expected = Formula::And(vec![Formula::eq(Term::app("f'", vec![]), Term::num(1)), a.clone()]);
        assert_eq!(star_transform(&a, &names), expected);
        assert_eq!(star_transform(&Formula::Falsum, &names), Formula::Falsum);
    }

    fn choice(v: i64) -> Formula {
        let a = Formula::eq(f(), Term::num(v));
        Formula::Or(vec![a.clone(), Formula::not(a)])
    }

    #[test]
    fn a_choice_acts_as_a_default() {
        let models = enumerate_stable_models(&choice(1), &sig12()).unwrap();
        assert_eq!(values(&models), [Value::Num(int(1))]);
        let i: Interpretation = [(GroundConst::new("f", vec![]), Value::Num(int(2)))].into();
        assert!(!is_stable(&i, &choice(1), &sig12()).unwrap());
    }

    #[test]
    fn competing_defaults_give_one_model_each() {
        let both = Formula::And(vec![choice(1), choice(2)]);
        let models = enumerate_stable_models(&both, &sig12()).unwrap();
        assert_eq!(values(&models), [Value::Num(int(1)), Value::Num(int(2))]);
    }

    #[test]
    fn facts_and_empty_theories() {
        let fact = Formula::eq(f(), Term::num(1));
        assert_eq!(values(&enumerate_stable_models(&fact, &sig12()).unwrap()), [Value::Num(int(1))]);
        assert!(enumerate_stable_models(&Formula::top(), &sig12()).unwrap().is_empty());
        let constraint = Formula::implies(Formula::top(), Formula::Falsum);
        assert!(enumerate_stable_models(&constraint, &sig12()).unwrap().is_empty());
    }

    #[test]
    fn real_domains_are_refused() {
        let ground = GroundProgram {
            program: Program::default(),
            constants: vec![crate::grounder::GroundConstant {
                constant: GroundConst::new("x", vec![]),
                sort: ValueSort::Real { lo: int(0), hi: int(1) },
            }],
        };
        assert!(matches!(stable_models(&ground), Err(OracleError::RealDomain(_))));
    }
}
