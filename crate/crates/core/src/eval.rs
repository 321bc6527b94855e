//! Evaluation of formulas under total interpretations of ground constants.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::frontend::ast::*;
use crate::grounder::compare_values;

/// Total assignment of values to ground constants.
pub type Interpretation = BTreeMap<GroundConst, Value>;

/// Values of variables.
pub type Env = BTreeMap<String, Value>;

/// Suffix marking the primed copy of a constant.
pub const PRIME: char = '\'';

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("no value for {0}")]
    MissingConstant(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("type mismatch in {0}")]
    TypeMismatch(String),
}

/// Source of constant values. Names ending in a prime refer to a second interpretation.
pub trait Lookup {
    fn value(&self, c: &GroundConst) -> Option<Value>;
}

impl Lookup for Interpretation {
    fn value(&self, c: &GroundConst) -> Option<Value> {
        self.get(c).cloned()
    }
}

/// `I` for plain names and `Î` for primed names.
pub struct Joint<'a> {
    pub base: &'a Interpretation,
    pub primed: &'a Interpretation,
}

impl Lookup for Joint<'_> {
    fn value(&self, c: &GroundConst) -> Option<Value> {
        match c.name.strip_suffix(PRIME) {
            Some(name) => self.primed.get(&GroundConst::new(name, c.args.clone())).cloned(),
            None => self.base.get(c).cloned(),
        }
    }
}

/// Evaluator with an absolute tolerance for numeric comparisons.
pub struct Evaluator<'a> {
    lookup: &'a dyn Lookup,
    tolerance: Rational,
}

/// Tolerance used when checking solver models that contain decimal approximations.
pub fn model_tolerance() -> Rational {
    Rational::new(1.into(), 1_000_000_000.into())
}

impl<'a> Evaluator<'a> {
    pub fn exact(lookup: &'a dyn Lookup) -> Self {
        Evaluator { lookup, tolerance: Rational::zero() }
    }

    pub fn with_tolerance(lookup: &'a dyn Lookup, tolerance: Rational) -> Self {
        Evaluator { lookup, tolerance }
    }

    pub fn term(&self, t: &Term, env: &Env) -> Result<Value, EvalError> {
        match t {
            Term::Num(n) => Ok(Value::Num(n.clone())),
            Term::Bool(b) => Ok(Value::Bool(*b)),
            Term::Sym(s) => Ok(Value::Obj(s.clone())),
            Term::Var(v) => env.get(v).cloned().ok_or_else(|| EvalError::UnboundVariable(v.clone())),
            Term::App(name, args) => {
                let args = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                let c = GroundConst { name: name.clone(), args };
                self.lookup.value(&c).ok_or_else(|| EvalError::MissingConstant(c.to_string()))
            }
            Term::Arith(op, a, b) => match (self.term(a, env)?, self.term(b, env)?) {
                (Value::Num(x), Value::Num(y)) => {
                    op.apply(&x, &y).map(Value::Num).ok_or(EvalError::DivisionByZero)
                }
                _ => Err(EvalError::TypeMismatch(format!("{t:?}"))),
            },
        }
    }

    /// Under positive polarity a numeric comparison holds when it holds for some
    /// perturbation of the difference within the tolerance; under negative polarity,
    /// when it holds for every such perturbation. Either way the enclosing formula
    /// is judged leniently.
    fn compare(&self, op: CmpOp, a: &Value, b: &Value, positive: bool) -> bool {
        match (a, b) {
            (Value::Num(x), Value::Num(y)) if !self.tolerance.is_zero() => {
                let d = x - y;
                let t = &self.tolerance;
                if positive {
                    match op {
                        CmpOp::Eq => d.abs() <= *t,
                        CmpOp::Lt => d < *t,
                        CmpOp::Le => d <= *t,
                        CmpOp::Gt => -d < *t,
                        CmpOp::Ge => -d <= *t,
                    }
                } else {
                    match op {
                        CmpOp::Eq => d.is_zero(),
                        CmpOp::Lt => d < -t.clone(),
                        CmpOp::Le => d <= -t.clone(),
                        CmpOp::Gt => d > *t,
                        CmpOp::Ge => d >= *t,
                    }
                }
            }
            _ => compare_values(op, a, b),
        }
    }

    pub fn formula(&self, f: &Formula, env: &Env) -> Result<bool, EvalError> {
        self.polar(f, env, true)
    }

    fn polar(&self, f: &Formula, env: &Env, positive: bool) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::Cmp(op, a, b) => {
                let (x, y) = (self.term(a, env)?, self.term(b, env)?);
                self.compare(*op, &x, &y, positive)
            }
            Formula::Falsum => false,
            Formula::Not(g) => !self.polar(g, env, !positive)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.polar(g, env, positive)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.polar(g, env, positive)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.polar(a, env, !positive)? || self.polar(b, env, positive)?,
        })
    }

    pub fn holds(&self, f: &Formula) -> Result<bool, EvalError> {
        self.formula(f, &Env::new())
    }
}

/// Labels of the assertions that fail under `interp`, compared with the model tolerance.
pub fn failing_assertions(
    theory: &[(String, Formula)],
    interp: &Interpretation,
) -> Result<Vec<String>, EvalError> {
    let ev = Evaluator::with_tolerance(interp, model_tolerance());
    let mut out = Vec::new();
    for (label, f) in theory {
        if !ev.holds(f)? {
            out.push(label.clone());
        }
    }
    Ok(out)
}
