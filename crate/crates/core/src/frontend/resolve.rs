//! Name resolution, `-c` binding substitution and sort inference.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;

use super::ast::*;
use super::parser::{RawFormula, RawObject, RawRule, RawSort, RawTerm, Statement};
use super::FrontendError;

pub fn resolve(
    statements: Vec<Statement>,
    bindings: &BTreeMap<String, BigInt>,
) -> Result<Program, FrontendError> {
    let mut program = Program { bindings: bindings.clone(), ..Program::default() };
    let mut rules = Vec::new();
    let mut objects = Vec::new();
    let mut constants = Vec::new();
    let mut variables = Vec::new();

    for stmt in statements {
        match stmt {
            Statement::Sorts(items) => {
                for (name, span) in items {
                    if program.has_sort(&name) || is_builtin_sort(&name) {
                        return Err(FrontendError::Declaration {
                            span,
                            message: format!("sort `{name}` declared twice or shadows a builtin"),
                        });
                    }
                    program.sorts.push(SortDecl { name });
                }
            }
            Statement::Objects(items) => objects.extend(items),
            Statement::Constants(items) => constants.extend(items),
            Statement::Variables(items) => variables.extend(items),
            Statement::Rule(r) => rules.push(*r),
        }
    }

    for (items, sort, span) in objects {
        if !program.has_sort(&sort) {
            return Err(FrontendError::Declaration {
                span,
                message: format!("objects declared for undeclared sort `{sort}`"),
            });
        }
        let mut resolved = Vec::new();
        for item in items {
            resolved.push(match item {
                RawObject::Name(n) => match bindings.get(&n) {
                    Some(v) => ObjectItem::Range(v.clone(), v.clone()),
                    None => ObjectItem::Name(n),
                },
                RawObject::Single(t) => {
                    let v = eval_int(&t, bindings)?;
                    ObjectItem::Range(v.clone(), v)
                }
                RawObject::Range(lo, hi) => {
                    let (l, h) = (eval_int(&lo, bindings)?, eval_int(&hi, bindings)?);
                    if l > h {
                        return Err(FrontendError::Declaration {
                            span,
                            message: format!("empty object range {l}..{h} for sort `{sort}`"),
                        });
                    }
                    ObjectItem::Range(l, h)
                }
            });
        }
        program.objects.push(ObjectDecl { items: resolved, sort });
    }

    for (name, args, sort, span) in constants {
        if program.constant(&name).is_some() {
            return Err(FrontendError::Declaration {
                span,
                message: format!("constant `{name}` declared twice"),
            });
        }
        let mut arg_sorts = Vec::new();
        for (arg, arg_span) in args {
            if is_builtin_sort(&arg) {
                return Err(FrontendError::ValueSortAsArgument { span: arg_span, sort: arg });
            }
            if !program.has_sort(&arg) {
                return Err(FrontendError::Declaration {
                    span: arg_span,
                    message: format!("unknown argument sort `{arg}` for `{name}`"),
                });
            }
            arg_sorts.push(arg);
        }
        let value_sort = match value_sort(&sort, bindings)? {
            Some(s) => s,
            None => {
                return Err(FrontendError::Declaration {
                    span,
                    message: format!(
                        "value sort of `{name}` must be boolean, int[..] or real[..], not a user sort"
                    ),
                })
            }
        };
        program.constants.push(ConstantDecl { name, arg_sorts, value_sort });
    }

    for (names, sort, span) in variables {
        let sort = match value_sort(&sort, bindings)? {
            Some(vs) => VarSort::Value(vs),
            None => match sort {
                RawSort::Named(s, _) if program.has_sort(&s) => VarSort::User(s),
                RawSort::Named(s, sspan) => {
                    return Err(FrontendError::Declaration {
                        span: sspan,
                        message: format!("variable sort `{s}` is not declared"),
                    })
                }
                _ => unreachable!(),
            },
        };
        for name in names {
            if program.variable(&name).is_some() {
                return Err(FrontendError::Declaration {
                    span,
                    message: format!("variable `{name}` declared twice"),
                });
            }
            program.variables.push(VariableDecl { name, sort: sort.clone() });
        }
    }

    let object_names: BTreeSet<String> = program
        .objects
        .iter()
        .flat_map(|o| o.items.iter())
        .filter_map(|i| match i {
            ObjectItem::Name(n) => Some(n.clone()),
            _ => None,
        })
        .collect();

    let resolver = Resolver { program: &program, object_names: &object_names };
    let mut resolved_rules = Vec::new();
    for (index, raw) in rules.into_iter().enumerate() {
        resolved_rules.push(resolver.rule(raw, index)?);
    }
    program.rules = resolved_rules;
    Ok(program)
}

fn is_builtin_sort(name: &str) -> bool {
    matches!(name, "boolean" | "int" | "real")
}

fn value_sort(
    sort: &RawSort,
    bindings: &BTreeMap<String, BigInt>,
) -> Result<Option<ValueSort>, FrontendError> {
    Ok(match sort {
        RawSort::Named(n, _) if n == "boolean" => Some(ValueSort::Boolean),
        RawSort::Named(..) => None,
        RawSort::Int(lo, hi, span) => {
            let (lo, hi) = (eval_int(lo, bindings)?, eval_int(hi, bindings)?);
            if lo > hi {
                return Err(FrontendError::Declaration {
                    span: *span,
                    message: format!("empty range int[{lo}..{hi}]"),
                });
            }
            Some(ValueSort::Int { lo, hi })
        }
        RawSort::Real(lo, hi, span) => {
            let (lo, hi) = (eval_rational(lo, bindings)?, eval_rational(hi, bindings)?);
            if lo > hi {
                return Err(FrontendError::Declaration {
                    span: *span,
                    message: "empty real range".into(),
                });
            }
            Some(ValueSort::Real { lo, hi })
        }
    })
}

fn eval_rational(t: &RawTerm, bindings: &BTreeMap<String, BigInt>) -> Result<Rational, FrontendError> {
    match t {
        RawTerm::Int(n, _) => Ok(Rational::from_integer(n.clone())),
        RawTerm::Ident(name, None, span) => bindings
            .get(name)
            .map(|v| Rational::from_integer(v.clone()))
            .ok_or_else(|| FrontendError::UnboundSymbol { span: *span, name: name.clone() }),
        RawTerm::Neg(t, _) => Ok(-eval_rational(t, bindings)?),
        RawTerm::Bin(op, a, b) => {
            let (x, y) = (eval_rational(a, bindings)?, eval_rational(b, bindings)?);
            op.apply(&x, &y).ok_or_else(|| FrontendError::Declaration {
                span: t.span(),
                message: "division by zero in a range bound".into(),
            })
        }
        other => Err(FrontendError::Declaration {
            span: other.span(),
            message: "range bounds must be integer expressions over `-c` constants".into(),
        }),
    }
}

fn eval_int(t: &RawTerm, bindings: &BTreeMap<String, BigInt>) -> Result<BigInt, FrontendError> {
    let r = eval_rational(t, bindings)?;
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(FrontendError::Declaration {
            span: t.span(),
            message: format!("bound `{}` is not an integer", fmt_rational(&r)),
        })
    }
}

struct Resolver<'a> {
    program: &'a Program,
    object_names: &'a BTreeSet<String>,
}

impl Resolver<'_> {
    fn rule(&self, raw: RawRule, index: usize) -> Result<Rule, FrontendError> {
        let head = match raw.head {
            None => Head::Falsum,
            Some(h) => self.head(h, raw.span)?,
        };
        let body = match raw.body {
            None => Vec::new(),
            Some(b) => match self.formula(b)? {
                Formula::And(items) => items,
                f if f.is_top() => Vec::new(),
                f => vec![f],
            },
        };
        let mut rule = Rule {
            head,
            body,
            choice: raw.choice,
            span: raw.span,
            origin: index,
            smt_sorts: BTreeMap::new(),
        };
        rule.smt_sorts = infer_smt_sorts(self.program, &rule);
        Ok(rule)
    }

    fn head(&self, raw: RawFormula, span: Span) -> Result<Head, FrontendError> {
        let shape_error = || FrontendError::Syntax {
            span,
            message: "a rule head must be `f(t) = v`, a boolean constant, or empty".into(),
        };
        match self.formula(raw)? {
            Formula::Cmp(CmpOp::Eq, func @ Term::App(..), value) => Ok(Head::Assign { func, value }),
            Formula::Cmp(CmpOp::Eq, value, func @ Term::App(..)) => Ok(Head::Assign { func, value }),
            Formula::Falsum => Ok(Head::Falsum),
            _ => Err(shape_error()),
        }
    }

    fn formula(&self, raw: RawFormula) -> Result<Formula, FrontendError> {
        Ok(match raw {
            RawFormula::Cmp(op, a, b) => {
                let (a, b) = (self.term(a)?, self.term(b)?);
                Formula::Cmp(op, a, b)
            }
            RawFormula::Neq(a, b) => Formula::neq(self.term(a)?, self.term(b)?),
            RawFormula::Bare(t) => {
                let span = t.span();
                match self.term(t)? {
                    Term::Bool(true) => Formula::top(),
                    Term::Bool(false) => Formula::Falsum,
                    app @ Term::App(..)
                        if self.program.value_sort_of(&app) == Some(&ValueSort::Boolean) =>
                    {
                        Formula::eq(app, Term::Bool(true))
                    }
                    _ => {
                        return Err(FrontendError::Syntax {
                            span,
                            message: "only boolean constants may be used as formulas".into(),
                        })
                    }
                }
            }
            RawFormula::Not(f) => Formula::not(self.formula(*f)?),
            RawFormula::And(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    match self.formula(f)? {
                        Formula::And(inner) => out.extend(inner),
                        g => out.push(g),
                    }
                }
                Formula::And(out)
            }
            RawFormula::Or(fs) => {
                Formula::Or(fs.into_iter().map(|f| self.formula(f)).collect::<Result<_, _>>()?)
            }
            RawFormula::Implies(a, b) => Formula::implies(self.formula(*a)?, self.formula(*b)?),
        })
    }

    fn term(&self, raw: RawTerm) -> Result<Term, FrontendError> {
        let span = raw.span();
        let t = match raw {
            RawTerm::Int(n, _) => Term::Num(Rational::from_integer(n)),
            RawTerm::Bool(b, _) => Term::Bool(b),
            RawTerm::Var(v, _) => Term::Var(v),
            RawTerm::Neg(t, _) => match self.term(*t)? {
                Term::Num(n) => Term::Num(-n),
                other => Term::arith(ArithOp::Sub, Term::Num(Rational::zero()), other),
            },
            RawTerm::Bin(op, a, b) => Term::arith(op, self.term(*a)?, self.term(*b)?),
            RawTerm::Ident(name, args, span) => self.identifier(name, args, span)?,
        };
        t.fold().map_err(|_| FrontendError::Syntax {
            span,
            message: "division by zero between numerals".into(),
        })
    }

    fn identifier(
        &self,
        name: String,
        args: Option<Vec<RawTerm>>,
        span: Span,
    ) -> Result<Term, FrontendError> {
        let args = args.unwrap_or_default();
        if let Some(decl) = self.program.constant(&name) {
            if decl.arg_sorts.len() != args.len() {
                return Err(FrontendError::Arity {
                    span,
                    name,
                    expected: decl.arg_sorts.len(),
                    found: args.len(),
                });
            }
            let args = args.into_iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
            return Ok(Term::App(name, args));
        }
        if !args.is_empty() {
            return Err(FrontendError::Unresolved { span, name });
        }
        if let Some(v) = self.program.bindings.get(&name) {
            return Ok(Term::Num(Rational::from_integer(v.clone())));
        }
        if self.object_names.contains(&name) {
            return Ok(Term::Sym(name));
        }
        Err(FrontendError::Unresolved { span, name })
    }
}

/// Sorts of the solver-side variables of a rule.
///
/// Declared numeric variables keep their declared sort. An undeclared variable
/// takes the value sort of a constant it is equated with, then propagates
/// through variable-variable equalities; anything left over is real.
pub fn infer_smt_sorts(program: &Program, rule: &Rule) -> BTreeMap<String, ValueSort> {
    let mut sorts = BTreeMap::new();
    let mut pending = BTreeSet::new();
    for v in rule.vars() {
        match program.variable(&v) {
            Some(decl) if decl.is_asp() => {}
            Some(VariableDecl { sort: VarSort::Value(s), .. }) => {
                sorts.insert(v, s.clone());
            }
            _ => {
                pending.insert(v);
            }
        }
    }
    if pending.is_empty() {
        return sorts;
    }

    let mut equalities = Vec::new();
    for f in rule.body.iter().chain(std::iter::once(&rule.head.atom())) {
        collect_equalities(f, &mut equalities);
    }
    for (a, b) in &equalities {
        for (x, other) in [(a, b), (b, a)] {
            if let Term::Var(x) = x {
                if !pending.contains(x) || sorts.contains_key(x) {
                    continue;
                }
                let inferred = match other {
                    Term::App(..) => program.value_sort_of(other).cloned(),
                    Term::Bool(_) => Some(ValueSort::Boolean),
                    _ => None,
                };
                if let Some(s) = inferred {
                    sorts.insert(x.clone(), s);
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for (a, b) in &equalities {
            if let (Term::Var(x), Term::Var(y)) = (a, b) {
                for (from, to) in [(x, y), (y, x)] {
                    if pending.contains(to) && !sorts.contains_key(to) {
                        if let Some(s) = sorts.get(from).cloned() {
                            sorts.insert(to.clone(), s);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for v in pending {
        sorts.entry(v).or_insert_with(|| ValueSort::Real {
            lo: Rational::zero(),
            hi: Rational::zero(),
        });
    }
    sorts
}

fn collect_equalities(f: &Formula, out: &mut Vec<(Term, Term)>) {
    match f {
        Formula::Cmp(CmpOp::Eq, a, b) => out.push((a.clone(), b.clone())),
        Formula::Cmp(..) | Formula::Falsum => {}
        Formula::Not(g) => collect_equalities(g, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_equalities(g, out)),
        Formula::Implies(a, b) => {
            collect_equalities(a, out);
            collect_equalities(b, out);
        }
    }
}
