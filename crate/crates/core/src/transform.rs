//! Clark normal form and completion of a ground program.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::frontend::ast::*;
use crate::frontend::{desugar_choice, print};
use crate::grounder::GroundProgram;

/// One disjunct of a completed definition: a conjunction whose variables,
/// other than the value variable, are existentially quantified.
#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    pub conjuncts: Vec<Formula>,
    /// Existential variables, sorted.
    pub vars: Vec<String>,
    pub sorts: BTreeMap<String, ValueSort>,
    pub origin: usize,
    pub span: Span,
}

impl Body {
    pub fn formula(&self) -> Formula {
        Formula::conjoin(self.conjuncts.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionEquivalence {
    pub constant: GroundConst,
    pub sort: ValueSort,
    pub value_var: String,
    pub bodies: Vec<Body>,
}

impl CompletionEquivalence {
    pub fn head(&self) -> Formula {
        Formula::eq(self.constant.to_term(), Term::Var(self.value_var.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionConstraint {
    pub body: Body,
}

/// Rules grouped per ground constant, heads normalized to `f = v`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClarkNormalForm {
    pub groups: Vec<CompletionEquivalence>,
    pub constraints: Vec<CompletionConstraint>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Completion {
    pub equivalences: Vec<CompletionEquivalence>,
    pub constraints: Vec<CompletionConstraint>,
    pub warnings: Vec<String>,
}

pub fn to_clark_normal_form(ground: &GroundProgram) -> ClarkNormalForm {
    let mut by_const: BTreeMap<GroundConst, Vec<&Rule>> = BTreeMap::new();
    let mut constraints = Vec::new();
    for rule in ground.rules() {
        match &rule.head {
            Head::Falsum => constraints.push(CompletionConstraint { body: body_of(rule, &rule.body, None) }),
            Head::Assign { func, .. } => {
                let c = GroundConst::from_term(func).expect("ground head");
                by_const.entry(c).or_default().push(rule);
            }
        }
    }

    let mut groups = Vec::new();
    let mut warnings = Vec::new();
    for gc in &ground.constants {
        let rules = by_const.remove(&gc.constant).unwrap_or_default();
        if rules.is_empty() {
            let w = format!("constant {} has no defining rule; its completion is unsatisfiable", gc.constant);
            log::warn!("{w}");
            warnings.push(w);
        }
        let mut taken = BTreeSet::new();
        rules.iter().for_each(|r| taken.extend(r.vars()));
        let value_var = fresh_var("V", &taken);
        let bodies = rules
            .iter()
            .map(|r| normalize(r, &value_var, &gc.sort))
            .collect();
        groups.push(CompletionEquivalence {
            constant: gc.constant.clone(),
            sort: gc.sort.clone(),
            value_var,
            bodies,
        });
    }
    ClarkNormalForm { groups, constraints, warnings }
}

pub fn fresh_var(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|v| !taken.contains(v)).unwrap()
}

fn normalize(rule: &Rule, v: &str, sort: &ValueSort) -> Body {
    let rule = desugar_choice(rule);
    let Head::Assign { value, .. } = &rule.head else { unreachable!() };
    let conjuncts = match value {
        Term::Var(y) => {
            let map = BTreeMap::from([(y.clone(), Term::var(v))]);
            rule.body
                .iter()
                .map(|f| {
                    f.map_terms(&mut |t| {
                        let mut t = t.clone();
                        t.rename_in_place(&map);
                        t
                    })
                })
                .collect()
        }
        t => {
            let mut c = rule.body.clone();
            c.push(Formula::eq(Term::var(v), t.clone()));
            c
        }
    };
    body_of(&rule, &conjuncts, Some((v, sort)))
}

fn body_of(rule: &Rule, conjuncts: &[Formula], value: Option<(&str, &ValueSort)>) -> Body {
    let mut vars = BTreeSet::new();
    conjuncts.iter().for_each(|f| f.collect_vars(&mut vars));
    let mut sorts: BTreeMap<String, ValueSort> = rule
        .smt_sorts
        .iter()
        .filter(|(k, _)| vars.contains(*k))
        .map(|(k, s)| (k.clone(), s.clone()))
        .collect();
    if let Some((v, s)) = value {
        vars.remove(v);
        sorts.insert(v.to_string(), s.clone());
    }
    Body {
        conjuncts: conjuncts.to_vec(),
        vars: vars.into_iter().collect(),
        sorts,
        origin: rule.origin,
        span: rule.span,
    }
}

pub fn complete(cnf: ClarkNormalForm) -> Completion {
    Completion {
        equivalences: cnf.groups,
        constraints: cnf.constraints,
        warnings: cnf.warnings,
    }
}

pub fn completion(ground: &GroundProgram) -> Completion {
    complete(to_clark_normal_form(ground))
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &Body) -> fmt::Result {
    let inner = print::formula(&Formula::And(body.conjuncts.clone()));
    if body.vars.is_empty() {
        write!(f, "({inner})")
    } else {
        write!(f, "exists {} ({inner})", body.vars.join(", "))
    }
}

impl fmt::Display for CompletionEquivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} <->", self.constant, self.value_var)?;
        if self.bodies.is_empty() {
            return write!(f, " false");
        }
        for (i, b) in self.bodies.iter().enumerate() {
            write!(f, "{}", if i == 0 { "\n    " } else { "\n  | " })?;
            write_body(f, b)?;
        }
        Ok(())
    }
}

impl fmt::Display for CompletionConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not ")?;
        write_body(f, &self.body)
    }
}

impl fmt::Display for Completion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equivalences {
            writeln!(f, "{e}")?;
        }
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
