//! Syntactic fragment checks: f-plain, av-separated, variable isolation and tightness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::frontend::ast::*;
use crate::frontend::print;
use crate::graph::{CycleDetector, DfsDetector, DiGraph};
use crate::grounder::GroundProgram;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// An uninterpreted function applied inside another one's arguments.
    NestedApplication { term: String },
    /// An equality with an uninterpreted function on each side.
    ApplicationEquality { formula: String },
    /// `argument` is an argument of `function` and is linked by equalities
    /// to `value`, the value variable of `other`.
    ArgumentLinkedToValue { argument: String, function: String, value: String, other: String },
    /// The variable lacks a non-negated defining equality.
    NoDefiningEquality { variable: String },
    /// The body's variable dependency graph has this cycle.
    DependencyCycle { variables: Vec<String> },
    /// A variable in the head value does not occur in the body.
    UnsafeHeadVariable { variable: String },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::NestedApplication { term } => {
                write!(f, "not f-plain: nested function application in `{term}`")
            }
            ViolationKind::ApplicationEquality { formula } => {
                write!(f, "not f-plain: both sides of `{formula}` are function applications")
            }
            ViolationKind::ArgumentLinkedToValue { argument, function, value, other } => {
                if argument == value {
                    write!(
                        f,
                        "not av-separated: variable {argument} is an argument of {function} and the value variable of {other}"
                    )
                } else {
                    write!(
                        f,
                        "not av-separated: variable {argument} is an argument of {function} and is related to the value variable {value} of {other}"
                    )
                }
            }
            ViolationKind::NoDefiningEquality { variable } => write!(
                f,
                "not variable isolated: {variable} has no non-negated equality defining it"
            ),
            ViolationKind::DependencyCycle { variables } => write!(
                f,
                "not variable isolated: variable dependency cycle {} -> {}",
                variables.join(" -> "),
                variables[0]
            ),
            ViolationKind::UnsafeHeadVariable { variable } => {
                write!(f, "head variable {variable} does not occur in the body")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Index of the source rule.
    pub rule: usize,
    pub span: Span,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: rule {}: {}", self.span, self.rule + 1, self.kind)
    }
}

fn violation(rule: &Rule, kind: ViolationKind) -> Violation {
    Violation { rule: rule.origin, span: rule.span, kind }
}

/// Atoms of a rule, head first.
fn atoms(rule: &Rule) -> Vec<Formula> {
    let mut out = Vec::new();
    if let Head::Assign { .. } = rule.head {
        out.push(rule.head.atom());
    }
    out.extend(rule.body.iter().cloned());
    out
}

pub fn check_f_plain(program: &Program) -> Vec<Violation> {
    let mut out = Vec::new();
    for rule in &program.rules {
        for f in atoms(rule) {
            let mut nested = Vec::new();
            f.for_each_term(&mut |t| {
                t.for_each_app(&mut |name, args| {
                    if args.iter().any(Term::contains_app) {
                        nested.push(print::term(&Term::App(name.to_string(), args.to_vec())));
                    }
                })
            });
            for term in nested {
                out.push(violation(rule, ViolationKind::NestedApplication { term }));
            }
            visit_cmps(&f, &mut |op, a, b| {
                if op == CmpOp::Eq && a.is_app() && b.is_app() {
                    out.push(violation(
                        rule,
                        ViolationKind::ApplicationEquality {
                            formula: format!("{} = {}", print::term(a), print::term(b)),
                        },
                    ));
                }
            });
        }
    }
    out
}

fn visit_cmps<'a>(f: &'a Formula, g: &mut dyn FnMut(CmpOp, &'a Term, &'a Term)) {
    match f {
        Formula::Cmp(op, a, b) => g(*op, a, b),
        Formula::Falsum => {}
        Formula::Not(h) => visit_cmps(h, g),
        Formula::And(hs) | Formula::Or(hs) => hs.iter().for_each(|h| visit_cmps(h, g)),
        Formula::Implies(a, b) => {
            visit_cmps(a, g);
            visit_cmps(b, g);
        }
    }
}

struct UnionFind {
    parent: BTreeMap<String, String>,
}

impl UnionFind {
    fn find(&mut self, x: &str) -> String {
        let p = self.parent.entry(x.to_string()).or_insert_with(|| x.to_string()).clone();
        if p == x {
            return p;
        }
        let root = self.find(&p);
        self.parent.insert(x.to_string(), root.clone());
        root
    }

    fn union(&mut self, a: &str, b: &str) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.insert(ra, rb);
        }
    }
}

pub fn check_av_separated(program: &Program) -> Vec<Violation> {
    let mut out = Vec::new();
    for rule in &program.rules {
        // Every function occurrence with the variables of its arguments.
        let mut apps: Vec<(String, BTreeSet<String>)> = Vec::new();
        // Value variables paired with the index of their occurrence in `apps`.
        let mut values: Vec<(String, usize)> = Vec::new();
        let mut links = UnionFind { parent: BTreeMap::new() };

        for f in atoms(rule) {
            polarized_cmps(&f, true, &mut |op, a, b, positive| {
                let start = apps.len();
                for t in [a, b] {
                    t.for_each_app(&mut |name, args| {
                        let mut vars = BTreeSet::new();
                        args.iter().for_each(|a| a.collect_vars(&mut vars));
                        apps.push((name.to_string(), vars));
                    });
                }
                if op != CmpOp::Eq || !positive {
                    return;
                }
                match (a, b) {
                    (Term::App(..), Term::Var(w)) => values.push((w.clone(), start)),
                    (Term::Var(w), Term::App(..)) => values.push((w.clone(), start)),
                    _ if !a.contains_app() && !b.contains_app() => {
                        let vars: Vec<String> = a.vars().into_iter().chain(b.vars()).collect();
                        for w in vars.windows(2) {
                            links.union(&w[0], &w[1]);
                        }
                    }
                    _ => {}
                }
            });
        }

        let mut reported = BTreeSet::new();
        for (i, (function, args)) in apps.iter().enumerate() {
            for x in args {
                for (w, j) in &values {
                    if *j == i || links.find(x) != links.find(w) {
                        continue;
                    }
                    if reported.insert((x.clone(), w.clone())) {
                        out.push(violation(
                            rule,
                            ViolationKind::ArgumentLinkedToValue {
                                argument: x.clone(),
                                function: function.clone(),
                                value: w.clone(),
                                other: apps[*j].0.clone(),
                            },
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Visits comparisons with a flag telling whether they occur outside every negation
/// and implication antecedent.
fn polarized_cmps<'a>(
    f: &'a Formula,
    positive: bool,
    g: &mut dyn FnMut(CmpOp, &'a Term, &'a Term, bool),
) {
    match f {
        Formula::Cmp(op, a, b) => g(*op, a, b, positive),
        Formula::Falsum => {}
        Formula::Not(h) => polarized_cmps(h, false, g),
        Formula::And(hs) | Formula::Or(hs) => hs.iter().for_each(|h| polarized_cmps(h, positive, g)),
        Formula::Implies(a, b) => {
            polarized_cmps(a, false, g);
            polarized_cmps(b, positive, g);
        }
    }
}

/// A top-level body conjunct `x = t` (or `t = x`) with `x` a variable not occurring in `t`.
pub fn bare_definitions(conjunct: &Formula) -> Vec<(String, Term)> {
    let mut out = Vec::new();
    if let Formula::Cmp(CmpOp::Eq, a, b) = conjunct {
        for (x, t) in [(a, b), (b, a)] {
            if let Term::Var(x) = x {
                if !t.contains_var(x) {
                    out.push((x.clone(), t.clone()));
                }
            }
        }
    }
    out
}

/// Flattens nested conjunctions into a list of conjuncts.
pub fn conjuncts(items: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::new();
    for f in items {
        match f {
            Formula::And(gs) => out.extend(conjuncts(gs)),
            other => out.push(other.clone()),
        }
    }
    out
}

/// Edge `v -> u` when some non-negated conjunct is `v = t` or `t = v` and `u` occurs in `t`.
pub fn variable_dependency_graph(body: &[Formula]) -> DiGraph<String> {
    dependency_graph(body, true)
}

/// With `symmetric` unset, `x = y` between two variables yields the single edge
/// `x -> y`, so that such an equality is not a cycle on its own.
fn dependency_graph(body: &[Formula], symmetric: bool) -> DiGraph<String> {
    let mut g = DiGraph::new();
    for c in conjuncts(body) {
        c.vars().into_iter().for_each(|v| g.add_vertex(v));
        if let Formula::Cmp(CmpOp::Eq, a, b) = &c {
            let both_vars = a.as_var().is_some() && b.as_var().is_some();
            let sides = if both_vars && !symmetric { vec![(a, b)] } else { vec![(a, b), (b, a)] };
            for (v, t) in sides {
                if let Term::Var(v) = v {
                    for u in t.vars() {
                        g.add_edge(v.clone(), u);
                    }
                }
            }
        }
    }
    g
}

fn head_value_var(rule: &Rule) -> Option<&str> {
    match &rule.head {
        Head::Assign { value: Term::Var(v), .. } => Some(v),
        _ => None,
    }
}

/// True when `v` occurs in `t` only through sums and products with numerals.
fn affine_in(t: &Term, v: &str) -> bool {
    match t {
        Term::Arith(op, a, b) => match op {
            ArithOp::Add | ArithOp::Sub => affine_in(a, v) && affine_in(b, v),
            ArithOp::Mul => match (a.contains_var(v), b.contains_var(v)) {
                (false, false) => true,
                (true, false) => b.is_numeral() && affine_in(a, v),
                (false, true) => a.is_numeral() && affine_in(b, v),
                (true, true) => false,
            },
            ArithOp::Div => !b.contains_var(v) && b.is_numeral() && affine_in(a, v),
        },
        Term::App(_, args) => args.iter().all(|a| !a.contains_var(v)),
        _ => true,
    }
}

/// Checks that every variable of the rule has a non-negated defining equality and
/// that the variable dependency graph of the body is acyclic.
///
/// The head value variable may instead be constrained by the choice construct,
/// by `not not (f = v)`, or by a non-negated equality `y = t` in which it occurs
/// affinely; the remaining variables need a defining conjunct `x = t`.
pub fn check_variable_isolated(rule: &Rule) -> Result<(), Violation> {
    let body = conjuncts(&rule.body);
    let mut body_vars = BTreeSet::new();
    body.iter().for_each(|f| f.collect_vars(&mut body_vars));
    let head_value = head_value_var(rule);

    let mut head_vars = BTreeSet::new();
    if let Head::Assign { value, .. } = &rule.head {
        value.collect_vars(&mut head_vars);
    }
    for v in &head_vars {
        if Some(v.as_str()) != head_value && !body_vars.contains(v) {
            return Err(violation(rule, ViolationKind::UnsafeHeadVariable { variable: v.clone() }));
        }
    }

    let defined: BTreeSet<String> =
        body.iter().flat_map(bare_definitions).map(|(x, _)| x).collect();
    let mut all_vars = body_vars.clone();
    all_vars.extend(head_vars);
    for v in &all_vars {
        if defined.contains(v) {
            continue;
        }
        let ok = Some(v.as_str()) == head_value && (rule.choice || loosely_defined(&body, rule, v));
        if !ok {
            return Err(violation(rule, ViolationKind::NoDefiningEquality { variable: v.clone() }));
        }
    }

    let vdg = dependency_graph(&body, false);
    if let Some(cycle) = DfsDetector.find_cycle(&vdg) {
        return Err(violation(rule, ViolationKind::DependencyCycle { variables: cycle }));
    }
    Ok(())
}

fn loosely_defined(body: &[Formula], rule: &Rule, v: &str) -> bool {
    let head = rule.head.atom();
    body.iter().any(|c| {
        if c.double_negated() == Some(&head) {
            return true;
        }
        match c {
            Formula::Cmp(CmpOp::Eq, a, b) => [(a, b), (b, a)].iter().any(|(y, t)| {
                matches!(y, Term::Var(y) if y != v) && t.contains_var(v) && affine_in(t, v)
            }),
            _ => false,
        }
    })
}

/// Edges from each head constant to the constants occurring strictly positively in the body.
pub fn build_constant_dependency_graph(ground: &GroundProgram) -> DiGraph<GroundConst> {
    let mut g = DiGraph::new();
    for c in &ground.constants {
        g.add_vertex(c.constant.clone());
    }
    for rule in ground.rules() {
        let Head::Assign { func, value } = &rule.head else { continue };
        let Some(head) = GroundConst::from_term(func) else { continue };
        let mut deps = BTreeSet::new();
        collect_consts(value, &mut deps);
        for b in &rule.body {
            strictly_positive_consts(b, &mut deps);
        }
        for d in deps {
            g.add_edge(head.clone(), d);
        }
    }
    g
}

fn collect_consts(t: &Term, out: &mut BTreeSet<GroundConst>) {
    t.for_each_app(&mut |name, args| {
        if let Some(c) = GroundConst::from_term(&Term::App(name.to_string(), args.to_vec())) {
            out.insert(c);
        }
    });
}

fn strictly_positive_consts(f: &Formula, out: &mut BTreeSet<GroundConst>) {
    match f {
        Formula::Cmp(_, a, b) => {
            collect_consts(a, out);
            collect_consts(b, out);
        }
        Formula::Falsum | Formula::Not(_) => {}
        Formula::And(gs) | Formula::Or(gs) => {
            gs.iter().for_each(|g| strictly_positive_consts(g, out))
        }
        Formula::Implies(_, b) => strictly_positive_consts(b, out),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tightness {
    Tight,
    Cycle(Vec<GroundConst>),
}

pub fn check_tight(graph: &DiGraph<GroundConst>) -> Tightness {
    check_tight_with(graph, &DfsDetector)
}

pub fn check_tight_with(
    graph: &DiGraph<GroundConst>,
    detector: &dyn CycleDetector<GroundConst>,
) -> Tightness {
    match detector.find_cycle(graph) {
        None => Tightness::Tight,
        Some(c) => Tightness::Cycle(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    fn program(src: &str) -> Program {
        parse_program(src, &BTreeMap::new()).unwrap()
    }

    const FG: &str = ":- constants f :: int[0..9]; g :: int[0..9].";

    #[test]
    fn isolation_examples() {
        let p = program(&format!("{FG} f = X <- g = 2*X."));
        let err = check_variable_isolated(&p.rules[0]).unwrap_err();
        assert_eq!(err.kind, ViolationKind::NoDefiningEquality { variable: "X".into() });

        let p = program(&format!("{FG} f = X <- g = Y & Y = 2*X."));
        assert_eq!(check_variable_isolated(&p.rules[0]), Ok(()));

        let p = program(&format!("{FG} f = X <- 2*X = Y & 2*Y = X."));
        match check_variable_isolated(&p.rules[0]).unwrap_err().kind {
            ViolationKind::DependencyCycle { mut variables } => {
                variables.sort();
                assert_eq!(variables, vec!["X", "Y"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn variable_equalities_are_not_cycles() {
        let p = program(&format!("{FG} f = X <- g = Y & X = Y."));
        assert_eq!(check_variable_isolated(&p.rules[0]), Ok(()));
        let p = program(&format!("{FG} f = X <- g = Y & X = Y & Y = X."));
        assert!(check_variable_isolated(&p.rules[0]).is_err());
    }

    #[test]
    fn negated_equalities_do_not_define() {
        let p = program(&format!("{FG} <- not (g = X)."));
        assert!(check_variable_isolated(&p.rules[0]).is_err());
    }

    #[test]
    fn nonlinear_head_occurrence_is_not_isolated() {
        let p = program(&format!("{FG} f = X <- g = Y & Y = X*X."));
        assert!(check_variable_isolated(&p.rules[0]).is_err());
    }

    #[test]
    fn av_separation_counterexample() {
        let p = program(&format!(
            ":- sorts s. :- objects 0..1 :: s. :- constants h(s) :: int[0..1]. {FG} h(X) = 1 <- g = Y & Y = X."
        ));
        let v = check_av_separated(&p);
        assert_eq!(v.len(), 1);
        match &v[0].kind {
            ViolationKind::ArgumentLinkedToValue { argument, value, .. } => {
                assert_eq!((argument.as_str(), value.as_str()), ("X", "Y"))
            }
            other => panic!("{other:?}"),
        }
        let text = v[0].to_string();
        assert!(text.contains("X") && text.contains("Y"), "{text}");
    }

    #[test]
    fn av_separation_without_chain() {
        let p = program(
            ":- sorts s. :- objects 0..1 :: s. :- constants f(s) :: int[0..1]; p(s) :: boolean; g :: int[0..1]. \
             :- variables X :: s. f(X) = 1 <- p(X) = true & g = Y.",
        );
        assert!(check_av_separated(&p).is_empty());
    }

    #[test]
    fn f_plain_rejects_function_equalities_and_nesting() {
        let p = program(&format!("{FG} f = g."));
        assert_eq!(check_f_plain(&p).len(), 1);
        let p = program(
            ":- sorts s. :- objects 0..9 :: s. :- constants h(s) :: int[0..9]; k :: int[0..9]. h(k) = 1.",
        );
        assert!(matches!(check_f_plain(&p)[0].kind, ViolationKind::NestedApplication { .. }));
        assert!(check_f_plain(&Program::default()).is_empty());
    }

    #[test]
    fn diagnostics_cite_rule_location() {
        let p = program(&format!("{FG}\nf = X <- g = 2*X."));
        let err = check_variable_isolated(&p.rules[0]).unwrap_err();
        assert_eq!(err.span.line, 2);
        assert!(err.to_string().starts_with("2:1: rule 1:"));
    }
}
