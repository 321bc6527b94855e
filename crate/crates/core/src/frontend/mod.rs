//! Input language: lexing, parsing, resolution and pretty-printing.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod print;
pub mod resolve;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use ast::{Formula, Program, Rule, Span};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontendError {
    #[error("{span}: lexical error: {message}")]
    Lex { span: Span, message: String },
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: value sort `{sort}` cannot be used as an argument sort")]
    ValueSortAsArgument { span: Span, sort: String },
    #[error("{span}: unresolved identifier `{name}`")]
    Unresolved { span: Span, name: String },
    #[error("{span}: `{name}` appears in a range but has no `-c` binding")]
    UnboundSymbol { span: Span, name: String },
    #[error("{span}: `{name}` expects {expected} argument(s), found {found}")]
    Arity { span: Span, name: String, expected: usize, found: usize },
    #[error("{span}: {message}")]
    Declaration { span: Span, message: String },
}

/// Parses and resolves a program, substituting `-c` bindings.
pub fn parse_program(
    source: &str,
    bindings: &BTreeMap<String, BigInt>,
) -> Result<Program, FrontendError> {
    let tokens = lexer::tokenize(source)?;
    let statements = parser::Parser::new(tokens).parse_statements()?;
    resolve::resolve(statements, bindings)
}

/// Rewrites `{A} <- B` as `A <- B & not not A`. Non-choice rules are returned unchanged.
pub fn desugar_choice(rule: &Rule) -> Rule {
    let mut out = rule.clone();
    if rule.choice {
        out.choice = false;
        out.body.push(Formula::not(Formula::not(rule.head.atom())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::ast::*;
    use super::*;

    fn parse(src: &str) -> Program {
        parse_program(src, &BTreeMap::new()).unwrap()
    }

    const DECLS: &str = ":- sorts s. :- objects 0..2 :: s. \
        :- constants f :: int[0..9]; g :: int[0..9]; p :: boolean; q :: boolean; r :: boolean.";

    #[test]
    fn conjunction_binds_tighter_than_disjunction() {
        let p = parse(&format!("{DECLS} <- p & q | r."));
        let atom = |n: &str| Formula::eq(Term::app(n, vec![]), Term::Bool(true));
        assert_eq!(
            p.rules[0].body,
            vec![Formula::Or(vec![Formula::And(vec![atom("p"), atom("q")]), atom("r")])]
        );
    }

    #[test]
    fn implication_binds_loosest_and_associates_right() {
        let p = parse(&format!("{DECLS} <- p | q -> r -> p."));
        let atom = |n: &str| Formula::eq(Term::app(n, vec![]), Term::Bool(true));
        assert_eq!(
            p.rules[0].body,
            vec![Formula::implies(
                Formula::Or(vec![atom("p"), atom("q")]),
                Formula::implies(atom("r"), atom("p"))
            )]
        );
    }

    #[test]
    fn negation_binds_tightest() {
        let p = parse(&format!("{DECLS} <- not p & q."));
        let atom = |n: &str| Formula::eq(Term::app(n, vec![]), Term::Bool(true));
        assert_eq!(p.rules[0].body, vec![Formula::not(atom("p")), atom("q")]);
    }

    #[test]
    fn inequality_desugars_to_negated_equality() {
        let p = parse(&format!("{DECLS} <- f != 3."));
        assert_eq!(p.rules[0].body, vec![Formula::neq(Term::app("f", vec![]), Term::num(3))]);
    }

    #[test]
    fn rational_literals_fold() {
        let p = parse(&format!("{DECLS} :- constants c :: real[0..1]. c = 95/100."));
        match &p.rules[0].head {
            Head::Assign { value: Term::Num(n), .. } => {
                assert_eq!(n, &Rational::new(19.into(), 20.into()))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_rule_section() {
        let p = parse(":- sorts s. :- objects a :: s.");
        assert!(p.rules.is_empty());
        assert_eq!(p.objects_of("s"), vec![Value::Obj("a".into())]);
    }

    #[test]
    fn unbound_range_symbol_is_reported() {
        let err = parse_program(":- sorts s. :- objects 0..n :: s.", &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, FrontendError::UnboundSymbol { ref name, .. } if name == "n"));
    }

    #[test]
    fn unresolved_identifier_is_reported() {
        let err = parse_program(&format!("{DECLS} f = h."), &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, FrontendError::Unresolved { ref name, .. } if name == "h"));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let err = parse_program(&format!("{DECLS} f(1) = 2."), &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, FrontendError::Arity { expected: 0, found: 1, .. }));
    }

    #[test]
    fn value_sort_as_argument_is_reported() {
        let err = parse_program(":- constants f(int[0..2]) :: boolean.", &BTreeMap::new())
            .unwrap_err();
        assert!(matches!(err, FrontendError::ValueSortAsArgument { .. }));
        let err =
            parse_program(":- constants f(boolean) :: boolean.", &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, FrontendError::ValueSortAsArgument { .. }));
    }

    #[test]
    fn choice_desugaring_appends_double_negation() {
        let p = parse(&format!("{DECLS} {{f = 1}}. {{g = X}} <- f = X."));
        let d = desugar_choice(&p.rules[0]);
        assert!(!d.choice);
        let f1 = Formula::eq(Term::app("f", vec![]), Term::num(1));
        assert_eq!(d.body, vec![Formula::not(Formula::not(f1))]);
        let d = desugar_choice(&p.rules[1]);
        let gx = Formula::eq(Term::app("g", vec![]), Term::var("X"));
        assert_eq!(
            d.body,
            vec![Formula::eq(Term::app("f", vec![]), Term::var("X")), Formula::not(Formula::not(gx))]
        );
    }

    #[test]
    fn undeclared_variable_sort_follows_constant() {
        let p = parse(&format!("{DECLS} :- constants c :: real[0..1]. c = X <- f = Y & X = Y."));
        let sorts = &p.rules[0].smt_sorts;
        assert!(matches!(sorts["X"], ValueSort::Real { .. }));
        assert!(matches!(sorts["Y"], ValueSort::Int { .. }));
    }
}
