mod common;

use std::collections::BTreeMap;

use aspmt::frontend::ast::Program;
use aspmt::frontend::{parse_program, print, FrontendError};
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn reparse(p: &Program) -> Program {
    let text = print::program(p);
    parse_program(&text, &p.bindings).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

fn assert_round_trip(p: &Program) {
    let q = reparse(p);
    assert_eq!(print::program(&q), print::program(p));
    assert_eq!(q.constants, p.constants);
    assert_eq!(q.variables, p.variables);
    assert_eq!(q.rules.len(), p.rules.len());
    for (a, b) in q.rules.iter().zip(&p.rules) {
        assert_eq!((a.choice, &a.head, &a.body), (b.choice, &b.head, &b.body));
    }
}

#[test]
fn fixtures_survive_printing() {
    for (name, source, b) in fixtures() {
        let p = parse_program(&source, &b).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_round_trip(&p);
    }
}

#[test]
fn the_car_declares_what_the_listing_shows() {
    let (_, source, b) = fixtures().remove(0);
    let p = parse_program(&source, &b).unwrap();
    let names: Vec<&str> = p.constants.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["time", "accel", "duration", "decel", "speed", "location"]);
    assert_eq!(p.rules.len(), 17);
    assert_eq!(p.rules.iter().filter(|r| r.choice).count(), 4);
}

#[test]
fn missing_binding_is_reported_with_its_location() {
    let source = fixture("bucket.aspmt");
    let err = parse_program(&source, &BTreeMap::new()).unwrap_err();
    let text = err.to_string();
    assert!(text.contains('c'), "{text}");
    assert!(text.chars().next().unwrap().is_ascii_digit(), "diagnostic lacks a position: {text}");
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = parse_program(":- constants f :: int[0..2].\nf = 1 <- .", &BTreeMap::new()).unwrap_err();
    assert!(matches!(err, FrontendError::Syntax { .. } | FrontendError::Lex { .. }), "{err:?}");
    assert!(err.to_string().starts_with("2:"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_programs_survive_printing(seed in any::<u64>()) {
        let src = random_program(&mut StdRng::seed_from_u64(seed));
        let p = parse_program(&src, &BTreeMap::new()).unwrap();
        assert_round_trip(&p);
    }
}
