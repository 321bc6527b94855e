mod common;

use std::collections::BTreeMap;

use aspmt::eval::Evaluator;
use aspmt::frontend::ast::Formula;
use aspmt::oracle::{satisfies_completion, FiniteSignature};
use aspmt::pipeline::front;
use aspmt::transform::completion;
use aspmt::varelim::{eliminate, order, orders, select_eliminable};
use aspmt::{compile, Options};
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn fixture_theories_are_variable_free_under_every_order() {
    for (name, source, b) in fixtures() {
        let ground = front(&source, &b, &Options::default()).unwrap();
        let c = completion(&ground);
        for o in orders() {
            let theory = eliminate(&c, o.as_ref()).unwrap_or_else(|e| panic!("{name} with {}: {e}", o.name()));
            for (label, f) in theory.assertions() {
                assert!(f.vars().is_empty(), "{name} {label} under {}: {:?}", o.name(), f.vars());
            }
        }
    }
}

#[test]
fn unknown_orders_are_rejected() {
    assert!(order("leftmost").is_ok());
    assert!(order("sideways").is_err());
    let err = compile("", &BTreeMap::new(), &Options { elim_order: "sideways".into(), ..Options::default() }).unwrap_err();
    assert!(err.to_string().contains("leftmost"), "{err}");
}

#[test]
fn a_cyclic_pair_offers_no_candidate() {
    let x = aspmt::frontend::ast::Term::var("X");
    let y = aspmt::frontend::ast::Term::var("Y");
    let two = aspmt::frontend::ast::Term::num(2);
    let mul = |a, b| aspmt::frontend::ast::Term::arith(aspmt::frontend::ast::ArithOp::Mul, a, b);
    let cyclic = [Formula::eq(mul(two.clone(), x.clone()), y.clone()), Formula::eq(mul(two, y), x)];
    assert_eq!(select_eliminable(&cyclic), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// The eliminated theory and the completion agree on every interpretation.
    #[test]
    fn elimination_preserves_the_completion(seed in any::<u64>(), rightmost in any::<bool>()) {
        let src = random_program(&mut StdRng::seed_from_u64(seed));
        let ground = front(&src, &BTreeMap::new(), &Options::default()).unwrap();
        let c = completion(&ground);
        let o = order(if rightmost { "rightmost" } else { "leftmost" }).unwrap();
        let theory = eliminate(&c, o.as_ref()).unwrap();
        let sig = FiniteSignature::from_ground(&ground).unwrap();
        for i in sig.interpretations() {
            let ev = Evaluator::exact(&i);
            let mut holds = true;
            for (_, f) in theory.assertions() {
                holds &= ev.holds(&f).unwrap();
            }
            prop_assert_eq!(holds, satisfies_completion(&c, &i).unwrap(), "{}\n{:?}", src, i);
        }
    }
}
