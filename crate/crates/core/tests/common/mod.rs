#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Duration;

use aspmt::eval::Interpretation;
use aspmt::frontend::ast::{fmt_rational, GroundConst, Value};
use aspmt::smt::model::to_value;
use aspmt::smt::{Session, SolverConfig, Verdict};
use aspmt::Compiled;
use num_bigint::BigInt;
use rand::Rng;

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn bindings(pairs: &[(&str, i64)]) -> BTreeMap<String, BigInt> {
    pairs.iter().map(|(n, v)| (n.to_string(), BigInt::from(*v))).collect()
}

pub fn z3() -> SolverConfig {
    SolverConfig { path: "z3".into(), time_limit: Some(Duration::from_secs(60)) }
}

/// The four fixture domains with their reference bindings.
pub fn fixtures() -> Vec<(&'static str, String, BTreeMap<String, BigInt>)> {
    vec![
        ("car", fixture("car.aspmt"), bindings(&[("st", 3), ("t", 4), ("ms", 4), ("ar", 3), ("l", 10)])),
        ("bucket", fixture("bucket.aspmt"), bindings(&[("c", 10)])),
        ("shuttle", fixture("shuttle.aspmt"), bindings(&[("st", 2), ("k", 1), ("m", 2), ("f", 4), ("v", 8), ("p", 8)])),
        ("ball", fixture("ball.aspmt"), bindings(&[("st", 4), ("p", 100)])),
    ]
}

fn smt_value(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Num(n) if n < &num_rational::BigRational::from_integer(0.into()) => {
            format!("(- {})", fmt_rational(&-n.clone()))
        }
        Value::Num(n) => fmt_rational(n),
        Value::Obj(o) => o.clone(),
    }
}

/// Every model of the compiled script, found by adding one blocking clause per model.
pub fn solver_models(compiled: &Compiled, limit: usize) -> BTreeSet<Interpretation> {
    let mut s = Session::start(&z3()).expect("z3 must be installed");
    s.load(&compiled.script.preamble()).unwrap();
    let mut out = BTreeSet::new();
    while s.check_sat().unwrap() == Verdict::Sat {
        let model = s.get_model().unwrap();
        let a = model.assignment(&compiled.table).unwrap();
        let i: Interpretation = a.iter().map(|(c, v)| (c.clone(), to_value(v).unwrap())).collect();
        let block: Vec<String> = compiled
            .table
            .declarations()
            .iter()
            .map(|d| format!("(= {} {})", d.symbol, smt_value(&i[&d.constant])))
            .collect();
        assert!(out.insert(i), "blocking clause did not exclude a model");
        assert!(out.len() <= limit, "more than {limit} models");
        if block.is_empty() {
            break;
        }
        s.assert(&format!("(not (and true {}))", block.join(" "))).unwrap();
    }
    out
}

pub fn rational(i: &Interpretation, c: &str, args: &[i64]) -> num_rational::BigRational {
    let key = GroundConst::new(c, args.iter().map(|a| Value::Num(aspmt::frontend::ast::int(*a))).collect());
    match i.get(&key) {
        Some(Value::Num(n)) => n.clone(),
        other => panic!("{key}: {other:?}"),
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Int(i64),
    Bool,
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    kinds: Vec<Kind>,
}

const NAMES: [&str; 3] = ["f", "g", "h"];

impl<R: Rng> Gen<'_, R> {
    fn value(&mut self, j: usize) -> String {
        match self.kinds[j] {
            Kind::Int(d) => self.rng.gen_range(0..d).to_string(),
            Kind::Bool => if self.rng.gen() { "true" } else { "false" }.to_string(),
        }
    }

    /// A body literal over constant `j`; positive occurrences only when `positive` is set.
    fn literal(&mut self, j: usize, positive: bool) -> String {
        let atom = format!("{} = {}", NAMES[j], self.value(j));
        match (positive, self.rng.gen_range(0..4)) {
            (true, 0 | 1) => atom,
            (_, 2) => format!("{} != {}", NAMES[j], self.value(j)),
            (_, 3) => format!("not not {atom}"),
            _ => format!("not {atom}"),
        }
    }

    fn body(&mut self, head: Option<usize>, n: usize) -> Vec<String> {
        (0..n)
            .map(|_| {
                let j = self.rng.gen_range(0..self.kinds.len());
                self.literal(j, head.is_none_or(|i| j < i))
            })
            .collect()
    }

    fn int_below(&mut self, i: usize) -> Option<usize> {
        let js: Vec<usize> = (0..i).filter(|&j| matches!(self.kinds[j], Kind::Int(_))).collect();
        (!js.is_empty()).then(|| js[self.rng.gen_range(0..js.len())])
    }

    fn rule(&mut self) -> String {
        let n = self.kinds.len();
        let i = self.rng.gen_range(0..n);
        let extra = self.rng.gen_range(0..=2);
        let f = NAMES[i];
        let (head, body) = match self.rng.gen_range(0..8) {
            0 => return format!("<- {}.", self.body(None, extra.max(1)).join(" & ")),
            1..=3 => (format!("{{{f} = {}}}", self.value(i)), self.body(Some(i), extra)),
            4 | 5 if matches!(self.kinds[i], Kind::Int(_)) && self.int_below(i).is_some() => {
                let j = self.int_below(i).unwrap();
                let k = self.rng.gen_range(-1..=1);
                let def = match k {
                    0 => vec![format!("{} = X", NAMES[j])],
                    k => vec![format!("{} = Y", NAMES[j]), format!("X = Y + {k}")],
                };
                let head = if self.rng.gen() { format!("{{{f} = X}}") } else { format!("{f} = X") };
                let mut b = def;
                b.extend(self.body(Some(i), extra.min(1)));
                (head, b)
            }
            _ => (format!("{f} = {}", self.value(i)), self.body(Some(i), extra)),
        };
        if body.is_empty() {
            format!("{head}.")
        } else {
            format!("{head} <- {}.", body.join(" & "))
        }
    }
}

/// A random program over at most three nullary constants with small domains.
///
/// Positive body occurrences refer only to earlier constants, so every program is tight.
pub fn random_program<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=3);
    let kinds: Vec<Kind> =
        (0..n).map(|_| if rng.gen_range(0..4) == 0 { Kind::Bool } else { Kind::Int(rng.gen_range(2..=3)) }).collect();
    let decls: Vec<String> = kinds
        .iter()
        .enumerate()
        .map(|(i, k)| match k {
            Kind::Int(d) => format!("{} :: int[0..{}]", NAMES[i], d - 1),
            Kind::Bool => format!("{} :: boolean", NAMES[i]),
        })
        .collect();
    let mut g = Gen { rng, kinds };
    let mut rules = Vec::new();
    for (i, name) in NAMES.iter().enumerate().take(n) {
        if g.rng.gen_bool(0.6) {
            rules.push(format!("{{{name} = {}}}.", g.value(i)));
        }
    }
    let total = g.rng.gen_range(rules.len().max(1)..=4);
    while rules.len() < total {
        rules.push(g.rule());
    }
    format!(
        ":- constants\n  {}.\n:- variables\n  X :: int[0..2]; Y :: int[0..2].\n\n{}\n",
        decls.join("; "),
        rules.join("\n")
    )
}

/// A random constraint over the constants of a program from [`random_program`].
pub fn random_constraint<R: Rng>(rng: &mut R, program: &str) -> String {
    let names: Vec<&str> = NAMES.iter().copied().filter(|n| program.contains(&format!("\n  {n} ::")) || program.contains(&format!("; {n} ::"))).collect();
    let lits: Vec<String> = (0..rng.gen_range(1..=2))
        .map(|_| {
            let c = names[rng.gen_range(0..names.len())];
            let boolean = program.contains(&format!("{c} :: boolean"));
            let v = if boolean { if rng.gen() { "true".into() } else { "false".into() } } else { rng.gen_range(0..3).to_string() };
            if rng.gen() { format!("{c} = {v}") } else { format!("not {c} = {v}") }
        })
        .collect();
    format!("<- {}.", lits.join(" & "))
}

/// Compiles and solves a program; `None` when the solver reports unsat.
pub fn solve(source: &str, bindings: &BTreeMap<String, BigInt>) -> Result<Option<Interpretation>, String> {
    let compiled = aspmt::compile(source, bindings, &aspmt::Options::default()).map_err(|e| e.to_string())?;
    let run = aspmt::smt::run_solver(&compiled.script, &z3()).map_err(|e| e.to_string())?;
    match run.outcome {
        aspmt::smt::SolverOutcome::Sat(model) => {
            let a = model.assignment(&compiled.table).map_err(|e| e.to_string())?;
            Ok(Some(a.iter().map(|(c, v)| (c.clone(), to_value(v).expect("numeric or boolean value"))).collect()))
        }
        aspmt::smt::SolverOutcome::Unsat => Ok(None),
        other => Err(format!("solver: {other:?}")),
    }
}

pub fn boolean(i: &Interpretation, c: &str, args: &[i64]) -> bool {
    let key = GroundConst::new(c, args.iter().map(|a| Value::Num(aspmt::frontend::ast::int(*a))).collect());
    match i.get(&key) {
        Some(Value::Bool(b)) => *b,
        other => panic!("{key}: {other:?}"),
    }
}
