//! Source-syntax printing. `parse(print(p))` reproduces `p`.

use std::fmt::Write;

use super::ast::*;

pub fn term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, 0);
    s
}

fn level(op: ArithOp) -> u8 {
    match op {
        ArithOp::Add | ArithOp::Sub => 1,
        ArithOp::Mul | ArithOp::Div => 2,
    }
}

fn write_term(out: &mut String, t: &Term, min: u8) {
    match t {
        Term::Num(n) => {
            let text = fmt_rational(n);
            // A fraction prints as a division, which must not absorb a neighbouring operand.
            if !n.is_integer() && min > 1 {
                let _ = write!(out, "({text})");
            } else {
                out.push_str(&text);
            }
        }
        Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Term::Sym(s) | Term::Var(s) => out.push_str(s),
        Term::App(name, args) => {
            out.push_str(name);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_term(out, a, 0);
                }
                out.push(')');
            }
        }
        Term::Arith(op, a, b) => {
            let l = level(*op);
            let paren = l < min;
            if paren {
                out.push('(');
            }
            write_term(out, a, l);
            let _ = write!(out, " {} ", op.symbol());
            write_term(out, b, l + 1);
            if paren {
                out.push(')');
            }
        }
    }
}

pub fn formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, 0);
    s
}

// Precedence levels: 0 implication, 1 disjunction, 2 conjunction, 3 negation and atoms.
fn write_formula(out: &mut String, f: &Formula, min: u8) {
    let wrap = |out: &mut String, lvl: u8, body: &dyn Fn(&mut String)| {
        if lvl < min {
            out.push('(');
            body(out);
            out.push(')');
        } else {
            body(out);
        }
    };
    match f {
        Formula::Cmp(op, a, b) => {
            let _ = write!(out, "{} {} {}", term(a), op.symbol(), term(b));
        }
        Formula::Falsum => out.push_str("false"),
        Formula::Not(g) => match g.as_ref() {
            Formula::Cmp(CmpOp::Eq, a, b) => {
                let _ = write!(out, "{} != {}", term(a), term(b));
            }
            g => {
                out.push_str("not ");
                write_formula(out, g, 3);
            }
        },
        Formula::And(gs) if gs.is_empty() => out.push_str("true"),
        Formula::And(gs) => wrap(out, 2, &|out| {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                write_formula(out, g, 3);
            }
        }),
        Formula::Or(gs) if gs.is_empty() => out.push_str("false"),
        Formula::Or(gs) => wrap(out, 1, &|out| {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                write_formula(out, g, 2);
            }
        }),
        Formula::Implies(a, b) => wrap(out, 0, &|out| {
            write_formula(out, a, 1);
            out.push_str(" -> ");
            write_formula(out, b, 0);
        }),
    }
}

pub fn rule(r: &Rule) -> String {
    let mut s = String::new();
    let head = match &r.head {
        Head::Falsum => None,
        Head::Assign { func, value } => Some(format!("{} = {}", term(func), term(value))),
    };
    match (&head, r.choice) {
        (Some(h), true) => {
            let _ = write!(s, "{{{h}}}");
        }
        (Some(h), false) => s.push_str(h),
        (None, _) => {}
    }
    if !r.body.is_empty() || head.is_none() {
        if head.is_some() {
            s.push(' ');
        }
        s.push_str("<- ");
        if r.body.is_empty() {
            s.push_str("true");
        }
        for (i, b) in r.body.iter().enumerate() {
            if i > 0 {
                s.push_str(" & ");
            }
            write_formula(&mut s, b, 3);
        }
    }
    s.push('.');
    s
}

fn bound(r: &Rational) -> String {
    fmt_rational(r)
}

pub fn program(p: &Program) -> String {
    let mut s = String::new();
    if !p.sorts.is_empty() {
        let names: Vec<&str> = p.sorts.iter().map(|d| d.name.as_str()).collect();
        let _ = writeln!(s, ":- sorts\n  {}.", names.join("; "));
    }
    if !p.objects.is_empty() {
        let items: Vec<String> = p
            .objects
            .iter()
            .map(|o| {
                let parts: Vec<String> = o
                    .items
                    .iter()
                    .map(|i| match i {
                        ObjectItem::Name(n) => n.clone(),
                        ObjectItem::Range(lo, hi) if lo == hi => lo.to_string(),
                        ObjectItem::Range(lo, hi) => format!("{lo}..{hi}"),
                    })
                    .collect();
                format!("{} :: {}", parts.join(", "), o.sort)
            })
            .collect();
        let _ = writeln!(s, ":- objects\n  {}.", items.join(";\n  "));
    }
    if !p.constants.is_empty() {
        let items: Vec<String> = p
            .constants
            .iter()
            .map(|c| {
                let args = if c.arg_sorts.is_empty() {
                    String::new()
                } else {
                    format!("({})", c.arg_sorts.join(", "))
                };
                format!("{}{} :: {}", c.name, args, value_sort(&c.value_sort))
            })
            .collect();
        let _ = writeln!(s, ":- constants\n  {}.", items.join(";\n  "));
    }
    if !p.variables.is_empty() {
        let items: Vec<String> = p
            .variables
            .iter()
            .map(|v| {
                let sort = match &v.sort {
                    VarSort::User(u) => u.clone(),
                    VarSort::Value(vs) => value_sort(vs),
                };
                format!("{} :: {}", v.name, sort)
            })
            .collect();
        let _ = writeln!(s, ":- variables\n  {}.", items.join(";\n  "));
    }
    if !s.is_empty() && !p.rules.is_empty() {
        s.push('\n');
    }
    for r in &p.rules {
        s.push_str(&rule(r));
        s.push('\n');
    }
    s
}

pub fn value_sort(v: &ValueSort) -> String {
    match v {
        ValueSort::Boolean => "boolean".into(),
        ValueSort::Int { lo, hi } => format!("int[{lo}..{hi}]"),
        ValueSort::Real { lo, hi } => format!("real[{}..{}]", bound(lo), bound(hi)),
    }
}
