//! SMT-LIB 2 serialization of variable-free theories.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::Signed;

use super::SmtError;
use crate::frontend::ast::*;
use crate::grounder::GroundConstant;
use crate::transform::{Body, CompletionEquivalence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SmtSort {
    Bool,
    Int,
    Real,
}

impl SmtSort {
    pub fn of(sort: &ValueSort) -> SmtSort {
        match sort {
            ValueSort::Boolean => SmtSort::Bool,
            ValueSort::Int { .. } => SmtSort::Int,
            ValueSort::Real { .. } => SmtSort::Real,
        }
    }

    fn join(self, other: SmtSort) -> SmtSort {
        self.max(other)
    }
}

impl fmt::Display for SmtSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmtSort::Bool => "Bool",
            SmtSort::Int => "Int",
            SmtSort::Real => "Real",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Declaration {
    pub symbol: String,
    pub sort: SmtSort,
    pub constant: GroundConst,
    pub value_sort: ValueSort,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub comment: Option<String>,
    pub body: String,
}

/// Maps ground constants to their declared SMT symbols.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    decls: Vec<Declaration>,
    index: BTreeMap<GroundConst, usize>,
}

const RESERVED: &[&str] = &[
    "and", "or", "not", "xor", "true", "false", "let", "forall", "exists", "ite", "distinct",
    "par", "as", "assert", "to_real", "to_int", "div", "mod", "abs",
];

/// `speed(1)` becomes `speed_1_`; reserved words are quoted.
pub fn mangle(c: &GroundConst) -> String {
    let s = c.smt_symbol();
    if RESERVED.contains(&s.as_str()) {
        format!("|{s}|")
    } else {
        s
    }
}

impl SymbolTable {
    pub fn new(constants: &[GroundConstant]) -> Result<SymbolTable, SmtError> {
        let mut table = SymbolTable::default();
        let mut seen: BTreeMap<String, GroundConst> = BTreeMap::new();
        for gc in constants {
            let symbol = mangle(&gc.constant);
            if let Some(prev) = seen.get(&symbol) {
                return Err(SmtError::SymbolCollision {
                    symbol,
                    first: prev.to_string(),
                    second: gc.constant.to_string(),
                });
            }
            seen.insert(symbol.clone(), gc.constant.clone());
            table.index.insert(gc.constant.clone(), table.decls.len());
            table.decls.push(Declaration {
                symbol,
                sort: SmtSort::of(&gc.sort),
                constant: gc.constant.clone(),
                value_sort: gc.sort.clone(),
            });
        }
        Ok(table)
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.decls
    }

    pub fn get(&self, c: &GroundConst) -> Option<&Declaration> {
        self.index.get(c).map(|&i| &self.decls[i])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmtScript {
    pub logic: Option<String>,
    pub declarations: Vec<Declaration>,
    pub assertions: Vec<Assertion>,
}

impl SmtScript {
    /// Declarations and assertions without any commands.
    pub fn preamble(&self) -> String {
        let mut s = String::new();
        if let Some(l) = &self.logic {
            writeln!(s, "(set-logic {l})").unwrap();
        }
        for d in &self.declarations {
            writeln!(s, "(declare-const {} {})", d.symbol, d.sort).unwrap();
        }
        for a in &self.assertions {
            if let Some(c) = &a.comment {
                writeln!(s, "; {c}").unwrap();
            }
            writeln!(s, "(assert {})", a.body).unwrap();
        }
        s
    }
}

impl fmt::Display for SmtScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(check-sat)\n(get-model)\n", self.preamble())
    }
}

/// Serializes terms and formulas, with solver-side variables of known sort.
pub struct Printer<'a> {
    table: &'a SymbolTable,
    vars: BTreeMap<String, SmtSort>,
}

fn numeral(n: &Rational, sort: SmtSort) -> String {
    let abs = n.abs();
    let body = if abs.is_integer() {
        match sort {
            SmtSort::Int => abs.numer().to_string(),
            _ => format!("{}.0", abs.numer()),
        }
    } else {
        format!("(/ {}.0 {}.0)", abs.numer(), abs.denom())
    };
    if n.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

impl<'a> Printer<'a> {
    pub fn new(table: &'a SymbolTable) -> Self {
        Printer { table, vars: BTreeMap::new() }
    }

    pub fn with_vars(table: &'a SymbolTable, vars: BTreeMap<String, SmtSort>) -> Self {
        Printer { table, vars }
    }

    fn sort_of(&self, t: &Term) -> Result<SmtSort, SmtError> {
        Ok(match t {
            Term::Num(n) if n.is_integer() => SmtSort::Int,
            Term::Num(_) => SmtSort::Real,
            Term::Bool(_) => SmtSort::Bool,
            Term::Sym(s) => return Err(SmtError::Unsupported(format!("object `{s}` in a solver term"))),
            Term::Var(v) => *self.vars.get(v).ok_or_else(|| SmtError::FreeVariable(v.clone()))?,
            Term::App(..) => self.decl(t)?.sort,
            Term::Arith(ArithOp::Div, ..) => SmtSort::Real,
            Term::Arith(_, a, b) => self.sort_of(a)?.join(self.sort_of(b)?),
        })
    }

    fn decl(&self, t: &Term) -> Result<&Declaration, SmtError> {
        let c = GroundConst::from_term(t).ok_or_else(|| SmtError::Unsupported(format!("non-ground application {t:?}")))?;
        self.table.get(&c).ok_or_else(|| SmtError::UnknownConstant(c.to_string()))
    }

    /// `t` rendered at sort `want`, inserting `to_real` where an integer term meets a real context.
    pub fn term(&self, t: &Term, want: SmtSort) -> Result<String, SmtError> {
        let have = self.sort_of(t)?;
        let s = match t {
            Term::Num(n) => return Ok(numeral(n, want.join(have))),
            Term::Bool(b) => b.to_string(),
            Term::Sym(_) => unreachable!("rejected by sort_of"),
            Term::Var(v) => v.clone(),
            Term::App(..) => self.decl(t)?.symbol.clone(),
            Term::Arith(op, a, b) => {
                let inner = if *op == ArithOp::Div { SmtSort::Real } else { have.join(want) };
                let inner = if inner == SmtSort::Bool { SmtSort::Int } else { inner };
                return Ok(format!("({} {} {})", op.symbol(), self.term(a, inner)?, self.term(b, inner)?));
            }
        };
        Ok(if have == SmtSort::Int && want == SmtSort::Real { format!("(to_real {s})") } else { s })
    }

    pub fn formula(&self, f: &Formula) -> Result<String, SmtError> {
        Ok(match f {
            Formula::Falsum => "false".into(),
            Formula::And(gs) if gs.is_empty() => "true".into(),
            Formula::And(gs) if gs.len() == 1 => self.formula(&gs[0])?,
            Formula::Or(gs) if gs.len() == 1 => self.formula(&gs[0])?,
            Formula::Or(gs) if gs.is_empty() => "false".into(),
            Formula::And(gs) => self.nary("and", gs)?,
            Formula::Or(gs) => self.nary("or", gs)?,
            Formula::Not(g) => format!("(not {})", self.formula(g)?),
            Formula::Implies(a, b) => format!("(=> {} {})", self.formula(a)?, self.formula(b)?),
            Formula::Cmp(op, a, b) => self.comparison(*op, a, b)?,
        })
    }

    fn nary(&self, op: &str, gs: &[Formula]) -> Result<String, SmtError> {
        let parts = gs.iter().map(|g| self.formula(g)).collect::<Result<Vec<_>, _>>()?;
        Ok(format!("({op} {})", parts.join(" ")))
    }

    fn comparison(&self, op: CmpOp, a: &Term, b: &Term) -> Result<String, SmtError> {
        let (sa, sb) = (self.sort_of(a)?, self.sort_of(b)?);
        if sa == SmtSort::Bool || sb == SmtSort::Bool {
            if op != CmpOp::Eq || sa != sb {
                return Err(SmtError::Unsupported(format!("ill-sorted boolean comparison {a:?} {} {b:?}", op.symbol())));
            }
            return Ok(match (a, b) {
                (t, Term::Bool(true)) | (Term::Bool(true), t) => self.term(t, SmtSort::Bool)?,
                (t, Term::Bool(false)) | (Term::Bool(false), t) => {
                    format!("(not {})", self.term(t, SmtSort::Bool)?)
                }
                _ => format!("(= {} {})", self.term(a, SmtSort::Bool)?, self.term(b, SmtSort::Bool)?),
            });
        }
        let s = sa.join(sb);
        Ok(format!("({} {} {})", op.symbol(), self.term(a, s)?, self.term(b, s)?))
    }
}

/// Range assertion `lo <= c <= hi` for a numeric constant.
fn range(d: &Declaration) -> Option<String> {
    let (lo, hi) = d.value_sort.bounds()?;
    Some(format!(
        "(and (<= {lo} {s}) (<= {s} {hi}))",
        lo = numeral(&lo, d.sort),
        hi = numeral(&hi, d.sort),
        s = d.symbol
    ))
}

/// Picks the narrowest standard logic covering the declared sorts and the arithmetic used.
pub fn select_logic(decls: &[Declaration], theory: &[&Formula]) -> String {
    let int = decls.iter().any(|d| d.sort == SmtSort::Int);
    let real = decls.iter().any(|d| d.sort == SmtSort::Real)
        || theory.iter().any(|f| contains_division(f));
    let nonlinear = theory.iter().any(|f| f.is_nonlinear());
    let arith = match (int, real) {
        (false, false) => return "QF_UF".into(),
        (true, false) => "IA",
        (false, true) => "RA",
        (true, true) => "IRA",
    };
    format!("QF_{}{arith}", if nonlinear { "N" } else { "L" })
}

fn contains_division(f: &Formula) -> bool {
    fn term(t: &Term) -> bool {
        match t {
            Term::Arith(ArithOp::Div, ..) => true,
            Term::Arith(_, a, b) => term(a) || term(b),
            Term::App(_, args) => args.iter().any(term),
            Term::Num(n) => !n.is_integer(),
            _ => false,
        }
    }
    let mut found = false;
    f.for_each_term(&mut |t| found |= term(t));
    found
}

/// Emits the script: declarations, range axioms, one assertion per labelled formula.
///
/// Formulas labelled `constraint ...` are expected to already carry their negation.
pub fn emit_script(
    theory: &[(String, Formula)],
    constants: &[GroundConstant],
) -> Result<SmtScript, SmtError> {
    let table = SymbolTable::new(constants)?;
    let printer = Printer::new(&table);
    let mut assertions = Vec::new();
    for d in table.declarations() {
        if let Some(body) = range(d) {
            assertions.push(Assertion { comment: None, body });
        }
    }
    for (label, f) in theory {
        if let Some(v) = f.vars().into_iter().next() {
            return Err(SmtError::FreeVariable(v));
        }
        assertions.push(Assertion { comment: Some(label.clone()), body: printer.formula(f)? });
    }
    let formulas: Vec<&Formula> = theory.iter().map(|(_, f)| f).collect();
    Ok(SmtScript {
        logic: Some(select_logic(table.declarations(), &formulas)),
        declarations: table.declarations().to_vec(),
        assertions,
    })
}

fn sorted_vars(body: &Body, names: &[String]) -> Result<Vec<(String, SmtSort)>, SmtError> {
    names
        .iter()
        .map(|v| {
            let s = body.sorts.get(v).map(SmtSort::of).ok_or_else(|| SmtError::FreeVariable(v.clone()))?;
            Ok((v.clone(), s))
        })
        .collect()
}

fn binder(vars: &[(String, SmtSort)]) -> String {
    vars.iter().map(|(v, s)| format!("({v} {s})")).collect::<Vec<_>>().join(" ")
}

/// The completion equivalence as a quantified SMT-LIB formula
/// `forall V (f = V <=> exists xs (B1) or ...)`.
pub fn quantified_equivalence(
    eq: &CompletionEquivalence,
    table: &SymbolTable,
) -> Result<String, SmtError> {
    let v_sort = SmtSort::of(&eq.sort);
    let mut disjuncts = Vec::new();
    for body in &eq.bodies {
        let ex = sorted_vars(body, &body.vars)?;
        let mut vars: BTreeMap<String, SmtSort> = ex.iter().cloned().collect();
        vars.insert(eq.value_var.clone(), v_sort);
        let printer = Printer::with_vars(table, vars);
        let inner = printer.formula(&body.formula())?;
        disjuncts.push(if ex.is_empty() { inner } else { format!("(exists ({}) {inner})", binder(&ex)) });
    }
    let vars = BTreeMap::from([(eq.value_var.clone(), v_sort)]);
    let printer = Printer::with_vars(table, vars);
    let head = printer.formula(&eq.head())?;
    let rhs = match disjuncts.len() {
        0 => "false".to_string(),
        1 => disjuncts.pop().unwrap(),
        _ => format!("(or {})", disjuncts.join(" ")),
    };
    Ok(format!("(forall (({} {v_sort})) (= {head} {rhs}))", eq.value_var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn real(name: &str, args: Vec<Value>, lo: i64, hi: i64) -> GroundConstant {
        GroundConstant {
            constant: GroundConst::new(name, args),
            sort: ValueSort::Real { lo: int(lo), hi: int(hi) },
        }
    }

    fn n(i: i64) -> Value {
        Value::Num(int(i))
    }

    #[test]
    fn empty_theory_has_declarations_and_ranges_only() {
        let s = emit_script(&[], &[real("f", vec![], 0, 1)]).unwrap();
        assert_eq!(
            s.to_string(),
            "(set-logic QF_LRA)\n(declare-const f Real)\n(assert (and (<= 0.0 f) (<= f 1.0)))\n(check-sat)\n(get-model)\n"
        );
    }

    #[test]
    fn numerals_follow_the_context_sort() {
        let cs = [
            real("x", vec![], 0, 4),
            GroundConstant { constant: GroundConst::new("k", vec![]), sort: ValueSort::Int { lo: BigInt::from(-2), hi: BigInt::from(2) } },
        ];
        let table = SymbolTable::new(&cs).unwrap();
        let p = Printer::new(&table);
        let x = Term::app("x", vec![]);
        let k = Term::app("k", vec![]);
        let f = Formula::eq(x.clone(), Term::arith(ArithOp::Add, k.clone(), Term::Num(Rational::new(19.into(), 20.into()))));
        assert_eq!(p.formula(&f).unwrap(), "(= x (+ (to_real k) (/ 19.0 20.0)))");
        let f = Formula::Cmp(CmpOp::Lt, k, Term::num(-3));
        assert_eq!(p.formula(&f).unwrap(), "(< k (- 3))");
    }

    #[test]
    fn boolean_atoms_are_bare_symbols() {
        let cs = [GroundConstant { constant: GroundConst::new("accel", vec![n(0)]), sort: ValueSort::Boolean }];
        let table = SymbolTable::new(&cs).unwrap();
        let p = Printer::new(&table);
        let a = Term::app("accel", vec![Term::num(0)]);
        assert_eq!(p.formula(&Formula::eq(a.clone(), Term::Bool(true))).unwrap(), "accel_0_");
        assert_eq!(p.formula(&Formula::eq(a, Term::Bool(false))).unwrap(), "(not accel_0_)");
    }

    #[test]
    fn colliding_symbols_are_rejected() {
        let cs = [real("f_1_", vec![], 0, 1), real("f", vec![n(1)], 0, 1)];
        assert!(matches!(SymbolTable::new(&cs), Err(SmtError::SymbolCollision { .. })));
    }

    #[test]
    fn logic_reflects_sorts_and_nonlinearity() {
        let x = real("x", vec![], 0, 1);
        let table = SymbolTable::new(&[x]).unwrap();
        let t = Term::app("x", vec![]);
        let lin = Formula::eq(t.clone(), Term::num(1));
        let nonlin = Formula::eq(Term::arith(ArithOp::Mul, t.clone(), t), Term::num(1));
        assert_eq!(select_logic(table.declarations(), &[&lin]), "QF_LRA");
        assert_eq!(select_logic(table.declarations(), &[&nonlin]), "QF_NRA");
        assert_eq!(select_logic(&[], &[]), "QF_UF");
    }
}
