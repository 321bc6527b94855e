//! Typed program representation shared by every pipeline stage.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    /// Applies the operator to exact rationals. `None` on division by zero.
    pub fn apply(self, a: &Rational, b: &Rational) -> Option<Rational> {
        match self {
            ArithOp::Add => Some(a + b),
            ArithOp::Sub => Some(a - b),
            ArithOp::Mul => Some(a * b),
            ArithOp::Div => {
                if b.is_zero() {
                    None
                } else {
                    Some(a / b)
                }
            }
        }
    }
}

/// Comparison operators. `!=` is not a member: it desugars to `not (a = b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Eq => ord == Equal,
            CmpOp::Ge => ord != Less,
            CmpOp::Gt => ord == Greater,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Num(Rational),
    Bool(bool),
    /// A named object of a user sort, such as the axis `x`.
    Sym(String),
    Var(String),
    /// Application of an uninterpreted function constant.
    App(String, Vec<Term>),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn num(n: i64) -> Term {
        Term::Num(int(n))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn arith(op: ArithOp, a: Term, b: Term) -> Term {
        Term::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_app(&self) -> bool {
        matches!(self, Term::App(..))
    }

    /// The value of a term built only from literals and objects.
    pub fn as_value(&self) -> Option<Value> {
        match self {
            Term::Num(n) => Some(Value::Num(n.clone())),
            Term::Bool(b) => Some(Value::Bool(*b)),
            Term::Sym(s) => Some(Value::Obj(s.clone())),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Arith(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Num(_) | Term::Bool(_) | Term::Sym(_) => {}
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(name)),
            Term::Arith(_, a, b) => a.contains_var(name) || b.contains_var(name),
            _ => false,
        }
    }

    pub fn contains_app(&self) -> bool {
        match self {
            Term::App(..) => true,
            Term::Arith(_, a, b) => a.contains_app() || b.contains_app(),
            _ => false,
        }
    }

    /// Replaces every occurrence of `var` by `by`.
    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => by.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(var, by)).collect())
            }
            Term::Arith(op, a, b) => Term::arith(*op, a.substitute(var, by), b.substitute(var, by)),
            other => other.clone(),
        }
    }

    pub fn rename_in_place(&mut self, map: &BTreeMap<String, Term>) {
        match self {
            Term::Var(v) => {
                if let Some(t) = map.get(v) {
                    *self = t.clone();
                }
            }
            Term::App(_, args) => args.iter_mut().for_each(|a| a.rename_in_place(map)),
            Term::Arith(_, a, b) => {
                a.rename_in_place(map);
                b.rename_in_place(map);
            }
            _ => {}
        }
    }

    /// Folds arithmetic whose operands are numerals. Fails on a literal division by zero.
    pub fn fold(&self) -> Result<Term, Term> {
        match self {
            Term::Arith(op, a, b) => {
                let a = a.fold()?;
                let b = b.fold()?;
                match (&a, &b) {
                    (Term::Num(x), Term::Num(y)) => match op.apply(x, y) {
                        Some(r) => Ok(Term::Num(r)),
                        None => Err(self.clone()),
                    },
                    _ => Ok(Term::arith(*op, a, b)),
                }
            }
            Term::App(f, args) => {
                let args = args.iter().map(Term::fold).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::App(f.clone(), args))
            }
            other => Ok(other.clone()),
        }
    }

    /// Visits every function application, outermost first.
    pub fn for_each_app<'a>(&'a self, f: &mut dyn FnMut(&'a str, &'a [Term])) {
        match self {
            Term::App(name, args) => {
                f(name, args);
                args.iter().for_each(|a| a.for_each_app(f));
            }
            Term::Arith(_, a, b) => {
                a.for_each_app(f);
                b.for_each_app(f);
            }
            _ => {}
        }
    }

    /// True when some multiplication or division has non-numeral terms on both sides.
    pub fn is_nonlinear(&self) -> bool {
        match self {
            Term::Arith(op, a, b) => {
                let here = match op {
                    ArithOp::Mul => !a.is_numeral() && !b.is_numeral(),
                    ArithOp::Div => !b.is_numeral(),
                    _ => false,
                };
                here || a.is_nonlinear() || b.is_nonlinear()
            }
            Term::App(_, args) => args.iter().any(Term::is_nonlinear),
            _ => false,
        }
    }

    pub fn is_numeral(&self) -> bool {
        matches!(self, Term::Num(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Cmp(CmpOp, Term, Term),
    Falsum,
    Not(Box<Formula>),
    /// Conjunction; the empty conjunction is truth.
    And(Vec<Formula>),
    /// Disjunction; the empty disjunction is falsity.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn top() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::And(v) if v.is_empty())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Falsum) || matches!(self, Formula::Or(v) if v.is_empty())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Cmp(CmpOp::Eq, a, b)
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Matches `not not F`, returning `F`.
    pub fn double_negated(&self) -> Option<&Formula> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Not(f) => Some(f),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Falsum => {}
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Formula::Cmp(_, a, b) => a.contains_var(name) || b.contains_var(name),
            Formula::Falsum => false,
            Formula::Not(f) => f.contains_var(name),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.contains_var(name)),
            Formula::Implies(a, b) => a.contains_var(name) || b.contains_var(name),
        }
    }

    /// Plain substitution without simplification.
    pub fn substitute(&self, var: &str, by: &Term) -> Formula {
        self.map_terms(&mut |t| t.substitute(var, by))
    }

    pub fn map_terms(&self, f: &mut dyn FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Cmp(op, a, b) => Formula::Cmp(*op, f(a), f(b)),
            Formula::Falsum => Formula::Falsum,
            Formula::Not(g) => Formula::not(g.map_terms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_terms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_terms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
        }
    }

    pub fn for_each_term<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        match self {
            Formula::Cmp(_, a, b) => {
                f(a);
                f(b);
            }
            Formula::Falsum => {}
            Formula::Not(g) => g.for_each_term(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.for_each_term(f)),
            Formula::Implies(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn is_nonlinear(&self) -> bool {
        let mut found = false;
        self.for_each_term(&mut |t| found |= t.is_nonlinear());
        found
    }

    /// Conjunction of `items`, collapsing singletons.
    pub fn conjoin(mut items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        }
    }

    pub fn disjoin(mut items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        }
    }
}

/// A ground value: boolean, exact number, or named object.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Num(Rational),
    Obj(String),
}

impl Value {
    pub fn to_term(&self) -> Term {
        match self {
            Value::Bool(b) => Term::Bool(*b),
            Value::Num(n) => Term::Num(n.clone()),
            Value::Obj(s) => Term::Sym(s.clone()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Num(n) => write!(f, "{}", fmt_rational(n)),
            Value::Obj(s) => write!(f, "{s}"),
        }
    }
}

/// Source syntax for a rational: `3`, `-7`, `19/20`, `-49/5`.
pub fn fmt_rational(n: &Rational) -> String {
    if n.denom().is_one() {
        n.numer().to_string()
    } else {
        format!("{}/{}", n.numer(), n.denom())
    }
}

/// A ground intensional function constant such as `speed(1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundConst {
    pub name: String,
    pub args: Vec<Value>,
}

impl GroundConst {
    pub fn new(name: &str, args: Vec<Value>) -> Self {
        GroundConst { name: name.to_string(), args }
    }

    pub fn from_term(t: &Term) -> Option<GroundConst> {
        match t {
            Term::App(name, args) => {
                let args = args.iter().map(Term::as_value).collect::<Option<Vec<_>>>()?;
                Some(GroundConst { name: name.clone(), args })
            }
            _ => None,
        }
    }

    pub fn to_term(&self) -> Term {
        Term::App(self.name.clone(), self.args.iter().map(Value::to_term).collect())
    }

    /// SMT-LIB symbol: `speed(1)` becomes `speed_1_`; nullary constants keep their name.
    pub fn smt_symbol(&self) -> String {
        if self.args.is_empty() {
            return self.name.clone();
        }
        let mut s = self.name.clone();
        s.push('_');
        for a in &self.args {
            let part = match a {
                Value::Num(n) => fmt_rational(n).replace('-', "m").replace('/', "d"),
                other => other.to_string(),
            };
            s.push_str(&part);
            s.push('_');
        }
        s
    }
}

impl fmt::Display for GroundConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValueSort {
    Boolean,
    Int { lo: BigInt, hi: BigInt },
    Real { lo: Rational, hi: Rational },
}

impl ValueSort {
    pub fn is_numeric(&self) -> bool {
        !matches!(self, ValueSort::Boolean)
    }

    pub fn bounds(&self) -> Option<(Rational, Rational)> {
        match self {
            ValueSort::Boolean => None,
            ValueSort::Int { lo, hi } => {
                Some((Rational::from_integer(lo.clone()), Rational::from_integer(hi.clone())))
            }
            ValueSort::Real { lo, hi } => Some((lo.clone(), hi.clone())),
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (ValueSort::Boolean, Value::Bool(_)) => true,
            (ValueSort::Int { .. }, Value::Num(n)) if !n.is_integer() => false,
            (ValueSort::Int { .. } | ValueSort::Real { .. }, Value::Num(n)) => {
                let (lo, hi) = self.bounds().unwrap();
                &lo <= n && n <= &hi
            }
            _ => false,
        }
    }

    /// Every value of a boolean or integer sort; `None` for reals.
    pub fn finite_values(&self) -> Option<Vec<Value>> {
        match self {
            ValueSort::Boolean => Some(vec![Value::Bool(false), Value::Bool(true)]),
            ValueSort::Int { lo, hi } => {
                let mut out = Vec::new();
                let mut i = lo.clone();
                while &i <= hi {
                    out.push(Value::Num(Rational::from_integer(i.clone())));
                    i += 1;
                }
                Some(out)
            }
            ValueSort::Real { .. } => None,
        }
    }
}

impl fmt::Display for ValueSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueSort::Boolean => write!(f, "boolean"),
            ValueSort::Int { lo, hi } => write!(f, "int[{lo}..{hi}]"),
            ValueSort::Real { lo, hi } => write!(f, "real[{}..{}]", fmt_rational(lo), fmt_rational(hi)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectItem {
    Name(String),
    Range(BigInt, BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectDecl {
    pub items: Vec<ObjectItem>,
    pub sort: String,
}

impl ObjectDecl {
    pub fn values(&self) -> Vec<Value> {
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                ObjectItem::Name(n) => out.push(Value::Obj(n.clone())),
                ObjectItem::Range(lo, hi) => {
                    let mut i = lo.clone();
                    while &i <= hi {
                        out.push(Value::Num(Rational::from_integer(i.clone())));
                        i += 1;
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantDecl {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub value_sort: ValueSort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarSort {
    User(String),
    Value(ValueSort),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub sort: VarSort,
}

impl VariableDecl {
    /// Variables over user sorts or booleans are grounded; numeric-range variables are left to the solver.
    pub fn is_asp(&self) -> bool {
        matches!(self.sort, VarSort::User(_) | VarSort::Value(ValueSort::Boolean))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    Falsum,
    /// `f(t) = value`
    Assign { func: Term, value: Term },
}

impl Head {
    pub fn atom(&self) -> Formula {
        match self {
            Head::Falsum => Formula::Falsum,
            Head::Assign { func, value } => Formula::eq(func.clone(), value.clone()),
        }
    }

    pub fn is_constraint(&self) -> bool {
        matches!(self, Head::Falsum)
    }
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub head: Head,
    /// Conjunction of body elements; empty means truth.
    pub body: Vec<Formula>,
    pub choice: bool,
    pub span: Span,
    /// Index of the source rule this one descends from.
    pub origin: usize,
    /// Sorts of the solver-side variables, declared or inferred.
    pub smt_sorts: BTreeMap<String, ValueSort>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.body == other.body && self.choice == other.choice
    }
}

impl Rule {
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = self.head.atom().vars();
        for b in &self.body {
            b.collect_vars(&mut out);
        }
        out
    }

    /// Rule as the implication it abbreviates. Choice heads become `A | not A`.
    pub fn to_formula(&self) -> Formula {
        let head = if self.choice {
            let a = self.head.atom();
            Formula::Or(vec![a.clone(), Formula::not(a)])
        } else {
            self.head.atom()
        };
        Formula::implies(Formula::And(self.body.clone()), head)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub sorts: Vec<SortDecl>,
    pub objects: Vec<ObjectDecl>,
    pub constants: Vec<ConstantDecl>,
    pub variables: Vec<VariableDecl>,
    pub rules: Vec<Rule>,
    pub bindings: BTreeMap<String, BigInt>,
}

impl Program {
    pub fn constant(&self, name: &str) -> Option<&ConstantDecl> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn is_asp_variable(&self, name: &str) -> bool {
        self.variable(name).is_some_and(VariableDecl::is_asp)
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s.name == name)
    }

    /// Objects of a user sort in declaration order.
    pub fn objects_of(&self, sort: &str) -> Vec<Value> {
        let mut out: Vec<Value> = Vec::new();
        for decl in self.objects.iter().filter(|o| o.sort == sort) {
            for v in decl.values() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Domain of an ASP variable.
    pub fn variable_domain(&self, name: &str) -> Vec<Value> {
        match self.variable(name).map(|v| &v.sort) {
            Some(VarSort::User(s)) => self.objects_of(s),
            Some(VarSort::Value(ValueSort::Boolean)) => vec![Value::Bool(true), Value::Bool(false)],
            _ => Vec::new(),
        }
    }

    pub fn value_sort_of(&self, t: &Term) -> Option<&ValueSort> {
        match t {
            Term::App(name, _) => self.constant(name).map(|c| &c.value_sort),
            _ => None,
        }
    }
}

