//! Solver models and their decoding into constant assignments.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::emit::SymbolTable;
use super::sexp::Sexp;
use super::SmtError;
use crate::frontend::ast::*;

/// Fractional digits printed for reals without a short exact expansion.
pub const DISPLAY_DIGITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelValue {
    Bool(bool),
    Exact(Rational),
    /// A decimal approximation of an irrational value, correct to `digits` places.
    Approx { value: Rational, digits: usize },
    /// An algebraic number the solver printed symbolically.
    Algebraic(String),
}

impl ModelValue {
    /// Numeric value, approximate where the solver gave only an approximation.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ModelValue::Exact(r) | ModelValue::Approx { value: r, .. } => Some(r),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ModelValue::Bool(_) | ModelValue::Exact(_))
    }

    fn negate(self) -> Result<ModelValue, SmtError> {
        match self {
            ModelValue::Exact(r) => Ok(ModelValue::Exact(-r)),
            ModelValue::Approx { value, digits } => Ok(ModelValue::Approx { value: -value, digits }),
            ModelValue::Algebraic(s) => Ok(ModelValue::Algebraic(format!("(- {s})"))),
            ModelValue::Bool(_) => Err(SmtError::Parse("negated boolean".into())),
        }
    }
}

/// Symbol to value, as reported by `(get-model)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverModel {
    pub values: BTreeMap<String, ModelValue>,
}

fn parse_decimal(atom: &str) -> Option<ModelValue> {
    let (text, approx) = match atom.strip_suffix('?') {
        Some(t) => (t, true),
        None => (atom, false),
    };
    let (int_part, frac) = text.split_once('.').unwrap_or((text, ""));
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = frac.len();
    let numer: BigInt = format!("{int_part}{frac}").parse().ok()?;
    let value = Rational::new(numer, BigInt::from(10).pow(digits as u32));
    Some(if approx { ModelValue::Approx { value, digits } } else { ModelValue::Exact(value) })
}

/// Parses a value term: `true`, `3`, `2.5`, `1.414?`, `(- x)`, `(/ p q)` or `(root-obj ...)`.
pub fn parse_value(s: &Sexp) -> Result<ModelValue, SmtError> {
    let bad = || SmtError::Parse(format!("unsupported model value {s}"));
    match s {
        Sexp::Atom(a) => match a.as_str() {
            "true" => Ok(ModelValue::Bool(true)),
            "false" => Ok(ModelValue::Bool(false)),
            a => parse_decimal(a).ok_or_else(bad),
        },
        Sexp::List(items) => match (s.head(), items.len()) {
            (Some("-"), 2) => parse_value(&items[1])?.negate(),
            (Some("/"), 3) => match (parse_value(&items[1])?, parse_value(&items[2])?) {
                (ModelValue::Exact(p), ModelValue::Exact(q)) if !q.is_zero() => Ok(ModelValue::Exact(p / q)),
                _ => Err(bad()),
            },
            (Some("root-obj"), _) => Ok(ModelValue::Algebraic(s.to_string())),
            (Some("to_real"), 2) => parse_value(&items[1]),
            _ => Err(bad()),
        },
    }
}

impl SolverModel {
    /// Accepts `(model (define-fun ..) ..)`, a bare list of `define-fun`s, or a `get-value` response.
    pub fn from_sexp(s: &Sexp) -> Result<SolverModel, SmtError> {
        let items = s.list().ok_or_else(|| SmtError::Parse(format!("expected a model, found {s}")))?;
        let items = match s.head() {
            Some("model") => &items[1..],
            _ => items,
        };
        let mut values = BTreeMap::new();
        for item in items {
            let parts = item.list().ok_or_else(|| SmtError::Parse(format!("bad model entry {item}")))?;
            let (name, value) = match parts {
                [Sexp::Atom(d), Sexp::Atom(name), Sexp::List(params), _sort, value] if d == "define-fun" => {
                    if !params.is_empty() {
                        continue;
                    }
                    (name, value)
                }
                [Sexp::Atom(name), value] => (name, value),
                _ => return Err(SmtError::Parse(format!("bad model entry {item}"))),
            };
            values.insert(name.clone(), parse_value(value)?);
        }
        Ok(SolverModel { values })
    }

    /// Replaces symbolic algebraic values with the approximations in `decimal`.
    pub fn refine(&mut self, decimal: &SolverModel) -> Result<(), SmtError> {
        for (name, v) in self.values.iter_mut() {
            if let ModelValue::Algebraic(_) = v {
                match decimal.values.get(name) {
                    Some(d @ (ModelValue::Approx { .. } | ModelValue::Exact(_))) => *v = d.clone(),
                    _ => return Err(SmtError::Parse(format!("no decimal approximation for `{name}`"))),
                }
            }
        }
        Ok(())
    }

    pub fn has_algebraic(&self) -> bool {
        self.values.values().any(|v| matches!(v, ModelValue::Algebraic(_)))
    }

    /// Values of the declared constants, keyed by ground constant.
    pub fn assignment(&self, table: &SymbolTable) -> Result<BTreeMap<GroundConst, ModelValue>, SmtError> {
        table
            .declarations()
            .iter()
            .map(|d| {
                let v = self.values.get(&d.symbol).ok_or_else(|| SmtError::MissingSymbol(d.symbol.clone()))?;
                Ok((d.constant.clone(), v.clone()))
            })
            .collect()
    }
}

/// `10.0`, `2.5`, or ten fractional digits truncated toward zero.
fn format_real(r: &Rational) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let r = r.abs();
    let int = r.to_integer();
    let mut frac = r - Rational::from_integer(int.clone());
    if frac.is_zero() {
        return format!("{sign}{int}.0");
    }
    let mut digits = String::new();
    let ten = Rational::from_integer(BigInt::from(10));
    while !frac.is_zero() && digits.len() < DISPLAY_DIGITS {
        frac *= &ten;
        let d = frac.to_integer();
        digits.push_str(&d.to_string());
        frac -= Rational::from_integer(d);
    }
    let out = format!("{int}.{digits}");
    if sign.is_empty() || out.bytes().all(|b| b == b'0' || b == b'.') {
        out
    } else {
        format!("-{out}")
    }
}

/// Renders a value in the constant's sort.
pub fn format_value(v: &ModelValue, sort: &ValueSort) -> String {
    match (v, sort) {
        (ModelValue::Bool(b), _) => b.to_string(),
        (ModelValue::Exact(r), ValueSort::Int { .. }) if r.is_integer() => r.to_integer().to_string(),
        (ModelValue::Exact(r) | ModelValue::Approx { value: r, .. }, _) => format_real(r),
        (ModelValue::Algebraic(s), _) => s.clone(),
    }
}

/// The model as `(constant, printed value)` pairs, ordered by name and then arguments.
pub fn decode_model(model: &SolverModel, table: &SymbolTable) -> Result<Vec<(GroundConst, String)>, SmtError> {
    let assignment = model.assignment(table)?;
    let mut out: Vec<(GroundConst, String)> = table
        .declarations()
        .iter()
        .map(|d| (d.constant.clone(), format_value(&assignment[&d.constant], &d.value_sort)))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// The value for evaluation, with approximations standing in for irrationals.
pub fn to_value(v: &ModelValue) -> Option<Value> {
    match v {
        ModelValue::Bool(b) => Some(Value::Bool(*b)),
        ModelValue::Exact(r) | ModelValue::Approx { value: r, .. } => Some(Value::Num(r.clone())),
        ModelValue::Algebraic(_) => None,
    }
}

/// Renders an exact ground value the way solver values are rendered.
pub fn format_ground_value(v: &Value, sort: &ValueSort) -> String {
    match v {
        Value::Num(r) => format_value(&ModelValue::Exact(r.clone()), sort),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smt::sexp::parse_all;

    fn value(text: &str) -> ModelValue {
        parse_value(&parse_all(text).unwrap()[0]).unwrap()
    }

    fn real() -> ValueSort {
        ValueSort::Real { lo: int(0), hi: int(10) }
    }

    #[test]
    fn parses_solver_numerals() {
        assert_eq!(value("3"), ModelValue::Exact(int(3)));
        assert_eq!(value("(- 3)"), ModelValue::Exact(int(-3)));
        assert_eq!(value("(/ 5.0 2.0)"), ModelValue::Exact(Rational::new(5.into(), 2.into())));
        assert_eq!(value("(- (/ 1 3))"), ModelValue::Exact(Rational::new((-1).into(), 3.into())));
        assert!(matches!(value("1.41421356237309504880?"), ModelValue::Approx { digits: 20, .. }));
        assert!(matches!(value("(root-obj (+ (^ x 2) (- 2)) 2)"), ModelValue::Algebraic(_)));
    }

    #[test]
    fn reals_print_with_ten_truncated_decimals() {
        assert_eq!(format_value(&ModelValue::Exact(int(10)), &real()), "10.0");
        assert_eq!(format_value(&ModelValue::Exact(Rational::new(5.into(), 2.into())), &real()), "2.5");
        assert_eq!(format_value(&value("1.18350341907227405950?"), &real()), "1.1835034190");
        assert_eq!(format_value(&value("(- 7.89897948556635619639?)"), &real()), "-7.8989794855");
        assert_eq!(format_value(&ModelValue::Exact(Rational::new(1.into(), 3.into())), &real()), "0.3333333333");
        assert_eq!(format_value(&ModelValue::Bool(true), &ValueSort::Boolean), "true");
        let ints = ValueSort::Int { lo: 0.into(), hi: 9.into() };
        assert_eq!(format_value(&ModelValue::Exact(int(7)), &ints), "7");
    }

    #[test]
    fn models_refine_algebraic_values() {
        let exact = SolverModel::from_sexp(&parse_all("((define-fun x () Real (root-obj (+ (^ x 2) (- 2)) 2)) (define-fun p () Bool true))").unwrap()[0]).unwrap();
        let approx = SolverModel::from_sexp(&parse_all("((define-fun x () Real 1.41421356237309504880?) (define-fun p () Bool true))").unwrap()[0]).unwrap();
        let mut m = exact.clone();
        assert!(m.has_algebraic());
        m.refine(&approx).unwrap();
        assert!(!m.has_algebraic());
        assert_eq!(m.values["p"], ModelValue::Bool(true));
    }
}
