//! Recursive-descent parser producing an unresolved syntax tree.
//!
//! Connective precedence, tightest first: `not`, `&`, `|`, `->`. The rule
//! arrow `<-` is statement-level and binds loosest of all.

use num_bigint::BigInt;

use super::ast::{ArithOp, CmpOp, Span};
use super::lexer::{Tok, Token};
use super::FrontendError;

#[derive(Clone, Debug, PartialEq)]
pub enum RawTerm {
    Int(BigInt, Span),
    Bool(bool, Span),
    Ident(String, Option<Vec<RawTerm>>, Span),
    Var(String, Span),
    Bin(ArithOp, Box<RawTerm>, Box<RawTerm>),
    Neg(Box<RawTerm>, Span),
}

impl RawTerm {
    pub fn span(&self) -> Span {
        match self {
            RawTerm::Int(_, s)
            | RawTerm::Bool(_, s)
            | RawTerm::Ident(_, _, s)
            | RawTerm::Var(_, s)
            | RawTerm::Neg(_, s) => *s,
            RawTerm::Bin(_, a, _) => a.span(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawFormula {
    Cmp(CmpOp, RawTerm, RawTerm),
    Neq(RawTerm, RawTerm),
    /// A term used as a formula: boolean shorthand for `t = true`.
    Bare(RawTerm),
    Not(Box<RawFormula>),
    And(Vec<RawFormula>),
    Or(Vec<RawFormula>),
    Implies(Box<RawFormula>, Box<RawFormula>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawSort {
    Named(String, Span),
    Int(RawTerm, RawTerm, Span),
    Real(RawTerm, RawTerm, Span),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawObject {
    Name(String),
    Range(RawTerm, RawTerm),
    Single(RawTerm),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawRule {
    /// `None` for constraints.
    pub head: Option<RawFormula>,
    pub body: Option<RawFormula>,
    pub choice: bool,
    pub span: Span,
}

/// `name(argument sorts) :: value sort`.
pub type RawConstant = (String, Vec<(String, Span)>, RawSort, Span);

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Sorts(Vec<(String, Span)>),
    Objects(Vec<(Vec<RawObject>, String, Span)>),
    Constants(Vec<RawConstant>),
    Variables(Vec<(Vec<String>, RawSort, Span)>),
    Rule(Box<RawRule>),
}

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> PResult<Span> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> FrontendError {
        FrontendError::Syntax {
            span: self.span(),
            message: format!("expected {what}, found {}", self.peek().describe()),
        }
    }

    pub fn parse_statements(&mut self) -> PResult<Vec<Statement>> {
        let mut out = Vec::new();
        while self.peek() != &Tok::Eof {
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> PResult<Statement> {
        if self.eat(&Tok::ColonDash) {
            let span = self.span();
            let section = match self.bump().tok {
                Tok::Ident(s) => s,
                _ => {
                    return Err(FrontendError::Syntax {
                        span,
                        message: "expected a declaration section name".into(),
                    })
                }
            };
            let stmt = match section.as_str() {
                "sorts" => Statement::Sorts(self.separated(Self::sort_item)?),
                "objects" => Statement::Objects(self.separated(Self::object_item)?),
                "constants" => Statement::Constants(
                    self.separated(Self::constant_item)?.into_iter().flatten().collect(),
                ),
                "variables" => Statement::Variables(self.separated(Self::variable_item)?),
                other => {
                    return Err(FrontendError::Syntax {
                        span,
                        message: format!("unknown declaration section `{other}`"),
                    })
                }
            };
            self.expect(&Tok::Dot, "`.` closing the declaration block")?;
            return Ok(stmt);
        }
        self.rule().map(|r| Statement::Rule(Box::new(r)))
    }

    fn separated<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.eat(&Tok::Semi) {
            out.push(item(self)?);
        }
        Ok(out)
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn sort_item(&mut self) -> PResult<(String, Span)> {
        self.ident("a sort name")
    }

    fn object_item(&mut self) -> PResult<(Vec<RawObject>, String, Span)> {
        let span = self.span();
        let mut objects = Vec::new();
        loop {
            let first = self.sum()?;
            if self.eat(&Tok::DotDot) {
                let hi = self.sum()?;
                objects.push(RawObject::Range(first, hi));
            } else if let RawTerm::Ident(name, None, _) = first {
                objects.push(RawObject::Name(name));
            } else {
                objects.push(RawObject::Single(first));
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::ColonColon, "`::`")?;
        let (sort, _) = self.ident("a sort name")?;
        Ok((objects, sort, span))
    }

    #[allow(clippy::type_complexity)]
    fn constant_item(&mut self) -> PResult<Vec<(String, Vec<(String, Span)>, RawSort, Span)>> {
        let mut sigs = Vec::new();
        loop {
            let (name, span) = self.ident("a constant name")?;
            let mut args = Vec::new();
            if self.eat(&Tok::LParen) {
                loop {
                    let arg_span = self.span();
                    let arg = match self.peek().clone() {
                        Tok::Ident(s) => {
                            self.bump();
                            s
                        }
                        _ => return Err(self.unexpected("an argument sort")),
                    };
                    if matches!(self.peek(), Tok::LBrack) {
                        return Err(FrontendError::ValueSortAsArgument { span: arg_span, sort: arg });
                    }
                    args.push((arg, arg_span));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RParen, "`)`")?;
            }
            sigs.push((name, args, span));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::ColonColon, "`::`")?;
        let sort = self.sort_ref()?;
        Ok(sigs.into_iter().map(|(n, a, s)| (n, a, sort.clone(), s)).collect())
    }

    fn variable_item(&mut self) -> PResult<(Vec<String>, RawSort, Span)> {
        let span = self.span();
        let mut names = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Var(v) => {
                    self.bump();
                    names.push(v);
                }
                _ => return Err(self.unexpected("a variable name")),
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::ColonColon, "`::`")?;
        Ok((names, self.sort_ref()?, span))
    }

    fn sort_ref(&mut self) -> PResult<RawSort> {
        let (name, span) = self.ident("a sort")?;
        if (name == "int" || name == "real") && self.eat(&Tok::LBrack) {
            let lo = self.sum()?;
            self.expect(&Tok::DotDot, "`..`")?;
            let hi = self.sum()?;
            self.expect(&Tok::RBrack, "`]`")?;
            return Ok(if name == "int" {
                RawSort::Int(lo, hi, span)
            } else {
                RawSort::Real(lo, hi, span)
            });
        }
        Ok(RawSort::Named(name, span))
    }

    fn rule(&mut self) -> PResult<RawRule> {
        let span = self.span();
        if self.eat(&Tok::LArrow) {
            let body = self.formula()?;
            self.expect(&Tok::Dot, "`.` ending the rule")?;
            return Ok(RawRule { head: None, body: Some(body), choice: false, span });
        }
        let (head, choice) = if self.eat(&Tok::LBrace) {
            let f = self.formula()?;
            self.expect(&Tok::RBrace, "`}`")?;
            (f, true)
        } else {
            (self.formula()?, false)
        };
        let rule = if self.eat(&Tok::LArrow) {
            let body = self.formula()?;
            RawRule { head: Some(head), body: Some(body), choice, span }
        } else {
            match head {
                RawFormula::Implies(body, head) if !choice => {
                    RawRule { head: Some(*head), body: Some(*body), choice, span }
                }
                head => RawRule { head: Some(head), body: None, choice, span },
            }
        };
        self.expect(&Tok::Dot, "`.` ending the rule")?;
        Ok(rule)
    }

    pub fn formula(&mut self) -> PResult<RawFormula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(RawFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<RawFormula> {
        let mut items = vec![self.conjunction()?];
        while self.eat(&Tok::Bar) {
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { RawFormula::Or(items) })
    }

    fn conjunction(&mut self) -> PResult<RawFormula> {
        let mut items = vec![self.unary()?];
        while self.eat(&Tok::Amp) {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { RawFormula::And(items) })
    }

    fn unary(&mut self) -> PResult<RawFormula> {
        if self.eat(&Tok::Not) {
            return Ok(RawFormula::Not(Box::new(self.unary()?)));
        }
        let save = self.pos;
        match self.atom() {
            Ok(f) => Ok(f),
            Err(err) => {
                self.pos = save;
                if self.eat(&Tok::LParen) {
                    let f = self.formula()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(f)
                } else {
                    Err(err)
                }
            }
        }
    }

    fn atom(&mut self) -> PResult<RawFormula> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Lt => Some(CmpOp::Lt),
            Tok::Le => Some(CmpOp::Le),
            Tok::Eq => Some(CmpOp::Eq),
            Tok::Ge => Some(CmpOp::Ge),
            Tok::Gt => Some(CmpOp::Gt),
            Tok::Neq => None,
            _ => {
                return match lhs {
                    RawTerm::Ident(..) | RawTerm::Bool(..) => Ok(RawFormula::Bare(lhs)),
                    _ => Err(self.unexpected("a comparison operator")),
                }
            }
        };
        self.bump();
        let rhs = self.sum()?;
        Ok(match op {
            Some(op) => RawFormula::Cmp(op, lhs, rhs),
            None => RawFormula::Neq(lhs, rhs),
        })
    }

    pub fn sum(&mut self) -> PResult<RawTerm> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                // `<-` and `->` are lexed as single tokens, so this is a genuine minus.
                Tok::Minus => ArithOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.product()?;
            lhs = RawTerm::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> PResult<RawTerm> {
        let mut lhs = self.negation()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.negation()?;
            lhs = RawTerm::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> PResult<RawTerm> {
        if self.peek() == &Tok::Minus {
            let span = self.bump().span;
            return Ok(RawTerm::Neg(Box::new(self.negation()?), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<RawTerm> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(RawTerm::Int(n, span))
            }
            Tok::True => {
                self.bump();
                Ok(RawTerm::Bool(true, span))
            }
            Tok::False => {
                self.bump();
                Ok(RawTerm::Bool(false, span))
            }
            Tok::Var(v) => {
                self.bump();
                Ok(RawTerm::Var(v, span))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.peek() == &Tok::LParen && self.peek_at(1) != &Tok::RParen {
                    self.bump();
                    let mut args = vec![self.sum()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.sum()?);
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(RawTerm::Ident(name, Some(args), span))
                } else {
                    Ok(RawTerm::Ident(name, None, span))
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.sum()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}
