//! S-expressions as printed by SMT solvers.

use std::fmt;
use std::io::BufRead;

use super::SmtError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            Sexp::Atom(_) => None,
        }
    }

    /// The head atom of a list, e.g. `define-fun`.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, s) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Incremental tokenizer state shared by the string parser and the stream reader.
#[derive(Default)]
struct Builder {
    stack: Vec<Vec<Sexp>>,
    token: String,
    in_quote: Option<char>,
    in_comment: bool,
    done: Vec<Sexp>,
}

impl Builder {
    fn emit(&mut self, s: Sexp) {
        match self.stack.last_mut() {
            Some(top) => top.push(s),
            None => self.done.push(s),
        }
    }

    fn flush(&mut self) {
        if !self.token.is_empty() {
            let t = std::mem::take(&mut self.token);
            self.emit(Sexp::Atom(t));
        }
    }

    fn feed(&mut self, c: char) -> Result<(), SmtError> {
        if self.in_comment {
            if c == '\n' {
                self.in_comment = false;
            }
            return Ok(());
        }
        if let Some(q) = self.in_quote {
            self.token.push(c);
            if c == q {
                self.in_quote = None;
            }
            return Ok(());
        }
        match c {
            '(' => {
                self.flush();
                self.stack.push(Vec::new());
            }
            ')' => {
                self.flush();
                let items = self.stack.pop().ok_or_else(|| SmtError::Parse("unbalanced `)`".into()))?;
                self.emit(Sexp::List(items));
            }
            ';' => {
                self.flush();
                self.in_comment = true;
            }
            '"' | '|' => {
                self.token.push(c);
                self.in_quote = Some(c);
            }
            c if c.is_whitespace() => self.flush(),
            c => self.token.push(c),
        }
        Ok(())
    }

    fn idle(&self) -> bool {
        self.stack.is_empty() && self.in_quote.is_none()
    }
}

/// Parses every s-expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SmtError> {
    let mut b = Builder::default();
    for c in text.chars() {
        b.feed(c)?;
    }
    b.flush();
    if !b.idle() {
        return Err(SmtError::Parse("unterminated s-expression".into()));
    }
    Ok(b.done)
}

/// Reads one s-expression at a time from a solver's output stream.
pub struct SexpReader<R> {
    inner: R,
    builder: Builder,
}

impl<R: BufRead> SexpReader<R> {
    pub fn new(inner: R) -> Self {
        SexpReader { inner, builder: Builder::default() }
    }

    /// The next complete s-expression, or `None` at end of stream.
    pub fn next_sexp(&mut self) -> Result<Option<Sexp>, SmtError> {
        loop {
            if !self.builder.done.is_empty() {
                return Ok(Some(self.builder.done.remove(0)));
            }
            let mut line = String::new();
            let n = self.inner.read_line(&mut line).map_err(|e| SmtError::Io(e.to_string()))?;
            if n == 0 {
                self.builder.flush();
                return Ok((!self.builder.done.is_empty()).then(|| self.builder.done.remove(0)));
            }
            for c in line.chars() {
                self.builder.feed(c)?;
            }
            if self.builder.idle() {
                self.builder.flush();
            }
        }
    }
}
