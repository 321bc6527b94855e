use num_bigint::BigInt;

use super::ast::Span;
use super::FrontendError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Var(String),
    Int(BigInt),
    Not,
    True,
    False,
    ColonDash,
    ColonColon,
    Dot,
    DotDot,
    Semi,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Amp,
    Bar,
    Arrow,
    LArrow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Neq,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Not => "not",
            Tok::True => "true",
            Tok::False => "false",
            Tok::ColonDash => ":-",
            Tok::ColonColon => "::",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::LArrow => "<-",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.as_str() {
                "not" => Tok::Not,
                "true" => Tok::True,
                "false" => Tok::False,
                _ if c.is_ascii_uppercase() || c == '_' => Tok::Var(word),
                _ => Tok::Ident(word),
            };
            out.push(Token { tok, span });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Int(digits.parse().unwrap()), span });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            (':', Some('-')) => (Tok::ColonDash, 2),
            (':', Some(':')) => (Tok::ColonColon, 2),
            ('.', Some('.')) => (Tok::DotDot, 2),
            ('.', _) => (Tok::Dot, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            ('&', _) => (Tok::Amp, 1),
            ('|', _) => (Tok::Bar, 1),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('<', Some('-')) => (Tok::LArrow, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('<', _) => (Tok::Lt, 1),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('>', _) => (Tok::Gt, 1),
            ('!', Some('=')) => (Tok::Neq, 2),
            ('=', _) => (Tok::Eq, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            _ => {
                return Err(FrontendError::Lex {
                    span,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        i += width;
        col += width;
        out.push(Token { tok, span });
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ranges_and_rule_terminators() {
        assert_eq!(
            toks("0..st-1 :: astep. amt(0) = 5."),
            vec![
                Tok::Int(0.into()),
                Tok::DotDot,
                Tok::Ident("st".into()),
                Tok::Minus,
                Tok::Int(1.into()),
                Tok::ColonColon,
                Tok::Ident("astep".into()),
                Tok::Dot,
                Tok::Ident("amt".into()),
                Tok::LParen,
                Tok::Int(0.into()),
                Tok::RParen,
                Tok::Eq,
                Tok::Int(5.into()),
                Tok::Dot,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn arrows_and_comparisons() {
        assert_eq!(
            toks("<- -> <= >= != < > :- % comment\nnot"),
            vec![
                Tok::LArrow,
                Tok::Arrow,
                Tok::Le,
                Tok::Ge,
                Tok::Neq,
                Tok::Lt,
                Tok::Gt,
                Tok::ColonDash,
                Tok::Not,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_position_of_bad_character() {
        match tokenize("f = 1.\n  g = $.") {
            Err(FrontendError::Lex { span, .. }) => assert_eq!(span, Span { line: 2, col: 7 }),
            other => panic!("unexpected {other:?}"),
        }
    }
}
