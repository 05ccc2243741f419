use super::{Code, Lint, Span};
use crate::algebra::{parse_decimal, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(Rational),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// longest first so that "==>" wins over "==" and "=="/":=" over "="
const SYMBOLS: &[&str] = &[
    "==>", ":=", "==", "!=", "<=", ">=", "&&", "||", "<", ">", "=", "!", "+", "-", "*", "/", "^",
    "(", ")", ",", ";", ".", "'",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, Lint> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span = |start: usize, end: usize, line: usize, col: usize| Span {
        start,
        end,
        line,
        column: col,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: span(start, i, line, col),
            });
            col += i - start;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let value = parse_decimal(&src[start..i]).expect("digits form a decimal");
            out.push(Token {
                tok: Tok::Num(value),
                span: span(start, i, line, col),
            });
            col += i - start;
            continue;
        }
        let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) else {
            let ch = src[i..].chars().next().expect("in bounds");
            return Err(Lint::new(
                Code::Syntax,
                format!("unexpected character '{ch}'"),
                span(i, i + ch.len_utf8(), line, col),
            ));
        };
        i += sym.len();
        out.push(Token {
            tok: Tok::Sym(sym),
            span: span(start, i, line, col),
        });
        col += sym.len();
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span(i, i, line, col),
    });
    Ok(out)
}
