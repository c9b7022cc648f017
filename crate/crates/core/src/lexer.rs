//! Tokenizer shared by the gradual and sealing front ends.

use crate::syntax::Span;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Identifier; `primes` counts trailing `'`.
    Ident(String, u32),
    Int(i64),
    Lambda,
    BigLambda,
    Forall,
    Exists,
    Dot,
    Colon,
    ColonColon,
    Comma,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Eq,
    EqEq,
    Arrow,
    Star,
    Plus,
    Minus,
    AndAnd,
    OrOr,
    Question,
    Caret,
    Eof,
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("parse error at {}..{}: {message}", span.start, span.end)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into() }
    }
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let end_of = |k: usize| chars.get(k).map_or(src.len(), |c| c.0);
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        // line comments
        if c == '-' && chars.get(i + 1).map(|c| c.1) == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).map(|c| c.1);
        let (tok, len) = match c {
            '\\' => (Tok::Lambda, 1),
            'λ' => (Tok::Lambda, 1),
            'Λ' => (Tok::BigLambda, 1),
            '∀' => (Tok::Forall, 1),
            '∃' => (Tok::Exists, 1),
            '/' if next == Some('\\') => (Tok::BigLambda, 2),
            '.' => (Tok::Dot, 1),
            ':' if next == Some(':') => (Tok::ColonColon, 2),
            ':' => (Tok::Colon, 1),
            ',' => (Tok::Comma, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '<' => (Tok::Lt, 1),
            '⟨' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            '⟩' => (Tok::Gt, 1),
            '=' if next == Some('=') => (Tok::EqEq, 2),
            '=' => (Tok::Eq, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '→' => (Tok::Arrow, 1),
            '*' | '×' => (Tok::Star, 1),
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '&' if next == Some('&') => (Tok::AndAnd, 2),
            '|' if next == Some('|') => (Tok::OrOr, 2),
            '?' => (Tok::Question, 1),
            '^' => (Tok::Caret, 1),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let text = &src[pos..end_of(j)];
                let n: i64 = text.parse().map_err(|_| {
                    ParseError::new(Span::new(pos, end_of(j)), "integer literal out of range")
                })?;
                (Tok::Int(n), j - i)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_') {
                    j += 1;
                }
                let text = src[pos..end_of(j)].to_string();
                let mut primes = 0;
                while j < chars.len() && chars[j].1 == '\'' {
                    primes += 1;
                    j += 1;
                }
                let tok = match text.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(text, primes),
                };
                (tok, j - i)
            }
            _ => {
                return Err(ParseError::new(
                    Span::new(pos, pos + c.len_utf8()),
                    format!("unexpected character {c:?}"),
                ))
            }
        };
        out.push((tok, Span::new(pos, end_of(i + len))));
        i += len;
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_symbols_and_primes() {
        let toks: Vec<Tok> = lex("/\\X'. x :: ? -> a0").unwrap().into_iter().map(|t| t.0).collect();
        assert_eq!(
            toks,
            vec![
                Tok::BigLambda,
                Tok::Ident("X".into(), 1),
                Tok::Dot,
                Tok::Ident("x".into(), 0),
                Tok::ColonColon,
                Tok::Question,
                Tok::Arrow,
                Tok::Ident("a0".into(), 0),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn skips_comments() {
        let toks = lex("1 -- hi\n+ 2").unwrap();
        assert_eq!(toks.len(), 4);
    }
}
