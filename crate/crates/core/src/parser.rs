//! Recursive-descent parser for types and gradual source terms.

use crate::lexer::{lex, ParseError, Tok};
use crate::syntax::{Const, Op, Span, Term, TermKind};
use crate::types::{Base, Ty, TyVar, TypeName};

const KEYWORDS: &[&str] = &[
    "let", "in", "if", "then", "else", "pack", "as", "unpack", "fst", "snd", "not", "true",
    "false", "unit", "Int", "Bool", "Unit",
];

pub(crate) struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    pub(crate) fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    pub(crate) fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.span(), msg))
    }

    pub(crate) fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    pub(crate) fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s, 0) if s == kw)
    }

    pub(crate) fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {:?}", self.peek()))
        }
    }

    pub(crate) fn ident(&mut self, reserved: &[&str]) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s, 0) if !reserved.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected identifier, found {t:?}")),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {:?}", self.peek()))
        }
    }

    fn tyvar(&mut self) -> Result<TyVar, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s, primes)
                if s.starts_with(|c: char| c.is_uppercase()) && !KEYWORDS.contains(&s.as_str()) =>
            {
                self.bump();
                Ok(TyVar { name: s, id: primes })
            }
            t => self.err(format!("expected type variable, found {t:?}")),
        }
    }

    pub(crate) fn ty(&mut self) -> Result<Ty, ParseError> {
        match self.peek() {
            Tok::Forall | Tok::Exists => {
                let is_forall = *self.peek() == Tok::Forall;
                self.bump();
                let x = self.tyvar()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = Box::new(self.ty()?);
                Ok(if is_forall { Ty::Forall(x, body) } else { Ty::Exists(x, body) })
            }
            _ => {
                let lhs = self.ty_prod()?;
                if *self.peek() == Tok::Arrow {
                    self.bump();
                    let rhs = self.ty()?;
                    Ok(Ty::Arrow(Box::new(lhs), Box::new(rhs)))
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    fn ty_prod(&mut self) -> Result<Ty, ParseError> {
        let lhs = self.ty_atom()?;
        if *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.ty_prod()?;
            Ok(Ty::Pair(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn ty_atom(&mut self) -> Result<Ty, ParseError> {
        match self.peek().clone() {
            Tok::Question => {
                self.bump();
                Ok(Ty::Unknown)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(s, primes) => match s.as_str() {
                "Int" => {
                    self.bump();
                    Ok(Ty::Base(Base::Int))
                }
                "Bool" => {
                    self.bump();
                    Ok(Ty::Base(Base::Bool))
                }
                "Unit" => {
                    self.bump();
                    Ok(Ty::Base(Base::Unit))
                }
                _ if primes == 0 && type_name_index(&s).is_some() => {
                    self.bump();
                    let a = TypeName(type_name_index(&s).unwrap());
                    if *self.peek() == Tok::Caret {
                        self.bump();
                        let under = self.ty_atom()?;
                        Ok(Ty::Sealed(a, Box::new(under)))
                    } else {
                        Ok(Ty::Name(a))
                    }
                }
                _ => Ok(Ty::Var(self.tyvar()?)),
            },
            t => self.err(format!("expected type, found {t:?}")),
        }
    }

    // Terms.

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.span().start;
        let kind = match self.peek().clone() {
            Tok::Lambda => {
                self.bump();
                let x = self.ident(KEYWORDS)?;
                self.expect(Tok::Colon, "`:` after lambda binder")?;
                let g = self.ty()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.term()?;
                TermKind::Lam(x, g, Box::new(body))
            }
            Tok::BigLambda => {
                self.bump();
                let x = self.tyvar()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.term()?;
                TermKind::TyLam(x, Box::new(body))
            }
            Tok::Ident(s, 0) if s == "let" => {
                self.bump();
                let x = self.ident(KEYWORDS)?;
                let g = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Eq, "`=`")?;
                let t1 = self.term()?;
                self.expect_kw("in")?;
                let t2 = self.term()?;
                TermKind::Let(x, g, Box::new(t1), Box::new(t2))
            }
            Tok::Ident(s, 0) if s == "if" => {
                self.bump();
                let c = self.term()?;
                self.expect_kw("then")?;
                let a = self.term()?;
                self.expect_kw("else")?;
                let b = self.term()?;
                TermKind::If(Box::new(c), Box::new(a), Box::new(b))
            }
            Tok::Ident(s, 0) if s == "unpack" => {
                self.bump();
                self.expect(Tok::Lt, "`<`")?;
                let x = self.tyvar()?;
                self.expect(Tok::Comma, "`,`")?;
                let y = self.ident(KEYWORDS)?;
                self.expect(Tok::Gt, "`>`")?;
                self.expect(Tok::Eq, "`=`")?;
                let t1 = self.term()?;
                self.expect_kw("in")?;
                let t2 = self.term()?;
                TermKind::Unpack(x, y, Box::new(t1), Box::new(t2))
            }
            _ => return self.asc_level(),
        };
        Ok(Term { kind, span: Span::new(start, self.prev_end()) })
    }

    fn asc_level(&mut self) -> Result<Term, ParseError> {
        let mut t = self.infix(1)?;
        while *self.peek() == Tok::ColonColon {
            self.bump();
            let g = self.ty()?;
            let span = Span::new(t.span.start, self.prev_end());
            t = Term { kind: TermKind::Asc(Box::new(t), g), span };
        }
        Ok(t)
    }

    fn infix_op(&self) -> Option<Op> {
        Some(match self.peek() {
            Tok::OrOr => Op::Or,
            Tok::AndAnd => Op::And,
            Tok::Lt => Op::Lt,
            Tok::EqEq => Op::Eq,
            Tok::Plus => Op::Add,
            Tok::Minus => Op::Sub,
            Tok::Star => Op::Mul,
            _ => return None,
        })
    }

    /// Precedence climbing over the binary operators. Comparisons do not chain.
    fn infix(&mut self, min: u8) -> Result<Term, ParseError> {
        let mut lhs = self.app()?;
        while let Some(op) = self.infix_op() {
            let p = op.prec();
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.infix(p + 1)?;
            let span = lhs.span.join(rhs.span);
            lhs = Term { kind: TermKind::Op(op, vec![lhs, rhs]), span };
            if p == 3 && matches!(self.infix_op(), Some(o) if o.prec() == 3) {
                return self.err("comparison operators do not associate");
            }
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Int(_) | Tok::LParen => true,
            Tok::Ident(s, 0) => {
                !matches!(s.as_str(), "in" | "then" | "else" | "as" | "let" | "if" | "unpack")
            }
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut f = self.unary()?;
        loop {
            if *self.peek() == Tok::LBrack {
                self.bump();
                let g = self.ty()?;
                self.expect(Tok::RBrack, "`]`")?;
                let span = Span::new(f.span.start, self.prev_end());
                f = Term { kind: TermKind::TyApp(Box::new(f), g), span };
            } else if self.starts_atom() {
                let a = self.unary()?;
                let span = f.span.join(a.span);
                f = Term { kind: TermKind::App(Box::new(f), Box::new(a)), span };
            } else {
                return Ok(f);
            }
        }
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        let start = self.span().start;
        let kind = if self.is_kw("fst") || self.is_kw("snd") {
            let i = if self.is_kw("fst") { 1 } else { 2 };
            self.bump();
            TermKind::Proj(i, Box::new(self.unary()?))
        } else if self.is_kw("not") {
            self.bump();
            TermKind::Op(Op::Not, vec![self.unary()?])
        } else {
            return self.atom();
        };
        Ok(Term { kind, span: Span::new(start, self.prev_end()) })
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let start = self.span().start;
        let kind = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                TermKind::Const(Const::Int(n))
            }
            Tok::LParen => {
                self.bump();
                if *self.peek() == Tok::Minus {
                    if let Tok::Int(n) = *self.peek_at(1) {
                        if *self.peek_at(2) == Tok::RParen {
                            self.bump();
                            self.bump();
                            self.bump();
                            return Ok(Term {
                                kind: TermKind::Const(Const::Int(-n)),
                                span: Span::new(start, self.prev_end()),
                            });
                        }
                    }
                }
                let t = self.term()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let u = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    TermKind::Pair(Box::new(t), Box::new(u))
                } else {
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Term { kind: t.kind, span: Span::new(start, self.prev_end()) });
                }
            }
            Tok::Ident(s, 0) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    TermKind::Const(Const::Bool(s == "true"))
                }
                "unit" => {
                    self.bump();
                    TermKind::Const(Const::Unit)
                }
                "pack" => {
                    self.bump();
                    self.expect(Tok::Lt, "`<`")?;
                    let w = self.ty()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let t = self.term()?;
                    self.expect(Tok::Gt, "`>`")?;
                    self.expect_kw("as")?;
                    let as_span = self.span();
                    let g = match self.ty()? {
                        Ty::Unknown => Ty::Exists(TyVar::new("X"), Box::new(Ty::Unknown)),
                        g @ Ty::Exists(..) => g,
                        _ => {
                            return Err(ParseError::new(
                                as_span,
                                "package type must be existential or `?`",
                            ))
                        }
                    };
                    TermKind::Pack(w, Box::new(t), g)
                }
                _ => TermKind::Var(self.ident(KEYWORDS)?),
            },
            t => return self.err(format!("expected term, found {t:?}")),
        };
        Ok(Term { kind, span: Span::new(start, self.prev_end()) })
    }
}

fn type_name_index(s: &str) -> Option<u32> {
    let digits = s.strip_prefix('a')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn parse_type(src: &str) -> Result<Ty, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_gsf(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::build::*;
    use crate::types::{arrow, forall, tvar};

    #[test]
    fn parses_identity() {
        let t = parse_gsf("/\\X.\\x:X.x").unwrap();
        assert_eq!(t, tylam("X", lam("x", tvar("X"), var("x"))));
    }

    #[test]
    fn parses_let_program() {
        let t = parse_gsf("let f:forall X.X->X = /\\X.\\x:X.x in (f [Int] 1) + 1").unwrap();
        let id = forall("X", arrow(tvar("X"), tvar("X")));
        let expected = let_(
            "f",
            Some(id),
            tylam("X", lam("x", tvar("X"), var("x"))),
            op(
                Op::Add,
                vec![app(tyapp(var("f"), crate::types::int()), int(1)), int(1)],
            ),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(parse_gsf("\\x:.").is_err());
    }

    #[test]
    fn ascription_is_loosest() {
        let t = parse_gsf("\\x:?. x + 1 :: Int").unwrap();
        assert_eq!(
            t,
            lam(
                "x",
                Ty::Unknown,
                asc(op(Op::Add, vec![var("x"), int(1)]), crate::types::int())
            )
        );
    }

    #[test]
    fn types_round_trip() {
        for s in [
            "forall X.X->X",
            "(forall X.X)->?",
            "Int*Bool*?",
            "(Int->Int)*Bool",
            "exists X.X*(X->X)*(X->Bool)",
            "a0^a1^Int",
            "Int->forall X.X",
        ] {
            let t = parse_type(s).unwrap();
            assert_eq!(t.to_string(), s);
        }
    }
}
