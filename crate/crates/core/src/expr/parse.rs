//! Pratt parser for the ASCII expression grammar.
//!
//! ```text
//! expr    := expr ('+' | '-') expr | expr ('*' | '/') expr | '-' expr
//!          | expr '^' expr | '(' expr ')' | number | ident | call
//! call    := ident (';' digits)* '(' expr (',' expr)* ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus. Exponents
//! must be parameter expressions. `zeta`/`z`, `Psi`/`Phi` and `PsiS`/`PhiS`
//! name the base variables; `f;1;2(u, v)` is the mixed partial of `f` in its
//! first and second argument.

use thiserror::Error;

use num_bigint::BigInt;

use super::{Context, Expr, FuncApp, RatFunc, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("invalid expression at {pos}: {msg}")]
    Invalid { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn new(text: &str) -> Result<Self, ParseError> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                toks.push((Tok::Num(s.parse().expect("digits")), pos));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                toks.push((Tok::Ident(s), pos));
            } else if "+-*/^(),;".contains(c) {
                toks.push((Tok::Op(c), pos));
                i += 1;
            } else {
                return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{c}`") });
            }
        }
        toks.push((Tok::Eof, text.len()));
        Ok(Lexer { toks })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ctx: &'a Context,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        let (t, pos) = self.next();
        if t == Tok::Op(c) {
            Ok(())
        } else {
            Err(ParseError::Syntax { pos, msg: format!("expected `{c}`, found {}", describe(&t)) })
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::Op(c) if "+-*/^".contains(*c) => *c,
                _ => break,
            };
            let (l_bp, r_bp) = match op {
                '+' | '-' => (10, 11),
                '*' | '/' => (20, 21),
                '^' => (31, 30),
                _ => unreachable!(),
            };
            if l_bp < min_bp {
                break;
            }
            let pos = self.pos();
            self.next();
            let rhs = self.expr(r_bp)?;
            lhs = match op {
                '+' => lhs.add(&rhs),
                '-' => lhs.sub(&rhs),
                '*' => lhs.mul(&rhs),
                '/' => {
                    if rhs.is_zero() {
                        return Err(ParseError::Invalid { pos, msg: "division by zero".into() });
                    }
                    let inv = rhs.recip().map_err(|e| ParseError::Invalid { pos, msg: e.to_string() })?;
                    lhs.mul(&inv)
                }
                '^' => {
                    let e = rhs.as_constant().ok_or_else(|| ParseError::Invalid {
                        pos,
                        msg: "exponent must not depend on variables".into(),
                    })?;
                    lhs.pow(&e).map_err(|e| ParseError::Invalid { pos, msg: e.to_string() })?
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.next();
        match tok {
            Tok::Num(n) => Ok(Expr::constant(RatFunc::constant(Rational::from_integer(n)))),
            Tok::Op('-') => Ok(self.expr(25)?.neg()),
            Tok::Op('+') => self.expr(25),
            Tok::Op('(') => {
                let e = self.expr(0)?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, pos),
            t => Err(ParseError::Syntax { pos, msg: format!("unexpected {}", describe(&t)) }),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Expr, ParseError> {
        if self.ctx.is_func(&name) {
            let mut diffs = Vec::new();
            while self.peek() == &Tok::Op(';') {
                self.next();
                match self.next() {
                    (Tok::Num(k), p) => {
                        let k: usize = k
                            .try_into()
                            .map_err(|_| ParseError::Syntax { pos: p, msg: "derivative index too large".into() })?;
                        if k == 0 {
                            return Err(ParseError::Syntax { pos: p, msg: "derivative indices start at 1".into() });
                        }
                        diffs.push((k, p));
                    }
                    (t, p) => {
                        return Err(ParseError::Syntax { pos: p, msg: format!("expected index, found {}", describe(&t)) })
                    }
                }
            }
            self.expect('(')?;
            let mut args = vec![self.expr(0)?];
            while self.peek() == &Tok::Op(',') {
                self.next();
                args.push(self.expr(0)?);
            }
            self.expect(')')?;
            let mut app = FuncApp::new(&name, args);
            for (k, p) in diffs {
                if k > app.args.len() {
                    return Err(ParseError::Invalid { pos: p, msg: format!("`{name}` has no argument {k}") });
                }
                app.derivs[k - 1] += 1;
            }
            return Ok(Expr::func_app(app));
        }
        if let Some(v) = Var::from_name(&name) {
            return Ok(Expr::var(v));
        }
        if self.ctx.param_kind(&name).is_some() {
            return Ok(Expr::param(&name));
        }
        Err(ParseError::UnknownIdentifier { pos, name })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses `text` into canonical form.
pub fn parse(text: &str, ctx: &Context) -> Result<Expr, ParseError> {
    let lexer = Lexer::new(text)?;
    let mut p = Parser { toks: lexer.toks, at: 0, ctx };
    let e = p.expr(0)?;
    match p.peek() {
        Tok::Eof => Ok(e),
        t => Err(ParseError::Syntax { pos: p.pos(), msg: format!("unexpected {}", describe(t)) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::standard()
    }

    #[test]
    fn zero_literal() {
        assert!(parse("0", &ctx()).unwrap().is_zero());
    }

    #[test]
    fn two_terms() {
        let e = parse("2*t*z - r^2", &ctx()).unwrap();
        assert_eq!(e.num_terms(), 2);
        assert_eq!(e, parse("-r^2 + 2*zeta*t", &ctx()).unwrap());
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("-t^2", &ctx()).unwrap(), parse("-(t^2)", &ctx()).unwrap());
        assert_eq!(parse("2^3^2", &ctx()).unwrap(), Expr::int(512));
        assert_eq!(parse("t/2/r", &ctx()).unwrap(), parse("t*r^(-1)/2", &ctx()).unwrap());
    }

    #[test]
    fn errors_carry_position() {
        match parse("t + q", &ctx()) {
            Err(ParseError::UnknownIdentifier { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "q");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("t +", &ctx()), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse("t^r", &ctx()), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse("t $ r", &ctx()), Err(ParseError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn derivative_syntax() {
        let e = parse("f;1;2;2(t, r)", &ctx()).unwrap();
        let (m, _) = e.terms().next().unwrap();
        let (a, _) = m.factors().next().unwrap();
        match a {
            super::super::Atom::Func(app) => assert_eq!(app.derivs, vec![1, 2]),
            _ => panic!("expected function atom"),
        }
        assert!(parse("f;3(t)", &ctx()).is_err());
    }
}
