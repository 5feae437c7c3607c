use std::fmt;

use super::{Expr, Func, Var};

/// Syntax error with location inside the expression source.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    /// 1-based line.
    pub line: usize,
    /// 1-based column.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at line {}, column {} (offset {})",
            self.message, self.line, self.column, self.offset
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError {
        offset,
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match ch {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| error_at(src, start, format!("malformed number `{text}`")))?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let c = src[start..].chars().next().unwrap_or('?');
                return Err(error_at(src, start, format!("unexpected character `{c}`")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        error_at(self.src, self.offset(), message)
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Tok::End => self.err("unexpected end of input"),
            t => self.err(format!("unexpected token {t:?}")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let (paren, neg) = match self.peek() {
            Tok::LParen => {
                self.bump();
                let neg = if *self.peek() == Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                (true, neg)
            }
            Tok::Minus => {
                self.bump();
                (false, true)
            }
            _ => (false, false),
        };
        let n = match self.bump() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= 64.0 => v as i32,
            Tok::Num(_) => return Err(error_at(self.src, at, "exponent must be a small integer")),
            _ => return Err(error_at(self.src, at, "expected integer exponent")),
        };
        if paren {
            if *self.peek() != Tok::RParen {
                return Err(self.err("expected `)`"));
            }
            self.bump();
        }
        Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(v) = Var::from_name(&name) {
                    return Ok(Expr::Var(v));
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(self.err(format!("expected `(` after `{name}`")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return Err(self.err("expected `)`"));
                    }
                    self.bump();
                    return Ok(Expr::Func(f, Box::new(arg)));
                }
                Err(error_at(self.src, at, format!("unknown identifier `{name}`")))
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses an expression in `x1, x2, x3, t, u1, u2`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { src, toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_variables_and_products() {
        assert_eq!(parse("x2").unwrap(), Expr::Var(Var::X2));
        assert_eq!(
            parse("exp(x3)*x1").unwrap(),
            Expr::Mul(
                Box::new(Expr::Func(Func::Exp, Box::new(Expr::Var(Var::X3)))),
                Box::new(Expr::Var(Var::X1))
            )
        );
    }

    #[test]
    fn trailing_operator_reports_offset() {
        let e = parse("x1 +").unwrap_err();
        assert_eq!(e.offset, 4);
        assert_eq!((e.line, e.column), (1, 5));
        assert!(e.message.contains("end of input"));
    }

    #[test]
    fn unknown_identifier() {
        let e = parse("2*foo").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.message.contains("foo"));
    }

    #[test]
    fn multiline_location() {
        let e = parse("x1 +\n  * x2").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn precedence() {
        // -x^2 is -(x^2); a-b-c is (a-b)-c
        assert_eq!(
            parse("-x1^2").unwrap(),
            Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var(Var::X1)), 2)))
        );
        assert_eq!(parse("x1^-2").unwrap(), parse("x1^(-2)").unwrap());
        assert!(parse("x1^2.5").is_err());
        assert_eq!(parse("1e-3").unwrap(), Expr::Const(1e-3));
        assert_eq!(parse("2*pi").unwrap(), Expr::Mul(Box::new(Expr::Const(2.0)), Box::new(Expr::Const(std::f64::consts::PI))));
    }
}
