//! Lexer and recursive-descent parser for metric and map files.

use num_complex::Complex64;

use super::expr::{Expr, Func};
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Sep,
    End,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> GeomError {
    GeomError::Syntax {
        line,
        column: col,
        message: message.into(),
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: start.0,
                col: start.1,
            })
        };
        match c {
            '\n' => {
                push(&mut out, Tok::Sep);
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {}
            ';' => push(&mut out, Tok::Sep),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '[' => push(&mut out, Tok::LBracket),
            ']' => push(&mut out, Tok::RBracket),
            '+' => push(&mut out, Tok::Plus),
            '-' => push(&mut out, Tok::Minus),
            '*' => push(&mut out, Tok::Star),
            '/' => push(&mut out, Tok::Slash),
            '^' => push(&mut out, Tok::Caret),
            '=' => push(&mut out, Tok::Eq),
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let v: f64 = s
                    .parse()
                    .map_err(|_| syntax(line, col, format!("malformed number '{s}'")))?;
                let imag = j < chars.len()
                    && chars[j] == 'i'
                    && !chars.get(j + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_');
                if imag {
                    j += 1;
                }
                push(&mut out, if imag { Tok::Imag(v) } else { Tok::Num(v) });
                col += j - i;
                i = j;
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                push(&mut out, Tok::Ident(chars[i..j].iter().collect()));
                col += j - i;
                i = j;
                continue;
            }
            other => return Err(syntax(line, col, format!("unexpected character '{other}'"))),
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Self { toks, pos: 0 }
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_end(&self) -> bool {
        matches!(self.peek().tok, Tok::End)
    }

    pub(crate) fn error_here(&self, message: impl Into<String>) -> GeomError {
        let t = self.peek();
        syntax(t.line, t.col, message)
    }

    pub(crate) fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        if self.peek().tok == want {
            Ok(self.bump())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }

    pub(crate) fn skip_seps(&mut self) {
        while matches!(self.peek().tok, Tok::Sep) {
            self.bump();
        }
    }

    pub(crate) fn parse_int(&mut self) -> Result<i64> {
        let neg = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().tok {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() < 1e9 => {
                self.bump();
                Ok(if neg { -(v as i64) } else { v as i64 })
            }
            _ => Err(self.error_here("expected an integer")),
        }
    }

    pub(crate) fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.parse_term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.parse_term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.parse_factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.parse_factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let k = self.parse_int()?;
            let k = i32::try_from(k).map_err(|_| self.error_here("exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    /// Matches `( decimal ('+'|'-') decimal 'i' )` without consuming anything.
    fn complex_literal_ahead(&self) -> Option<Complex64> {
        match (self.peek_at(1), self.peek_at(2), self.peek_at(3), self.peek_at(4)) {
            (Tok::Num(re), Tok::Plus, Tok::Imag(im), Tok::RParen) => Some(Complex64::new(*re, *im)),
            (Tok::Num(re), Tok::Minus, Tok::Imag(im), Tok::RParen) => {
                Some(Complex64::new(*re, -*im))
            }
            _ => None,
        }
    }

    /// Parses `( expr )` after the opening parenthesis has been seen; a
    /// missing closer is reported at the opening parenthesis.
    fn parse_parenthesised(&mut self) -> Result<Expr> {
        let open = self.expect(Tok::LParen, "'('")?;
        let unclosed = || syntax(open.line, open.col, "unclosed parenthesis");
        let inner = match self.parse_expr() {
            Ok(e) => e,
            Err(e) => {
                return Err(if matches!(self.peek().tok, Tok::Sep | Tok::End) {
                    unclosed()
                } else {
                    e
                })
            }
        };
        if self.peek().tok != Tok::RParen {
            return Err(if matches!(self.peek().tok, Tok::Sep | Tok::End) {
                unclosed()
            } else {
                self.error_here("expected ')'")
            });
        }
        self.bump();
        Ok(inner)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Lit(Complex64::new(v, 0.0)))
            }
            Tok::Imag(v) => {
                self.bump();
                Ok(Expr::Lit(Complex64::new(0.0, v)))
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.parse_atom()?)))
            }
            Tok::LParen => {
                if let Some(c) = self.complex_literal_ahead() {
                    for _ in 0..5 {
                        self.bump();
                    }
                    return Ok(Expr::Lit(c));
                }
                self.parse_parenthesised()
            }
            Tok::Ident(ref name) => {
                if let Some(func) = Func::from_name(name) {
                    self.bump();
                    if self.peek().tok != Tok::LParen {
                        return Err(self.error_here(format!("expected '(' after {name}")));
                    }
                    let arg = self.parse_parenthesised()?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(k) = name.strip_prefix('z').and_then(|s| s.parse::<usize>().ok()) {
                    if k == 0 {
                        return Err(syntax(t.line, t.col, "variables are numbered from z1"));
                    }
                    self.bump();
                    return Ok(Expr::Var(k - 1));
                }
                Err(syntax(t.line, t.col, format!("unknown identifier '{name}'")))
            }
            Tok::Sep | Tok::End => Err(syntax(t.line, t.col, "expected an expression")),
            _ => Err(syntax(t.line, t.col, "unexpected token")),
        }
    }
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(lex(text)?);
    p.skip_seps();
    let e = p.parse_expr()?;
    p.skip_seps();
    if !p.at_end() {
        return Err(p.error_here("unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Expr {
        Expr::Lit(Complex64::new(re, im))
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 - z1 * z2 ^ 2 - 3").unwrap();
        let want = Expr::Sub(
            Box::new(Expr::Sub(
                Box::new(c(1.0, 0.0)),
                Box::new(Expr::Mul(
                    Box::new(Expr::Var(0)),
                    Box::new(Expr::Pow(Box::new(Expr::Var(1)), 2)),
                )),
            )),
            Box::new(c(3.0, 0.0)),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn literal_forms() {
        assert_eq!(parse_expr("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_expr("(1 - 0.5i)").unwrap(), c(1.0, -0.5));
        assert_eq!(parse_expr("(1+2i)").unwrap(), c(1.0, 2.0));
        // not a literal: real part is not a bare decimal
        assert!(matches!(parse_expr("(z1+2i)").unwrap(), Expr::Add(..)));
    }

    #[test]
    fn unary_minus_binds_to_atom() {
        assert_eq!(
            parse_expr("-z1^2").unwrap(),
            Expr::Pow(Box::new(Expr::Neg(Box::new(Expr::Var(0)))), 2)
        );
        assert_eq!(
            parse_expr("z1^-1").unwrap(),
            Expr::Pow(Box::new(Expr::Var(0)), -1)
        );
    }

    #[test]
    fn dangling_parenthesis_is_located() {
        let err = parse_expr("1 + conj(").unwrap_err();
        assert_eq!(
            err,
            GeomError::Syntax {
                line: 1,
                column: 9,
                message: "unclosed parenthesis".into()
            }
        );
    }

    #[test]
    fn rejects_bad_tokens() {
        assert!(matches!(parse_expr("sin(z1)"), Err(GeomError::Syntax { .. })));
        assert!(matches!(parse_expr("z0"), Err(GeomError::Syntax { .. })));
        assert!(matches!(parse_expr("z1 ^ 1.5"), Err(GeomError::Syntax { .. })));
        assert!(matches!(parse_expr("z1 $ 2"), Err(GeomError::Syntax { .. })));
        assert!(matches!(parse_expr("z1 z2"), Err(GeomError::Syntax { .. })));
    }

    #[test]
    fn comments_are_ignored() {
        assert_eq!(parse_expr("z1 # trailing").unwrap(), Expr::Var(0));
    }
}
