//! Infix syntax: `+ - * / ^`, parentheses, `sqrt log exp conj`, the symbols
//! x0..x3, t, q1, qt1, q2, qt2, zeta, eta, the constants `i` and `pi`, and
//! imaginary literals such as `2.5i`.

use super::{FieldExpr, Var};
use crate::coords::{C64, I};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < b.len() {
        let c = b[k] as char;
        if c.is_ascii_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() || (c == '.' && k + 1 < b.len() && (b[k + 1] as char).is_ascii_digit()) {
            let start = k;
            while k < b.len() && ((b[k] as char).is_ascii_digit() || b[k] == b'.') {
                k += 1;
            }
            if k < b.len() && (b[k] == b'e' || b[k] == b'E') {
                let mut j = k + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && (b[j] as char).is_ascii_digit() {
                    k = j;
                    while k < b.len() && (b[k] as char).is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let v: f64 = s[start..k].parse().map_err(|_| Error::Parse { pos: start, msg: "bad number".into() })?;
            let imag = k < b.len() && b[k] == b'i' && !(k + 1 < b.len() && (b[k + 1] as char).is_ascii_alphanumeric());
            if imag {
                k += 1;
                out.push((start, Tok::Imag(v)));
            } else {
                out.push((start, Tok::Num(v)));
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < b.len() && ((b[k] as char).is_ascii_alphanumeric() || b[k] == b'_') {
                k += 1;
            }
            out.push((start, Tok::Ident(s[start..k].to_string())));
        } else if "+-*/^()".contains(c) {
            if c == '*' && k + 1 < b.len() && b[k + 1] == b'*' {
                out.push((k, Tok::Op('^')));
                k += 2;
            } else {
                out.push((k, Tok::Op(c)));
                k += 1;
            }
        } else {
            return Err(Error::Parse { pos: k, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    k: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.k).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.k).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.k += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<FieldExpr> {
        let mut a = self.term()?;
        loop {
            if self.eat('+') {
                a = a + self.term()?;
            } else if self.eat('-') {
                a = a - self.term()?;
            } else {
                return Ok(a);
            }
        }
    }

    fn term(&mut self) -> Result<FieldExpr> {
        let mut a = self.unary()?;
        loop {
            if self.eat('*') {
                a = a * self.unary()?;
            } else if self.eat('/') {
                a = a / self.unary()?;
            } else {
                return Ok(a);
            }
        }
    }

    fn unary(&mut self) -> Result<FieldExpr> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<FieldExpr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let n = match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < 1e6 => *v as i32,
            _ => return self.err("exponent must be an integer; use exp(k*log(..)) otherwise"),
        };
        self.k += 1;
        if paren {
            self.expect(')')?;
        }
        Ok(base.powi(if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<FieldExpr> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        self.k += 1;
        match tok {
            Tok::Num(v) => Ok(FieldExpr::re(v)),
            Tok::Imag(v) => Ok(FieldExpr::c(C64::new(0.0, v))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => {
                self.k -= 1;
                self.err(format!("unexpected `{c}`"))
            }
            Tok::Ident(name) => {
                if let Some(v) = Var::from_name(&name) {
                    return Ok(FieldExpr::var(v));
                }
                match name.as_str() {
                    "i" => Ok(FieldExpr::c(I)),
                    "pi" => Ok(FieldExpr::re(std::f64::consts::PI)),
                    "sqrt" | "log" | "ln" | "exp" | "conj" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(')')?;
                        Ok(match name.as_str() {
                            "sqrt" => a.sqrt(),
                            "exp" => a.exp(),
                            "conj" => a.conj(),
                            _ => a.ln(),
                        })
                    }
                    _ => {
                        self.k -= 1;
                        self.err(format!("unknown symbol `{name}`"))
                    }
                }
            }
        }
    }
}

/// Parses the textual expression syntax.
pub fn parse(s: &str) -> Result<FieldExpr> {
    let toks = lex(s)?;
    let mut p = Parser { toks, k: 0, end: s.len() };
    let e = p.expr()?;
    if p.k != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
