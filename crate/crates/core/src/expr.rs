//! Tiny arithmetic grammar for per-`k` templates such as `"1/sqrt({k})"`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/' | '×' | '÷') unary)*
//! unary  := '-' unary | atom
//! atom   := number | ident | '{' ident '}' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `k`, `R`, `delta`, `eps` and the constant `pi`.

use crate::error::{Error, Result};

/// Variable bindings for template evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vars {
    pub k: Option<f64>,
    pub radius_factor: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
}

impl Vars {
    pub fn with_k(k: usize) -> Self {
        Self {
            k: Some(k as f64),
            ..Self::default()
        }
    }

    fn lookup(&self, name: &str) -> std::result::Result<f64, String> {
        let v = match name {
            "k" => self.k,
            "R" => self.radius_factor,
            "delta" => self.delta,
            "eps" => self.eps,
            "pi" => Some(std::f64::consts::PI),
            _ => return Err(format!("unknown identifier `{name}`")),
        };
        v.ok_or_else(|| format!("`{name}` is not bound here"))
    }
}

/// Evaluates `src`; `path` qualifies the error message.
pub fn eval(src: &str, vars: &Vars, path: &str) -> Result<f64> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
        vars,
    };
    let out = p
        .expr()
        .and_then(|v| {
            p.skip_ws();
            if p.pos < p.chars.len() {
                Err(format!("unexpected `{}`", p.chars[p.pos]))
            } else {
                Ok(v)
            }
        })
        .map_err(|message| Error::Parse {
            path: path.to_string(),
            message: format!("{message} in expression \"{src}\""),
        })?;
    if !out.is_finite() {
        return Err(Error::Validation {
            path: path.to_string(),
            message: format!("expression \"{src}\" evaluates to {out}"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a Vars,
}

type PResult = std::result::Result<f64, String>;

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> PResult {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> PResult {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') || self.eat('×') {
                v *= self.unary()?;
            } else if self.eat('/') || self.eat('÷') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> PResult {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult {
        match self.peek() {
            None => Err("unexpected end of input".into()),
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err("missing `)`".into());
                }
                Ok(v)
            }
            Some('{') => {
                self.pos += 1;
                let name = self.ident();
                if !self.eat('}') {
                    return Err("missing `}`".into());
                }
                self.vars.lookup(&name)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() => {
                let name = self.ident();
                if name == "sqrt" {
                    if !self.eat('(') {
                        return Err("expected `(` after sqrt".into());
                    }
                    let v = self.expr()?;
                    if !self.eat(')') {
                        return Err("missing `)`".into());
                    }
                    Ok(v.sqrt())
                } else {
                    self.vars.lookup(&name)
                }
            }
            Some(c) => Err(format!("unexpected `{c}`")),
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> PResult {
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.')
        {
            self.pos += 1;
        }
        // optional exponent
        if self.pos < self.chars.len() && matches!(self.chars[self.pos], 'e' | 'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.chars.len() && matches!(self.chars[self.pos], '+' | '-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map_err(|_| format!("bad number `{text}`"))
    }
}
