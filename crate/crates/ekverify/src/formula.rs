//! Parser for perturbation formulas over the moment coordinates
//! `mu1, ..., mun`.
//!
//! Grammar: `+ - * /`, integer powers `^k` (k may be negative), parentheses,
//! decimal literals, and the functions `exp`, `log` (alias `ln`).

use ekverify_core::expr::Expr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("formula error at byte {pos}: {msg}")]
pub struct FormulaError {
    pub pos: usize,
    pub msg: String,
}

pub fn parse_formula(src: &str) -> Result<Expr, FormulaError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> FormulaError {
        FormulaError { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, FormulaError> {
        let mut acc = self.product()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(self.product()?);
            } else if self.eat(b'-') {
                acc = acc.sub(self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, FormulaError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(self.unary()?);
            } else if self.eat(b'/') {
                acc = acc.div(self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, FormulaError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, FormulaError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        let e: i32 = digits.parse().map_err(|_| self.err("expected an integer exponent"))?;
        Ok(base.pow(if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<Expr, FormulaError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of formula")),
        }
    }

    fn number(&mut self) -> Result<Expr, FormulaError> {
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_digit() || *c == b'.') {
            self.pos += 1;
        }
        if matches!(self.s.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.s.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        let v: f64 = text.parse().map_err(|_| FormulaError { pos: start, msg: format!("bad number '{text}'") })?;
        Ok(Expr::Const(v))
    }

    fn word(&mut self) -> Result<Expr, FormulaError> {
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        let w = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        if let Some(idx) = w.strip_prefix("mu") {
            return match idx.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(Expr::var(i - 1)),
                _ => Err(FormulaError { pos: start, msg: format!("unknown variable '{w}'") }),
            };
        }
        let arg = |p: &mut Self| -> Result<Expr, FormulaError> {
            if !p.eat(b'(') {
                return Err(p.err("expected '(' after function name"));
            }
            let e = p.sum()?;
            if !p.eat(b')') {
                return Err(p.err("expected ')'"));
            }
            Ok(e)
        };
        match w {
            "exp" => Ok(arg(self)?.exp()),
            "log" | "ln" => Ok(arg(self)?.ln()),
            _ => Err(FormulaError { pos: start, msg: format!("unknown name '{w}'") }),
        }
    }
}
