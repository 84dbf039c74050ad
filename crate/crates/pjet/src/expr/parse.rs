//! Infix expression parser: `+ - * / ^`, integer literals, identifiers and
//! `exp( ) sin( ) cos( )`. Rational literals are integer quotients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{Expr, ExprError, Func};

pub fn parse_expr(src: &str, names: &[String]) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        names,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.product()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.product()?);
            } else if self.eat(b'-') {
                terms.push(Expr::Neg(Box::new(self.product()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Add(terms)
        })
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let r = self.unary()?;
                acc = Expr::Mul(vec![acc, r]);
            } else if self.eat(b'/') {
                let r = self.unary()?;
                acc = Expr::Div(Box::new(acc), Box::new(r));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let exp = self.unary()?.normalize()?;
        let k = exp
            .as_constant()
            .filter(|c| c.is_integer())
            .and_then(|c| c.to_integer().to_i64())
            .ok_or(ExprError::Parse {
                pos: at,
                msg: "exponent must be an integer constant".into(),
            })?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.src.get(self.pos) == Some(&b'.') {
                    return Err(self.error("floating-point literals are not accepted"));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let n: BigInt = digits.parse().map_err(|_| self.error("bad integer"))?;
                Ok(Expr::Const(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let func = match ident {
                    "exp" => Some(Func::Exp),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    _ => None,
                };
                if let Some(f) = func {
                    if self.eat(b'(') {
                        let arg = self.sum()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected `)`"));
                        }
                        return Ok(Expr::Func(f, Box::new(arg)));
                    }
                }
                match self.names.iter().position(|n| n == ident) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(ExprError::UnknownIdentifier(ident.to_string())),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
