use num::{BigInt, One, Zero};

use super::{Coeff, Frac, Poly, PolyError, VarTable};

/// Parses a polynomial. Division is accepted only by nonzero integer literals.
pub fn parse_poly(text: &str, vars: &VarTable) -> Result<Poly, PolyError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, vars, allow_frac: false };
    let v = p.parse_all()?;
    Ok(v.into_poly().expect("polynomial mode never builds a denominator"))
}

/// Parses a rational function: like [`parse_poly`] but `/` may be followed by any factor.
pub fn parse_frac(text: &str, vars: &VarTable) -> Result<Frac, PolyError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, vars, allow_frac: true };
    p.parse_all()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a VarTable,
    allow_frac: bool,
}

impl Parser<'_> {
    fn err<T>(&self, offset: usize, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { offset, msg: msg.into() })
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

    fn parse_all(&mut self) -> Result<Frac, PolyError> {
        if self.peek().is_none() {
            return self.err(self.pos, "empty expression");
        }
        let v = self.expr()?;
        if let Some(c) = self.peek() {
            return self.err(self.pos, format!("unexpected `{}`", c as char));
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<Frac, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Frac, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    if self.allow_frac {
                        let d = self.unary()?;
                        if d.is_zero() {
                            return self.err(at, "division by zero");
                        }
                        acc = &acc / &d;
                    } else {
                        match self.peek() {
                            Some(c) if c.is_ascii_digit() => {}
                            _ => return self.err(self.pos, "`/` must be followed by an integer literal"),
                        }
                        let n = self.integer()?;
                        if n.is_zero() {
                            return self.err(at, "division by zero");
                        }
                        acc = acc.scale(&Coeff::new(BigInt::one(), n));
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Frac, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Frac, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return self.err(self.pos, "exponent must be a non-negative integer");
            }
            let at = self.pos;
            let e = self.integer()?;
            let e: u32 = match u32::try_from(e) {
                Ok(e) => e,
                Err(_) => return self.err(at, "exponent too large"),
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        s.parse::<BigInt>().or_else(|_| self.err(start, "expected integer"))
    }

    fn atom(&mut self) -> Result<Frac, PolyError> {
        match self.peek() {
            None => self.err(self.pos, "unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err(self.pos, "expected `)`");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Frac::from(Poly::constant(Coeff::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                let s = self.vars.resolve(name)?;
                self.vars.check_order(s)?;
                Ok(Frac::from(Poly::symbol(s)))
            }
            Some(c) => self.err(self.pos, format!("unexpected `{}`", c as char)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vt() -> VarTable {
        VarTable::with_jets(&["u1", "u2", "u3"], &[("f", &["u2", "u3"], 2)]).unwrap()
    }

    #[test]
    fn parses_discriminant() {
        let v = vt();
        let d = parse_poly("4*u2^3 + 27*u3^2", &v).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.to_string_with(&v), "4*u2^3 + 27*u3^2");
    }

    #[test]
    fn reports_offsets() {
        let v = vt();
        assert_eq!(
            parse_poly("u1*(u2", &v),
            Err(PolyError::Syntax { offset: 6, msg: "expected `)`".into() })
        );
        assert_eq!(parse_poly("u1 + w", &v), Err(PolyError::UnknownSymbol("w".into())));
        assert!(matches!(parse_poly("u1/u2", &v), Err(PolyError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_poly("f_1", &v), Err(PolyError::JetDependency { .. })));
        assert!(matches!(parse_poly("f_222", &v), Err(PolyError::JetOrder { .. })));
    }

    #[test]
    fn rationals_and_unary_minus() {
        let v = vt();
        let a = parse_poly("9/2*u3 - -u1^2", &v).unwrap();
        assert_eq!(a.to_string_with(&v), "u1^2 + 9/2*u3");
        let q = parse_frac("f_2/f", &v).unwrap();
        assert_eq!(q.to_string_with(&v), "(f_2)/(f)");
    }
}
