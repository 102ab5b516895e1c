//! String grammar for polynomials and exact Laurent monomial sums.
//!
//! Human form: `t^2+t+2`, `2t-1`, `(t+1)^2`, `t^-2+t^-1` (Laurent only),
//! with `u` the generator of `F_q` over `F_p` for prime-power `q`, e.g.
//! `(1+u)t+u`. Machine form: comma-separated ascending coefficient indices,
//! e.g. `2,1,1`.

use std::sync::Arc;

use super::field::{Fq, FqElem};
use super::laurent::Laurent;
use super::poly::Poly;
use crate::error::{Error, Result};

/// `poly * t^shift`.
#[derive(Clone)]
struct Value {
    poly: Poly,
    shift: i64,
}

impl Value {
    fn align(a: &Value, b: &Value) -> (Poly, Poly, i64) {
        let s = a.shift.min(b.shift);
        (
            a.poly.shift((a.shift - s) as usize),
            b.poly.shift((b.shift - s) as usize),
            s,
        )
    }
}

struct Parser<'a> {
    field: &'a Arc<Fq>,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            column: self.pos + 1,
            message: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<i64>().or_else(|_| {
            self.pos = start;
            self.err("integer too large")
        })
    }

    fn expr(&mut self) -> Result<Value> {
        let mut neg = false;
        match self.peek() {
            Some('-') => {
                neg = true;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if neg {
            acc.poly = -&acc.poly;
        }
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let (a, b, s) = Value::align(&acc, &rhs);
            acc = Value {
                poly: if c == '+' { &a + &b } else { &a - &b },
                shift: s,
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_digit() || c == 't' || c == 'u' || c == '(' => {}
                _ => return Ok(acc),
            }
            let rhs = self.factor()?;
            acc = Value {
                poly: &acc.poly * &rhs.poly,
                shift: acc.shift + rhs.shift,
            };
        }
    }

    fn factor(&mut self) -> Result<Value> {
        let start = self.pos;
        let (base, is_t) = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let e = self.integer()?;
        if neg {
            if !is_t {
                self.pos = start;
                return self.err("negative exponent allowed only on t");
            }
            return Ok(Value {
                poly: Poly::one(self.field),
                shift: -e,
            });
        }
        Ok(Value {
            poly: base.poly.pow(e as u64),
            shift: base.shift * e,
        })
    }

    fn atom(&mut self) -> Result<(Value, bool)> {
        let f = self.field;
        let one = |poly| Value { poly, shift: 0 };
        match self.peek() {
            Some('t') => {
                self.pos += 1;
                Ok((one(Poly::t(f)), true))
            }
            Some('u') => {
                if f.degree() == 1 {
                    return self.err("u is only defined for prime-power q");
                }
                self.pos += 1;
                Ok((one(Poly::constant(f, f.elem(f.p()))), false))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok((v, false))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok((one(Poly::constant(f, f.from_int(n))), false))
            }
            Some(c) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_value(field: &Arc<Fq>, s: &str) -> Result<Value> {
    let mut p = Parser {
        field,
        chars: s.chars().collect(),
        pos: 0,
    };
    if p.peek().is_none() {
        return p.err("empty input");
    }
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

fn parse_machine(field: &Arc<Fq>, s: &str) -> Result<Poly> {
    let mut coeffs = Vec::new();
    let mut col = 1;
    // a trailing comma marks a one-coefficient list
    let body = s.strip_suffix(',').unwrap_or(s);
    for part in body.split(',') {
        let trimmed = part.trim();
        let v: u32 = trimmed.parse().map_err(|_| Error::Parse {
            column: col,
            message: format!("bad coefficient '{trimmed}'"),
        })?;
        if v >= field.q() {
            return Err(Error::Parse {
                column: col,
                message: format!("coefficient {v} out of range for F_{}", field.q()),
            });
        }
        coeffs.push(FqElem(v));
        col += part.len() + 1;
    }
    Ok(Poly::from_coeffs(field, coeffs))
}

impl Poly {
    /// Parses either grammar (machine form is recognized by a comma).
    pub fn parse(field: &Arc<Fq>, s: &str) -> Result<Poly> {
        if s.contains(',') {
            return parse_machine(field, s);
        }
        let v = parse_value(field, s)?;
        if v.shift < 0 && !v.poly.is_zero() {
            // allowed only if the negative powers cancel
            let low = v.poly.coeffs().iter().take_while(|c| c.is_zero()).count() as i64;
            if low + v.shift < 0 {
                return Err(Error::Parse {
                    column: 1,
                    message: "negative powers of t in a polynomial".into(),
                });
            }
            let coeffs = v.poly.coeffs()[(-v.shift) as usize..].to_vec();
            return Ok(Poly::from_coeffs(field, coeffs));
        }
        Ok(v.poly.shift(v.shift.max(0) as usize))
    }
}

impl Laurent {
    /// Parses an exact finite Laurent sum such as `t^-2+2t^-1+t`.
    pub fn parse(field: &Arc<Fq>, s: &str) -> Result<Laurent> {
        let v = parse_value(field, s)?;
        Ok(Laurent::from_poly(&v.poly).shift(v.shift))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_and_machine_agree() {
        let f = Fq::new(3).unwrap();
        let a = Poly::parse(&f, "t^2+t+2").unwrap();
        let b = Poly::parse(&f, "2,1,1").unwrap();
        assert_eq!(a, b);
        assert_eq!(
            Poly::parse(&f, "t-1").unwrap(),
            Poly::parse(&f, "t+2").unwrap()
        );
        assert_eq!(
            Poly::parse(&f, "(t+1)^2").unwrap(),
            Poly::parse(&f, "t^2+2t+1").unwrap()
        );
        assert_eq!(Poly::parse(&f, "2*t").unwrap().to_string(), "2t");
        assert!(Poly::parse(&f, "-1").unwrap() == Poly::from_ints(&f, &[2]));
    }

    #[test]
    fn round_trip_display() {
        let f = Fq::new(5).unwrap();
        for idx in 0..3125u64 {
            let p = Poly::from_index(&f, idx);
            assert_eq!(Poly::parse(&f, &p.to_string()).unwrap(), p);
            assert_eq!(
                Poly::parse(&f, &format!("{},0", p.to_machine())).unwrap(),
                p
            );
        }
    }

    #[test]
    fn extension_coefficients() {
        let f = Fq::new(9).unwrap();
        let p = Poly::parse(&f, "(1+u)t+u").unwrap();
        assert_eq!(p.coeff(1), f.elem(4));
        assert_eq!(p.coeff(0), f.elem(3));
        assert_eq!(Poly::parse(&f, &p.to_string()).unwrap(), p);
        assert!(Poly::parse(&Fq::new(3).unwrap(), "u").is_err());
    }

    #[test]
    fn errors_carry_columns() {
        let f = Fq::new(3).unwrap();
        match Poly::parse(&f, "t^2+#") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Poly::parse(&f, "1,5").is_err());
        assert!(Poly::parse(&f, "t^-1").is_err());
    }

    #[test]
    fn laurent_terms() {
        let f = Fq::new(3).unwrap();
        let x = Laurent::parse(&f, "t^-2+2t^-1+t").unwrap();
        assert_eq!(x.coeff(-2).unwrap(), FqElem::ONE);
        assert_eq!(x.coeff(-1).unwrap(), f.from_int(2));
        assert_eq!(x.coeff(1).unwrap(), FqElem::ONE);
        assert!(x.is_exact());
    }
}
