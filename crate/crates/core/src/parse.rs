//! Expression reader for polynomials and fractions over a two-variable ring.
//!
//! Grammar: integers, the ring's two variable names, `+ - * ^ ( )`, with `^`
//! binding tightest and taking a non-negative integer exponent. One `/` is
//! allowed at the top level. Coefficients are reduced mod `p`.

use crate::error::{Error, Result};
use crate::poly::{fp_reduce, Poly, Ring};
use crate::ratfunc::RatFunc;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: Ring,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        match self.peek() {
            Some(c) if c == b => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.err(format!("expected `{}`, found `{}`", b as char, c as char)),
            None => self.err(format!("expected `{}`, found end of input", b as char)),
        }
    }

    fn sum(&mut self) -> Result<Poly> {
        let mut acc = self.signed_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed_term(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.term()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()
            }
            _ => self.term(),
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some(b'-') => Err(Error::NegativeExponent(self.pos)),
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let digits = self.digits();
                match digits.parse::<u64>() {
                    Ok(e) => Ok(base.pow(e)),
                    Err(_) => Err(Error::Syntax {
                        offset: start,
                        msg: "exponent too large".into(),
                    }),
                }
            }
            Some(c) => self.err(format!("expected exponent, found `{}`", c as char)),
            None => self.err("expected exponent, found end of input"),
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn atom(&mut self) -> Result<Poly> {
        let p = self.ring.p;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let c = self
                    .digits()
                    .bytes()
                    .fold(0i64, |acc, d| (acc * 10 + (d - b'0') as i64) % p as i64);
                Ok(Poly::constant(self.ring, fp_reduce(c, p) as i64))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let (a, b) = self.ring.tag.vars();
                if name == a {
                    Ok(Poly::var1(self.ring))
                } else if name == b {
                    Ok(Poly::var2(self.ring))
                } else {
                    Err(Error::UnknownVariable {
                        name: name.to_string(),
                        offset: start,
                    })
                }
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a polynomial or a single top-level fraction.
pub fn parse_expr(text: &str, ring: Ring) -> Result<RatFunc> {
    let mut ps = Parser {
        src: text.as_bytes(),
        pos: 0,
        ring,
    };
    let num = ps.sum()?;
    let den = if ps.peek() == Some(b'/') {
        ps.pos += 1;
        let at = ps.pos;
        let d = ps.sum()?;
        if d.is_zero() {
            return Err(Error::Syntax {
                offset: at,
                msg: "denominator is zero".into(),
            });
        }
        d
    } else {
        Poly::one(ring)
    };
    match ps.peek() {
        None => RatFunc::new(num, den),
        Some(b'/') => ps.err("only one top-level `/` is allowed"),
        Some(c) => ps.err(format!("unexpected `{}`", c as char)),
    }
}

/// Parse a polynomial; a fraction is accepted when its denominator cancels
/// to a constant (monomial content only, no gcd).
pub fn parse_poly(text: &str, ring: Ring) -> Result<Poly> {
    let f = parse_expr(text, ring)?;
    if f.is_polynomial() {
        Ok(f.numer().clone())
    } else {
        Err(Error::Syntax {
            offset: 0,
            msg: "expected a polynomial, got a fraction".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RingTag;
    use proptest::prelude::*;

    fn uv(p: u32) -> Ring {
        Ring::new(RingTag::UV, p).unwrap()
    }

    #[test]
    fn examples() {
        let r = uv(2);
        let p2 = Poly::from_terms(r, [(0, 4, 1), (1, 0, 1)]);
        assert_eq!(parse_poly("v^4 + u", r).unwrap(), p2);
        assert!(parse_poly("3*u", uv(3)).unwrap().is_zero());
        assert_eq!(
            parse_expr("u + )", r).unwrap_err(),
            Error::Syntax {
                offset: 4,
                msg: "unexpected `)`".into()
            }
        );
    }

    #[test]
    fn precedence_and_signs() {
        let r = uv(5);
        let a = parse_poly("-u^2*v + 2*(u + v)^2", r).unwrap();
        let b = Poly::from_terms(r, [(2, 1, -1), (2, 0, 2), (1, 1, 4), (0, 2, 2)]);
        assert_eq!(a, b);
        assert_eq!(parse_poly("2^3", r).unwrap(), Poly::constant(r, 3));
        assert_eq!(parse_poly("123456789012345678901234567890", r).unwrap(), Poly::zero(r));
    }

    #[test]
    fn fractions() {
        let r = uv(3);
        let f = parse_expr("(u^2*v) / (u*v^3)", r).unwrap();
        assert_eq!(f.numer(), &Poly::var1(r));
        assert_eq!(f.denom(), &Poly::monomial(r, 1, 0, 2));
        assert!(parse_expr("u / v / u", r).is_err());
        assert!(matches!(parse_expr("u / (v - v)", r), Err(Error::Syntax { .. })));
        assert!(parse_poly("u / v", r).is_err());
        assert_eq!(parse_poly("(u^2*v + u) / (2*u)", r).unwrap(), parse_poly("2*u*v + 2", r).unwrap());
    }

    #[test]
    fn errors() {
        let r = uv(2);
        assert_eq!(
            parse_expr("u + w", r).unwrap_err(),
            Error::UnknownVariable {
                name: "w".into(),
                offset: 4
            }
        );
        assert_eq!(parse_expr("v^-2", r).unwrap_err(), Error::NegativeExponent(2));
        assert!(matches!(parse_expr("(u", r), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("", r), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expr("u v", r), Err(Error::Syntax { offset: 2, .. })));
        let xy = Ring::new(RingTag::XY, 2).unwrap();
        assert!(parse_expr("u", xy).is_err());
        assert!(parse_expr("x*y + 1", xy).is_ok());
    }

    fn terms() -> impl Strategy<Value = Vec<(u64, u64, i64)>> {
        prop::collection::vec((0u64..6, 0u64..6, 0i64..7), 0..6)
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        (prop::sample::select(vec![2u32, 3, 5, 7]), terms()).prop_map(|(p, t)| Poly::from_terms(uv(p), t))
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(f in arb_poly()) {
            let text = f.to_string();
            prop_assert_eq!(parse_poly(&text, f.ring()).unwrap(), f.clone());
            prop_assert_eq!(parse_poly(&text, f.ring()).unwrap().to_string(), text);
        }

        #[test]
        fn fraction_round_trip(p in prop::sample::select(vec![2u32, 3, 5, 7]), a in terms(), b in terms()) {
            let g = Poly::from_terms(uv(p), b);
            prop_assume!(!g.is_zero());
            let q = RatFunc::new(Poly::from_terms(uv(p), a), g).unwrap();
            let back = parse_expr(&q.to_string(), q.ring()).unwrap();
            prop_assert!(back.eq_exact(&q));
        }
    }
}
