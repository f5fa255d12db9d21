//! Fractions of sparse polynomials.
//!
//! Only monomial content is cancelled; no polynomial gcd is taken. The
//! denominator is scaled so its leading term has coefficient 1.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{fp_inv, Poly, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        num.ring().check(&den.ring())?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            let ring = den.ring();
            return RatFunc {
                num,
                den: Poly::one(ring),
            };
        }
        let mut cn = num.monomial_content().unwrap();
        let cd = den.monomial_content().unwrap();
        cn.e1 = cn.e1.min(cd.e1);
        cn.e2 = cn.e2.min(cd.e2);
        let (mut num, mut den) = if cn.e1 > 0 || cn.e2 > 0 {
            (num.div_monomial(cn), den.div_monomial(cn))
        } else {
            (num, den)
        };
        let lead = den.terms().last().unwrap().1;
        if lead != 1 {
            let inv = fp_inv(lead, den.p()) as i64;
            num = num.scale(inv);
            den = den.scale(inv);
        }
        RatFunc { num, den }
    }

    pub fn from_poly(f: Poly) -> Self {
        let ring = f.ring();
        RatFunc {
            num: f,
            den: Poly::one(ring),
        }
    }

    pub fn zero(ring: Ring) -> Self {
        Self::from_poly(Poly::zero(ring))
    }

    pub fn one(ring: Ring) -> Self {
        Self::from_poly(Poly::one(ring))
    }

    pub fn constant(ring: Ring, c: i64) -> Self {
        Self::from_poly(Poly::constant(ring, c))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn ring(&self) -> Ring {
        self.num.ring()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Total support size of numerator and denominator.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn try_add(&self, o: &RatFunc) -> Result<RatFunc> {
        self.ring().check(&o.ring())?;
        if self.den == o.den {
            return Ok(Self::normalized(self.num.add(&o.num), self.den.clone()));
        }
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Ok(Self::normalized(num, self.den.mul(&o.den)))
    }

    pub fn try_sub(&self, o: &RatFunc) -> Result<RatFunc> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &RatFunc) -> Result<RatFunc> {
        self.ring().check(&o.ring())?;
        // cancel structurally equal cross factors before multiplying out
        let (a, b, c, d) = (&self.num, &self.den, &o.num, &o.den);
        if a == d {
            return Ok(Self::normalized(c.clone(), b.clone()));
        }
        if b == c {
            return Ok(Self::normalized(a.clone(), d.clone()));
        }
        Ok(Self::normalized(a.mul(c), b.mul(d)))
    }

    pub fn try_div(&self, o: &RatFunc) -> Result<RatFunc> {
        self.try_mul(&o.inv()?)
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        self.try_add(o).expect("ring mismatch in add")
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.try_sub(o).expect("ring mismatch in sub")
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        self.try_mul(o).expect("ring mismatch in mul")
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        self.try_div(o)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: i64) -> RatFunc {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn frob_pow(&self, t: u32) -> RatFunc {
        RatFunc {
            num: self.num.frob_pow(t),
            den: self.den.frob_pow(t),
        }
    }

    pub fn pow(&self, n: u64) -> RatFunc {
        Self::normalized(self.num.pow(n), self.den.pow(n))
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, n: i64) -> Result<RatFunc> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            self.inv().map(|r| r.pow(n.unsigned_abs()))
        }
    }

    /// Exact equality as rational functions, by cross-multiplication.
    pub fn eq_exact(&self, o: &RatFunc) -> bool {
        if self.ring() != o.ring() {
            return false;
        }
        if self.den == o.den {
            return self.num == o.num;
        }
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    /// The same fraction re-tagged into another ring of equal characteristic.
    pub fn retag(&self, tag: crate::poly::RingTag) -> RatFunc {
        RatFunc {
            num: self.num.retag(tag),
            den: self.den.retag(tag),
        }
    }
}

impl From<Poly> for RatFunc {
    fn from(f: Poly) -> Self {
        RatFunc::from_poly(f)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Images of the two variables of a source ring, all in one target ring.
#[derive(Clone, Debug)]
pub struct Substitution {
    pub first: RatFunc,
    pub second: RatFunc,
}

impl Substitution {
    pub fn new(first: RatFunc, second: RatFunc) -> Result<Self> {
        first.ring().check(&second.ring())?;
        Ok(Substitution { first, second })
    }

    pub fn target(&self) -> Ring {
        self.first.ring()
    }

    /// Image of a polynomial under the ring homomorphism.
    pub fn apply_poly(&self, f: &Poly) -> Result<RatFunc> {
        let target = self.target();
        if f.p() != target.p {
            return Err(Error::CharMismatch(f.p(), target.p));
        }
        if f.is_zero() {
            return Ok(RatFunc::zero(target));
        }
        let (nu, du) = (self.first.numer(), self.first.denom());
        let (nv, dv) = (self.second.numer(), self.second.denom());
        let max1 = f.deg1().unwrap();
        let max2 = f.deg2().unwrap();

        let mut cache: HashMap<(u8, u64), Poly> = HashMap::new();
        let mut power = |which: u8, base: &Poly, e: u64| -> Poly {
            if base.is_one() || e == 0 {
                return Poly::one(target);
            }
            cache
                .entry((which, e))
                .or_insert_with(|| base.pow(e))
                .clone()
        };

        // group by first-variable exponent: Σ_a U^a · (Σ_b c V^b)
        let mut by_first: std::collections::BTreeMap<u64, Vec<(u64, u32)>> = Default::default();
        for &(m, c) in f.terms() {
            by_first.entry(m.e1).or_default().push((m.e2, c));
        }
        let mut num = Poly::zero(target);
        for (a, inner_terms) in by_first {
            let mut inner = Poly::zero(target);
            for (b, c) in inner_terms {
                let t = power(2, nv, b).mul(&power(3, dv, max2 - b));
                inner = inner.add(&t.scale(c as i64));
            }
            let outer = power(0, nu, a).mul(&power(1, du, max1 - a));
            num = num.add(&inner.mul(&outer));
        }
        let den = power(1, du, max1).mul(&power(3, dv, max2));
        RatFunc::new(num, den)
    }

    pub fn apply(&self, f: &RatFunc) -> Result<RatFunc> {
        let n = self.apply_poly(f.numer())?;
        let d = self.apply_poly(f.denom())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        n.try_div(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RingTag;

    fn ring(tag: RingTag, p: u32) -> Ring {
        Ring::new(tag, p).unwrap()
    }

    #[test]
    fn arithmetic_basics() {
        let r = ring(RingTag::UV, 2);
        let u = RatFunc::from_poly(Poly::var1(r));
        let v = RatFunc::from_poly(Poly::var2(r));
        let q = u.div(&v).unwrap();
        assert_eq!(q.numer(), &Poly::var1(r));
        assert_eq!(q.denom(), &Poly::var2(r));
        // u/v * v/u = 1 after monomial cancellation
        assert!(q.mul(&v.div(&u).unwrap()).eq_exact(&RatFunc::one(r)));
        assert!(q.sub(&q).is_zero());
        assert_eq!(RatFunc::zero(r).inv(), Err(Error::DivisionByZero));
        assert_eq!(
            RatFunc::new(Poly::one(r), Poly::zero(r)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn monomial_content_cancelled() {
        let r = ring(RingTag::UV, 3);
        let num = Poly::from_terms(r, [(2, 1, 1), (3, 3, 2)]);
        let den = Poly::from_terms(r, [(1, 2, 2)]);
        let f = RatFunc::new(num, den).unwrap();
        assert_eq!(f.denom(), &Poly::from_terms(r, [(0, 1, 1)]));
        assert_eq!(f.numer(), &Poly::from_terms(r, [(1, 0, 2), (2, 2, 1)]));
    }

    #[test]
    fn substitution_examples() {
        let src = ring(RingTag::UV, 2);
        let dst = ring(RingTag::XY, 2);
        let x = Poly::var1(dst);
        let y = Poly::var2(dst);
        let u_img = RatFunc::new(x.pow(2), Poly::one(dst).add(&x)).unwrap();
        let v_img = RatFunc::from_poly(y.pow(2).add(&x.mul(&y)));
        let sub = Substitution::new(u_img.clone(), v_img.clone()).unwrap();
        assert!(sub
            .apply_poly(&Poly::var2(src))
            .unwrap()
            .eq_exact(&v_img));
        assert!(sub
            .apply_poly(&Poly::var1(src))
            .unwrap()
            .eq_exact(&u_img));

        let id = Substitution::new(
            RatFunc::from_poly(Poly::var1(src)),
            RatFunc::from_poly(Poly::var2(src)),
        )
        .unwrap();
        let f = Poly::from_terms(src, [(3, 1, 1), (0, 4, 1), (1, 0, 1)]);
        assert_eq!(id.apply_poly(&f).unwrap(), RatFunc::from_poly(f));
    }

    #[test]
    fn zero_denominator_image_rejected() {
        let r = ring(RingTag::UV, 2);
        // u -> v, v -> v sends u - v to zero
        let v = RatFunc::from_poly(Poly::var2(r));
        let sub = Substitution::new(v.clone(), v).unwrap();
        let f = RatFunc::new(
            Poly::one(r),
            Poly::var1(r).sub(&Poly::var2(r)),
        )
        .unwrap();
        assert_eq!(sub.apply(&f), Err(Error::DivisionByZero));
    }
}
