//! The value group `Z[1/p] ∪ {∞}` and plain rational bounds.
//!
//! A finite [`GroupValue`] is stored as `num / p^exp` in canonical form:
//! either `exp == 0` or `p` does not divide `num`. Two values are equal
//! exactly when their canonical forms are identical, so the derived
//! `PartialEq` is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

pub fn is_supported_prime(p: u32) -> bool {
    matches!(p, 2 | 3 | 5 | 7)
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_supported_prime(p) {
        Ok(())
    } else {
        Err(Error::BadPrime(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupValue {
    Finite { p: u32, num: BigInt, exp: u32 },
    Infinity,
}

impl GroupValue {
    pub fn new(p: u32, num: impl Into<BigInt>, exp: u32) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        let bp = BigInt::from(p);
        if num.is_zero() {
            exp = 0;
        }
        while exp > 0 {
            let (q, r) = num.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            num = q;
            exp -= 1;
        }
        GroupValue::Finite { p, num, exp }
    }

    pub fn zero(p: u32) -> Self {
        GroupValue::new(p, 0, 0)
    }

    pub fn integer(p: u32, n: i64) -> Self {
        GroupValue::new(p, n, 0)
    }

    /// `p^e` for any signed `e`.
    pub fn p_power(p: u32, e: i64) -> Self {
        if e >= 0 {
            GroupValue::new(p, BigInt::from(p).pow(e as u32), 0)
        } else {
            GroupValue::new(p, 1, (-e) as u32)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupValue::Finite { .. })
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn prime(&self) -> Option<u32> {
        match self {
            GroupValue::Finite { p, .. } => Some(*p),
            GroupValue::Infinity => None,
        }
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            GroupValue::Finite { p, num, exp } => Some(BigRational::new(
                num.clone(),
                BigInt::from(*p).pow(*exp),
            )),
            GroupValue::Infinity => None,
        }
    }

    /// Multiply by an integer. `0 * ∞` is treated as `0`-free: it stays `∞`.
    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        match self {
            GroupValue::Finite { p, num, exp } => GroupValue::new(*p, num * k.into(), *exp),
            GroupValue::Infinity => GroupValue::Infinity,
        }
    }

    /// Multiply by `p^t` (`t` may be negative).
    pub fn mul_p_pow(&self, t: i64) -> Self {
        match self {
            GroupValue::Finite { p, num, exp } => {
                let e = *exp as i64 - t;
                if e >= 0 {
                    GroupValue::new(*p, num.clone(), e as u32)
                } else {
                    GroupValue::new(*p, num * BigInt::from(*p).pow((-e) as u32), 0)
                }
            }
            GroupValue::Infinity => GroupValue::Infinity,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GroupValue::Finite { num, .. } if num.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        match self {
            GroupValue::Finite { num, .. } => num.is_positive(),
            GroupValue::Infinity => true,
        }
    }

    /// Rendering as `n/p^e`, e.g. `17/2^4`.
    pub fn power_form(&self) -> String {
        match self {
            GroupValue::Finite { p, num, exp } => {
                if *exp == 0 {
                    num.to_string()
                } else {
                    format!("{num}/{p}^{exp}")
                }
            }
            GroupValue::Infinity => "inf".to_string(),
        }
    }

    /// Exact decimal expansion, available when `p` divides a power of ten.
    pub fn decimal(&self) -> Option<String> {
        let GroupValue::Finite { p, num, exp } = self else {
            return None;
        };
        let cofactor = match p {
            2 => 5u32,
            5 => 2u32,
            _ if *exp == 0 => 1,
            _ => return None,
        };
        let scaled = num * BigInt::from(cofactor).pow(*exp);
        let neg = scaled.is_negative();
        let digits = scaled.abs().to_string();
        let e = *exp as usize;
        let body = if e == 0 {
            digits
        } else if digits.len() > e {
            format!("{}.{}", &digits[..digits.len() - e], &digits[digits.len() - e..])
        } else {
            format!("0.{}{}", "0".repeat(e - digits.len()), digits)
        };
        Some(if neg { format!("-{body}") } else { body })
    }

    fn same_prime(a: u32, b: u32) {
        assert_eq!(a, b, "mixing value groups of different characteristic");
    }
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            Some(r) => write!(f, "{r}"),
            None => f.write_str("inf"),
        }
    }
}

impl Add for &GroupValue {
    type Output = GroupValue;
    fn add(self, rhs: &GroupValue) -> GroupValue {
        match (self, rhs) {
            (
                GroupValue::Finite { p, num: a, exp: ea },
                GroupValue::Finite { p: q, num: b, exp: eb },
            ) => {
                GroupValue::same_prime(*p, *q);
                let e = (*ea).max(*eb);
                let bp = BigInt::from(*p);
                let s = a * bp.clone().pow(e - ea) + b * bp.pow(e - eb);
                GroupValue::new(*p, s, e)
            }
            _ => GroupValue::Infinity,
        }
    }
}

impl Add for GroupValue {
    type Output = GroupValue;
    fn add(self, rhs: GroupValue) -> GroupValue {
        &self + &rhs
    }
}

impl Neg for &GroupValue {
    type Output = GroupValue;
    fn neg(self) -> GroupValue {
        match self {
            GroupValue::Finite { p, num, exp } => GroupValue::Finite {
                p: *p,
                num: -num,
                exp: *exp,
            },
            GroupValue::Infinity => panic!("negation of the infinite value"),
        }
    }
}

impl Neg for GroupValue {
    type Output = GroupValue;
    fn neg(self) -> GroupValue {
        -&self
    }
}

/// `a - b` with `b` finite; `∞ - b = ∞`.
impl Sub for &GroupValue {
    type Output = GroupValue;
    fn sub(self, rhs: &GroupValue) -> GroupValue {
        self + &(-rhs)
    }
}

impl Sub for GroupValue {
    type Output = GroupValue;
    fn sub(self, rhs: GroupValue) -> GroupValue {
        &self - &rhs
    }
}

impl PartialOrd for GroupValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GroupValue::Infinity, GroupValue::Infinity) => Ordering::Equal,
            (GroupValue::Infinity, _) => Ordering::Greater,
            (_, GroupValue::Infinity) => Ordering::Less,
            (
                GroupValue::Finite { p, num: a, exp: ea },
                GroupValue::Finite { p: q, num: b, exp: eb },
            ) => {
                GroupValue::same_prime(*p, *q);
                let e = (*ea).max(*eb);
                let bp = BigInt::from(*p);
                (a * bp.clone().pow(e - ea)).cmp(&(b * bp.pow(e - eb)))
            }
        }
    }
}

/// A reduced rational number, used for bounds that leave `Z[1/p]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalBound(pub BigRational);

impl RationalBound {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        RationalBound(BigRational::new(num.into(), den.into()))
    }

    pub fn from_value(v: &GroupValue) -> Option<Self> {
        v.to_rational().map(RationalBound)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for RationalBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for &RationalBound {
    type Output = RationalBound;
    fn add(self, rhs: &RationalBound) -> RationalBound {
        RationalBound(&self.0 + &rhs.0)
    }
}

impl Sub for &RationalBound {
    type Output = RationalBound;
    fn sub(self, rhs: &RationalBound) -> RationalBound {
        RationalBound(&self.0 - &rhs.0)
    }
}

/// Compare a group value with a rational bound by cross-multiplication.
pub fn cmp_bound(a: &GroupValue, r: &RationalBound) -> Ordering {
    match a {
        GroupValue::Infinity => Ordering::Greater,
        GroupValue::Finite { p, num, exp } => {
            let lhs = num * r.denom();
            let rhs = r.numer() * BigInt::from(*p).pow(*exp);
            lhs.cmp(&rhs)
        }
    }
}

/// `Ω = Σ_{i≥0} p^{-4i} = p^4 / (p^4 - 1)`.
pub fn omega(p: u32) -> Result<RationalBound> {
    check_prime(p)?;
    let p4 = BigInt::from(p).pow(4u32);
    Ok(RationalBound::new(p4.clone(), p4 - BigInt::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gv(p: u32, n: i64, e: u32) -> GroupValue {
        GroupValue::new(p, n, e)
    }

    #[test]
    fn addition_examples() {
        assert_eq!(&gv(2, 1, 2) + &gv(2, 1, 4), gv(2, 5, 4));
        assert_eq!(&GroupValue::Infinity + &gv(2, 3, 3), GroupValue::Infinity);
        assert_eq!(&gv(2, 17, 4) + &gv(2, -1, 0), gv(2, 1, 4));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(gv(2, 4, 3), gv(2, 1, 1));
        assert_eq!(gv(3, 0, 5), GroupValue::zero(3));
        match gv(3, 18, 2) {
            GroupValue::Finite { num, exp, .. } => {
                assert_eq!(num, BigInt::from(2));
                assert_eq!(exp, 0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn comparisons() {
        assert_eq!(gv(2, -15, 5).cmp(&gv(2, -1, 2)), Ordering::Less);
        assert_eq!(cmp_bound(&gv(2, 3, 1), &omega(2).unwrap()), Ordering::Greater);
        assert_eq!(gv(2, 0, 0).cmp(&gv(2, 0, 0)), Ordering::Equal);
        assert!(GroupValue::Infinity > gv(2, 1 << 40, 0));
    }

    #[test]
    fn omega_values() {
        assert_eq!(omega(2).unwrap(), RationalBound::new(16, 15));
        assert_eq!(omega(3).unwrap(), RationalBound::new(81, 80));
        for p in [2u32, 3, 5, 7] {
            let o = omega(p).unwrap();
            let p4 = BigRational::from_integer(BigInt::from(p).pow(4u32));
            assert_eq!(&o.0 * (&p4 - BigRational::one()), p4);
        }
        assert_eq!(omega(4), Err(Error::BadPrime(4)));
        assert_eq!(omega(11), Err(Error::BadPrime(11)));
    }

    #[test]
    fn renderings() {
        assert_eq!(gv(2, 17, 4).to_string(), "17/16");
        assert_eq!(gv(2, 17, 4).power_form(), "17/2^4");
        assert_eq!(gv(2, 17, 4).decimal().unwrap(), "1.0625");
        assert_eq!(gv(2, -15, 5).decimal().unwrap(), "-0.46875");
        assert_eq!(gv(3, 82, 4).decimal(), None);
        assert_eq!(gv(3, 5, 0).decimal().unwrap(), "5");
        assert_eq!(GroupValue::Infinity.to_string(), "inf");
    }

    #[test]
    fn p_power_and_scaling() {
        assert_eq!(GroupValue::p_power(2, -4), gv(2, 1, 4));
        assert_eq!(GroupValue::p_power(3, 2), gv(3, 9, 0));
        assert_eq!(gv(2, 1, 4).scale(16), gv(2, 1, 0));
        assert_eq!(gv(2, 17, 4).mul_p_pow(2), gv(2, 17, 2));
        assert_eq!(gv(2, 1, 0).mul_p_pow(3), gv(2, 8, 0));
    }
}
