//! Sparse bivariate polynomials over `F_p`.
//!
//! Terms are kept sorted by `(e2, e1)` ascending (second variable major)
//! with no zero coefficients, so structural equality is polynomial
//! equality and grouping by the second variable is a linear scan.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::value::check_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RingTag {
    /// `F_p[u, v]`, the base field `K`.
    UV,
    /// `F_p[x, y]`, the host field `K*`.
    XY,
    /// `F_p[x, v]`, presentation of `K_1 = K(x)`.
    XV,
}

impl RingTag {
    pub fn vars(self) -> (&'static str, &'static str) {
        match self {
            RingTag::UV => ("u", "v"),
            RingTag::XY => ("x", "y"),
            RingTag::XV => ("x", "v"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uv" => Some(RingTag::UV),
            "xy" => Some(RingTag::XY),
            "xv" => Some(RingTag::XV),
            _ => None,
        }
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.vars();
        write!(f, "({a},{b})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub tag: RingTag,
    pub p: u32,
}

impl Ring {
    pub fn new(tag: RingTag, p: u32) -> Result<Self> {
        check_prime(p)?;
        Ok(Ring { tag, p })
    }

    pub fn check(&self, other: &Ring) -> Result<()> {
        if self.p != other.p {
            return Err(Error::CharMismatch(self.p, other.p));
        }
        if self.tag != other.tag {
            return Err(Error::RingMismatch(self.tag, other.tag));
        }
        Ok(())
    }
}

/// Exponents `(e2, e1)`; the derived order is second-variable major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub e2: u64,
    pub e1: u64,
}

impl Mono {
    pub fn new(e1: u64, e2: u64) -> Self {
        Mono { e2, e1 }
    }

    fn mul(self, o: Mono) -> Mono {
        Mono {
            e2: self.e2 + o.e2,
            e1: self.e1 + o.e1,
        }
    }
}

#[inline]
pub(crate) fn fp_mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub(crate) fn fp_add(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn fp_neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub(crate) fn fp_inv(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    // Fermat: a^(p-2)
    let mut r = 1u32;
    for _ in 0..p - 2 {
        r = fp_mul(r, a, p);
    }
    r
}

pub(crate) fn fp_reduce(c: i64, p: u32) -> u32 {
    c.rem_euclid(p as i64) as u32
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: Ring,
    terms: Vec<(Mono, u32)>,
}

impl Poly {
    pub fn zero(ring: Ring) -> Self {
        Poly {
            ring,
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: Ring, c: i64) -> Self {
        Self::monomial(ring, c, 0, 0)
    }

    pub fn one(ring: Ring) -> Self {
        Self::constant(ring, 1)
    }

    /// `c · var1^e1 · var2^e2`.
    pub fn monomial(ring: Ring, c: i64, e1: u64, e2: u64) -> Self {
        let c = fp_reduce(c, ring.p);
        let terms = if c == 0 {
            Vec::new()
        } else {
            vec![(Mono::new(e1, e2), c)]
        };
        Poly { ring, terms }
    }

    pub fn var1(ring: Ring) -> Self {
        Self::monomial(ring, 1, 1, 0)
    }

    pub fn var2(ring: Ring) -> Self {
        Self::monomial(ring, 1, 0, 1)
    }

    /// Build from arbitrary `(e1, e2, coefficient)` triples; like terms are combined.
    pub fn from_terms<I>(ring: Ring, it: I) -> Self
    where
        I: IntoIterator<Item = (u64, u64, i64)>,
    {
        let mut acc: FxHashMap<Mono, u32> = FxHashMap::default();
        for (e1, e2, c) in it {
            let c = fp_reduce(c, ring.p);
            if c != 0 {
                let e = acc.entry(Mono::new(e1, e2)).or_insert(0);
                *e = fp_add(*e, c, ring.p);
            }
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: Ring, acc: FxHashMap<Mono, u32>) -> Self {
        let mut terms: Vec<(Mono, u32)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by_key(|t| t.0);
        Poly { ring, terms }
    }

    /// Terms must already be sorted, distinct and nonzero.
    pub(crate) fn from_sorted(ring: Ring, terms: Vec<(Mono, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|t| t.1 != 0 && t.1 < ring.p));
        Poly { ring, terms }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn p(&self) -> u32 {
        self.ring.p
    }

    pub fn terms(&self) -> &[(Mono, u32)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (Mono::new(0, 0), 1)
    }

    /// Returns the same polynomial re-tagged into another ring of equal characteristic.
    pub fn retag(&self, tag: RingTag) -> Poly {
        Poly {
            ring: Ring { tag, p: self.ring.p },
            terms: self.terms.clone(),
        }
    }

    /// Degree in the second variable; `None` for the zero polynomial.
    pub fn deg2(&self) -> Option<u64> {
        self.terms.last().map(|t| t.0.e2)
    }

    pub fn deg1(&self) -> Option<u64> {
        self.terms.iter().map(|t| t.0.e1).max()
    }

    /// Monic as a polynomial in the second variable over `F_p[var1]`.
    pub fn is_monic_second(&self) -> bool {
        let Some(d) = self.deg2() else { return false };
        let top: Vec<_> = self.terms.iter().filter(|t| t.0.e2 == d).collect();
        top.len() == 1 && top[0].0.e1 == 0 && top[0].1 == 1
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Option<Mono> {
        let mut it = self.terms.iter();
        let first = it.next()?.0;
        Some(it.fold(first, |m, t| Mono {
            e1: m.e1.min(t.0.e1),
            e2: m.e2.min(t.0.e2),
        }))
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, m: Mono) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|&(t, c)| {
                debug_assert!(t.e1 >= m.e1 && t.e2 >= m.e2);
                (
                    Mono {
                        e1: t.e1 - m.e1,
                        e2: t.e2 - m.e2,
                    },
                    c,
                )
            })
            .collect();
        Poly::from_sorted(self.ring, terms)
    }

    pub fn mul_monomial(&self, c: i64, e1: u64, e2: u64) -> Poly {
        let c = fp_reduce(c, self.ring.p);
        if c == 0 {
            return Poly::zero(self.ring);
        }
        let m = Mono::new(e1, e2);
        let terms = self
            .terms
            .iter()
            .map(|&(t, a)| (t.mul(m), fp_mul(a, c, self.ring.p)))
            .collect();
        Poly::from_sorted(self.ring, terms)
    }

    pub fn scale(&self, c: i64) -> Poly {
        self.mul_monomial(c, 0, 0)
    }

    pub fn neg(&self) -> Poly {
        self.scale(-1)
    }

    /// Leading coefficient in the second variable, as a constant; `None` if it is
    /// not a constant.
    pub fn leading_constant(&self) -> Option<u32> {
        let d = self.deg2()?;
        let top: Vec<_> = self.terms.iter().filter(|t| t.0.e2 == d).collect();
        (top.len() == 1 && top[0].0.e1 == 0).then(|| top[0].1)
    }

    fn merge(&self, other: &Poly, sign: u32) -> Poly {
        let p = self.ring.p;
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0, fp_mul(b[j].1, sign, p)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = fp_add(a[i].1, fp_mul(b[j].1, sign, p), p);
                    if c != 0 {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(m, c)| (m, fp_mul(c, sign, p))));
        Poly::from_sorted(self.ring, out)
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.ring.check(&other.ring)?;
        Ok(self.merge(other, 1))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.ring.check(&other.ring)?;
        Ok(self.merge(other, self.ring.p - 1))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.ring.check(&other.ring)?;
        Ok(self.mul_unchecked(other))
    }

    /// Panicking variants for internal code where ring agreement is structural.
    pub fn add(&self, other: &Poly) -> Poly {
        self.try_add(other).expect("ring mismatch in add")
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.try_sub(other).expect("ring mismatch in sub")
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.try_mul(other).expect("ring mismatch in mul")
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        let p = self.ring.p;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.ring);
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.len() == 1 {
            let (m, c) = small.terms[0];
            return big.mul_monomial(c as i64, m.e1, m.e2);
        }
        let mut acc: FxHashMap<Mono, u32> = FxHashMap::default();
        acc.reserve(small.len() * big.len());
        for &(ma, ca) in &small.terms {
            for &(mb, cb) in &big.terms {
                let e = acc.entry(ma.mul(mb)).or_insert(0);
                *e = fp_add(*e, fp_mul(ca, cb, p), p);
            }
        }
        Poly::from_map(self.ring, acc)
    }

    /// `f^(p^t)`: coefficients are fixed by Frobenius on `F_p`, exponents scale by `p^t`.
    pub fn frob_pow(&self, t: u32) -> Poly {
        let q = (self.ring.p as u64).pow(t);
        let terms = self
            .terms
            .iter()
            .map(|&(m, c)| {
                (
                    Mono {
                        e1: m.e1 * q,
                        e2: m.e2 * q,
                    },
                    c,
                )
            })
            .collect();
        Poly::from_sorted(self.ring, terms)
    }

    /// `f^n`, combining Frobenius layers for the base-`p` digits of `n`.
    pub fn pow(&self, n: u64) -> Poly {
        let p = self.ring.p as u64;
        let mut result = Poly::one(self.ring);
        let mut layer = self.clone();
        let mut n = n;
        while n > 0 {
            let digit = n % p;
            if digit > 0 {
                let mut d = Poly::one(self.ring);
                for _ in 0..digit {
                    d = d.mul_unchecked(&layer);
                }
                result = result.mul_unchecked(&d);
            }
            n /= p;
            if n > 0 {
                layer = layer.frob_pow(1);
            }
        }
        result
    }

    /// Repeated multiplication; the test oracle for [`Poly::pow`].
    pub fn pow_naive(&self, n: u64) -> Poly {
        let mut r = Poly::one(self.ring);
        for _ in 0..n {
            r = r.mul_unchecked(self);
        }
        r
    }

    /// Division with remainder in the second variable by a monic divisor.
    pub fn divmod_second_var(&self, g: &Poly) -> Result<(Poly, Poly)> {
        self.ring.check(&g.ring)?;
        if !g.is_monic_second() {
            return Err(Error::NotMonic);
        }
        let dg = g.deg2().unwrap();
        let mut rows = Rows::from_poly(self);
        let grows = Rows::from_poly(g);
        let q = rows.divmod(&grows, dg, self.ring.p);
        Ok((q.into_poly(self.ring), rows.into_poly(self.ring)))
    }

    /// Integer weight `w1·e1 + w2·e2` of a monomial.
    pub fn weight(m: Mono, w: (u64, u64)) -> u64 {
        w.0 * m.e1 + w.1 * m.e2
    }

    /// Smallest monomial weight, `None` for zero.
    pub fn min_weight(&self, w: (u64, u64)) -> Option<u64> {
        self.terms.iter().map(|t| Self::weight(t.0, w)).min()
    }

    /// Drop every monomial of weight above `limit`.
    pub fn truncate(&self, w: (u64, u64), limit: u64) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|t| Self::weight(t.0, w) <= limit)
            .cloned()
            .collect();
        Poly::from_sorted(self.ring, terms)
    }

    /// `(self · other)` truncated at `limit`; weights add under products, so
    /// only pairs that stay within the limit are formed.
    pub fn mul_truncated(&self, other: &Poly, w: (u64, u64), limit: u64) -> Poly {
        let p = self.ring.p;
        let mut b: Vec<(u64, Mono, u32)> = other
            .terms
            .iter()
            .map(|&(m, c)| (Self::weight(m, w), m, c))
            .filter(|t| t.0 <= limit)
            .collect();
        b.sort_unstable_by_key(|t| t.0);
        let mut acc: FxHashMap<Mono, u32> = FxHashMap::default();
        for &(ma, ca) in &self.terms {
            let wa = Self::weight(ma, w);
            if wa > limit {
                continue;
            }
            for &(wb, mb, cb) in &b {
                if wa + wb > limit {
                    break;
                }
                let e = acc.entry(ma.mul(mb)).or_insert(0);
                *e = fp_add(*e, fp_mul(ca, cb, p), p);
            }
        }
        Poly::from_map(self.ring, acc)
    }

    /// `f^n` truncated at `limit`.
    pub fn pow_truncated(&self, n: u64, w: (u64, u64), limit: u64) -> Poly {
        let p = self.ring.p as u64;
        let mut result = Poly::one(self.ring);
        let mut n = n;
        let mut t = 0u32;
        while n > 0 {
            let digit = n % p;
            if digit > 0 {
                // (f^{p^t})_{≤L} = ((f_{≤L/p^t})^{p^t})_{≤L}
                let q = p.pow(t);
                let layer = self.truncate(w, limit / q).frob_pow(t).truncate(w, limit);
                for _ in 0..digit {
                    result = result.mul_truncated(&layer, w, limit);
                }
            }
            n /= p;
            t += 1;
        }
        result
    }

    /// Evaluate all terms with `var2 = 0`, i.e. the part free of the second variable.
    pub fn second_var_free_part(&self) -> Poly {
        let terms = self.terms.iter().take_while(|t| t.0.e2 == 0).cloned().collect();
        Poly::from_sorted(self.ring, terms)
    }
}

/// A sparse univariate polynomial in the first variable, sorted by exponent.
pub(crate) type Uni = Vec<(u64, u32)>;

/// `acc - c * x^shift * a`, merging sorted univariate term lists.
pub(crate) fn uni_axpy(acc: &Uni, a: &Uni, c: u32, shift: u64, p: u32) -> Uni {
    let factor = fp_neg(c, p);
    let mut out = Vec::with_capacity(acc.len() + a.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < a.len() {
        let ej = a[j].0 + shift;
        match acc[i].0.cmp(&ej) {
            std::cmp::Ordering::Less => {
                out.push(acc[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((ej, fp_mul(a[j].1, factor, p)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let s = fp_add(acc[i].1, fp_mul(a[j].1, factor, p), p);
                if s != 0 {
                    out.push((ej, s));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&acc[i..]);
    out.extend(a[j..].iter().map(|&(e, x)| (e + shift, fp_mul(x, factor, p))));
    out
}

/// Polynomial as rows indexed by the second-variable degree.
#[derive(Clone, Debug, Default)]
pub(crate) struct Rows {
    pub rows: Vec<Uni>,
}

impl Rows {
    pub fn from_poly(f: &Poly) -> Self {
        let n = f.deg2().map_or(0, |d| d as usize + 1);
        let mut rows = vec![Vec::new(); n];
        for &(m, c) in f.terms() {
            rows[m.e2 as usize].push((m.e1, c));
        }
        Rows { rows }
    }

    pub fn into_poly(self, ring: Ring) -> Poly {
        let mut terms = Vec::new();
        for (e2, row) in self.rows.into_iter().enumerate() {
            terms.extend(row.into_iter().map(|(e1, c)| (Mono::new(e1, e2 as u64), c)));
        }
        Poly::from_sorted(ring, terms)
    }

    pub fn trim(&mut self) {
        while self.rows.last().is_some_and(|r| r.is_empty()) {
            self.rows.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    /// In place: `self` becomes the remainder; returns the quotient.
    /// `g` must be monic of degree `dg` in the second variable.
    pub fn divmod(&mut self, g: &Rows, dg: u64, p: u32) -> Rows {
        let dg = dg as usize;
        self.trim();
        let n = self.rows.len();
        if n <= dg {
            return Rows::default();
        }
        let mut q = vec![Vec::new(); n - dg];
        let lower: Vec<(usize, &Uni)> = g.rows[..dg]
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .collect();
        for j in (dg..n).rev() {
            let c = std::mem::take(&mut self.rows[j]);
            if c.is_empty() {
                continue;
            }
            let shift = j - dg;
            for &(l, gl) in &lower {
                let target = shift + l;
                for &(e, a) in gl {
                    let updated = uni_axpy(&self.rows[target], &c, a, e, p);
                    self.rows[target] = updated;
                }
            }
            q[shift] = c;
        }
        self.rows.truncate(dg);
        self.trim();
        let mut q = Rows { rows: q };
        q.trim();
        q
    }
}

impl fmt::Display for Poly {
    /// Canonical rendering: terms by descending `(e2, e1)`, caret exponents,
    /// coefficients in `0..p`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let (a, b) = self.ring.tag.vars();
        for (k, &(m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if c != 1 || (m.e1 == 0 && m.e2 == 0) {
                parts.push(c.to_string());
            }
            for (name, e) in [(a, m.e1), (b, m.e2)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}
