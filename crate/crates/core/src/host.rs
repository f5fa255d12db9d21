//! Values of elements of `K_1 = K(x)` computed in the host `F_p(x,y)`
//! without materialising high-weight monomials.
//!
//! Every monomial `x^a y^b` has `ν*(x^a y^b) = (p²a + b)/p³`, and `ν*` of a
//! polynomial is at least its smallest monomial weight. So for `F = F_{≤L} +
//! F_{>L}` split by integer weight `L`, a computed `ν*(F_{≤L}) ≤ L/p³` is
//! already `ν*(F)`, while `ν*(F_{≤L}) > L/p³` means the cut was too low. The
//! cut is raised until the first case holds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::artin::EmbeddingConfig;
use crate::engine::value_poly;
use crate::error::{Error, Result};
use crate::keyseq::GenSeq;
use crate::poly::{Poly, Ring, RingTag};
use crate::value::GroupValue;

/// `(Σ_e x^e N_e) / (x^{den_x} D)` with `N_e, D ∈ F_p[u,v]`.
#[derive(Clone, Debug)]
pub struct K1Frac {
    pub terms: Vec<(u64, Poly)>,
    pub den_x: u64,
    pub den: Poly,
}

impl K1Frac {
    pub fn new(terms: Vec<(u64, Poly)>, den_x: u64, den: Poly) -> Self {
        K1Frac { terms, den_x, den }
    }
}

fn weights(p: u32) -> (u64, u64) {
    ((p * p) as u64, 1)
}

/// Largest weight any monomial of `x^shift · Embed_A(f)` can have.
fn max_weight(f: &Poly, shift: u64, a_deg: u64, cfg: &EmbeddingConfig) -> u64 {
    let p = cfg.p as u64;
    f.terms()
        .iter()
        .map(|&(m, _)| {
            let xdeg = shift + p * m.e1 + (p - 1) * (a_deg - m.e1) + cfg.c * m.e2;
            p * p * xdeg + p * m.e2
        })
        .max()
        .unwrap_or(0)
}

/// Smallest weight of `x^shift · Embed_A(f)`: the `x^{pa} y^{pb}` corner.
fn min_weight(f: &Poly, shift: u64, p: u64) -> Option<u64> {
    f.terms()
        .iter()
        .map(|&(m, _)| p * p * (shift + p * m.e1) + p * m.e2)
        .min()
}

/// `x^shift · Σ c x^{pa} (1 − x^{p−1})^{A−a} (y^p − x^c y)^b`, truncated at
/// `limit`. Dividing by `(1 − x^{p−1})^A`, a unit, gives the image of `f`.
fn embed_truncated(f: &Poly, shift: u64, a_deg: u64, cfg: &EmbeddingConfig, limit: u64) -> Poly {
    let p = cfg.p as u64;
    let host = Ring {
        tag: RingTag::XY,
        p: cfg.p,
    };
    let w = weights(cfg.p);
    let unit = cfg.unit();
    let v_img = Poly::monomial(host, 1, 0, p).sub(&Poly::monomial(host, 1, cfg.c, 1));
    let mut acc = Poly::zero(host);
    let mut vpow: std::collections::HashMap<u64, Poly> = Default::default();
    let mut upow: std::collections::HashMap<u64, Poly> = Default::default();
    for &(m, c) in f.terms() {
        let base = p * p * (shift + p * m.e1);
        let low = base + p * m.e2;
        if low > limit {
            continue;
        }
        let rest = limit - base;
        let vb = vpow
            .entry(m.e2)
            .or_insert_with(|| v_img.pow_truncated(m.e2, w, limit))
            .truncate(w, rest);
        let ua = upow
            .entry(a_deg - m.e1)
            .or_insert_with(|| unit.pow_truncated(a_deg - m.e1, w, limit));
        let term = vb
            .mul_truncated(ua, w, rest)
            .mul_monomial(c as i64, shift + p * m.e1, 0);
        acc = acc.add(&term);
    }
    acc
}

fn ceil_weight(v: &GroupValue, p: u32) -> Result<u64> {
    let r = v.to_rational().ok_or(Error::ZeroValue)?;
    let scaled = r * BigInt::from(p).pow(3u32);
    let c = scaled.numer().div_ceil(scaled.denom());
    Ok(c.to_u64().unwrap_or(0))
}

/// `ν*` of the polynomial produced by `build(limit)`, raising the cut from
/// `start` until the truncated value is provably exact.
fn adaptive_value<F>(build: F, start: u64, margin: u64, ceiling: u64, seq: &GenSeq) -> Result<GroupValue>
where
    F: Fn(u64) -> Poly,
{
    let p3 = BigInt::from(seq.p()).pow(3u32);
    let mut margin = margin.max(1);
    loop {
        let limit = start.saturating_add(margin).min(ceiling);
        let f = build(limit);
        let exact_anyway = limit >= ceiling;
        if f.is_zero() {
            if exact_anyway {
                return Ok(GroupValue::Infinity);
            }
        } else {
            let v = value_poly(&f, seq)?;
            let r = v.to_rational().expect("nonzero polynomial has finite value");
            if exact_anyway || r * p3.clone() <= BigInt::from(limit).into() {
                return Ok(v);
            }
        }
        margin = margin.saturating_mul(4);
    }
}

/// `ν_1` of the fraction, via the host engine `seq` (the Q-sequence).
pub fn host_value(f: &K1Frac, cfg: &EmbeddingConfig, seq: &GenSeq) -> Result<GroupValue> {
    let p = cfg.p;
    let base = cfg.base_ring();
    let host = cfg.host_ring();
    host.check(&seq.ring())?;
    for (_, n) in &f.terms {
        base.check(&n.ring())?;
    }
    base.check(&f.den.ring())?;
    if f.den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let pp = p as u64;
    let p3 = pp.pow(3);

    let a_den = f.den.deg1().unwrap_or(0);
    let den_ceiling = max_weight(&f.den, 0, a_den, cfg);
    let den_start = min_weight(&f.den, 0, pp).unwrap_or(0);
    let den_val = adaptive_value(
        |l| embed_truncated(&f.den, 0, a_den, cfg, l),
        den_start,
        p3,
        den_ceiling,
        seq,
    )?;

    let a_num = f
        .terms
        .iter()
        .filter_map(|(_, n)| n.deg1())
        .max()
        .unwrap_or(0);
    let ceiling = f
        .terms
        .iter()
        .map(|(e, n)| max_weight(n, *e, a_num, cfg))
        .max()
        .unwrap_or(0);
    let lowest = f
        .terms
        .iter()
        .filter_map(|(e, n)| min_weight(n, *e, pp))
        .min();
    let Some(lowest) = lowest else {
        return Ok(GroupValue::Infinity);
    };
    // expect the numerator near ν(den) + den_x/p; cancellation only raises it
    let guess = &den_val + &GroupValue::new(p, f.den_x as i64, 1);
    let start = ceil_weight(&guess, p)?.max(lowest);
    let num_val = adaptive_value(
        |l| {
            let mut acc = Poly::zero(host);
            for (e, n) in &f.terms {
                acc = acc.add(&embed_truncated(n, *e, a_num, cfg, l));
            }
            acc
        },
        start,
        2 * p3,
        ceiling,
        seq,
    )?;
    Ok(&(&num_val - &den_val) - &GroupValue::new(p, f.den_x as i64, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::value_rat;
    use crate::ratfunc::RatFunc;

    fn plain(f: &K1Frac, cfg: &EmbeddingConfig, seq: &GenSeq) -> GroupValue {
        let host = cfg.host_ring();
        let mut num = RatFunc::zero(host);
        for (e, n) in &f.terms {
            let img = cfg.embed_k(&RatFunc::from_poly(n.clone())).unwrap();
            num = num.add(&img.mul(&RatFunc::from_poly(Poly::monomial(host, 1, *e, 0))));
        }
        let den = cfg
            .embed_k(&RatFunc::from_poly(f.den.clone()))
            .unwrap()
            .mul(&RatFunc::from_poly(Poly::monomial(host, 1, f.den_x, 0)));
        value_rat(&num.div(&den).unwrap(), seq).unwrap()
    }

    #[test]
    fn matches_untruncated_route() {
        for (p, c) in [(2u32, 1u64), (2, 2), (3, 2), (3, 4)] {
            let cfg = EmbeddingConfig::new(p, c).unwrap();
            let seq = GenSeq::q_sequence(p).unwrap();
            let r = cfg.base_ring();
            let pseq = GenSeq::p_sequence(p).unwrap();
            let p3 = (*pseq.poly(3)).clone();
            let cases = vec![
                K1Frac::new(vec![(0, Poly::var1(r))], 0, Poly::one(r)),
                K1Frac::new(vec![(0, Poly::var2(r)), (1, Poly::one(r))], 0, Poly::var1(r)),
                K1Frac::new(
                    vec![(0, Poly::var2(r).frob_pow(1)), (p as u64, Poly::constant(r, -1))],
                    0,
                    Poly::one(r),
                ),
                K1Frac::new(vec![(0, p3.clone()), (2, Poly::var1(r))], 1, (*pseq.poly(2)).clone()),
                K1Frac::new(vec![(0, Poly::one(r)), (1, p3.neg())], 1, Poly::var2(r)),
            ];
            for f in cases {
                assert_eq!(host_value(&f, &cfg, &seq).unwrap(), plain(&f, &cfg, &seq), "p={p} c={c} {f:?}");
            }
        }
    }

    #[test]
    fn zero_numerator_and_bad_denominator() {
        let cfg = EmbeddingConfig::new(2, 1).unwrap();
        let seq = GenSeq::q_sequence(2).unwrap();
        let r = cfg.base_ring();
        let zero = K1Frac::new(vec![(0, Poly::var1(r)), (0, Poly::var1(r).neg())], 0, Poly::one(r));
        assert_eq!(host_value(&zero, &cfg, &seq).unwrap(), GroupValue::Infinity);
        let bad = K1Frac::new(vec![(0, Poly::one(r))], 0, Poly::zero(r));
        assert_eq!(host_value(&bad, &cfg, &seq), Err(Error::DivisionByZero));
    }
}
