//! Values by top-down expansion in a generating sequence.
//!
//! A polynomial `f` is written as `Σ λ · S_0^m · S_1^{a_1} ⋯ S_n^{a_n}` with
//! `a_i < p²` by dividing first by the largest key polynomial that fits its
//! degree, then recursing into the coefficients. The value of `f` is the
//! minimum of the term values. Term values within one expansion must be
//! pairwise distinct; a collision means the value table or the expansion is
//! wrong, and the engine panics with a dump rather than return a number.

use std::fmt;

use num_bigint::BigInt;

use crate::artin::EmbeddingConfig;
use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::keyseq::GenSeq;
use crate::poly::{Poly, Rows};
use crate::ratfunc::RatFunc;
use crate::value::GroupValue;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub coeff: u32,
    /// Exponent of `S_0`.
    pub m: u64,
    /// `a[i - 1]` is the exponent of `S_i`.
    pub a: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct StandardExpansion {
    pub terms: Vec<ExpansionTerm>,
    /// Highest key polynomial index used in the expansion basis.
    pub n: usize,
}

impl StandardExpansion {
    pub fn term_value(&self, seq: &GenSeq, t: &ExpansionTerm) -> GroupValue {
        let mut v = seq.value(0).scale(t.m);
        for (i, &a) in t.a.iter().enumerate() {
            if a > 0 {
                v = &v + &seq.value(i + 1).scale(a);
            }
        }
        v
    }

    /// Multiply the expansion back out; must reproduce the input exactly.
    pub fn reconstruct(&self, seq: &GenSeq) -> Poly {
        let ring = seq.ring();
        let mut acc = Poly::zero(ring);
        for t in &self.terms {
            let mut g = Poly::monomial(ring, t.coeff as i64, 0, 0).mul(&seq.poly(0).pow(t.m));
            for (i, &a) in t.a.iter().enumerate() {
                if a > 0 {
                    g = g.mul(&seq.poly(i + 1).pow(a as u64));
                }
            }
            acc = acc.add(&g);
        }
        acc
    }

    pub fn render(&self, seq: &GenSeq) -> String {
        let (s0, _) = seq.ring().tag.vars();
        let mut lines = Vec::new();
        for t in &self.terms {
            let mut parts = vec![t.coeff.to_string()];
            if t.m > 0 {
                parts.push(if t.m == 1 { s0.to_string() } else { format!("{s0}^{}", t.m) });
            }
            for (i, &a) in t.a.iter().enumerate() {
                match a {
                    0 => {}
                    1 => parts.push(format!("S{}", i + 1)),
                    _ => parts.push(format!("S{}^{a}", i + 1)),
                }
            }
            lines.push(format!("{}    value {}", parts.join("*"), self.term_value(seq, t)));
        }
        lines.join("\n")
    }
}

/// Diagnostic for the tied-minimum fault.
struct TieDump<'a> {
    exp: &'a StandardExpansion,
    seq: &'a GenSeq,
    value: GroupValue,
}

impl fmt::Display for TieDump<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "standard expansion has two terms of value {} (p = {}, n = {}, {} terms)",
            self.value,
            self.seq.p(),
            self.exp.n,
            self.exp.terms.len()
        )?;
        for i in 0..=self.exp.n {
            writeln!(f, "  table: S_{i} -> {}", self.seq.value(i))?;
        }
        for t in self.exp.terms.iter().take(40) {
            writeln!(
                f,
                "  term c={} m={} a={:?} value {}",
                t.coeff,
                t.m,
                t.a,
                self.exp.term_value(self.seq, t)
            )?;
        }
        Ok(())
    }
}

pub fn expand(f: &Poly, seq: &GenSeq) -> Result<StandardExpansion> {
    seq.ring().check(&f.ring())?;
    let Some(d) = f.deg2() else {
        return Err(Error::ZeroValue);
    };
    let n = seq.index_for_degree(d);
    let mut terms = Vec::new();
    let mut a = vec![0u32; n];
    expand_rows(Rows::from_poly(f), n, seq, &mut a, &mut terms);
    Ok(StandardExpansion { terms, n })
}

fn expand_rows(
    mut rows: Rows,
    level: usize,
    seq: &GenSeq,
    a: &mut Vec<u32>,
    out: &mut Vec<ExpansionTerm>,
) {
    rows.trim();
    if rows.is_zero() {
        return;
    }
    if level == 1 {
        for (j, row) in rows.rows.iter().enumerate() {
            a[0] = j as u32;
            for &(m, c) in row {
                out.push(ExpansionTerm {
                    coeff: c,
                    m,
                    a: a.clone(),
                });
            }
        }
        a[0] = 0;
        return;
    }
    let key = seq.poly(level);
    let key_rows = Rows::from_poly(&key);
    let dk = seq.degree(level);
    let p2 = seq.p() * seq.p();
    let mut j = 0u32;
    while !rows.is_zero() {
        assert!(j < p2, "expansion exponent reached p² at S_{level}");
        let quotient = rows.divmod(&key_rows, dk, seq.p());
        a[level - 1] = j;
        expand_rows(std::mem::take(&mut rows), level - 1, seq, a, out);
        rows = quotient;
        j += 1;
    }
    a[level - 1] = 0;
}

/// Value of an expansion; panics when two terms share a value.
pub fn expansion_value(exp: &StandardExpansion, seq: &GenSeq) -> GroupValue {
    let (ints, d) = seq.integer_values(exp.n);
    let mut vals: Vec<(i128, usize)> = exp
        .terms
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let mut v = ints[0]
                .checked_mul(t.m as i128)
                .expect("term value overflow");
            for (i, &ai) in t.a.iter().enumerate() {
                v = v
                    .checked_add(ints[i + 1].checked_mul(ai as i128).expect("term value overflow"))
                    .expect("term value overflow");
            }
            (v, k)
        })
        .collect();
    vals.sort_unstable();
    if let Some(w) = vals.windows(2).find(|w| w[0].0 == w[1].0) {
        let value = GroupValue::new(seq.p(), BigInt::from(w[0].0), d);
        panic!("tied minimum: {}", TieDump { exp, seq, value });
    }
    match vals.first() {
        Some(&(v, _)) => GroupValue::new(seq.p(), BigInt::from(v), d),
        None => GroupValue::Infinity,
    }
}

pub fn value_poly(f: &Poly, seq: &GenSeq) -> Result<GroupValue> {
    seq.ring().check(&f.ring())?;
    if f.is_zero() {
        return Ok(GroupValue::Infinity);
    }
    let exp = expand(f, seq)?;
    Ok(expansion_value(&exp, seq))
}

pub fn value_rat(f: &RatFunc, seq: &GenSeq) -> Result<GroupValue> {
    if f.is_zero() {
        return Ok(GroupValue::Infinity);
    }
    let num = value_poly(f.numer(), seq)?;
    let den = value_poly(f.denom(), seq)?;
    Ok(&num - &den)
}

/// Compare `ν(f)` on `K` with `ν*` of its image in `K*`.
pub fn cross_check(f: &RatFunc, cfg: &EmbeddingConfig) -> Certificate {
    let cert = Certificate::new("restriction/cross-engine")
        .param("p", cfg.p)
        .param("c", cfg.c)
        .param("f", f);
    let run = || -> Result<(GroupValue, GroupValue)> {
        let pseq = GenSeq::p_sequence(cfg.p)?;
        let qseq = GenSeq::q_sequence(cfg.p)?;
        let base = value_rat(f, &pseq)?;
        let image = cfg.embed_k(f)?;
        let host = value_rat(&image, &qseq)?;
        Ok((base, host))
    };
    match run() {
        Ok((base, host)) => {
            let ok = base == host;
            cert.outcome(format!("nu = {base}"), format!("nu* = {host}"), ok)
        }
        Err(e) => cert.from_error(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    fn pseq(p: u32) -> GenSeq {
        GenSeq::p_sequence(p).unwrap()
    }

    fn uv(p: u32, t: &[(u64, u64, i64)]) -> Poly {
        Poly::from_terms(pseq(p).ring(), t.iter().cloned())
    }

    fn gv(p: u32, n: i64, e: u32) -> GroupValue {
        GroupValue::new(p, n, e)
    }

    #[test]
    fn expansion_sees_the_cancellation() {
        let seq = pseq(2);
        let f = uv(2, &[(0, 4, 1), (1, 0, 1)]);
        let exp = expand(&f, &seq).unwrap();
        assert_eq!(
            exp.terms,
            vec![ExpansionTerm {
                coeff: 1,
                m: 0,
                a: vec![0, 1]
            }]
        );
        assert_eq!(value_poly(&f, &seq).unwrap(), gv(2, 17, 4));
    }

    #[test]
    fn pure_power_of_first_variable() {
        let seq = pseq(2);
        let exp = expand(&uv(2, &[(3, 0, 1)]), &seq).unwrap();
        assert_eq!(exp.terms.len(), 1);
        assert_eq!(exp.terms[0].m, 3);
        assert!(exp.terms[0].a.iter().all(|&a| a == 0));
        assert_eq!(value_poly(&uv(2, &[(7, 0, 1)]), &seq).unwrap(), gv(2, 7, 0));
    }

    #[test]
    fn v_to_the_fifth() {
        let seq = pseq(2);
        let f = uv(2, &[(0, 5, 1)]);
        let exp = expand(&f, &seq).unwrap();
        let mut got: Vec<(u64, Vec<u32>)> = exp.terms.iter().map(|t| (t.m, t.a.clone())).collect();
        got.sort();
        assert_eq!(got, vec![(0, vec![1, 1]), (1, vec![1, 0])]);
        assert_eq!(exp.reconstruct(&seq), f);
        assert_eq!(value_poly(&f, &seq).unwrap(), gv(2, 5, 2));
    }

    #[test]
    fn rational_values() {
        let seq = pseq(2);
        let ring = seq.ring();
        let u = RatFunc::from_poly(Poly::var1(ring));
        let v = RatFunc::from_poly(Poly::var2(ring));
        assert_eq!(value_rat(&u.div(&v).unwrap(), &seq).unwrap(), gv(2, 3, 2));
        let f = RatFunc::from_poly(uv(2, &[(2, 3, 1), (0, 9, 1)]));
        assert_eq!(
            value_rat(&f.div(&f).unwrap(), &seq).unwrap(),
            GroupValue::zero(2)
        );
        let inv_v2 = RatFunc::new(Poly::one(ring), uv(2, &[(0, 2, 1)])).unwrap();
        assert_eq!(value_rat(&inv_v2, &seq).unwrap(), gv(2, -1, 1));
        assert_eq!(value_rat(&RatFunc::zero(ring), &seq).unwrap(), GroupValue::Infinity);
    }

    #[test]
    fn zero_polynomial() {
        let seq = pseq(3);
        assert_eq!(value_poly(&Poly::zero(seq.ring()), &seq).unwrap(), GroupValue::Infinity);
        assert_eq!(expand(&Poly::zero(seq.ring()), &seq).unwrap_err(), Error::ZeroValue);
    }

    #[test]
    fn wrong_ring_rejected() {
        let seq = pseq(2);
        let f = Poly::var1(Ring::new(crate::poly::RingTag::XY, 2).unwrap());
        assert!(matches!(value_poly(&f, &seq), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn key_polynomials_have_closed_form_values() {
        for p in [2u32, 3] {
            let seq = pseq(p);
            for i in 0..=5 {
                let f = seq.poly(i);
                assert_eq!(value_poly(&f, &seq).unwrap(), seq.value(i), "p={p} i={i}");
            }
        }
    }

    #[test]
    #[should_panic(expected = "tied minimum")]
    fn corrupted_table_aborts() {
        // pretend ν(v) = 1/2 so that ν(v²) collides with ν(u) = 1
        let seq = pseq(2).with_value_override(vec![(1, gv(2, 1, 1))]);
        let f = uv(2, &[(0, 2, 1), (1, 0, 1)]);
        let _ = value_poly(&f, &seq);
    }

    #[test]
    fn cross_check_examples() {
        let cfg = EmbeddingConfig::new(2, 1).unwrap();
        let seq = pseq(2);
        let ring = seq.ring();
        for f in [Poly::var1(ring), Poly::var2(ring), (*seq.poly(3)).clone()] {
            let c = cross_check(&RatFunc::from_poly(f), &cfg);
            assert!(c.passed(), "{c:?}");
        }
    }
}
