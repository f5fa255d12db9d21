//! Generating sequences `S_0, S_1, S_2 = S_1^{p²} − S_0,
//! S_{i+1} = S_i^{p²} − S_0^{p^{2i−2}} S_{i−1}` with their values.
//!
//! The P-sequence lives on `(u,v)` with `ν(u) = 1`; the Q-sequence lives on
//! `(x,y)` with `ν*(x) = 1/p`, so that `ν*` restricted to `K` is `ν` with no
//! rescaling (`u = x^p · unit`).

use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::Pow;

use crate::error::Result;
use crate::poly::{Poly, Ring, RingTag};
use crate::value::GroupValue;

#[derive(Clone, Debug)]
pub struct KeyPoly {
    pub poly: Arc<Poly>,
    pub value: GroupValue,
}

#[derive(Debug)]
pub struct GenSeq {
    ring: Ring,
    scale: GroupValue,
    // concurrent readers, one writer extends
    cache: RwLock<Vec<KeyPoly>>,
    value_override: Vec<(usize, GroupValue)>,
}

impl Clone for GenSeq {
    fn clone(&self) -> Self {
        GenSeq {
            ring: self.ring,
            scale: self.scale.clone(),
            cache: RwLock::new(self.cache.read().unwrap().clone()),
            value_override: self.value_override.clone(),
        }
    }
}

/// `Σ_{j=0}^{i-1} p^{4j-2i}` for `i ≥ 1`, and `1` for `i = 0`.
pub fn closed_form_value(p: u32, i: usize) -> GroupValue {
    if i == 0 {
        return GroupValue::integer(p, 1);
    }
    let bp = BigInt::from(p);
    let num: BigInt = (0..i).map(|j| bp.clone().pow(4 * j as u32)).sum();
    GroupValue::new(p, num, 2 * i as u32)
}

impl GenSeq {
    pub fn new(ring: Ring, scale: GroupValue) -> Self {
        let s0 = Poly::var1(ring);
        let s1 = Poly::var2(ring);
        let mut seq = GenSeq {
            ring,
            scale,
            cache: RwLock::new(Vec::new()),
            value_override: Vec::new(),
        };
        let v0 = seq.closed_value(0);
        let v1 = seq.closed_value(1);
        *seq.cache.get_mut().unwrap() = vec![
            KeyPoly {
                poly: Arc::new(s0),
                value: v0,
            },
            KeyPoly {
                poly: Arc::new(s1),
                value: v1,
            },
        ];
        seq
    }

    /// `P_0 = u, P_1 = v, …` on `(u,v)` with `ν(u) = 1`.
    pub fn p_sequence(p: u32) -> Result<Self> {
        Ok(GenSeq::new(Ring::new(RingTag::UV, p)?, GroupValue::integer(p, 1)))
    }

    /// `Q_0 = x, Q_1 = y, …` on `(x,y)` with `ν*(x) = 1/p`.
    pub fn q_sequence(p: u32) -> Result<Self> {
        Ok(GenSeq::new(Ring::new(RingTag::XY, p)?, GroupValue::new(p, 1, 1)))
    }

    /// Replace cached values at the given indices. Only meant for exercising
    /// the tied-minimum fault path.
    #[doc(hidden)]
    pub fn with_value_override(mut self, table: Vec<(usize, GroupValue)>) -> Self {
        self.value_override = table;
        self
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn p(&self) -> u32 {
        self.ring.p
    }

    pub fn scale(&self) -> &GroupValue {
        &self.scale
    }

    fn closed_value(&self, i: usize) -> GroupValue {
        if i == 0 {
            self.scale.clone()
        } else {
            let base = closed_form_value(self.ring.p, i);
            let GroupValue::Finite { num, exp, .. } = &self.scale else {
                unreachable!("scale is finite")
            };
            GroupValue::new(self.ring.p, num * base_num(&base), exp + base_exp(&base))
        }
    }

    fn extend_to(&self, i: usize) {
        if self.cache.read().unwrap().len() > i {
            return;
        }
        let mut cache = self.cache.write().unwrap();
        let p = self.ring.p as u64;
        while cache.len() <= i {
            let n = cache.len(); // building S_n from S_{n-1}, S_{n-2}
            let prev = &cache[n - 1].poly;
            let next = if n == 2 {
                prev.frob_pow(2).sub(&cache[0].poly)
            } else {
                // S_{i+1} = S_i^{p²} - S_0^{p^{2i-2}} S_{i-1} with i = n - 1
                let e = p.pow(2 * (n as u32 - 2));
                let s0_pow = cache[0].poly.pow(e);
                prev.frob_pow(2).sub(&s0_pow.mul(&cache[n - 2].poly))
            };
            debug_assert!(next.is_monic_second());
            debug_assert_eq!(next.deg2(), Some(p.pow(2 * (n as u32 - 1))));
            let value = self.closed_value(n);
            cache.push(KeyPoly {
                poly: Arc::new(next),
                value,
            });
        }
    }

    pub fn get(&self, i: usize) -> KeyPoly {
        self.extend_to(i);
        let mut kp = self.cache.read().unwrap()[i].clone();
        if let Some((_, v)) = self.value_override.iter().find(|(j, _)| *j == i) {
            kp.value = v.clone();
        }
        kp
    }

    pub fn poly(&self, i: usize) -> Arc<Poly> {
        self.get(i).poly
    }

    /// Cached value of `S_i`.
    pub fn value(&self, i: usize) -> GroupValue {
        self.get(i).value
    }

    /// Degree of `S_i` in the second variable (`i ≥ 1`).
    pub fn degree(&self, i: usize) -> u64 {
        assert!(i >= 1);
        (self.ring.p as u64).pow(2 * (i as u32 - 1))
    }

    /// Largest `n ≥ 1` with `deg₂ S_n ≤ d`.
    pub fn index_for_degree(&self, d: u64) -> usize {
        let mut n = 1;
        while self.degree(n + 1) <= d {
            n += 1;
        }
        n
    }

    /// Values of `S_0..=S_n` as integers over a common denominator `p^D`.
    pub(crate) fn integer_values(&self, n: usize) -> (Vec<i128>, u32) {
        let vals: Vec<GroupValue> = (0..=n).map(|i| self.value(i)).collect();
        let d = vals.iter().map(base_exp).max().unwrap_or(0);
        let p = BigInt::from(self.ring.p);
        let ints = vals
            .iter()
            .map(|v| {
                let scaled = base_num(v) * p.clone().pow(d - base_exp(v));
                i128::try_from(scaled).expect("key polynomial value exceeds i128")
            })
            .collect();
        (ints, d)
    }
}

fn base_num(v: &GroupValue) -> BigInt {
    match v {
        GroupValue::Finite { num, .. } => num.clone(),
        GroupValue::Infinity => panic!("infinite key polynomial value"),
    }
}

fn base_exp(v: &GroupValue) -> u32 {
    match v {
        GroupValue::Finite { exp, .. } => *exp,
        GroupValue::Infinity => panic!("infinite key polynomial value"),
    }
}
