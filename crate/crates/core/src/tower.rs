//! The tower of free quadratic transforms `R = R_0 → R_1 → ⋯` along `ν`,
//! with every level's data realized as a rational function in `F_p(u,v)`.
//!
//! Level `k` carries parameters `u_k = P_{k-1,1}`, `v_k = P_{k-1,2} / u_k^{p²}`,
//! the generating sequence `P_{k,i} = P_{k-1,i+1} / u_k^{p^{2i}}`, the
//! transform coordinate `s_k = u_{k-1} v_{k-1}^{-p²} − 1`, the unit `τ_k` with
//! `u = u_k^{p^{2k}} τ_k`, the units `γ_{k,i}` of the perturbed recursion and
//! the error terms `Λ_{k,i}` of the unperturbed one.

use std::collections::BTreeMap;

use crate::cert::Certificate;
use crate::engine::value_rat;
use crate::error::{Error, Result};
use crate::keyseq::{closed_form_value, GenSeq};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::value::GroupValue;

pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub k: usize,
    pub u: RatFunc,
    pub v: RatFunc,
    /// `s_k`; absent at level 0.
    pub s: Option<RatFunc>,
    pub tau: RatFunc,
    /// `P_{k,i}` for `i = 0..=top`.
    pub p: Vec<RatFunc>,
    pub gamma: BTreeMap<usize, RatFunc>,
    pub lambda: BTreeMap<usize, RatFunc>,
}

impl TowerLevel {
    pub fn top(&self) -> usize {
        self.p.len() - 1
    }

    pub fn key(&self, i: usize) -> Result<&RatFunc> {
        self.p
            .get(i)
            .ok_or_else(|| Error::Config(format!("P_({},{i}) not built", self.k)))
    }
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub p: u32,
    pub levels: Vec<TowerLevel>,
    pub seq: GenSeq,
    pub budget: usize,
}

fn guard(f: RatFunc, budget: usize) -> Result<RatFunc> {
    if f.size() > budget {
        Err(Error::Budget {
            size: f.size(),
            budget,
        })
    } else {
        Ok(f)
    }
}

/// Build levels `0..=k_max`; level `k` holds `P_{k,i}` for
/// `i ≤ i_max + (k_max − k)` so that every level can feed the next.
pub fn build_tower(p: u32, k_max: usize, i_max: usize, budget: usize) -> Result<Tower> {
    if i_max < 2 {
        return Err(Error::Config("i_max must be at least 2".into()));
    }
    if budget == 0 {
        return Err(Error::Config("budget must be positive".into()));
    }
    let seq = GenSeq::p_sequence(p)?;
    let ring = seq.ring();
    let top0 = i_max + k_max;
    let one = RatFunc::one(ring);

    let p0: Vec<RatFunc> = (0..=top0)
        .map(|i| RatFunc::from_poly((*seq.poly(i)).clone()))
        .collect();
    let level0 = TowerLevel {
        k: 0,
        u: p0[0].clone(),
        v: p0[1].clone(),
        s: None,
        tau: one.clone(),
        gamma: (2..=top0).map(|i| (i, one.clone())).collect(),
        lambda: (2..=top0).map(|i| (i, RatFunc::zero(ring))).collect(),
        p: p0,
    };
    let mut levels = vec![level0];

    for k in 1..=k_max {
        let prev = &levels[k - 1];
        let top = i_max + k_max - k;
        let t = |e: usize| e as u32; // Frobenius exponent helper

        let u_k = prev.p[1].clone();
        let s_k = guard(
            prev.u.div(&prev.v.frob_pow(2))?.sub(&one),
            budget,
        )?;
        let tau = guard(
            s_k.frob_pow(t(2 * (k - 1))).add(&one).mul(&prev.tau),
            budget,
        )?;

        let mut keys = vec![u_k.clone()];
        for i in 1..=top {
            let q = prev.p[i + 1].div(&u_k.frob_pow(t(2 * i)))?;
            keys.push(guard(q, budget)?);
        }
        let v_k = keys[1].clone();

        let mut gamma = BTreeMap::new();
        for i in 2..=top {
            let g = prev.gamma[&(i + 1)].mul(&s_k.frob_pow(t(2 * (i - 1))).add(&one));
            gamma.insert(i, guard(g, budget)?);
        }

        let mut lambda = BTreeMap::new();
        let lam_prev_2 = &prev.lambda[&2];
        for i in 2..=top {
            let denom = u_k.frob_pow(t(2 * i));
            let first = if i == 2 {
                u_k.mul(&v_k.frob_pow(2))
            } else {
                u_k.frob_pow(t(2 * (i - 2)))
                    .mul(&v_k.frob_pow(t(2 * i - 2)))
                    .mul(&keys[i - 2])
            };
            let second = lam_prev_2
                .frob_pow(t(2 * i - 2))
                .mul(&prev.p[i - 1])
                .div(&denom)?;
            let third = prev.lambda[&(i + 1)].div(&denom)?;
            lambda.insert(i, guard(first.sub(&second).add(&third), budget)?);
        }

        levels.push(TowerLevel {
            k,
            u: u_k,
            v: v_k,
            s: Some(s_k),
            tau,
            p: keys,
            gamma,
            lambda,
        });
    }
    Ok(Tower {
        p,
        levels,
        seq,
        budget,
    })
}

/// `Σ_{j=0}^{i-1} p^{4j-2i-2k}` (and `p^{-2k}` for `i = 0`).
pub fn tower_value(p: u32, k: usize, i: usize) -> GroupValue {
    if i == 0 {
        GroupValue::p_power(p, -2 * k as i64)
    } else {
        closed_form_value(p, i).mul_p_pow(-2 * k as i64)
    }
}

/// `Σ_{j=1}^{i-1} p^{4j-2i-2k} + p^{4-2i-2k}`.
pub fn lambda_bound(p: u32, k: usize, i: usize) -> GroupValue {
    let (k, i) = (k as i64, i as i64);
    let mut b = GroupValue::p_power(p, 4 - 2 * i - 2 * k);
    for j in 1..i {
        b = &b + &GroupValue::p_power(p, 4 * j - 2 * i - 2 * k);
    }
    b
}

impl Tower {
    pub fn level(&self, k: usize) -> Result<&TowerLevel> {
        self.levels
            .get(k)
            .ok_or_else(|| Error::Config(format!("level {k} not built")))
    }

    pub fn value(&self, f: &RatFunc) -> Result<GroupValue> {
        value_rat(f, &self.seq)
    }

    fn base(&self, id: String, k: usize) -> Certificate {
        Certificate::new(id).param("p", self.p).param("k", k)
    }

    /// `u = u_k^{p^{2k}} τ_k` exactly, and `τ_k` is a unit.
    pub fn verify_unit_factor(&self, k: usize) -> Certificate {
        let cert = self.base(format!("tower/unit-factor/k={k}"), k);
        let run = || -> Result<(bool, GroupValue)> {
            let lv = self.level(k)?;
            let u = &self.levels[0].u;
            let rhs = lv.u.frob_pow(2 * k as u32).mul(&lv.tau);
            Ok((u.eq_exact(&rhs), self.value(&lv.tau)?))
        };
        match run() {
            Ok((ident, tv)) => cert.outcome(
                "u = u_k^(p^2k) * tau_k; nu(tau_k) = 0",
                format!("identity {}; nu(tau_k) = {tv}", holds(ident)),
                ident && tv.is_zero(),
            ),
            Err(e) => cert.from_error(&e),
        }
    }

    /// The perturbed recursion for `P_{k,i}` with unit `γ_{k,i}`, plus the
    /// value proxy for `γ_{k,i} ≡ 1 mod m_k²`.
    pub fn verify_recursion(&self, k: usize, i: usize) -> Certificate {
        let cert = self.base(format!("tower/recursion/k={k}/i={i}"), k).param("i", i);
        let run = || -> Result<(bool, GroupValue, GroupValue)> {
            if i < 2 {
                return Err(Error::Config("recursion needs i >= 2".into()));
            }
            let lv = self.level(k)?;
            let gamma = lv
                .gamma
                .get(&i)
                .ok_or_else(|| Error::Config(format!("gamma_({k},{i}) not built")))?;
            let rhs = if i == 2 {
                lv.key(1)?.frob_pow(2).sub(&gamma.mul(lv.key(0)?))
            } else {
                let tail = lv
                    .u
                    .frob_pow(2 * (i as u32 - 2))
                    .mul(lv.key(i - 2)?);
                lv.key(i - 1)?.frob_pow(2).sub(&gamma.mul(&tail))
            };
            let ident = lv.key(i)?.eq_exact(&rhs);
            let one = RatFunc::one(gamma.ring());
            Ok((ident, self.value(gamma)?, self.value(&gamma.sub(&one))?))
        };
        let floor = GroupValue::p_power(self.p, -2 * (k as i64 + 1)).scale(2);
        match run() {
            Ok((ident, gv, gv1)) => cert.outcome(
                format!("identity; nu(gamma) = 0; nu(gamma - 1) >= {floor}"),
                format!("identity {}; nu(gamma) = {gv}; nu(gamma - 1) = {gv1}", holds(ident)),
                ident && gv.is_zero() && gv1 >= floor,
            ),
            Err(e) => cert.from_error(&e),
        }
    }

    /// The unperturbed recursion with error term `Λ_{k,i}` and its value bound.
    pub fn verify_lambda(&self, k: usize, i: usize) -> Certificate {
        let cert = self.base(format!("tower/lambda/k={k}/i={i}"), k).param("i", i);
        let run = || -> Result<(bool, GroupValue)> {
            if i < 2 {
                return Err(Error::Config("lambda needs i >= 2".into()));
            }
            let lv = self.level(k)?;
            let lam = lv
                .lambda
                .get(&i)
                .ok_or_else(|| Error::Config(format!("Lambda_({k},{i}) not built")))?;
            let rhs = if i == 2 {
                lv.key(1)?.frob_pow(2).sub(lv.key(0)?).add(lam)
            } else {
                let tail = lv.key(0)?.frob_pow(2 * (i as u32 - 2)).mul(lv.key(i - 2)?);
                lv.key(i - 1)?.frob_pow(2).sub(&tail).add(lam)
            };
            Ok((lv.key(i)?.eq_exact(&rhs), self.value(lam)?))
        };
        let bound = lambda_bound(self.p, k, i);
        match run() {
            Ok((ident, lv)) => cert.outcome(
                format!("identity; nu(Lambda) >= {bound}"),
                format!("identity {}; nu(Lambda) = {lv}", holds(ident)),
                ident && lv >= bound,
            ),
            Err(e) => cert.from_error(&e),
        }
    }

    /// Engine value of `P_{k,i}` against the closed form.
    pub fn verify_value(&self, k: usize, i: usize) -> Certificate {
        let cert = self.base(format!("tower/value/k={k}/i={i}"), k).param("i", i);
        let expected = tower_value(self.p, k, i);
        match self.level(k).and_then(|lv| lv.key(i)).and_then(|f| self.value(f)) {
            Ok(v) => cert.outcome(expected.to_string(), v.to_string(), v == expected),
            Err(e) => cert.from_error(&e),
        }
    }

    /// `ν(s_k) > 0`, so `ν` dominates the next transform.
    pub fn verify_s_positive(&self, k: usize) -> Certificate {
        let cert = self.base(format!("tower/s-positive/k={k}"), k);
        let run = || -> Result<GroupValue> {
            let lv = self.level(k)?;
            let s = lv
                .s
                .as_ref()
                .ok_or_else(|| Error::Config("s_0 is undefined".into()))?;
            self.value(s)
        };
        match run() {
            Ok(v) => cert.outcome("nu(s_k) > 0", v.to_string(), v.is_positive() && !v.is_zero()),
            Err(e) => cert.from_error(&e),
        }
    }

    /// `P_{k,i} = u_{k+1}^{p^{2(i-1)}} P_{k+1,i-1}` exactly, and the matching
    /// value relation across the two levels.
    pub fn verify_collapse(&self, k: usize, i: usize) -> Certificate {
        let cert = self.base(format!("tower/collapse/k={k}/i={i}"), k).param("i", i);
        let run = || -> Result<(bool, GroupValue, GroupValue)> {
            if i < 2 {
                return Err(Error::Config("collapse needs i >= 2".into()));
            }
            let lo = self.level(k)?;
            let hi = self.level(k + 1)?;
            let factor = hi.u.frob_pow(2 * (i as u32 - 1));
            let ident = lo.key(i)?.eq_exact(&factor.mul(hi.key(i - 1)?));
            let lhs = self.value(lo.key(i)?)?;
            let rhs = &self.value(hi.key(i - 1)?)? + &self.value(&hi.u)?.mul_p_pow(2 * (i as i64 - 1));
            Ok((ident, lhs, rhs))
        };
        match run() {
            Ok((ident, l, r)) => cert.outcome(
                "identity; nu(P_k,i) = nu(P_k+1,i-1) + p^(2i-2) nu(u_k+1)",
                format!("identity {}; {l} vs {r}", holds(ident)),
                ident && l == r,
            ),
            Err(e) => cert.from_error(&e),
        }
    }

    /// Every certificate for levels `0..=k_max` and indices `2..=i_max`
    /// (values from `i = 0`).
    pub fn certify(&self, k_max: usize, i_max: usize) -> Vec<Certificate> {
        let mut out = Vec::new();
        for k in 0..=k_max.min(self.levels.len() - 1) {
            out.push(self.verify_unit_factor(k));
            if k > 0 {
                out.push(self.verify_s_positive(k));
            }
            for i in 0..=i_max {
                out.push(self.verify_value(k, i));
            }
            for i in 2..=i_max {
                out.push(self.verify_recursion(k, i));
                out.push(self.verify_lambda(k, i));
            }
        }
        out
    }
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "FAILS"
    }
}

/// Exponent of the largest power of `u_{k+1}` dividing `P_{k,i}` in `R_{k+1}`,
/// for `k ∈ {0, 1}`.
///
/// `R_{k+1}` is given explicit coordinates `(s, w) = (s_{k+1}, u_{k+1})`
/// (carried in a `(u,v)`-tagged ring, first variable `s`):
/// at `k = 0`, `u = w^{p²}(s+1)`, `v = w`; at `k = 1`, `v = w^{p²}(s+1)` and
/// `u = v^{p²}(1 − w)`. The order is the `w`-adic order of the image, since
/// `s + 1` is a unit there.
pub fn divisor_order(tower: &Tower, k: usize, i: usize) -> Result<i64> {
    let ring = tower.seq.ring();
    let p2 = (tower.p * tower.p) as u64;
    let s = Poly::var1(ring);
    let w = Poly::var2(ring);
    let s1 = s.add(&Poly::one(ring));
    let (u_img, v_img) = match k {
        0 => (w.pow(p2).mul(&s1), w.clone()),
        1 => {
            let v_img = w.pow(p2).mul(&s1);
            let u_img = v_img.pow(p2).mul(&Poly::one(ring).sub(&w));
            (u_img, v_img)
        }
        _ => return Err(Error::Config("divisor order is implemented for k <= 1".into())),
    };
    let sub = crate::ratfunc::Substitution::new(u_img.into(), v_img.into())?;
    let f = tower.level(k)?.key(i)?;
    let w_order = |g: &Poly| g.terms().iter().map(|(m, _)| m.e2).min().unwrap_or(0) as i64;
    let num = sub.apply_poly(f.numer())?;
    let den = sub.apply_poly(f.denom())?;
    // both images are polynomials: the substitution has no denominators
    Ok(w_order(num.numer()) - w_order(den.numer()))
}
