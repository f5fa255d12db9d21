//! The Artin-Schreier extension `K_1 = K(x)` of `K = F_p(u,v)`, hosted in
//! `K* = F_p(x,y)` through `u = x^p / (1 − x^{p−1})`, `v = y^p − x^c y`.
//!
//! `θ = 1/x` generates `K_1 | K` with `θ^p − θ = 1/u`. The approximants
//! `h_k ∈ R_k` satisfy `ν_1(h_k^p − x^p) = Σ_{j=0}^{k+1} p^{−4j}`, which bounds
//! `ν_1(θ − f)` below `−2/p + Ω/p < −1/p²` for every `f ∈ K`; by the value-set
//! criterion for Artin-Schreier defect extensions this makes `K_1 | K`
//! dependent with exponent `m = 2`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cert::Certificate;
use crate::engine::value_rat;
use crate::error::{Error, Result};
use crate::host::{host_value, K1Frac};
use crate::keyseq::GenSeq;
use crate::poly::{Poly, Ring, RingTag};
use crate::ratfunc::{RatFunc, Substitution};
use crate::tower::Tower;
use crate::value::{check_prime, cmp_bound, omega, GroupValue, RationalBound};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbeddingConfig {
    pub p: u32,
    pub c: u64,
}

impl EmbeddingConfig {
    pub fn new(p: u32, c: u64) -> Result<Self> {
        check_prime(p)?;
        if c == 0 || c % (p as u64 - 1) != 0 {
            return Err(Error::BadEmbedding { p, c });
        }
        Ok(EmbeddingConfig { p, c })
    }

    /// Smallest admissible `c = p − 1`.
    pub fn default_for(p: u32) -> Result<Self> {
        Self::new(p, p.saturating_sub(1).max(1) as u64)
    }

    pub fn base_ring(&self) -> Ring {
        Ring {
            tag: RingTag::UV,
            p: self.p,
        }
    }

    pub fn host_ring(&self) -> Ring {
        Ring {
            tag: RingTag::XY,
            p: self.p,
        }
    }

    /// `1 − x^{p−1}` in the host.
    pub fn unit(&self) -> Poly {
        let r = self.host_ring();
        Poly::one(r).sub(&Poly::monomial(r, 1, self.p as u64 - 1, 0))
    }

    pub fn u_image(&self) -> RatFunc {
        let r = self.host_ring();
        RatFunc::new(Poly::monomial(r, 1, self.p as u64, 0), self.unit())
            .expect("unit is nonzero")
    }

    pub fn v_image(&self) -> RatFunc {
        let r = self.host_ring();
        RatFunc::from_poly(Poly::monomial(r, 1, 0, self.p as u64).sub(&Poly::monomial(r, 1, self.c, 1)))
    }

    pub fn embed_k(&self, f: &RatFunc) -> Result<RatFunc> {
        self.base_ring().check(&f.ring())?;
        Substitution::new(self.u_image(), self.v_image())?.apply(f)
    }

    pub fn embed_k1(&self, g: &RatFunc) -> Result<RatFunc> {
        let r = self.host_ring();
        let src = Ring {
            tag: RingTag::XV,
            p: self.p,
        };
        src.check(&g.ring())?;
        Substitution::new(RatFunc::from_poly(Poly::var1(r)), self.v_image())?.apply(g)
    }

    /// Any element of `K`, `K_1` (as `(x,v)`) or `K*`, placed in the host.
    pub fn to_host(&self, g: &RatFunc) -> Result<RatFunc> {
        match g.ring().tag {
            RingTag::UV => self.embed_k(g),
            RingTag::XV => self.embed_k1(g),
            RingTag::XY => {
                self.host_ring().check(&g.ring())?;
                Ok(g.clone())
            }
        }
    }
}

/// `θ = 1/x` with minimal polynomial `X^p − X − 1/u` over `K`.
#[derive(Clone, Debug)]
pub struct AsGenerator {
    pub theta: RatFunc,
    /// The constant term `a = 1/u` of `X^p − X − a`.
    pub a: RatFunc,
}

#[derive(Clone, Debug)]
pub struct Approximant {
    pub k: usize,
    pub h: RatFunc,
}

#[derive(Clone, Debug)]
pub struct EvidenceEntry {
    pub label: String,
    pub value: GroupValue,
    pub below_bound: bool,
    pub below_criterion: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    DependentConsistent,
    Refuted,
}

#[derive(Clone, Debug)]
pub struct DefectEvidence {
    pub m: u32,
    pub p: u32,
    pub entries: Vec<EvidenceEntry>,
    pub verdict: Verdict,
}

impl DefectEvidence {
    pub fn supremum(&self) -> Option<&GroupValue> {
        self.entries.iter().map(|e| &e.value).max()
    }

    pub fn verdict_text(&self) -> String {
        match self.verdict {
            Verdict::DependentConsistent => format!("dependent-consistent (m={})", self.m),
            Verdict::Refuted => format!("refuted (m={})", self.m),
        }
    }
}

impl fmt::Display for DefectEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict_text())?;
        if let Some(s) = self.supremum() {
            writeln!(f, "supremum observed: {s}")?;
        }
        for e in &self.entries {
            writeln!(
                f,
                "  {:<28} nu_1(1/x - f) = {:<14} below -2/p+Omega/p: {:<5} below -1/p^{}: {}",
                e.label, e.value.to_string(), e.below_bound, self.m, e.below_criterion
            )?;
        }
        write!(
            f,
            "note: sampled evidence for a statement quantified over all f in K; it can refute but not prove it"
        )
    }
}

/// Which elements `f ∈ K` the dependence report tries.
#[derive(Clone, Debug)]
pub enum Sampler {
    Zero,
    /// `f = 1/h_k` for `k ≤ k_max`.
    Approximants { k_max: usize },
    /// `f = λ(1 + w)/v^p + e` with `ν(w) > 0`, `ν(e) ≥ 0`, so `ν(f) = −1/p`.
    UnitMultiples { count: usize, seed: u64 },
    /// Random `f` whose value differs from `−1/p`.
    OffValue { count: usize, seed: u64 },
    Explicit(Vec<(String, RatFunc)>),
}

pub struct AsEngine {
    pub cfg: EmbeddingConfig,
    pub pseq: GenSeq,
    pub qseq: GenSeq,
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

impl AsEngine {
    pub fn new(cfg: EmbeddingConfig) -> Result<Self> {
        Ok(AsEngine {
            cfg,
            pseq: GenSeq::p_sequence(cfg.p)?,
            qseq: GenSeq::q_sequence(cfg.p)?,
        })
    }

    pub fn p(&self) -> u32 {
        self.cfg.p
    }

    fn base_ring(&self) -> Ring {
        self.cfg.base_ring()
    }

    /// `ν_1` of an element of `K`, `K_1` or `K*`, computed by the host engine
    /// after embedding.
    pub fn nu1(&self, g: &RatFunc) -> Result<GroupValue> {
        value_rat(&self.cfg.to_host(g)?, &self.qseq)
    }

    pub fn generator(&self) -> AsGenerator {
        let host = self.cfg.host_ring();
        let base = self.base_ring();
        AsGenerator {
            theta: RatFunc::new(Poly::one(host), Poly::var1(host)).expect("x is nonzero"),
            a: RatFunc::new(Poly::one(base), Poly::var1(base)).expect("u is nonzero"),
        }
    }

    /// `θ^p − θ − a = 0` in the host, exactly.
    pub fn check_generator(&self) -> Certificate {
        let g = self.generator();
        let cert = Certificate::new("as/generator").param("p", self.p()).param("c", self.cfg.c);
        let run = || -> Result<bool> {
            let a = self.cfg.embed_k(&g.a)?;
            let lhs = g.theta.frob_pow(1).sub(&g.theta).sub(&a);
            Ok(lhs.is_zero())
        };
        match run() {
            Ok(ok) => cert.outcome("theta^p - theta - 1/u = 0", if ok { "0" } else { "nonzero" }, ok),
            Err(e) => cert.from_error(&e),
        }
    }

    /// `x^p = u + h` with `h = −u x^{p−1}`, `ν_1(h) = 2 − 1/p > Ω`, and
    /// `−2/p + Ω/p < −1/p²`.
    pub fn h_element_checks(&self) -> Vec<Certificate> {
        let p = self.p();
        let host = self.cfg.host_ring();
        let om = omega(p).expect("prime checked");
        let mut out = Vec::new();

        let u_img = self.cfg.u_image();
        let xp = RatFunc::from_poly(Poly::monomial(host, 1, p as u64, 0));
        let h = xp.sub(&u_img);
        let formula = u_img
            .mul(&RatFunc::from_poly(Poly::monomial(host, 1, p as u64 - 1, 0)))
            .neg();
        let ident = h.eq_exact(&formula);
        out.push(
            Certificate::new("as/h/identity")
                .param("p", p)
                .param("c", self.cfg.c)
                .outcome("x^p - u = -u x^(p-1)", if ident { "holds" } else { "FAILS" }, ident),
        );

        let expected = &GroupValue::integer(p, 2) - &GroupValue::new(p, 1, 1);
        let c = Certificate::new("as/h/value").param("p", p).param("c", self.cfg.c);
        out.push(match value_rat(&h, &self.qseq) {
            Ok(v) => {
                let above = cmp_bound(&v, &om) == Ordering::Greater;
                c.outcome(
                    format!("{expected} > Omega = {om}"),
                    v.to_string(),
                    v == expected && above,
                )
            }
            Err(e) => c.from_error(&e),
        });

        let (lhs, rhs) = ladder_limit(p);
        let ok = lhs.0 < rhs.0;
        out.push(
            Certificate::new("as/h/bound-gap")
                .param("p", p)
                .outcome(format!("-2/p + Omega/p < {rhs}"), lhs.to_string(), ok),
        );
        let gap = &(&RationalBound::new(1, BigInt::from(p).pow(2)) - &RationalBound::new(2, p))
            + &RationalBound(om.0.clone() / BigInt::from(p));
        let hv = RationalBound::from_value(&expected).unwrap();
        let alt = RationalBound(-(hv.0 - om.0) / BigInt::from(p));
        out.push(
            Certificate::new("as/h/bound-gap-identity")
                .param("p", p)
                .outcome(alt.to_string(), gap.to_string(), gap == alt),
        );
        out
    }

    /// `h_0 = v^p`, `h_{j+1} = h_j + (−1)^{j+1} P_{j+1,j+2}^p`, for `j ≤ k`.
    pub fn approximants(&self, tower: &Tower, k: usize) -> Result<Vec<Approximant>> {
        let base = self.base_ring();
        base.check(&tower.seq.ring())?;
        let mut h = RatFunc::from_poly(Poly::var2(base).frob_pow(1));
        let mut out = vec![Approximant { k: 0, h: h.clone() }];
        for j in 1..=k {
            let term = tower.level(j)?.key(j + 1)?.frob_pow(1).scale(sign(j));
            h = h.add(&term);
            out.push(Approximant { k: j, h: h.clone() });
        }
        Ok(out)
    }

    /// `Σ_{j=0}^{k+1} p^{−4j}`.
    pub fn approximant_bound(&self, k: usize) -> GroupValue {
        let p = self.p();
        (0..=k + 1)
            .map(|j| GroupValue::p_power(p, -4 * j as i64))
            .fold(GroupValue::zero(p), |a, b| &a + &b)
    }

    fn x_pow_p(&self) -> RatFunc {
        RatFunc::from_poly(Poly::monomial(self.cfg.host_ring(), 1, self.p() as u64, 0))
    }

    /// `ν_1(g^p − x^p)` through the weight-truncated host route, which skips
    /// the full substitution; used for sample sweeps.
    pub fn frobenius_gap_value(&self, g: &RatFunc) -> Result<GroupValue> {
        self.base_ring().check(&g.ring())?;
        let gp = g.frob_pow(1);
        let frac = K1Frac::new(
            vec![(0, gp.numer().clone()), (self.p() as u64, gp.denom().neg())],
            0,
            gp.denom().clone(),
        );
        host_value(&frac, &self.cfg, &self.qseq)
    }

    /// `g^p − x^p` in the host, for `g ∈ K`.
    pub fn frobenius_gap(&self, g: &RatFunc) -> Result<RatFunc> {
        Ok(self.cfg.embed_k(g)?.frob_pow(1).sub(&self.x_pow_p()))
    }

    /// `ν_1(h_k^p − x^p)` equals the closed form; `Θ_k = h_k^p − x^p −
    /// (−1)^k P_{k,k+2}` has `ν_1(Θ_k) > Ω`; for `k ≥ 1` also
    /// `Θ_k = (−1)^{k−1} Λ_{k,k+2} + Θ_{k−1}` exactly.
    pub fn approximant_checks(&self, tower: &Tower, k: usize) -> Vec<Certificate> {
        let p = self.p();
        let mut out = Vec::new();
        let base = |id: String| Certificate::new(id).param("p", p).param("c", self.cfg.c).param("k", k);
        let hs = match self.approximants(tower, k) {
            Ok(h) => h,
            Err(e) => return vec![base(format!("as/approximant/k={k}")).from_error(&e)],
        };
        let h = &hs[k].h;

        let expected = self.approximant_bound(k);
        let c = base(format!("as/approximant/k={k}"));
        out.push(match self.frobenius_gap(h).and_then(|g| self.nu1(&g)) {
            Ok(v) => c.outcome(expected.to_string(), v.to_string(), v == expected),
            Err(e) => c.from_error(&e),
        });

        let theta = |j: usize| -> Result<RatFunc> {
            // Θ_j as an element of K plus −x^p, kept in K as h_j^p − (−1)^j P_{j,j+2}
            let key = tower.level(j)?.key(j + 2)?;
            Ok(hs[j].h.frob_pow(1).sub(&key.scale(sign(j))))
        };
        let om = omega(p).expect("prime checked");
        let c = base(format!("as/theta/k={k}"));
        let run = || -> Result<GroupValue> {
            let t = theta(k)?;
            self.nu1(&self.cfg.embed_k(&t)?.sub(&self.x_pow_p()))
        };
        out.push(match run() {
            Ok(v) => c.outcome(
                format!("> Omega = {om}"),
                v.to_string(),
                cmp_bound(&v, &om) == Ordering::Greater,
            ),
            Err(e) => c.from_error(&e),
        });

        if k >= 1 {
            let c = base(format!("as/theta-recursion/k={k}"));
            let run = || -> Result<bool> {
                // the −x^p parts cancel, so the identity lives in K
                let lam = tower
                    .level(k)?
                    .lambda
                    .get(&(k + 2))
                    .ok_or_else(|| Error::Config(format!("Lambda_({k},{}) not built", k + 2)))?
                    .scale(sign(k - 1));
                Ok(theta(k)?.eq_exact(&lam.add(&theta(k - 1)?)))
            };
            out.push(match run() {
                Ok(ok) => c.outcome(
                    "Theta_k = (-1)^(k-1) Lambda_(k,k+2) + Theta_(k-1)",
                    if ok { "holds" } else { "FAILS" },
                    ok,
                ),
                Err(e) => c.from_error(&e),
            });
        }
        out
    }

    /// A random element of `R_k` as an `F_p`-combination of standard monomials
    /// `u_k^m Π P_{k,i}^{a_i}`, `a_i < p²`, `i ≤ k+3`. Exponents on the two
    /// highest indices are kept at most `p` to bound degrees.
    pub fn random_standard(&self, tower: &Tower, k: usize, rng: &mut ChaCha8Rng, terms: usize) -> Result<RatFunc> {
        let p = self.p() as u64;
        let lv = tower.level(k)?;
        let n_max = (k + 3).min(lv.top());
        let mut g = RatFunc::zero(self.base_ring());
        for _ in 0..terms {
            let lambda = rng.gen_range(1..p) as i64;
            let m = rng.gen_range(0..=2 * p);
            let mut mono = lv.u.pow(m).scale(lambda);
            let factors = rng.gen_range(0..=2);
            for _ in 0..factors {
                let i = rng.gen_range(1..=n_max);
                let cap = if i + 1 >= n_max { p } else { p * p - 1 };
                let a = rng.gen_range(1..=cap);
                mono = mono.mul(&lv.key(i)?.pow(a));
            }
            g = g.add(&mono);
        }
        Ok(g)
    }

    /// Samples `g ∈ R_k` and checks `ν_1(g^p − x^p) ≤ Σ_{j≤k+1} p^{−4j}`,
    /// with equality at `g = h_k`.
    pub fn best_approximant(&self, tower: &Tower, k: usize, n_samples: usize, seed: u64) -> Certificate {
        let bound = self.approximant_bound(k);
        let cert = Certificate::new(format!("as/best-approximant/k={k}"))
            .param("p", self.p())
            .param("c", self.cfg.c)
            .param("k", k)
            .param("samples", n_samples)
            .param("seed", seed);
        let run = || -> Result<(bool, GroupValue, usize)> {
            let h = self.approximants(tower, k)?.pop().unwrap().h;
            let attained = self.nu1(&self.frobenius_gap(&h)?)? == bound;
            let zero = self.nu1(&self.frobenius_gap(&RatFunc::zero(self.base_ring()))?)?;
            let results: Vec<Result<GroupValue>> = (0..n_samples)
                .into_par_iter()
                .map(|s| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                    let terms = rng.gen_range(1..=3);
                    let noise = self.random_standard(tower, k, &mut rng, terms)?;
                    let g = if s % 2 == 0 { noise } else { h.add(&noise) };
                    self.frobenius_gap_value(&g)
                })
                .collect();
            let mut worst = zero;
            let mut violations = 0;
            for r in results {
                let v = r?;
                if v > bound {
                    violations += 1;
                }
                if v > worst {
                    worst = v;
                }
            }
            Ok((attained, worst, violations))
        };
        match run() {
            Ok((attained, worst, violations)) => cert.outcome(
                format!("all <= {bound}; attained by h_k"),
                format!(
                    "max {worst}; {violations} above; h_k {}",
                    if attained { "attains" } else { "does NOT attain" }
                ),
                attained && violations == 0 && worst <= bound,
            ),
            Err(e) => cert.from_error(&e),
        }
    }

    /// `ν_1(1/x − f)` for `f ∈ K`.
    pub fn approximation_value(&self, f: &RatFunc) -> Result<GroupValue> {
        self.nu1(&self.generator().theta.sub(&self.cfg.embed_k(f)?))
    }

    /// `ν_1(1/x − f) < −2/p + Ω/p < −1/p²`.
    pub fn approximation_check(&self, label: &str, f: &RatFunc) -> Certificate {
        let p = self.p();
        let cert = Certificate::new(format!("as/approximation/{label}"))
            .param("p", p)
            .param("c", self.cfg.c);
        let (limit, crit) = ladder_limit(p);
        match self.approximation_value(f) {
            Ok(v) => {
                let ok = cmp_bound(&v, &limit) == Ordering::Less && limit.0 < crit.0;
                cert.outcome(format!("< {limit} < {crit}"), v.to_string(), ok)
            }
            Err(e) => cert.from_error(&e),
        }
    }

    fn sample_family(&self, tower: Option<&Tower>, sampler: &Sampler) -> Result<Vec<(String, RatFunc)>> {
        let base = self.base_ring();
        let p = self.p() as u64;
        let v = Poly::var2(base);
        let mut out = Vec::new();
        match sampler {
            Sampler::Zero => out.push(("f=0".to_string(), RatFunc::zero(base))),
            Sampler::Approximants { k_max } => {
                let tower = tower.ok_or_else(|| Error::Config("approximant sampler needs a tower".into()))?;
                for a in self.approximants(tower, *k_max)? {
                    out.push((format!("f=1/h_{}", a.k), a.h.inv()?));
                }
            }
            Sampler::UnitMultiples { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let vp = v.frob_pow(1);
                for s in 0..*count {
                    let lambda = rng.gen_range(1..p) as i64;
                    let w = random_poly(base, &mut rng, false);
                    let e = random_poly(base, &mut rng, true);
                    let unit = Poly::constant(base, lambda).add(&w);
                    let f = RatFunc::new(unit, vp.clone())?.add(&RatFunc::from_poly(e));
                    out.push((format!("unit-multiple#{s}"), f));
                }
            }
            Sampler::OffValue { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for s in 0..*count {
                    let num = random_poly(base, &mut rng, true);
                    let den_exp = rng.gen_range(0..=3 * p);
                    let den = Poly::monomial(base, 1, rng.gen_range(0..=1), den_exp)
                        .add(&random_poly(base, &mut rng, false).mul(&Poly::var1(base)));
                    let f = if num.is_zero() {
                        RatFunc::from_poly(Poly::var1(base))
                    } else {
                        RatFunc::new(num, den)?
                    };
                    let val = value_rat(&f, &self.pseq)?;
                    if val != GroupValue::new(self.p(), -1, 1) {
                        out.push((format!("off-value#{s}"), f));
                    }
                }
            }
            Sampler::Explicit(list) => out.extend(list.iter().cloned()),
        }
        Ok(out)
    }

    /// Run `ν_1(1/x − f)` over the sampled family; the verdict is
    /// dependent-consistent iff every value is `< −1/p^m`.
    pub fn dependence_report(&self, tower: Option<&Tower>, samplers: &[Sampler], m: u32) -> Result<DefectEvidence> {
        let p = self.p();
        let (limit, _) = ladder_limit(p);
        let crit = RationalBound::new(-1, BigInt::from(p).pow(m));
        let mut family = Vec::new();
        for s in samplers {
            family.extend(self.sample_family(tower, s)?);
        }
        let values: Vec<Result<GroupValue>> = family
            .par_iter()
            .map(|(_, f)| self.approximation_value(f))
            .collect();
        let mut entries = Vec::new();
        for ((label, _), v) in family.into_iter().zip(values) {
            let value = v?;
            entries.push(EvidenceEntry {
                label,
                below_bound: cmp_bound(&value, &limit) == Ordering::Less,
                below_criterion: cmp_bound(&value, &crit) == Ordering::Less,
                value,
            });
        }
        let verdict = if entries.iter().all(|e| e.below_criterion) {
            Verdict::DependentConsistent
        } else {
            Verdict::Refuted
        };
        Ok(DefectEvidence {
            m,
            p,
            entries,
            verdict,
        })
    }

    /// The family used when no samplers are given.
    pub fn default_samplers(k_max: usize, samples: usize, seed: u64) -> Vec<Sampler> {
        vec![
            Sampler::Zero,
            Sampler::Approximants { k_max },
            Sampler::UnitMultiples {
                count: samples.div_ceil(2),
                seed,
            },
            Sampler::OffValue {
                count: samples / 2,
                seed: seed.wrapping_add(1),
            },
        ]
    }
}

/// `(−2/p + Ω/p, −1/p²)`.
pub fn ladder_limit(p: u32) -> (RationalBound, RationalBound) {
    let om = omega(p).expect("supported prime");
    let bp = BigInt::from(p);
    let limit = RationalBound((om.0 - BigInt::from(2)) / bp.clone());
    (limit, RationalBound::new(-1, bp.pow(2u32)))
}

/// Small random polynomial in `F_p[u,v]`; with `allow_constant == false` it has
/// no constant term (positive value).
fn random_poly(ring: Ring, rng: &mut ChaCha8Rng, allow_constant: bool) -> Poly {
    let p = ring.p as i64;
    let n = rng.gen_range(0..=3);
    let mut terms = Vec::new();
    for _ in 0..n {
        let e1 = rng.gen_range(0..=3u64);
        let e2 = rng.gen_range(0..=(2 * p as u64));
        if !allow_constant && e1 == 0 && e2 == 0 {
            continue;
        }
        terms.push((e1, e2, rng.gen_range(1..p)));
    }
    Poly::from_terms(ring, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{build_tower, DEFAULT_BUDGET};

    fn engine(p: u32) -> AsEngine {
        AsEngine::new(EmbeddingConfig::default_for(p).unwrap()).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(EmbeddingConfig::new(2, 1).is_ok());
        assert!(EmbeddingConfig::new(3, 4).is_ok());
        assert_eq!(EmbeddingConfig::new(3, 3), Err(Error::BadEmbedding { p: 3, c: 3 }));
        assert_eq!(EmbeddingConfig::new(5, 0), Err(Error::BadEmbedding { p: 5, c: 0 }));
        assert!(EmbeddingConfig::new(6, 5).is_err());
    }

    #[test]
    fn embeddings() {
        let cfg = EmbeddingConfig::new(2, 1).unwrap();
        let host = cfg.host_ring();
        let base = cfg.base_ring();
        let u = RatFunc::from_poly(Poly::var1(base));
        assert!(cfg.embed_k(&u).unwrap().eq_exact(&cfg.u_image()));
        let xv = Ring { tag: RingTag::XV, p: 2 };
        let x = RatFunc::from_poly(Poly::var1(xv));
        assert_eq!(cfg.embed_k1(&x).unwrap(), RatFunc::from_poly(Poly::var1(host)));
        let v = RatFunc::from_poly(Poly::var2(xv));
        let expect = Poly::from_terms(host, [(0, 2, 1), (1, 1, 1)]);
        assert_eq!(cfg.embed_k1(&v).unwrap(), RatFunc::from_poly(expect));
    }

    #[test]
    fn nu1_examples() {
        for p in [2u32, 3] {
            let e = engine(p);
            let host = e.cfg.host_ring();
            let theta = e.generator().theta;
            assert_eq!(e.nu1(&theta).unwrap(), GroupValue::new(p, -1, 1));
            let xp = RatFunc::from_poly(Poly::monomial(host, 1, p as u64, 0));
            assert_eq!(e.nu1(&xp).unwrap(), GroupValue::integer(p, 1));
            let h = e.cfg.u_image().mul(&RatFunc::from_poly(Poly::monomial(host, -1, p as u64 - 1, 0)));
            assert_eq!(e.nu1(&h).unwrap(), &GroupValue::integer(p, 2) - &GroupValue::new(p, 1, 1));
        }
    }

    #[test]
    fn generator_and_h_checks() {
        for p in [2u32, 3, 5] {
            let e = engine(p);
            assert!(e.check_generator().passed());
            for c in e.h_element_checks() {
                assert!(c.passed(), "{c:?}");
            }
        }
    }

    #[test]
    fn ladder_limit_char_two() {
        let (l, c) = ladder_limit(2);
        assert_eq!(l, RationalBound::new(-7, 15));
        assert_eq!(c, RationalBound::new(-1, 4));
    }

    #[test]
    fn approximation_examples_char_two() {
        let e = engine(2);
        let t = build_tower(2, 1, 3, DEFAULT_BUDGET).unwrap();
        let base = e.cfg.base_ring();
        assert_eq!(
            e.approximation_value(&RatFunc::zero(base)).unwrap(),
            GroupValue::new(2, -1, 1)
        );
        let hs = e.approximants(&t, 1).unwrap();
        assert_eq!(
            e.approximation_value(&hs[0].h.inv().unwrap()).unwrap(),
            GroupValue::new(2, -15, 5)
        );
        assert_eq!(
            e.approximation_value(&hs[1].h.inv().unwrap()).unwrap(),
            GroupValue::new(2, -239, 9)
        );
    }

    #[test]
    fn truncated_route_agrees() {
        for p in [2u32, 3] {
            let e = engine(p);
            let t = build_tower(p, 1, 4, DEFAULT_BUDGET).unwrap();
            let mut gs: Vec<RatFunc> = e.approximants(&t, 1).unwrap().into_iter().map(|a| a.h).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            // full substitution of random elements is only affordable at p = 2
            for _ in 0..if p == 2 { 6 } else { 0 } {
                gs.push(e.random_standard(&t, 1, &mut rng, 2).unwrap());
            }
            gs.push(RatFunc::zero(e.cfg.base_ring()));
            for g in gs {
                let plain = e.nu1(&e.frobenius_gap(&g).unwrap()).unwrap();
                assert_eq!(e.frobenius_gap_value(&g).unwrap(), plain, "p={p} g={g}");
            }
        }
    }

    #[test]
    fn approximant_zero_char_two() {
        let e = engine(2);
        let t = build_tower(2, 0, 2, DEFAULT_BUDGET).unwrap();
        for c in e.approximant_checks(&t, 0) {
            assert!(c.passed(), "{c:?}");
        }
        assert_eq!(e.approximant_bound(0), GroupValue::new(2, 17, 4));
        assert_eq!(e.approximant_bound(1), GroupValue::new(2, 273, 8));
    }
}
