//! Ten acceptance criteria, one PASS/FAIL line each. Expected values are
//! recomputed here from the closed forms with plain integer fractions, or
//! written out literally, and never read back from the library.

use std::process::Command;
use std::time::{Duration, Instant};

use defectcert::artin::{AsEngine, EmbeddingConfig};
use defectcert::cert::Certificate;
use defectcert::engine::value_poly;
use defectcert::host::{host_value, K1Frac};
use defectcert::keyseq::GenSeq;
use defectcert::poly::Poly;
use defectcert::ratfunc::RatFunc;
use defectcert::selftest::{criterion, SelftestOptions};
use defectcert::tower::build_tower;

/// Reduced fraction over i128, printed the way values are printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Q(i128, i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Q {
    fn new(n: i128, d: i128) -> Q {
        let g = gcd(n, d).max(1) * d.signum();
        Q(n / g, d / g)
    }

    fn p_pow(p: i128, e: i64) -> Q {
        if e >= 0 {
            Q(p.pow(e as u32), 1)
        } else {
            Q(1, p.pow((-e) as u32))
        }
    }

    fn add(self, o: Q) -> Q {
        Q::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }

    fn lt(self, o: Q) -> bool {
        self.0 * o.1 < o.0 * self.1
    }

    fn text(self) -> String {
        if self.1 == 1 {
            self.0.to_string()
        } else {
            format!("{}/{}", self.0, self.1)
        }
    }
}

fn sum(p: u32, exps: impl IntoIterator<Item = i64>) -> Q {
    exps.into_iter().fold(Q(0, 1), |acc, e| acc.add(Q::p_pow(p as i128, e)))
}

/// `ν(P_{k,i})`.
fn tower_closed(p: u32, k: usize, i: usize) -> Q {
    let (k, i) = (k as i64, i as i64);
    if i == 0 {
        return Q::p_pow(p as i128, -2 * k);
    }
    sum(p, (0..i).map(|j| 4 * j - 2 * i - 2 * k))
}

fn lambda_closed(p: u32, k: usize, i: usize) -> Q {
    let (k, i) = (k as i64, i as i64);
    sum(p, (1..i).map(|j| 4 * j - 2 * i - 2 * k).chain([4 - 2 * i - 2 * k]))
}

fn omega(p: u32) -> Q {
    let p4 = (p as i128).pow(4);
    Q::new(p4, p4 - 1)
}

/// Parse a printed value such as `-15/32`.
fn parse_q(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((n, d)) => Some(Q::new(n.trim().parse().ok()?, d.trim().parse().ok()?)),
        None => Some(Q(s.trim().parse().ok()?, 1)),
    }
}

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { ok: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.ok = false;
            self.notes.push(note.into());
        }
    }

    fn certs(&mut self, cs: &[Certificate]) {
        self.check(!cs.is_empty(), "no certificates");
        for c in cs.iter().filter(|c| !c.passed()) {
            self.check(false, format!("{}: expected {} got {}", c.id, c.expected, c.actual));
        }
    }

    fn within(&mut self, start: Instant, limit: Duration) {
        let took = start.elapsed();
        self.check(took < limit, format!("took {took:?}, limit {limit:?}"));
    }
}

fn opts() -> SelftestOptions {
    SelftestOptions::default()
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for p in [2u32, 3] {
        let cfg = EmbeddingConfig::default_for(p).unwrap();
        let pseq = GenSeq::p_sequence(p).unwrap();
        let qseq = GenSeq::q_sequence(p).unwrap();
        for i in 1..=5 {
            let want = sum(p, (0..i as i64).map(|j| 4 * j - 2 * i as i64)).text();
            let f = (*pseq.poly(i)).clone();
            let base = value_poly(&f, &pseq).unwrap().to_string();
            let frac = K1Frac::new(vec![(0, f)], 0, Poly::one(cfg.base_ring()));
            let host = host_value(&frac, &cfg, &qseq).unwrap().to_string();
            o.check(base == want && host == want, format!("p={p} i={i}: {base}, {host} vs {want}"));
        }
    }
    let lit: Vec<String> = (1..=3).map(|i| tower_closed(2, 0, i).text()).collect();
    o.check(lit == ["1/4", "17/16", "273/64"], format!("closed form at p=2: {lit:?}"));
    o.certs(&criterion(1, &opts()).certificates);
    o.within(start, Duration::from_secs(5));
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for (p, km, im) in [(2u32, 2usize, 4usize), (3, 1, 3)] {
        let t = build_tower(p, km, im, opts().budget).unwrap();
        for k in 0..=km {
            for i in 0..=im {
                let got = t.value(t.level(k).unwrap().key(i).unwrap()).unwrap().to_string();
                let want = tower_closed(p, k, i).text();
                o.check(got == want, format!("p={p} k={k} i={i}: {got} vs {want}"));
            }
        }
    }
    o.certs(&criterion(2, &opts()).certificates);
    o.within(start, Duration::from_secs(60));
    o
}

fn c3() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cs = criterion(3, &opts()).certificates;
    for (prefix, n) in [("tower/unit-factor/", 3), ("tower/s-positive/", 2), ("tower/recursion/", 9), ("tower/lambda/", 9)] {
        let got = cs.iter().filter(|c| c.id.starts_with(prefix)).count();
        o.check(got == n, format!("{prefix}: {got} certificates, want {n}"));
    }
    o.certs(&cs);
    o.within(start, Duration::from_secs(120));
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    let t = build_tower(2, 2, 4, opts().budget).unwrap();
    for k in 0..=2 {
        for i in 2..=4 {
            let lam = t.level(k).unwrap().lambda.get(&i).cloned().unwrap();
            let v = t.value(&lam).unwrap();
            let bound = lambda_closed(2, k, i);
            // Λ may vanish identically (value ∞)
            let ok = match v.to_rational() {
                None => true,
                Some(_) => !parse_q(&v.to_string()).unwrap().lt(bound),
            };
            o.check(ok, format!("k={k} i={i}: {v} below {}", bound.text()));
        }
    }
    let lam = t.level(1).unwrap().lambda.get(&2).cloned().unwrap();
    let exact = t.value(&lam).unwrap().to_string();
    o.check(exact == "1/2", format!("k=1 i=2 value {exact}"));
    o.check(lambda_closed(2, 1, 2).text() == "1/2", "k=1 i=2 bound");
    o.certs(&criterion(4, &opts()).certificates);
    o
}

fn c5() -> Outcome {
    let mut o = Outcome::new();
    let literal = [(2u32, 0usize, "17/16"), (2, 1, "273/256"), (2, 2, "4369/4096"), (3, 0, "82/81")];
    for (p, k, lit) in literal {
        let e = AsEngine::new(EmbeddingConfig::default_for(p).unwrap()).unwrap();
        let t = build_tower(p, k, k + 3, opts().budget).unwrap();
        let h = e.approximants(&t, k).unwrap().pop().unwrap().h;
        let got = e.frobenius_gap(&h).and_then(|g| e.nu1(&g)).unwrap().to_string();
        let want = sum(p, (0..=k as i64 + 1).map(|j| -4 * j)).text();
        o.check(got == want && want == lit, format!("p={p} k={k}: {got} vs {want}"));
        for c in e.approximant_checks(&t, k).iter().filter(|c| c.id.starts_with("as/theta/")) {
            let above = parse_q(&c.actual).is_some_and(|v| omega(p).lt(v));
            o.check(c.passed() && above, format!("{}: {} not above Omega", c.id, c.actual));
        }
    }
    let start = Instant::now();
    let fast = SelftestOptions { fast: true, ..opts() };
    o.certs(&criterion(5, &fast).certificates);
    o.within(start, Duration::from_secs(30));
    o.certs(&criterion(5, &opts()).certificates);
    o
}

fn c6() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cs = criterion(6, &opts()).certificates;
    o.check(cs.len() == 2, "one certificate per k");
    for (k, c) in cs.iter().enumerate() {
        let want = sum(2, (0..=k as i64 + 1).map(|j| -4 * j)).text();
        o.check(c.params.get("samples").map(String::as_str) == Some("200"), format!("{}: sample count", c.id));
        o.check(c.expected.contains(&want), format!("{}: bound {} not {want}", c.id, c.expected));
        o.check(c.actual.contains("h_k attains"), format!("{}: {}", c.id, c.actual));
    }
    o.certs(&cs);
    o.within(start, Duration::from_secs(300));
    o
}

fn c7() -> Outcome {
    let mut o = Outcome::new();
    let e = AsEngine::new(EmbeddingConfig::default_for(2).unwrap()).unwrap();
    let t = build_tower(2, 1, 3, opts().budget).unwrap();
    let hs = e.approximants(&t, 1).unwrap();
    let mut fs = vec![("0", RatFunc::zero(e.cfg.base_ring()))];
    fs.push(("1/h_0", hs[0].h.inv().unwrap()));
    fs.push(("1/h_1", hs[1].h.inv().unwrap()));
    let limit = Q::new(-7, 15);
    let quarter = Q::new(-1, 4);
    o.check(limit.lt(quarter), "-7/15 < -1/4");
    for ((label, f), want) in fs.iter().zip(["-1/2", "-15/32", "-239/512"]) {
        let got = e.approximation_value(f).unwrap().to_string();
        let below = parse_q(&got).is_some_and(|v| v.lt(limit));
        o.check(got == want && below, format!("f={label}: {got}, want {want} < -7/15"));
    }
    o.certs(&criterion(7, &opts()).certificates);
    o
}

fn c8() -> Outcome {
    let mut o = Outcome::new();
    for (p, kmax) in [("2", "2"), ("3", "1")] {
        let out = Command::new(env!("CARGO_BIN_EXE_defectcert"))
            .args(["--p", p, "--kmax", kmax, "--samples", "100", "ascheck", "report"])
            .env_remove("DEFECTCERT_SEED")
            .output()
            .unwrap();
        let text = String::from_utf8_lossy(&out.stdout);
        o.check(out.status.success(), format!("p={p}: exit {:?}", out.status.code()));
        o.check(
            text.lines().any(|l| l.trim() == "verdict: dependent-consistent (m=2)"),
            format!("p={p}: no dependent-consistent verdict"),
        );
    }
    o.certs(&criterion(8, &opts()).certificates);
    o
}

fn c9() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let cs = criterion(9, &opts()).certificates;
    let count = |prefix: &str, n: &str| {
        cs.iter()
            .filter(|c| c.id.starts_with(prefix) && c.params.get("samples").map(String::as_str) == Some(n))
            .count()
    };
    o.check(count("oracle/multiplicativity/", "500") == 4, "multiplicativity on both engines, p=2,3");
    o.check(count("oracle/ultrametric/", "500") == 4, "ultrametric on both engines, p=2,3");
    o.check(count("oracle/cross-engine", "100") == 4, "cross-engine for both c, p=2,3");
    for p in ["2", "3"] {
        let cs: Vec<&str> = cs
            .iter()
            .filter(|c| c.id == "oracle/cross-engine" && c.params.get("p").map(String::as_str) == Some(p))
            .filter_map(|c| c.params.get("c").map(String::as_str))
            .collect();
        let want: Vec<String> = {
            let p: u64 = p.parse().unwrap();
            vec![(p - 1).to_string(), (2 * (p - 1)).to_string()]
        };
        o.check(cs == want, format!("p={p}: embeddings {cs:?}"));
    }
    o.certs(&cs);
    o.within(start, Duration::from_secs(120));
    o
}

fn c10() -> Outcome {
    let mut o = Outcome::new();
    let cs = criterion(10, &opts()).certificates;
    let enumerated = cs.iter().find(|c| c.id == "uniqueness/standard-monomials");
    // m ≤ 16 and three exponents below 4
    let n = 17 * 4 * 4 * 4;
    o.check(
        enumerated.is_some_and(|c| c.actual == format!("{n} distinct")),
        format!("enumeration: {:?}", enumerated.map(|c| &c.actual)),
    );
    let tie = cs.iter().find(|c| c.id == "engine/tie-abort");
    o.check(tie.is_some_and(|c| c.actual.starts_with("panic: tied minimum")), "tie does not abort");
    o.certs(&cs);
    o
}

fn main() {
    // the tie test panics on purpose
    std::panic::set_hook(Box::new(|_| {}));
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("key-polynomial values", c1),
        ("tower value formulas", c2),
        ("tower exact identities", c3),
        ("Lambda value bound", c4),
        ("approximant values", c5),
        ("best approximant", c6),
        ("approximation bound", c7),
        ("dependence verdict", c8),
        ("engine oracles", c9),
        ("uniqueness of the minimum", c10),
    ];
    let mut failed = 0;
    for (n, (title, run)) in checks.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {:<27} {verdict}  ({:.2}s)", n + 1, title, start.elapsed().as_secs_f64());
        for note in &o.notes {
            println!("    {note}");
        }
        failed += usize::from(!o.ok);
    }
    let _ = std::panic::take_hook();
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
