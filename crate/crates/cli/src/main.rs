use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use defectcert::artin::{AsEngine, EmbeddingConfig};
use defectcert::cert::{timed, Certificate, Report};
use defectcert::engine::{expand, value_rat};
use defectcert::error::Error;
use defectcert::fuzz::{self, Oracle};
use defectcert::keyseq::GenSeq;
use defectcert::parse::{parse_expr, parse_poly};
use defectcert::poly::{Ring, RingTag};
use defectcert::ratfunc::RatFunc;
use defectcert::selftest::{self, SelftestOptions};
use defectcert::tower::{build_tower, DEFAULT_BUDGET};

#[derive(Parser, Debug)]
#[command(name = "defectcert", version, about = "Certified valuation checks for an Artin-Schreier defect extension of F_p(u,v)")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Characteristic (2, 3, 5 or 7).
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,
    /// Embedding parameter, a positive multiple of p - 1 (default p - 1).
    #[arg(long, global = true)]
    c: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    kmax: usize,
    #[arg(long, global = true, default_value_t = 3)]
    imax: usize,
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    /// Sampler seed; the flag wins over the environment.
    #[arg(long, global = true, env = "DEFECTCERT_SEED", default_value_t = 0x5EED)]
    seed: u64,
    /// Largest polynomial support any tower element may reach.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Stamp wall-clock times on certificates (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timings: bool,
    /// Print a tab-separated value table instead of the report.
    #[arg(long, global = true)]
    dump_values: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value of an expression: nu on (u,v), nu* on (x,y), nu_1 on (x,v).
    Value {
        #[arg(long, default_value = "uv")]
        ring: String,
        expr: String,
    },
    /// Standard expansion of a polynomial with term values.
    Expand {
        #[arg(long, default_value = "uv")]
        ring: String,
        expr: String,
    },
    /// Build the transform tower and certify its identities and values.
    Tower,
    /// Artin-Schreier checks.
    Ascheck {
        #[command(subcommand)]
        which: AsCommand,
    },
    /// Seeded engine oracles.
    Fuzz {
        #[arg(long, default_value = "mult")]
        what: String,
    },
    /// The full acceptance suite.
    Selftest {
        /// Skip k = 2 in the approximant checks.
        #[arg(long)]
        fast: bool,
    },
}

#[derive(Subcommand, Debug)]
enum AsCommand {
    /// Approximant values and best-approximant sampling at level k.
    T1 {
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
    /// nu_1(1/x - f) below -2/p + Omega/p, for one f or a sampled family.
    T2 {
        #[arg(long)]
        f: Option<String>,
    },
    /// Dependence evidence over the default family.
    Report,
}

enum Failure {
    Usage(String),
    /// Ran out of budget before any certificate could be produced.
    Budget(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } => Failure::Budget(e),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl RunConfig {
    fn embedding(&self) -> Result<EmbeddingConfig, Error> {
        match self.c {
            Some(c) => EmbeddingConfig::new(self.p, c),
            None => EmbeddingConfig::default_for(self.p),
        }
    }

    fn validate(&self) -> Result<(), Error> {
        self.embedding()?;
        if self.imax < 2 {
            return Err(Error::Config("--imax must be at least 2".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("--budget must be positive".into()));
        }
        Ok(())
    }

    fn echo(&self) -> BTreeMap<String, String> {
        let c = self.embedding().map(|e| e.c).unwrap_or(0);
        let mut m = BTreeMap::new();
        m.insert("p".into(), self.p.to_string());
        m.insert("c".into(), c.to_string());
        m.insert("kmax".into(), self.kmax.to_string());
        m.insert("imax".into(), self.imax.to_string());
        m.insert("samples".into(), self.samples.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("budget".into(), self.budget.to_string());
        m
    }
}

fn ring(tag: &str, p: u32) -> Result<Ring, Error> {
    let t = RingTag::parse(tag).ok_or_else(|| Error::Config(format!("unknown ring `{tag}` (use uv, xy or xv)")))?;
    Ring::new(t, p)
}

struct Output {
    text: String,
    failed: bool,
}

fn emit(run: &RunConfig, out: &Output) -> std::io::Result<()> {
    match &run.out {
        Some(path) => fs::write(path, &out.text),
        None => std::io::stdout().write_all(out.text.as_bytes()),
    }
}

fn timed_if(run: &RunConfig, f: impl FnOnce() -> Certificate) -> Certificate {
    if run.timings {
        timed(f)
    } else {
        f()
    }
}

fn report_output(run: &RunConfig, certs: Vec<Certificate>, extra_text: Option<String>) -> Output {
    let mut report = Report::new(run.echo());
    report.extend(certs);
    let failed = report.any_failed();
    let text = match run.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => {
            let mut t = report.to_text();
            if let Some(x) = extra_text {
                t.push_str(&x);
                t.push('\n');
            }
            t
        }
    };
    Output { text, failed }
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> Output {
    let mut text = header.join("\t") + "\n";
    for r in rows {
        text.push_str(&r.join("\t"));
        text.push('\n');
    }
    Output { text, failed: false }
}

fn cmd_value(run: &RunConfig, ring_tag: &str, expr: &str) -> Result<Output, Failure> {
    let r = ring(ring_tag, run.p)?;
    let f = parse_expr(expr, r)?;
    let value = match r.tag {
        RingTag::UV => value_rat(&f, &GenSeq::p_sequence(run.p)?)?,
        RingTag::XY => value_rat(&f, &GenSeq::q_sequence(run.p)?)?,
        RingTag::XV => AsEngine::new(run.embedding()?)?.nu1(&f)?,
    };
    let text = match run.format {
        Format::Text => format!("{value}\n"),
        Format::Json => {
            let v = serde_json::json!({
                "ring": r.tag.to_string(),
                "expr": f.to_string(),
                "value": value.to_string(),
            });
            serde_json::to_string_pretty(&v).expect("serializes") + "\n"
        }
    };
    Ok(Output { text, failed: false })
}

fn cmd_expand(run: &RunConfig, ring_tag: &str, expr: &str) -> Result<Output, Failure> {
    let r = ring(ring_tag, run.p)?;
    let seq = match r.tag {
        RingTag::UV => GenSeq::p_sequence(run.p)?,
        RingTag::XY => GenSeq::q_sequence(run.p)?,
        RingTag::XV => return Err(Failure::Usage("expand works on uv or xy".into())),
    };
    let f = parse_poly(expr, r)?;
    let e = expand(&f, &seq)?;
    let value = value_rat(&RatFunc::from_poly(f), &seq)?;
    let text = match run.format {
        Format::Text => format!("{}\nvalue {value}\n", e.render(&seq)),
        Format::Json => {
            let terms: Vec<_> = e
                .terms
                .iter()
                .map(|t| {
                    serde_json::json!({
                        "coeff": t.coeff,
                        "m": t.m,
                        "a": t.a,
                        "value": e.term_value(&seq, t).to_string(),
                    })
                })
                .collect();
            let v = serde_json::json!({ "terms": terms, "value": value.to_string() });
            serde_json::to_string_pretty(&v).expect("serializes") + "\n"
        }
    };
    Ok(Output { text, failed: false })
}

fn cmd_tower(run: &RunConfig) -> Result<Output, Failure> {
    let t = build_tower(run.p, run.kmax, run.imax, run.budget)?;
    if run.dump_values {
        let mut rows = Vec::new();
        for (k, lv) in t.levels.iter().enumerate() {
            for (i, f) in lv.p.iter().enumerate().take(run.imax + 1) {
                rows.push(vec![k.to_string(), i.to_string(), t.value(f)?.to_string()]);
            }
        }
        return Ok(table(&["k", "i", "value"], rows));
    }
    let mut certs = Vec::new();
    for k in 0..=run.kmax {
        certs.push(timed_if(run, || t.verify_unit_factor(k)));
        if k > 0 {
            certs.push(timed_if(run, || t.verify_s_positive(k)));
        }
        for i in 0..=run.imax {
            certs.push(timed_if(run, || t.verify_value(k, i)));
        }
        for i in 2..=run.imax {
            certs.push(timed_if(run, || t.verify_recursion(k, i)));
            certs.push(timed_if(run, || t.verify_lambda(k, i)));
        }
    }
    Ok(report_output(run, certs, None))
}

fn cmd_t1(run: &RunConfig, k: usize) -> Result<Output, Failure> {
    let e = AsEngine::new(run.embedding()?)?;
    let levels = k.max(run.kmax);
    let t = build_tower(run.p, levels, (levels + 3).max(run.imax), run.budget)?;
    if run.dump_values {
        let rows = e
            .approximants(&t, levels)?
            .into_iter()
            .map(|a| -> Result<Vec<String>, Error> {
                let v = e.nu1(&e.frobenius_gap(&a.h)?)?;
                Ok(vec![a.k.to_string(), v.to_string(), e.approximant_bound(a.k).to_string()])
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(table(&["k", "nu1(h_k^p - x^p)", "closed form"], rows));
    }
    let mut certs = vec![timed_if(run, || e.check_generator())];
    certs.extend(e.h_element_checks());
    certs.extend(e.approximant_checks(&t, k));
    certs.push(timed_if(run, || e.best_approximant(&t, k, run.samples, run.seed)));
    Ok(report_output(run, certs, None))
}

fn cmd_t2(run: &RunConfig, f: Option<&str>) -> Result<Output, Failure> {
    let e = AsEngine::new(run.embedding()?)?;
    if let Some(text) = f {
        let f = parse_expr(text, e.cfg.base_ring())?;
        let c = e.approximation_check(&format!("f={f}"), &f);
        return Ok(report_output(run, vec![c], None));
    }
    let t = build_tower(run.p, run.kmax, run.kmax + 3, run.budget)?;
    if run.dump_values {
        let rows = e
            .approximants(&t, run.kmax)?
            .into_iter()
            .map(|a| -> Result<Vec<String>, Error> {
                let v = e.approximation_value(&a.h.inv()?)?;
                Ok(vec![a.k.to_string(), v.to_string(), v.decimal().unwrap_or_default()])
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(table(&["k", "nu1(1/x - 1/h_k)", "decimal"], rows));
    }
    let samplers = AsEngine::default_samplers(run.kmax, run.samples, run.seed);
    let r = e.dependence_report(Some(&t), &samplers, 2)?;
    let certs = r
        .entries
        .iter()
        .map(|x| {
            Certificate::new(format!("as/approximation/{}", x.label))
                .param("p", run.p)
                .outcome("< -2/p + Omega/p < -1/p^2", x.value.to_string(), x.below_bound && x.below_criterion)
        })
        .collect();
    Ok(report_output(run, certs, None))
}

fn cmd_report(run: &RunConfig) -> Result<Output, Failure> {
    let e = AsEngine::new(run.embedding()?)?;
    let t = build_tower(run.p, run.kmax, run.kmax + 3, run.budget)?;
    let samplers = AsEngine::default_samplers(run.kmax, run.samples, run.seed);
    let r = e.dependence_report(Some(&t), &samplers, 2)?;
    let mut certs: Vec<Certificate> = r
        .entries
        .iter()
        .map(|x| {
            Certificate::new(format!("as/dependence/{}", x.label))
                .param("p", run.p)
                .outcome(format!("< -1/p^{}", r.m), x.value.to_string(), x.below_criterion)
        })
        .collect();
    let verdict = r.verdict_text();
    certs.push(
        Certificate::new("as/dependence/verdict")
            .param("p", run.p)
            .param("m", r.m)
            .outcome(format!("dependent-consistent (m={})", r.m), verdict.clone(), verdict.starts_with("dependent-consistent")),
    );
    if run.format == Format::Text {
        return Ok(Output {
            text: format!("{r}\n"),
            failed: !verdict.starts_with("dependent-consistent"),
        });
    }
    Ok(report_output(run, certs, None))
}

fn cmd_fuzz(run: &RunConfig, what: &str) -> Result<Output, Failure> {
    let oracle = Oracle::parse(what).ok_or_else(|| Failure::Usage(format!("unknown oracle `{what}` (use mult, ultra or cross)")))?;
    let cfg = run.embedding()?;
    let certs = match oracle {
        Oracle::Multiplicativity => vec![
            timed_if(run, || fuzz::multiplicativity(&GenSeq::p_sequence(run.p).expect("validated"), run.samples, run.seed)),
            timed_if(run, || fuzz::multiplicativity(&GenSeq::q_sequence(run.p).expect("validated"), run.samples, run.seed)),
        ],
        Oracle::Ultrametric => vec![
            timed_if(run, || fuzz::ultrametric(&GenSeq::p_sequence(run.p).expect("validated"), run.samples, run.seed)),
            timed_if(run, || fuzz::ultrametric(&GenSeq::q_sequence(run.p).expect("validated"), run.samples, run.seed)),
        ],
        Oracle::CrossEngine => vec![timed_if(run, || fuzz::cross_engine(&cfg, run.samples, run.seed))],
    };
    Ok(report_output(run, certs, None))
}

fn cmd_selftest(run: &RunConfig, fast: bool) -> Result<Output, Failure> {
    let opts = SelftestOptions {
        fast,
        samples: run.samples,
        seed: run.seed,
        budget: run.budget,
    };
    // the tie check panics on purpose; keep its message off the terminal
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut crits = selftest::run_all(&opts);
    std::panic::set_hook(hook);
    if !run.timings {
        for c in &mut crits {
            c.elapsed_ms = None;
        }
    }
    let failed = crits.iter().any(|c| !c.passed());
    let text = match run.format {
        Format::Json => {
            let v = serde_json::json!({
                "header": Report::new(run.echo()).header,
                "criteria": crits,
            });
            serde_json::to_string_pretty(&v).expect("serializes") + "\n"
        }
        Format::Text => {
            let mut t = String::new();
            for c in &crits {
                let time = c.elapsed_ms.map(|ms| format!(" [{ms} ms]")).unwrap_or_default();
                t.push_str(&format!(
                    "criterion {:>2} {:<26} {}  ({} certificates){}\n",
                    c.number,
                    c.title,
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.certificates.len(),
                    time
                ));
                for x in c.certificates.iter().filter(|x| !x.passed()) {
                    t.push_str(&format!("    {} {}: expected {} actual {}\n", x.status, x.id, x.expected, x.actual));
                }
            }
            t
        }
    };
    Ok(Output { text, failed })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = &cli.run;
    if let Err(e) = run.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match &cli.cmd {
        Command::Value { ring, expr } => cmd_value(run, ring, expr),
        Command::Expand { ring, expr } => cmd_expand(run, ring, expr),
        Command::Tower => cmd_tower(run),
        Command::Ascheck { which } => match which {
            AsCommand::T1 { k } => cmd_t1(run, *k),
            AsCommand::T2 { f } => cmd_t2(run, f.as_deref()),
            AsCommand::Report => cmd_report(run),
        },
        Command::Fuzz { what } => cmd_fuzz(run, what),
        Command::Selftest { fast } => cmd_selftest(run, *fast),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(run, &out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Budget(e)) => {
            let c = Certificate::new("build").param("p", run.p).from_error(&e);
            let out = report_output(run, vec![c], None);
            eprintln!("warning: {e}");
            match emit(run, &out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(_) => ExitCode::from(2),
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
