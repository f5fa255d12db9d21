//! Named check results and the report that collects them.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    BudgetExceeded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::BudgetExceeded => "budget-exceeded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub expected: String,
    pub actual: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Certificate {
    pub fn new(id: impl Into<String>) -> Self {
        Certificate {
            id: id.into(),
            params: BTreeMap::new(),
            expected: String::new(),
            actual: String::new(),
            status: Status::Fail,
            elapsed_ms: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn outcome(mut self, expected: impl Into<String>, actual: impl Into<String>, ok: bool) -> Self {
        self.expected = expected.into();
        self.actual = actual.into();
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }

    /// Budget overruns become their own status; every other error is a failure.
    pub fn from_error(mut self, err: &Error) -> Self {
        self.actual = format!("error: {err}");
        self.status = match err {
            Error::Budget { .. } => Status::BudgetExceeded,
            _ => Status::Fail,
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Run `f`, stamping the elapsed wall time on its certificate.
pub fn timed<F: FnOnce() -> Certificate>(f: F) -> Certificate {
    let start = Instant::now();
    let mut c = f();
    c.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub header: ReportHeader,
    /// Set when any certificate ran out of budget; not a failure by itself.
    pub budget_exceeded: bool,
    pub certificates: Vec<Certificate>,
}

impl Report {
    pub fn new(config: BTreeMap<String, String>) -> Self {
        Report {
            header: ReportHeader {
                tool: "defectcert".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config,
            },
            budget_exceeded: false,
            certificates: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Certificate) {
        self.budget_exceeded |= c.status == Status::BudgetExceeded;
        self.certificates.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Certificate>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn any_failed(&self) -> bool {
        self.certificates.iter().any(|c| c.status == Status::Fail)
    }

    pub fn any_budget(&self) -> bool {
        self.budget_exceeded
    }

    /// Drop timing so the structured form is reproducible byte for byte.
    pub fn without_timings(mut self) -> Self {
        for c in &mut self.certificates {
            c.elapsed_ms = None;
        }
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = self
            .certificates
            .iter()
            .map(|c| c.id.len())
            .max()
            .unwrap_or(2)
            .max(2);
        for c in &self.certificates {
            let params = c
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            let time = c.elapsed_ms.map(|t| format!(" [{t} ms]")).unwrap_or_default();
            out.push_str(&format!(
                "{:<15} {:<w$}  expected {}  actual {}  {}{}\n",
                c.status.to_string().to_uppercase(),
                c.id,
                c.expected,
                c.actual,
                params,
                time,
            ));
        }
        let pass = self.certificates.iter().filter(|c| c.passed()).count();
        out.push_str(&format!(
            "{pass}/{} certificates passed{}\n",
            self.certificates.len(),
            if self.any_budget() { " (budget exceeded on some checks)" } else { "" }
        ));
        out
    }
}
