use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Assumed,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Assumed => "assumed",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub status: Status,
    pub dims: BTreeMap<String, i64>,
    pub seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Record {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Record {
            name: name.into(),
            status,
            dims: BTreeMap::new(),
            seconds: None,
            detail: None,
        }
    }

    pub fn dim(mut self, key: impl Into<String>, value: impl TryInto<i64>) -> Self {
        self.dims.insert(key.into(), value.try_into().unwrap_or(i64::MAX));
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        self.detail = Some(text.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: Config,
    pub records: Vec<Record>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(config: Config, mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| a.name.cmp(&b.name));
        let verdict = if records.iter().any(|r| r.status == Status::Fail) {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            records,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &report.records {
                let _ = write!(out, "{:<8} {}", r.status.as_str(), r.name);
                for (k, v) in &r.dims {
                    let _ = write!(out, " {k}={v}");
                }
                if let Some(s) = r.seconds {
                    let _ = write!(out, " ({s:.3}s)");
                }
                if let Some(d) = &r.detail {
                    let _ = write!(out, " # {d}");
                }
                out.push('\n');
            }
            let verdict = if report.passed() { "pass" } else { "fail" };
            let _ = writeln!(out, "verdict: {verdict} ({} records)", report.records.len());
            out.into_bytes()
        }
    }
}
