use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable naming a directory that receives a copy of every
/// report.
pub const REPORT_DIR_ENV: &str = "PERVGLUE_REPORT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }
}

/// The deterministic part of a report: identical for identical inputs.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    /// SHA-256 over the inputs and the contents of any input file.
    pub digest: String,
    pub verdict: Verdict,
    pub summary: Vec<String>,
    pub details: Value,
    pub witnesses: Vec<Value>,
}

impl ReportDoc {
    pub fn new(command: &str, inputs: BTreeMap<String, String>, files: &[&str]) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &inputs {
            h.update(k.as_bytes());
            h.update([0]);
            h.update(v.as_bytes());
            h.update([0]);
        }
        for f in files {
            h.update(f.as_bytes());
        }
        ReportDoc {
            command: command.to_string(),
            inputs,
            digest: format!("{:x}", h.finalize()),
            verdict: Verdict::Pass,
            summary: Vec::new(),
            details: Value::Null,
            witnesses: Vec::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn fail(&mut self, s: impl Into<String>) {
        self.verdict = Verdict::Fail;
        self.line(s);
    }

    pub fn error(command: &str, inputs: BTreeMap<String, String>, message: &str) -> Self {
        let mut r = ReportDoc::new(command, inputs, &[]);
        r.verdict = Verdict::Error;
        r.line(format!("error: {message}"));
        r
    }

    pub fn text(&self, timing_ms: u128) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "  {k} = {v}");
        }
        let _ = writeln!(out, "digest: {}", self.digest);
        for l in &self.summary {
            let _ = writeln!(out, "{l}");
        }
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        };
        let _ = writeln!(out, "verdict: {verdict}");
        let _ = writeln!(out, "time: {timing_ms} ms");
        out
    }

    /// The machine-readable document: the deterministic `report` section
    /// plus the wall-clock time.
    pub fn json(&self, timing_ms: u128) -> String {
        #[derive(Serialize)]
        struct Envelope<'a> {
            report: &'a ReportDoc,
            timing_ms: u128,
        }
        serde_json::to_string_pretty(&Envelope {
            report: self,
            timing_ms,
        })
        .expect("report serializes")
    }

    /// The `report` section alone.
    pub fn stable_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_to(&self, dir: &Path, timing_ms: u128) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.json", self.command)), self.json(timing_ms))?;
        std::fs::write(dir.join(format!("{}.txt", self.command)), self.text(timing_ms))
    }
}
