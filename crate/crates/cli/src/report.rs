//! The report every checking command emits, and its text rendering.

use serde::Serialize;
use serde_json::Value;
use zetalab_core::report::{Check, Verdict};

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub schema: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub subject: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    /// Statements the checks rely on without testing them.
    pub unverified_hypotheses: Vec<String>,
    pub config: RunConfig,
}

impl ConjectureReport {
    pub fn new(command: impl Into<String>, subject: impl Into<String>, config: &RunConfig) -> Self {
        ConjectureReport {
            schema: SCHEMA,
            tool_version: TOOL_VERSION,
            command: command.into(),
            subject: subject.into(),
            verdict: Verdict::Pass,
            checks: Vec::new(),
            unverified_hypotheses: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
        self.verdict = overall(&self.checks);
    }

    pub fn hypothesis(&mut self, text: impl Into<String>) {
        self.unverified_hypotheses.push(text.into());
    }

    /// 0 when every deciding check passes, 3 on any FAIL, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass | Verdict::Info => 0,
            Verdict::Fail => 3,
            Verdict::Indeterminate | Verdict::Unsupported => 4,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}  {}\nsubject: {}\n", self.command, self.verdict, self.subject);
        for c in &self.checks {
            out.push_str(&format!("\n[{}] {}\n", c.verdict, c.name));
            render(&c.details, 1, &mut out);
            for (k, v) in &c.supplied_fixtures {
                out.push_str(&format!("  supplied {k} = {v}\n"));
            }
        }
        if !self.unverified_hypotheses.is_empty() {
            out.push_str("\nunverified hypotheses:\n");
            for h in &self.unverified_hypotheses {
                out.push_str(&format!("  - {h}\n"));
            }
        }
        out
    }
}

/// INFO rows never decide; an empty report passes.
fn overall(checks: &[Check]) -> Verdict {
    Verdict::combine(checks.iter().map(|c| c.verdict).filter(|v| *v != Verdict::Info))
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(v, depth + 1, out);
                    }
                    Value::Array(items) if items.iter().any(|x| x.is_object()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for item in items {
                            out.push_str(&format!("{pad}  -\n"));
                            render(item, depth + 2, out);
                        }
                    }
                    other => out.push_str(&format!("{pad}{k}: {other}\n")),
                }
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}
