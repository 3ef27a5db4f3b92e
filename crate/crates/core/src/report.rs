//! Verdicts and check records shared by the zeta, spectrum and L-function layers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
    Unsupported,
    /// Informational row; never decides an outcome.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    /// Combined verdict: any FAIL wins, then INDETERMINATE/UNSUPPORTED, else PASS.
    pub fn combine(items: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Pass;
        for v in items {
            out = match (out, v) {
                (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
                (Verdict::Indeterminate, _) | (_, Verdict::Indeterminate) => Verdict::Indeterminate,
                (Verdict::Unsupported, _) | (_, Verdict::Unsupported) => Verdict::Unsupported,
                _ => Verdict::Pass,
            };
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate => "INDETERMINATE",
            Verdict::Unsupported => "UNSUPPORTED",
            Verdict::Info => "INFO",
        };
        f.write_str(s)
    }
}

/// One named check with its evidence and the inputs that were supplied rather than computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub details: Value,
    pub supplied_fixtures: BTreeMap<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict, details: Value) -> Self {
        Check { name: name.into(), verdict, details, supplied_fixtures: BTreeMap::new() }
    }

    pub fn with_fixture(mut self, key: impl Into<String>, value: Value) -> Self {
        self.supplied_fixtures.insert(key.into(), value);
        self
    }
}

/// Shortest decimal rendering that round-trips, for stable report text.
pub fn float_str(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:e}")
    }
}
