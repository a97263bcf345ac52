//! Machine-readable reports and the plain-text summary printed to stdout.

use std::collections::BTreeMap;
use std::io::IsTerminal;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

/// Everything except `timestamp` is a function of the command line and the
/// input bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub command: String,
    pub input: Option<Input>,
    pub verdicts: BTreeMap<String, bool>,
    pub residuals: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extracted: Option<Value>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    pub version: &'static str,
    pub timestamp: String,
}

impl ReportFile {
    pub fn new(tolerance: f64, input: Option<Input>) -> Self {
        let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
        Self {
            command,
            input,
            verdicts: BTreeMap::new(),
            residuals: BTreeMap::new(),
            extracted: None,
            tolerance,
            details: None,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn residual(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.insert(name.into(), crate::files::num(value));
    }

    pub fn verdict(&mut self, name: impl Into<String>, value: bool) {
        self.verdicts.insert(name.into(), value);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports always serialize")
    }
}

/// Plain-text output with optional ANSI colour.
pub struct Printer {
    color: bool,
}

impl Printer {
    pub fn stdout() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Self { color: !no_color && std::io::stdout().is_terminal() }
    }

    pub fn status(&self, ok: bool) -> String {
        let (label, code) = if ok { ("pass", "32") } else { ("FAIL", "31") };
        if self.color {
            format!("\x1b[{code}m{label}\x1b[0m")
        } else {
            label.to_string()
        }
    }

    pub fn residual_line(&self, name: &str, value: f64, tol: f64) -> String {
        format!("  {name:<18} {value:>12.3e}  {}", self.status(value <= tol))
    }

    pub fn verdict_line(&self, name: &str, ok: bool) -> String {
        format!("{name}: {}", self.status(ok))
    }
}
