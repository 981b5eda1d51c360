use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use uniformity_core::Error;

/// Bumped whenever the report layout changes incompatibly.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_ASSERTION: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

/// Top-level JSON document written by every subcommand. No timestamps or
/// host details, so identical runs produce identical bytes.
#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub config: Value,
    pub results: Vec<Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: Value, results: Vec<Value>) -> Self {
        let pass = results
            .iter()
            .all(|r| r.get("pass").and_then(Value::as_bool).unwrap_or(false));
        Self {
            schema_version: SCHEMA_VERSION,
            tool: Tool {
                name: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
            },
            config,
            results,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        std::fs::write(path, self.to_json()).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_PARSE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::parse(e.to_string())
    }
}
