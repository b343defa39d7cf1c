use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: String,
}

/// Result of one verb: a human-readable body and the JSON document
/// `{verb, inputs, result, checks}`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub verb: &'static str,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub text: String,
}

impl Report {
    pub fn new(verb: &'static str) -> Self {
        Report {
            verb,
            inputs: Map::new(),
            result: Value::Null,
            checks: Vec::new(),
            text: String::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_owned(), value.into());
        self
    }

    pub fn check(&mut self, name: impl Into<String>, status: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: status.into(),
        });
    }

    pub fn line(&mut self, line: impl AsRef<str>) {
        writeln!(self.text, "{}", line.as_ref()).unwrap();
    }

    /// False when any check reports FAIL.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.status != "FAIL")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
