use serde::Serialize;
use serde_json::Value;

/// Echoed with every run; reruns with the same inputs print the same bytes.
/// Wall time goes to stderr for that reason.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub passed: usize,
    pub failed: usize,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_COUNTEREXAMPLE: u8 = 3;

/// What a subcommand hands back for printing.
pub struct Run {
    pub body: Value,
    pub csv: Option<String>,
    pub passed: usize,
    pub failed: usize,
    pub code: u8,
}

impl Run {
    pub fn ok(body: Value) -> Self {
        Run { body, csv: None, passed: 0, failed: 0, code: EXIT_OK }
    }

    /// Pass/fail counts decide the exit code: any failure is a counterexample.
    pub fn checked(body: Value, passed: usize, failed: usize) -> Self {
        let code = if failed > 0 { EXIT_COUNTEREXAMPLE } else { EXIT_OK };
        Run { body, csv: None, passed, failed, code }
    }

    pub fn domain(body: Value) -> Self {
        Run { body, csv: None, passed: 0, failed: 0, code: EXIT_DOMAIN }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

/// Marks every float in the tree with a leading `~`; exact values are
/// already strings or integers.
pub fn label_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::String(format!("~{n}")),
        Value::Array(a) => Value::Array(a.into_iter().map(label_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, label_floats(v))).collect()),
        other => other,
    }
}

pub fn float(x: f64) -> String {
    format!("~{x}")
}
