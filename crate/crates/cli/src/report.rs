//! Machine-readable reports and the exit-code contract.

use hypoindex_core::Error as CoreError;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Exit codes: 0 success, 1 I/O or parse, 2 precondition/domain,
/// 3 indeterminate tolerance decision, 4 internal consistency or numerics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Io = 1,
    Precondition = 2,
    Indeterminate = 3,
    Internal = 4,
}

pub fn exit_code_for(err: &CoreError) -> ExitCode {
    match err {
        CoreError::InvalidInput(_) => ExitCode::Io,
        CoreError::Domain(_)
        | CoreError::Precondition(_)
        | CoreError::Singular { .. }
        | CoreError::FitFailure(_) => ExitCode::Precondition,
        CoreError::Indeterminate { .. } => ExitCode::Indeterminate,
        CoreError::Internal(_) | CoreError::Numerical(_) => ExitCode::Internal,
    }
}

#[derive(Debug, Serialize)]
pub struct InputStamp {
    pub name: String,
    pub n: usize,
    pub content_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind_hint: Option<crate::matfile::KindHint>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub timestamp_unix: u64,
    pub input: InputStamp,
    pub tolerances: Value,
    #[serde(flatten)]
    pub body: Value,
}

impl Report {
    pub fn new(command: &str, input: InputStamp, tolerances: Value, body: Value) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            timestamp_unix,
            input,
            tolerances,
            body,
        }
    }

    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serializes")
        } else {
            serde_json::to_string(self).expect("report serializes")
        }
    }
}

/// Serialize any core value into the report body under a key.
pub fn section<T: Serialize>(key: &str, value: &T) -> Value {
    let mut map = serde_json::Map::new();
    map.insert(
        key.to_string(),
        serde_json::to_value(value).expect("section serializes"),
    );
    Value::Object(map)
}

pub fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(map_a), Value::Object(map_b)) = (&mut a, b) {
        for (k, v) in map_b {
            map_a.insert(k, v);
        }
    }
    a
}
