//! The JSON envelope shared by every subcommand.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "rackforge.report/1";

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub config: Value,
    #[serde(flatten)]
    pub result: Value,
    /// Where reference values checked by this command come from.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
    /// The only field allowed to differ between identical invocations.
    pub wall_clock_ms: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Removes `wall_clock_ms` at any depth so two reports can be compared.
pub fn strip_wall_clock(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.remove("wall_clock_ms");
            map.values_mut().for_each(strip_wall_clock);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_wall_clock),
        _ => {}
    }
}
