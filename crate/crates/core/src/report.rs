//! Machine-readable statistics report.

use serde::Serialize;
use serde_json::Value;

/// `{ "op": .., "params": {..}, "N": .., "result": {..}, "deviation": .. }`
#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub op: String,
    pub params: Value,
    #[serde(rename = "N")]
    pub n: u64,
    pub result: Value,
    pub deviation: f64,
}
