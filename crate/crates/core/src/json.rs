//! Canonical JSON: sorted keys, no insignificant whitespace, shortest
//! round-trip float formatting.

use serde::Serialize;

use crate::error::Result;

pub fn canonical_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    // serde_json's Map is a BTreeMap, so going through Value sorts the keys
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&v)?)
}

/// Name and version stamped into every artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self { name: env!("CARGO_PKG_NAME").to_string(), version: env!("CARGO_PKG_VERSION").to_string() }
    }
}
