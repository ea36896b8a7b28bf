//! Effective configs for each subcommand, and loading them back out of files
//! or earlier artifacts.

use std::fs;
use std::path::Path;

use bicusp::ToolInfo;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspConfig {
    pub a: Option<String>,
    pub b: Option<String>,
    pub slope_length: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoroballConfig {
    pub a: Option<String>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub cutoff: Option<f64>,
    pub depth: Option<usize>,
    pub scale: Option<f64>,
}

/// What gets echoed into artifacts: the tool stamp and the effective config.
#[derive(Serialize)]
pub struct Stamp<'a, C> {
    pub tool: ToolInfo,
    pub config: &'a C,
}

const META_OPEN: &str = "<metadata>";
const META_CLOSE: &str = "</metadata>";

fn xml_unescape(s: &str) -> String {
    s.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")
}

/// Accepts a bare config object, any JSON artifact carrying a `config` key,
/// or an SVG whose `<metadata>` holds such an artifact stamp.
pub fn load<C: DeserializeOwned>(path: &Path) -> Result<C, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let json = if text.trim_start().starts_with('<') {
        let start = text
            .find(META_OPEN)
            .ok_or_else(|| CliError::Usage(format!("{} has no <metadata> block", path.display())))?;
        let body = &text[start + META_OPEN.len()..];
        let end = body
            .find(META_CLOSE)
            .ok_or_else(|| CliError::Usage(format!("{}: unterminated <metadata>", path.display())))?;
        xml_unescape(&body[..end])
    } else {
        text
    };
    let mut value: Value =
        serde_json::from_str(&json).map_err(|e| CliError::Usage(format!("{}: not JSON: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{}: bad config: {e}", path.display())))
}
