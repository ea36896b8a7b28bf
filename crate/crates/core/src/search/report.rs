use std::f64::consts::PI;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BoxStatus, BoxVerdict, SearchConfig};
use crate::bicuspid::{BoxPath, ParamBox};
use crate::error::{Error, Result};
use crate::json::{canonical_json, ToolInfo};
use crate::words::{VolumeBound, Word};

fn parse_err(detail: impl Into<String>) -> Error {
    Error::Parse { what: "search report", detail: detail.into() }
}

fn bound_from_value(v: f64) -> Result<VolumeBound> {
    let k = (v / PI).round();
    if !v.is_finite() || (v - k * PI).abs() > 1e-9 * v.abs().max(1.0) {
        return Err(parse_err(format!("volume bound {v} is not an integer multiple of π")));
    }
    Ok(VolumeBound { pi_multiple: k as i64 })
}

/// The covolume bound `V` aggregated over all leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalVolumeBound {
    Finite(VolumeBound),
    /// Some leaf is undecided, so no bound is available.
    Unbounded,
    /// No leaf carries a positive bound.
    NegInfinity,
}

impl GlobalVolumeBound {
    pub fn from_leaves(leaves: &[BoxVerdict]) -> Self {
        let mut best: Option<VolumeBound> = None;
        for leaf in leaves {
            match &leaf.status {
                BoxStatus::Undecided => return GlobalVolumeBound::Unbounded,
                BoxStatus::Candidate { volume_bound, .. } if volume_bound.pi_multiple > 0 => {
                    best = best.max(Some(*volume_bound));
                }
                _ => {}
            }
        }
        best.map_or(GlobalVolumeBound::NegInfinity, GlobalVolumeBound::Finite)
    }

    pub fn value(&self) -> f64 {
        match self {
            GlobalVolumeBound::Finite(v) => v.value(),
            GlobalVolumeBound::Unbounded => f64::INFINITY,
            GlobalVolumeBound::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for GlobalVolumeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalVolumeBound::Finite(v) => write!(f, "{}π", v.pi_multiple),
            GlobalVolumeBound::Unbounded => f.write_str("unbounded"),
            GlobalVolumeBound::NegInfinity => f.write_str("-inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoundRepr {
    Number(f64),
    Text(String),
}

impl Serialize for GlobalVolumeBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GlobalVolumeBound::Finite(v) => s.serialize_f64(v.value()),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for GlobalVolumeBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match BoundRepr::deserialize(d)? {
            BoundRepr::Number(v) => bound_from_value(v).map(GlobalVolumeBound::Finite).map_err(D::Error::custom),
            BoundRepr::Text(t) if t == "unbounded" => Ok(GlobalVolumeBound::Unbounded),
            BoundRepr::Text(t) if t == "-inf" => Ok(GlobalVolumeBound::NegInfinity),
            BoundRepr::Text(t) => Err(D::Error::custom(format!("unknown volume bound {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub boxes_tested: u64,
    pub words_evaluated: u64,
    pub max_depth_reached: u32,
    /// Words available to each box: the stream prefix cut at the per-box budget.
    pub words_in_stream: u64,
    pub eliminated_infeasible: u64,
    pub eliminated_killer: u64,
    pub candidate: u64,
    pub undecided: u64,
}

/// One leaf as it appears in the JSON certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafRecord {
    pub path: BoxPath,
    #[serde(rename = "box")]
    pub bounds: [[f64; 2]; 6],
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_bound: Option<f64>,
}

impl From<&BoxVerdict> for LeafRecord {
    fn from(v: &BoxVerdict) -> Self {
        let volume_bound = match &v.status {
            BoxStatus::Candidate { volume_bound, .. } => Some(volume_bound.value()),
            _ => None,
        };
        LeafRecord {
            path: v.bx.path().clone(),
            bounds: v.bx.coords().map(|c| [c.lo(), c.hi()]),
            status: v.status.name().to_string(),
            word: v.status.word().cloned(),
            volume_bound,
        }
    }
}

impl TryFrom<LeafRecord> for BoxVerdict {
    type Error = Error;

    fn try_from(r: LeafRecord) -> Result<Self> {
        let root = ParamBox::from_bounds(r.bounds).map_err(|e| parse_err(format!("leaf {}: {e}", r.path)))?;
        let bx = ParamBox::new(*root.coords(), r.path.clone());
        let need_word = || r.word.clone().ok_or_else(|| parse_err(format!("leaf {} lacks a word", r.path)));
        let status = match r.status.as_str() {
            "eliminated_infeasible" => BoxStatus::EliminatedInfeasible,
            "eliminated_killer" => BoxStatus::EliminatedKiller { word: need_word()? },
            "candidate" => {
                let v = r.volume_bound.ok_or_else(|| parse_err(format!("leaf {} lacks a volume bound", r.path)))?;
                BoxStatus::Candidate { word: need_word()?, volume_bound: bound_from_value(v)? }
            }
            "undecided" => BoxStatus::Undecided,
            other => return Err(parse_err(format!("leaf {}: unknown status {other:?}", r.path))),
        };
        Ok(BoxVerdict { bx, status })
    }
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    tool: ToolInfo,
    config: SearchConfig,
    leaves: Vec<LeafRecord>,
    global_volume_bound: GlobalVolumeBound,
    stats: SearchStats,
    truncated: bool,
}

/// Outcome of a search: the leaves of the box tree and what they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub tool: ToolInfo,
    pub config: SearchConfig,
    /// Ordered by box path.
    pub leaves: Vec<BoxVerdict>,
    pub global_volume_bound: GlobalVolumeBound,
    pub stats: SearchStats,
    /// The box limit was hit; unexplored boxes are listed as undecided.
    pub truncated: bool,
    /// Not serialized, so that reports stay reproducible.
    pub wall_time: Duration,
}

impl SearchReport {
    pub(super) fn new(
        config: SearchConfig,
        leaves: Vec<BoxVerdict>,
        mut stats: SearchStats,
        truncated: bool,
        wall_time: Duration,
    ) -> Self {
        for leaf in &leaves {
            *match leaf.status {
                BoxStatus::EliminatedInfeasible => &mut stats.eliminated_infeasible,
                BoxStatus::EliminatedKiller { .. } => &mut stats.eliminated_killer,
                BoxStatus::Candidate { .. } => &mut stats.candidate,
                BoxStatus::Undecided => &mut stats.undecided,
            } += 1;
        }
        let global_volume_bound = GlobalVolumeBound::from_leaves(&leaves);
        Self { tool: ToolInfo::default(), config, leaves, global_volume_bound, stats, truncated, wall_time }
    }

    /// Every leaf is decided and the search was not cut short.
    pub fn is_complete_cover(&self) -> bool {
        !self.truncated && self.leaves.iter().all(|l| l.status != BoxStatus::Undecided)
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = ReportRepr {
            tool: self.tool.clone(),
            config: self.config.clone(),
            leaves: self.leaves.iter().map(LeafRecord::from).collect(),
            global_volume_bound: self.global_volume_bound,
            stats: self.stats.clone(),
            truncated: self.truncated,
        };
        canonical_json(&repr)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: ReportRepr = serde_json::from_str(s)?;
        let leaves = repr.leaves.into_iter().map(BoxVerdict::try_from).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tool: repr.tool,
            config: repr.config,
            leaves,
            global_volume_bound: repr.global_volume_bound,
            stats: repr.stats,
            truncated: repr.truncated,
            wall_time: Duration::ZERO,
        })
    }
}
