//! Branch-and-prune over parameter boxes.
//!
//! Starting from the bounding box of the normalized parameter space, each box
//! is tested against a prefix of the canonical word stream. A word whose
//! lower-left entry satisfies `0 < |p| < 1` throughout the box eliminates it; a
//! word with `|p| < 1` whose enclosure touches 0 marks the box as a candidate
//! relator region with covolume bound `π (d(w) − 2)`. Boxes where no word
//! decides are bisected along their widest coordinate until the depth or width
//! limits are reached.
//!
//! Boxes are processed one tree level at a time on a work-stealing pool, and
//! results are merged by box path, so the report does not depend on the number
//! of workers.

mod report;
mod verify;

use std::borrow::Borrow;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{GlobalVolumeBound, LeafRecord, SearchReport, SearchStats};
pub use verify::{verify_report, VerificationSummary, Violation, VERIFY_TOLERANCE};

use crate::bicuspid::{box_in_param_space, gens_from_box, param_space, BoxPath, Feasibility, ParamBox};
use crate::error::{invalid, Result};
use crate::words::{enumerate_words, KillerVerdict, VolumeBound, Word, WordEvaluator};

fn default_workers() -> usize {
    1
}

/// Budgets and bounds for one search. `worker_count` only affects scheduling
/// and is left out of serialized configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Upper bound `A` on the cusp torus area.
    pub area_bound: f64,
    pub max_d: u32,
    pub max_exp: u32,
    pub max_depth: u32,
    /// Boxes whose widest side is at most this are not split further.
    pub min_box_width: f64,
    pub word_budget_per_box: u64,
    /// Total boxes tested before the search gives up and reports a partial cover.
    pub max_boxes: u64,
    #[serde(skip, default = "default_workers")]
    pub worker_count: usize,
    /// Try the parent's most promising word first in each child.
    pub inherit_parent_word: bool,
    /// Also impose `|Re(b/a)| ≤ 1/2`.
    pub lattice_reduction: bool,
    /// Search this box, given as `[lo, hi]` per coordinate
    /// (`a_re, a_im, b_re, b_im, c_re, c_im`), instead of the whole space.
    pub region: Option<[[f64; 2]; 6]>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            area_bound: 6.0,
            max_d: 4,
            max_exp: 2,
            max_depth: 12,
            min_box_width: 1e-3,
            word_budget_per_box: 2000,
            max_boxes: 1_000_000,
            worker_count: 1,
            inherit_parent_word: true,
            lattice_reduction: false,
            region: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.area_bound > 0.0) || !self.area_bound.is_finite() {
            return Err(invalid(format!("area_bound must be positive, got {}", self.area_bound)));
        }
        if self.max_d == 0 || self.max_exp == 0 {
            return Err(invalid("max_d and max_exp must be at least 1"));
        }
        if self.max_depth == 0 || self.max_depth as usize > BoxPath::MAX_DEPTH {
            return Err(invalid(format!("max_depth must be in 1..={}, got {}", BoxPath::MAX_DEPTH, self.max_depth)));
        }
        if !(self.min_box_width > 0.0) || !self.min_box_width.is_finite() {
            return Err(invalid(format!("min_box_width must be positive, got {}", self.min_box_width)));
        }
        if self.word_budget_per_box == 0 || self.max_boxes == 0 || self.worker_count == 0 {
            return Err(invalid("word budget, box limit and worker count must be positive"));
        }
        if let Some(region) = self.region {
            ParamBox::from_bounds(region)?;
        }
        Ok(())
    }

    /// The box the search starts from; `None` when the feasible region is empty.
    pub fn root_box(&self) -> Result<Option<ParamBox<f64>>> {
        match self.region {
            Some(region) => Ok(Some(ParamBox::from_bounds(region)?)),
            None => param_space(self.area_bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoxStatus {
    /// Certified to violate the normalization constraints everywhere.
    EliminatedInfeasible,
    EliminatedKiller {
        word: Word,
    },
    Candidate {
        word: Word,
        volume_bound: VolumeBound,
    },
    Undecided,
}

impl BoxStatus {
    pub fn name(&self) -> &'static str {
        match self {
            BoxStatus::EliminatedInfeasible => "eliminated_infeasible",
            BoxStatus::EliminatedKiller { .. } => "eliminated_killer",
            BoxStatus::Candidate { .. } => "candidate",
            BoxStatus::Undecided => "undecided",
        }
    }

    pub fn word(&self) -> Option<&Word> {
        match self {
            BoxStatus::EliminatedKiller { word } | BoxStatus::Candidate { word, .. } => Some(word),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxVerdict {
    pub bx: ParamBox<f64>,
    pub status: BoxStatus,
}

/// Bisect the widest coordinate; ties go to the earliest coordinate.
pub fn subdivide(bx: &ParamBox<f64>) -> Result<(ParamBox<f64>, ParamBox<f64>)> {
    let (coord, width) = bx.widest();
    if !(width > 0.0) {
        return Err(invalid(format!("cannot subdivide zero-volume box {}", bx.path())));
    }
    if bx.depth() >= BoxPath::MAX_DEPTH {
        return Err(invalid(format!("box {} is at the maximum depth", bx.path())));
    }
    let (lo, hi) = bx
        .coord(coord)
        .bisect()
        .ok_or_else(|| invalid(format!("{} of box {} is too narrow to bisect", coord.name(), bx.path())))?;
    Ok((bx.with_coord(coord, lo, bx.path().child(false)), bx.with_coord(coord, hi, bx.path().child(true))))
}

/// Verdict on one box plus what the scan learned.
#[derive(Debug, Clone)]
struct Scan {
    verdict: BoxVerdict,
    words_evaluated: u64,
    /// Index of the inconclusive word with the smallest upper bound on `|p|`.
    best_word: Option<usize>,
}

fn scan<I, W>(
    bx: &ParamBox<f64>,
    words: I,
    hint: Option<(usize, &Word)>,
    cfg: &SearchConfig,
    filter_infeasible: bool,
) -> Scan
where
    I: IntoIterator<Item = (usize, W)>,
    W: Borrow<Word>,
{
    let done = |status, words_evaluated, best_word| Scan {
        verdict: BoxVerdict { bx: bx.clone(), status },
        words_evaluated,
        best_word,
    };
    if filter_infeasible && box_in_param_space(bx, cfg.area_bound, cfg.lattice_reduction) == Feasibility::Outside {
        return done(BoxStatus::EliminatedInfeasible, 0, None);
    }

    let mut ev = WordEvaluator::new(gens_from_box(bx));
    let mut evaluated = 0u64;
    let mut candidate: Option<Word> = None;
    let mut best: Option<(f64, usize)> = None;
    let budget = cfg.word_budget_per_box;
    let hint_idx = hint.map(|(i, _)| i);

    let mut visit = |idx: usize, w: &Word| -> Option<BoxStatus> {
        evaluated += 1;
        let abs = ev.lower_left_abs(w);
        match KillerVerdict::classify(&abs) {
            KillerVerdict::Eliminates => return Some(BoxStatus::EliminatedKiller { word: w.clone() }),
            KillerVerdict::CandidateRelator => {
                if candidate.as_ref().is_none_or(|c| w < c) {
                    candidate = Some(w.clone());
                }
            }
            KillerVerdict::Inconclusive => {
                let u = abs.hi();
                if best.is_none_or(|(bu, bi)| u < bu || (u == bu && idx < bi)) {
                    best = Some((u, idx));
                }
            }
        }
        None
    };

    if let Some((idx, w)) = hint {
        if budget > 0 {
            if let Some(status) = visit(idx, w) {
                return done(status, evaluated, Some(idx));
            }
        }
    }
    let remaining = budget.saturating_sub(u64::from(hint.is_some()));
    for (idx, w) in words.into_iter().filter(|(i, _)| Some(*i) != hint_idx).take(remaining as usize) {
        if let Some(status) = visit(idx, w.borrow()) {
            return done(status, evaluated, Some(idx));
        }
    }
    let status = match candidate {
        Some(word) => {
            let volume_bound = word.volume_bound();
            BoxStatus::Candidate { word, volume_bound }
        }
        None => BoxStatus::Undecided,
    };
    done(status, evaluated, best.map(|(_, i)| i))
}

/// Test a box against up to `cfg.word_budget_per_box` words of `words`.
///
/// Returns the first eliminating word; failing that the lowest-`d` candidate
/// relator; failing that `Undecided`. Boxes certified outside the parameter
/// space are eliminated without testing any word.
pub fn test_box<I, W>(bx: &ParamBox<f64>, words: I, cfg: &SearchConfig) -> BoxVerdict
where
    I: IntoIterator<Item = W>,
    W: Borrow<Word>,
{
    scan(bx, words.into_iter().enumerate(), None, cfg, true).verdict
}

/// The word scan of [`test_box`] without the feasibility filter, for probing
/// points that lie outside the normalized region.
pub fn scan_words<I, W>(bx: &ParamBox<f64>, words: I, cfg: &SearchConfig) -> BoxVerdict
where
    I: IntoIterator<Item = W>,
    W: Borrow<Word>,
{
    scan(bx, words.into_iter().enumerate(), None, cfg, false).verdict
}

/// Like [`test_box`], trying `first` before the stream.
pub fn test_box_with_hint<W: Borrow<Word>>(
    bx: &ParamBox<f64>,
    words: &[W],
    first: Option<usize>,
    cfg: &SearchConfig,
) -> BoxVerdict {
    let hint = first.and_then(|i| words.get(i).map(|w| (i, w.borrow())));
    scan(bx, words.iter().map(Borrow::borrow).enumerate(), hint, cfg, true).verdict
}

/// Run the branch-and-prune search described by `cfg`.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;

    let words: Vec<Word> = enumerate_words(cfg.max_d, cfg.max_exp).take(cfg.word_budget_per_box as usize).collect();
    let mut stats = SearchStats { words_in_stream: words.len() as u64, ..SearchStats::default() };
    let mut leaves = Vec::new();
    let mut truncated = false;
    let mut frontier: Vec<(ParamBox<f64>, Option<usize>)> = cfg.root_box()?.into_iter().map(|b| (b, None)).collect();

    while !frontier.is_empty() {
        if stats.boxes_tested + frontier.len() as u64 > cfg.max_boxes {
            truncated = true;
            leaves.extend(frontier.drain(..).map(|(bx, _)| BoxVerdict { bx, status: BoxStatus::Undecided }));
            break;
        }
        let scans: Vec<Scan> = pool.install(|| {
            frontier
                .par_iter()
                .map(|(bx, hint)| {
                    let hint = hint.filter(|_| cfg.inherit_parent_word).map(|i| (i, &words[i]));
                    scan(bx, words.iter().enumerate(), hint, cfg, true)
                })
                .collect()
        });

        let mut next = Vec::new();
        for s in scans {
            stats.boxes_tested += 1;
            stats.words_evaluated += s.words_evaluated;
            stats.max_depth_reached = stats.max_depth_reached.max(s.verdict.bx.depth() as u32);
            let splittable = s.verdict.status == BoxStatus::Undecided
                && s.verdict.bx.depth() < cfg.max_depth as usize
                && s.verdict.bx.widest().1 > cfg.min_box_width;
            if splittable {
                if let Ok((lo, hi)) = subdivide(&s.verdict.bx) {
                    next.push((lo, s.best_word));
                    next.push((hi, s.best_word));
                    continue;
                }
            }
            leaves.push(s.verdict);
        }
        frontier = next;
    }

    leaves.sort_by(|u, v| u.bx.path().cmp(v.bx.path()));
    Ok(SearchReport::new(cfg.clone(), leaves, stats, truncated, started.elapsed()))
}
