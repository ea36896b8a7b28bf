//! Independent audit of a search report.
//!
//! Killer words are re-evaluated in plain floating point (letter by letter,
//! without the interval machinery) at sampled points of their boxes, and the
//! leaf paths are replayed from the root box to confirm that the leaves tile it.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{subdivide, BoxStatus, BoxVerdict, SearchReport};
use crate::bicuspid::{ParamBox, Params};
use crate::error::{Error, Result};
use crate::words::lower_left_at;

/// Slack allowed when comparing float evaluations against `|p| < 1`.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Path of the offending leaf; empty for the root.
    pub path: String,
    /// Coordinates `(a_re, a_im, b_re, b_im, c_re, c_im)` of the failing sample.
    pub point: Option<[f64; 6]>,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "<root>" } else { &self.path };
        write!(f, "box {path}: {}", self.reason)?;
        if let Some(p) = self.point {
            write!(f, " at {p:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationSummary {
    pub leaves: usize,
    pub killer_leaves: usize,
    pub infeasible_leaves: usize,
    pub candidate_leaves: usize,
    pub undecided_leaves: usize,
    pub points_evaluated: u64,
}

fn coords_of(p: &Params<f64>) -> [f64; 6] {
    [p.a.re, p.a.im, p.b.re, p.b.im, p.c.re, p.c.im]
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// The box center followed by pseudo-random points, seeded by the path so
/// audits are reproducible.
fn sample_points(bx: &ParamBox<f64>, n: usize) -> Vec<Params<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(bx.path().as_str()));
    let mut out = Vec::with_capacity(n);
    if n > 0 {
        out.push(bx.center());
    }
    while out.len() < n {
        out.push(bx.lerp(std::array::from_fn(|_| rng.random::<f64>())));
    }
    out
}

/// True when `p` satisfies every normalization constraint with room to spare.
fn clearly_feasible(p: &Params<f64>, area_bound: f64, lattice_reduction: bool) -> bool {
    let tol = VERIFY_TOLERANCE;
    let (abs_a, abs_b, abs_c) = (p.a.norm(), p.b.norm(), p.c.norm());
    let mut ok = abs_a >= 1.0 + tol
        && abs_a <= abs_b - tol
        && abs_b <= 2.0 * area_bound / 3f64.sqrt() - tol
        && abs_c <= abs_b - tol
        && p.a.im == 0.0
        && p.a.re > 0.0
        && p.b.im > tol;
    if lattice_reduction {
        ok &= 2.0 * (p.b * p.a.conj()).re.abs() <= abs_a * abs_a - tol;
    }
    ok
}

fn check_cover(node: &ParamBox<f64>, leaves: &[BoxVerdict], out: &mut Vec<Violation>) {
    let path = node.path().as_str().to_string();
    match leaves {
        [] => out.push(Violation { path, point: None, reason: "part of the search region is not covered".into() }),
        [leaf] if leaf.bx.path() == node.path() => {
            if leaf.bx.coords() != node.coords() {
                out.push(Violation { path, point: None, reason: "recorded bounds differ from the subdivision".into() });
            }
        }
        [first, ..] if first.bx.path() == node.path() => {
            out.push(Violation { path, point: None, reason: "leaf overlaps its descendants".into() })
        }
        _ => {
            let Ok((lo, hi)) = subdivide(node) else {
                out.push(Violation { path, point: None, reason: "leaf paths extend past an indivisible box".into() });
                return;
            };
            let depth = node.depth();
            let split = leaves.partition_point(|l| l.bx.path().as_str().as_bytes()[depth] == b'0');
            check_cover(&lo, &leaves[..split], out);
            check_cover(&hi, &leaves[split..], out);
        }
    }
}

/// Audit `report`, evaluating each killer word at `samples_per_box` points of
/// its box.
///
/// Besides the killer words this checks that infeasible leaves contain no
/// clearly feasible sample, that candidate bounds match their words, and that
/// the leaves tile the root box exactly. Any failure is returned as
/// [`Error::AuditFailure`].
pub fn verify_report(report: &SearchReport, samples_per_box: usize) -> Result<VerificationSummary> {
    let cfg = &report.config;
    let mut summary = VerificationSummary { leaves: report.leaves.len(), ..Default::default() };
    let mut violations = Vec::new();

    for leaf in &report.leaves {
        let path = leaf.bx.path().as_str();
        let flag = |p: Option<&Params<f64>>, reason: String| Violation {
            path: path.to_string(),
            point: p.map(coords_of),
            reason,
        };
        match &leaf.status {
            BoxStatus::EliminatedKiller { word } => {
                summary.killer_leaves += 1;
                for p in sample_points(&leaf.bx, samples_per_box) {
                    summary.points_evaluated += 1;
                    let m = lower_left_at(word, &p).norm();
                    if m == 0.0 || m >= 1.0 + VERIFY_TOLERANCE || !m.is_finite() {
                        violations.push(flag(Some(&p), format!("word {word} has |p| = {m}")));
                        break;
                    }
                }
            }
            BoxStatus::EliminatedInfeasible => {
                summary.infeasible_leaves += 1;
                for p in sample_points(&leaf.bx, samples_per_box) {
                    summary.points_evaluated += 1;
                    if clearly_feasible(&p, cfg.area_bound, cfg.lattice_reduction) {
                        violations.push(flag(Some(&p), "feasible point in an infeasible box".into()));
                        break;
                    }
                }
            }
            BoxStatus::Candidate { word, volume_bound } => {
                summary.candidate_leaves += 1;
                if *volume_bound != word.volume_bound() {
                    violations
                        .push(flag(None, format!("bound {} does not belong to word {word}", volume_bound.value())));
                }
                let center = leaf.bx.center();
                summary.points_evaluated += 1;
                let m = lower_left_at(word, &center).norm();
                if !(m < 1.0 + VERIFY_TOLERANCE) {
                    violations.push(flag(Some(&center), format!("candidate word {word} has |p| = {m}")));
                }
            }
            BoxStatus::Undecided => summary.undecided_leaves += 1,
        }
    }

    if report.leaves.windows(2).any(|w| w[0].bx.path() >= w[1].bx.path()) {
        violations.push(Violation { path: String::new(), point: None, reason: "leaves are not in path order".into() });
    } else {
        match cfg.root_box() {
            Ok(Some(root)) => check_cover(&root, &report.leaves, &mut violations),
            Ok(None) if report.leaves.is_empty() => {}
            Ok(None) => violations.push(Violation {
                path: String::new(),
                point: None,
                reason: "leaves reported for an empty search region".into(),
            }),
            Err(e) => violations.push(Violation { path: String::new(), point: None, reason: e.to_string() }),
        }
    }

    if violations.is_empty() {
        Ok(summary)
    } else {
        Err(Error::AuditFailure(violations))
    }
}
