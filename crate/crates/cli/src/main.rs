// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod literal;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bicusp::{
    audit_cusp, canonical_json, diagram_csv, horoball_diagram, render_svg, run_search, verify_report, CuspAudit,
    CuspShape, Params, SearchConfig, SearchReport, ToolInfo,
};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde::Serialize;

use config::{CuspConfig, HoroballConfig, Stamp};
use literal::{format_complex, parse_complex};

const EXIT_OK: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DEGENERATE: u8 = 65;

/// Horoball enumeration grows like 5^depth.
const MAX_HOROBALL_DEPTH: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

impl From<bicusp::Error> for CliError {
    fn from(e: bicusp::Error) -> Self {
        match e {
            bicusp::Error::InvalidArgument(_) | bicusp::Error::Parse { .. } => CliError::Usage(e.to_string()),
            bicusp::Error::DegenerateLattice(_) => CliError::Degenerate(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "bicusp", version, about = "Certified parameter-space search for bicuspid Kleinian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the branch-and-prune search and write a JSON report.
    Search(SearchArgs),
    /// Audit a cusp shape: area, volume, short slopes and exceptional-filling bounds.
    Cusp(CuspArgs),
    /// Draw the horoball pattern seen from the cusp at infinity.
    Horoball(HoroballArgs),
    /// Re-check a search report by sampling its leaves.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// JSON config, or an earlier report whose config should be reused.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Upper bound on the cusp torus area.
    #[arg(long)]
    area_max: Option<f64>,
    #[arg(long)]
    max_d: Option<u32>,
    #[arg(long)]
    max_exp: Option<u32>,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long)]
    min_width: Option<f64>,
    /// Words tried per box.
    #[arg(long)]
    word_budget: Option<u64>,
    /// Stop after this many boxes and report a partial cover.
    #[arg(long)]
    max_boxes: Option<u64>,
    /// Worker threads; the report does not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Search only this box: six `lo:hi` pairs for a_re,a_im,b_re,b_im,c_re,c_im.
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    region: Option<[[f64; 2]; 6]>,
    /// Do not try the parent box's best word first.
    #[arg(long)]
    no_inherit: bool,
    /// Also require |Re(b/a)| <= 1/2.
    #[arg(long)]
    lattice_reduction: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CuspArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// First lattice generator, e.g. `4`.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Second lattice generator, e.g. `1+1.7320508075688772i`.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// List slopes no longer than this [default: 6].
    #[arg(long)]
    slope_length: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HoroballArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Smallest diameter drawn, in (0, 1] [default: 0.05].
    #[arg(long)]
    cutoff: Option<f64>,
    /// Longest word enumerated [default: 8].
    #[arg(long)]
    depth: Option<usize>,
    /// Pixels per unit [default: 40].
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    report: PathBuf,
    /// Sample points per leaf, including its center.
    #[arg(long, default_value_t = 16)]
    samples: usize,
}

fn parse_region(s: &str) -> Result<[[f64; 2]; 6], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 6 {
        return Err(format!("expected 6 comma-separated lo:hi pairs, got {}", parts.len()));
    }
    let mut out = [[0.0; 2]; 6];
    for (slot, part) in out.iter_mut().zip(parts) {
        let (lo, hi) = part.split_once(':').ok_or_else(|| format!("{part:?} is not lo:hi"))?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        *slot = [num(lo)?, num(hi)?];
    }
    Ok(out)
}

fn complex_arg(name: &str, value: Option<&String>) -> Result<Complex<f64>, CliError> {
    let s = value.ok_or_else(|| CliError::Usage(format!("--{name} is required (flag or config)")))?;
    parse_complex(s).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Failed(format!("cannot write {}: {e}", path.display()))
}

/// Files get the artifact bytes exactly; stdout gets a trailing newline.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::Failed(e.to_string()))
        }
    }
}

fn cmd_search(args: SearchArgs) -> Result<u8, CliError> {
    let mut cfg = match &args.config {
        Some(path) => config::load::<SearchConfig>(path)?,
        None => SearchConfig::default(),
    };
    if let Some(v) = args.area_max {
        cfg.area_bound = v;
    }
    if let Some(v) = args.max_d {
        cfg.max_d = v;
    }
    if let Some(v) = args.max_exp {
        cfg.max_exp = v;
    }
    if let Some(v) = args.max_depth {
        cfg.max_depth = v;
    }
    if let Some(v) = args.min_width {
        cfg.min_box_width = v;
    }
    if let Some(v) = args.word_budget {
        cfg.word_budget_per_box = v;
    }
    if let Some(v) = args.max_boxes {
        cfg.max_boxes = v;
    }
    if let Some(v) = args.region {
        cfg.region = Some(v);
    }
    if args.no_inherit {
        cfg.inherit_parent_word = false;
    }
    if args.lattice_reduction {
        cfg.lattice_reduction = true;
    }
    cfg.worker_count =
        args.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    cfg.validate()?;

    let report = run_search(&cfg)?;
    emit(args.out.as_deref(), &report.to_json()?)?;
    let s = &report.stats;
    eprintln!(
        "{} leaves ({} infeasible, {} killed, {} candidate, {} undecided), {} boxes tested, volume bound {}{}",
        report.leaves.len(),
        s.eliminated_infeasible,
        s.eliminated_killer,
        s.candidate,
        s.undecided,
        s.boxes_tested,
        report.global_volume_bound,
        if report.truncated { ", truncated at the box limit" } else { "" },
    );
    Ok(if report.is_complete_cover() { EXIT_OK } else { EXIT_PARTIAL })
}

#[derive(Serialize)]
struct CuspArtifact<'a> {
    #[serde(flatten)]
    stamp: Stamp<'a, CuspConfig>,
    audit: &'a CuspAudit,
}

fn cmd_cusp(args: CuspArgs) -> Result<u8, CliError> {
    let file = match &args.config {
        Some(path) => config::load::<CuspConfig>(path)?,
        None => CuspConfig::default(),
    };
    let a = complex_arg("a", args.a.as_ref().or(file.a.as_ref()))?;
    let b = complex_arg("b", args.b.as_ref().or(file.b.as_ref()))?;
    let slope_length = args.slope_length.or(file.slope_length).unwrap_or(6.0);
    let cfg = CuspConfig { a: Some(format_complex(a)), b: Some(format_complex(b)), slope_length: Some(slope_length) };

    let shape = CuspShape::new(a, b)?;
    let audit = audit_cusp(&shape, slope_length)?;
    let artifact = CuspArtifact { stamp: Stamp { tool: ToolInfo::default(), config: &cfg }, audit: &audit };
    emit(args.out.as_deref(), &canonical_json(&artifact)?)?;
    Ok(EXIT_OK)
}

fn cmd_horoball(args: HoroballArgs) -> Result<u8, CliError> {
    let file = match &args.config {
        Some(path) => config::load::<HoroballConfig>(path)?,
        None => HoroballConfig::default(),
    };
    let a = complex_arg("a", args.a.as_ref().or(file.a.as_ref()))?;
    let b = complex_arg("b", args.b.as_ref().or(file.b.as_ref()))?;
    let c = complex_arg("c", args.c.as_ref().or(file.c.as_ref()))?;
    let cutoff = args.cutoff.or(file.cutoff).unwrap_or(0.05);
    let depth = args.depth.or(file.depth).unwrap_or(8);
    let scale = args.scale.or(file.scale).unwrap_or(40.0);
    if !(cutoff > 0.0 && cutoff <= 1.0) {
        return Err(CliError::Usage(format!("--cutoff must lie in (0, 1], got {cutoff}")));
    }
    if !(1..=MAX_HOROBALL_DEPTH).contains(&depth) {
        return Err(CliError::Usage(format!("--depth must lie in 1..={MAX_HOROBALL_DEPTH}, got {depth}")));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(CliError::Usage(format!("--scale must be positive, got {scale}")));
    }
    let cfg = HoroballConfig {
        a: Some(format_complex(a)),
        b: Some(format_complex(b)),
        c: Some(format_complex(c)),
        cutoff: Some(cutoff),
        depth: Some(depth),
        scale: Some(scale),
    };

    let diagram = horoball_diagram(&Params::new(a, b, c), cutoff, depth)?;
    let stamp = canonical_json(&Stamp { tool: ToolInfo::default(), config: &cfg })?;
    let svg = render_svg(&diagram, scale, Some(&stamp))?;
    if let Some(path) = &args.csv {
        fs::write(path, diagram_csv(&diagram)?).map_err(|e| io_err(path, e))?;
    }
    match &args.svg {
        Some(path) => fs::write(path, svg).map_err(|e| io_err(path, e))?,
        None if args.csv.is_none() => print!("{svg}"),
        None => {}
    }
    eprintln!("{} horoballs of diameter at least {cutoff}", diagram.balls.len());
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let text = fs::read_to_string(&args.report)
        .map_err(|e| CliError::Failed(format!("cannot read {}: {e}", args.report.display())))?;
    let report = SearchReport::from_json(&text).map_err(|e| CliError::Failed(e.to_string()))?;
    match verify_report(&report, args.samples) {
        Ok(s) => {
            println!(
                "ok: {} leaves ({} infeasible, {} killed, {} candidate, {} undecided), {} points evaluated",
                s.leaves,
                s.infeasible_leaves,
                s.killer_leaves,
                s.candidate_leaves,
                s.undecided_leaves,
                s.points_evaluated
            );
            Ok(EXIT_OK)
        }
        Err(bicusp::Error::AuditFailure(violations)) => {
            for v in &violations {
                eprintln!("{v}");
            }
            Err(CliError::Failed(format!("audit failed with {} violation(s)", violations.len())))
        }
        Err(e) => Err(CliError::Failed(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let result = match cli.command {
        Command::Search(a) => cmd_search(a),
        Command::Cusp(a) => cmd_cusp(a),
        Command::Horoball(a) => cmd_horoball(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("bicusp: {e}");
            ExitCode::from(e.code())
        }
    }
}
