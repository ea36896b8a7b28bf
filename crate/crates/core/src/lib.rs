//! Certified elimination of parameter regions for two-cusped (bicuspid)
//! subgroups of `PSL(2, ℂ)`, together with the cusp and horoball geometry used
//! to interpret the surviving regions.
//!
//! Numerical kernels are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the search driver and
//! the command-line tool use.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bicuspid;
pub mod cuspgeom;
pub mod error;
pub mod horoball;
pub mod interval;
pub mod json;
pub mod mobius;
pub mod scalar;
pub mod search;
pub mod words;

pub use bicuspid::{
    box_in_param_space, gens_from_box, gens_from_params, max_translation_length, param_space, BoxPath, Coord,
    Feasibility, GeneratorTriple, ParamBox, Params,
};
pub use cuspgeom::{
    audit_cusp, delta, delta_bound, max_exceptional_count, strict_floor, CuspAudit, CuspShape, Slope,
    SHORT_SLOPE_LENGTH,
};
pub use error::{Error, Result};
pub use horoball::{
    diagram_csv, enumerate_elements, horoball_diagram, min_lower_left, reduce_mod_lattice, render_svg, GroupElement,
    Horoball, HoroballDiagram, Letter,
};
pub use interval::{ComplexInterval, IntervalMatrix, RealInterval};
pub use json::{canonical_json, ToolInfo};
pub use mobius::Mat2;
pub use scalar::Scalar;
pub use search::{
    run_search, scan_words, subdivide, test_box, test_box_with_hint, verify_report, BoxStatus, BoxVerdict,
    GlobalVolumeBound, SearchConfig, SearchReport, SearchStats, VerificationSummary, Violation,
};
pub use words::{
    enumerate_words, evaluate_word, evaluate_word_at, killer_test, lower_left_abs, lower_left_at, volume_bound,
    KillerVerdict, Syllable, VolumeBound, Word, WordEvaluator, WordStream,
};

pub type RealInterval64 = RealInterval<f64>;
pub type ComplexInterval64 = ComplexInterval<f64>;
pub type IntervalMatrix64 = IntervalMatrix<f64>;
pub type Mat2_64 = Mat2<f64>;
pub type Params64 = Params<f64>;
pub type ParamBox64 = ParamBox<f64>;
pub type GeneratorTriple64 = GeneratorTriple<f64>;
pub type CuspShape64 = CuspShape<f64>;
pub type HoroballDiagram64 = HoroballDiagram<f64>;
pub type Horoball64 = Horoball<f64>;
