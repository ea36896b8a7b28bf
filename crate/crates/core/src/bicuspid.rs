//! The normalized bicuspid parameterization.
//!
//! A bicuspid group `⟨α, β, γ⟩` is conjugated so the cusp at ∞ has height 1 and
//!
//! ```text
//! α = [[1, a], [0, 1]],  β = [[1, b], [0, 1]],  γ = [[c, −1], [1, 0]]
//! ```
//!
//! with `1 ≤ |a| ≤ |b| ≤ 2A/√3` and `|c| ≤ |b|`, where `A` bounds the area of
//! the cusp torus. A rotation makes `a` real and positive; complex conjugation
//! makes `Im b ≥ 0`.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cuspgeom::CuspShape;
use crate::error::{invalid, Error, Result};
use crate::interval::{ComplexInterval, IntervalMatrix, RealInterval};
use crate::mobius::Mat2;
use crate::scalar::Scalar;

/// A point `(a, b, c)` of the parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
}

impl<T: Scalar> Params<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Self {
        Self { a, b, c }
    }

    /// Point matrices `[α, β, γ]`.
    pub fn generators(&self) -> [Mat2<T>; 3] {
        let one = Complex::one();
        let zero = Complex::zero();
        [Mat2::translation(self.a), Mat2::translation(self.b), Mat2::new(self.c, -one, one, zero)]
    }

    /// Checks `1 ≤ |a| ≤ |b|` and `|c| ≤ |b|` in floating point.
    pub fn is_normalized(&self) -> bool {
        let (a, b, c) = (self.a.norm(), self.b.norm(), self.c.norm());
        T::one() <= a && a <= b && c <= b
    }

    /// The cusp torus lattice `⟨a, b⟩`. Rejects `|a| < 1`, which no maximal
    /// cusp of a bicuspid group can have, and degenerate lattices.
    pub fn cusp_shape(&self) -> Result<CuspShape<T>> {
        if self.a.norm() < T::one() {
            return Err(invalid(format!("|a| = {} is below 1", self.a.norm())));
        }
        CuspShape::new(self.a, self.b)
    }
}

/// The six real coordinates of a parameter box, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    ARe,
    AIm,
    BRe,
    BIm,
    CRe,
    CIm,
}

impl Coord {
    pub const ALL: [Coord; 6] = [Coord::ARe, Coord::AIm, Coord::BRe, Coord::BIm, Coord::CRe, Coord::CIm];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::ARe => "a_re",
            Coord::AIm => "a_im",
            Coord::BRe => "b_re",
            Coord::BIm => "b_im",
            Coord::CRe => "c_re",
            Coord::CIm => "c_im",
        }
    }
}

/// Position of a box in the subdivision tree: `0` for the lower half, `1` for
/// the upper half of each bisection. The root is the empty path.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BoxPath(String);

impl TryFrom<String> for BoxPath {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<BoxPath> for String {
    fn from(p: BoxPath) -> String {
        p.0
    }
}

impl BoxPath {
    pub const MAX_DEPTH: usize = 64;

    pub fn root() -> Self {
        Self(String::new())
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.len() > Self::MAX_DEPTH || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Parse { what: "box path", detail: format!("{s:?}") });
        }
        Ok(Self(s.to_string()))
    }

    pub fn child(&self, upper: bool) -> Self {
        let mut s = self.0.clone();
        s.push(if upper { '1' } else { '0' });
        Self(s)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &BoxPath) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for BoxPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("<root>")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// A product of six coordinate intervals, tagged with its tree path.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBox<T> {
    coords: [RealInterval<T>; 6],
    path: BoxPath,
}

impl<T: Scalar> ParamBox<T> {
    pub fn new(coords: [RealInterval<T>; 6], path: BoxPath) -> Self {
        Self { coords, path }
    }

    pub fn root(coords: [RealInterval<T>; 6]) -> Self {
        Self::new(coords, BoxPath::root())
    }

    /// Builds a root box from `[lo, hi]` pairs in coordinate order.
    pub fn from_bounds(bounds: [[T; 2]; 6]) -> Result<Self> {
        let mut coords = [RealInterval::zero(); 6];
        for (slot, [lo, hi]) in coords.iter_mut().zip(bounds) {
            *slot = RealInterval::new(lo, hi)?;
        }
        Ok(Self::root(coords))
    }

    /// The degenerate box holding exactly `p`.
    pub fn point(p: &Params<T>) -> Self {
        let pt = RealInterval::point;
        Self::root([pt(p.a.re), pt(p.a.im), pt(p.b.re), pt(p.b.im), pt(p.c.re), pt(p.c.im)])
    }

    pub fn coords(&self) -> &[RealInterval<T>; 6] {
        &self.coords
    }

    pub fn coord(&self, c: Coord) -> RealInterval<T> {
        self.coords[c.index()]
    }

    pub fn path(&self) -> &BoxPath {
        &self.path
    }

    pub fn depth(&self) -> usize {
        self.path.depth()
    }

    pub fn a(&self) -> ComplexInterval<T> {
        ComplexInterval::new(self.coord(Coord::ARe), self.coord(Coord::AIm))
    }

    pub fn b(&self) -> ComplexInterval<T> {
        ComplexInterval::new(self.coord(Coord::BRe), self.coord(Coord::BIm))
    }

    pub fn c(&self) -> ComplexInterval<T> {
        ComplexInterval::new(self.coord(Coord::CRe), self.coord(Coord::CIm))
    }

    pub fn contains(&self, p: &Params<T>) -> bool {
        self.a().contains(p.a) && self.b().contains(p.b) && self.c().contains(p.c)
    }

    pub fn widths(&self) -> [T; 6] {
        self.coords.map(|x| x.width())
    }

    /// Widest coordinate, ties broken by coordinate order.
    pub fn widest(&self) -> (Coord, T) {
        let widths = self.widths();
        let mut best = (Coord::ARe, widths[0]);
        for c in &Coord::ALL[1..] {
            if widths[c.index()] > best.1 {
                best = (*c, widths[c.index()]);
            }
        }
        best
    }

    /// The point at the center of the box.
    pub fn center(&self) -> Params<T> {
        let m = self.coords.map(|x| x.mid());
        Params::new(Complex::new(m[0], m[1]), Complex::new(m[2], m[3]), Complex::new(m[4], m[5]))
    }

    /// Point at fractional position `t[i] ∈ [0, 1]` along each coordinate.
    pub fn lerp(&self, t: [T; 6]) -> Params<T> {
        let mut v = [T::zero(); 6];
        for i in 0..6 {
            let x = self.coords[i];
            v[i] = (x.lo() + (x.hi() - x.lo()) * t[i]).max(x.lo()).min(x.hi());
        }
        Params::new(Complex::new(v[0], v[1]), Complex::new(v[2], v[3]), Complex::new(v[4], v[5]))
    }

    /// Product of the widths along the coordinates selected by `mask`.
    pub fn volume_in(&self, mask: [bool; 6]) -> T {
        self.coords.iter().zip(mask).filter(|(_, m)| *m).fold(T::one(), |acc, (x, _)| acc * (x.hi() - x.lo()))
    }

    /// Mask of coordinates with positive width.
    pub fn nondegenerate_mask(&self) -> [bool; 6] {
        self.coords.map(|x| x.hi() > x.lo())
    }

    pub(crate) fn with_coord(&self, c: Coord, x: RealInterval<T>, path: BoxPath) -> Self {
        let mut coords = self.coords;
        coords[c.index()] = x;
        Self { coords, path }
    }
}

/// Enclosures of `α`, `β`, `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorTriple<T> {
    pub alpha: IntervalMatrix<T>,
    pub beta: IntervalMatrix<T>,
    pub gamma: IntervalMatrix<T>,
}

impl<T: Scalar> GeneratorTriple<T> {
    pub fn from_box(bx: &ParamBox<T>) -> Self {
        Self::from_entries(bx.a(), bx.b(), bx.c())
    }

    pub fn from_params(p: &Params<T>) -> Self {
        Self::from_entries(ComplexInterval::point(p.a), ComplexInterval::point(p.b), ComplexInterval::point(p.c))
    }

    pub fn from_entries(a: ComplexInterval<T>, b: ComplexInterval<T>, c: ComplexInterval<T>) -> Self {
        let one = ComplexInterval::one();
        Self {
            alpha: IntervalMatrix::translation(a),
            beta: IntervalMatrix::translation(b),
            gamma: IntervalMatrix::new(c, -one, one, ComplexInterval::zero()),
        }
    }

    /// Translation parts `a` and `b`.
    pub fn a(&self) -> ComplexInterval<T> {
        self.alpha.m12
    }

    pub fn b(&self) -> ComplexInterval<T> {
        self.beta.m12
    }
}

pub fn gens_from_params<T: Scalar>(p: &Params<T>) -> GeneratorTriple<T> {
    GeneratorTriple::from_params(p)
}

pub fn gens_from_box<T: Scalar>(bx: &ParamBox<T>) -> GeneratorTriple<T> {
    GeneratorTriple::from_box(bx)
}

/// Relative slack below which `2A/√3 ≤ 1` is treated as holding, leaving only
/// the measure-zero circle `|a| = |b| = 1`.
const EMPTY_SLACK: f64 = 1e-12;

/// Outer bound on `|b|`: `2A/√3`, rounded up.
pub fn max_translation_length<T: Scalar>(area_bound: T) -> Result<T> {
    if !(area_bound > T::zero()) || !area_bound.is_finite() {
        return Err(invalid(format!("area bound must be positive and finite, got {area_bound}")));
    }
    let two = T::one() + T::one();
    let three = two + T::one();
    let r = two * area_bound / three.sqrt();
    Ok(r.next_up().next_up().next_up().next_up())
}

/// Bounding box of the symmetry-reduced parameter space for cusp-area bound
/// `A`: `a ∈ [1, R] × {0}`, `b ∈ [−R, R] × [0, R]`, `c ∈ [−R, R]²` with
/// `R = 2A/√3`. `None` when the constraints leave no interior (`R ≤ 1`).
pub fn param_space<T: Scalar>(area_bound: T) -> Result<Option<ParamBox<T>>> {
    let r = max_translation_length(area_bound)?;
    let four_a2 = area_bound * area_bound * T::lit(4.0);
    if four_a2 <= T::lit(3.0 * (1.0 + EMPTY_SLACK)) {
        return Ok(None);
    }
    let iv = |lo: T, hi: T| RealInterval::new(lo, hi);
    let coords = [iv(T::one(), r)?, RealInterval::zero(), iv(-r, r)?, iv(T::zero(), r)?, iv(-r, r)?, iv(-r, r)?];
    Ok(Some(ParamBox::root(coords)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    Inside,
    Outside,
    Straddles,
}

/// Certified position of a box relative to the normalized parameter space.
///
/// With `lattice_reduction` the extra constraint `|Re(b/a)| ≤ 1/2` is imposed.
pub fn box_in_param_space<T: Scalar>(bx: &ParamBox<T>, area_bound: T, lattice_reduction: bool) -> Feasibility {
    let a = bx.a();
    let b = bx.b();
    let c = bx.c();
    let abs_a = a.abs_bounds();
    let abs_b = b.abs_bounds();
    let abs_c = c.abs_bounds();
    let one = T::one();

    // |b| ≤ 2A/√3  ⟺  3|b|² ≤ 4A²
    let three_b2 = (b.re.sqr() + b.im.sqr()).scale(3);
    let four_a2 = RealInterval::point(area_bound).sqr().scale(4);

    // (violated everywhere, satisfied everywhere) per constraint
    let mut checks = vec![
        (abs_a.hi() < one, abs_a.lo() >= one),
        (abs_a.lo() > abs_b.hi(), abs_a.hi() <= abs_b.lo()),
        (three_b2.lo() > four_a2.hi(), three_b2.hi() <= four_a2.lo()),
        (abs_c.lo() > abs_b.hi(), abs_c.hi() <= abs_b.lo()),
        (!a.im.contains_zero(), a.im.is_exact_zero()),
        (a.re.hi() < T::zero(), a.re.lo() >= T::zero()),
        (b.im.hi() < T::zero(), b.im.lo() >= T::zero()),
    ];
    if lattice_reduction {
        // |Re(b/a)| ≤ 1/2  ⟺  2|Re(b ā)| ≤ |a|²
        let re_b_abar = (b * a.conj()).re.scale(2);
        let abs_a2 = a.re.sqr() + a.im.sqr();
        checks.push((re_b_abar.mig() > abs_a2.hi(), re_b_abar.mag() <= abs_a2.lo()));
    }

    if checks.iter().any(|(violated, _)| *violated) {
        Feasibility::Outside
    } else if checks.iter().all(|(_, satisfied)| *satisfied) {
        Feasibility::Inside
    } else {
        Feasibility::Straddles
    }
}
