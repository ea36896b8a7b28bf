//! Horoball patterns of concrete bicuspid groups.
//!
//! An element `μ = [[w, x], [y, z]]` with `y ≠ 0` carries the height-1
//! horoball at ∞ to a horoball tangent to ℂ at `μ(∞) = w / y` with Euclidean
//! diameter `1 / |y|²`. Plotting these modulo the cusp lattice gives the
//! familiar horoball diagram. Everything here is plain floating point: the
//! diagrams illustrate, the certificates live in the search module.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_complex::Complex;
use num_traits::Zero;

use crate::bicuspid::Params;
use crate::cuspgeom::CuspShape;
use crate::error::{invalid, Result};
use crate::mobius::Mat2;
use crate::scalar::Scalar;

/// Matrices closer than this (relative to their largest entry) are one element.
pub const DEDUP_TOLERANCE: f64 = 1e-9;

/// `|y|` at or below this counts as zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    XInv,
    Y,
    YInv,
    Z,
    ZInv,
}

impl Letter {
    pub const ALL: [Letter; 6] = [Letter::X, Letter::XInv, Letter::Y, Letter::YInv, Letter::Z, Letter::ZInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::X => Letter::XInv,
            Letter::XInv => Letter::X,
            Letter::Y => Letter::YInv,
            Letter::YInv => Letter::Y,
            Letter::Z => Letter::ZInv,
            Letter::ZInv => Letter::Z,
        }
    }

    fn base(self) -> char {
        match self {
            Letter::X | Letter::XInv => 'x',
            Letter::Y | Letter::YInv => 'y',
            Letter::Z | Letter::ZInv => 'z',
        }
    }

    fn sign(self) -> i32 {
        match self {
            Letter::X | Letter::Y | Letter::Z => 1,
            _ => -1,
        }
    }
}

/// Group element with the word that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<T> {
    pub word: Vec<Letter>,
    pub matrix: Mat2<T>,
}

impl<T: Scalar> GroupElement<T> {
    /// Lower-left entry `y`.
    pub fn lower_left(&self) -> Complex<T> {
        self.matrix.c
    }

    /// The word as space-separated powers, e.g. `x^2 z y^-1`.
    pub fn word_text(&self) -> String {
        word_text(&self.word)
    }
}

pub fn word_text(word: &[Letter]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < word.len() {
        let l = word[i];
        let mut j = i;
        while j < word.len() && word[j] == l {
            j += 1;
        }
        let exp = l.sign() * (j - i) as i32;
        if !out.is_empty() {
            out.push(' ');
        }
        if exp == 1 {
            out.push(l.base());
        } else {
            let _ = write!(out, "{}^{}", l.base(), exp);
        }
        i = j;
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct OrdF64(f64);

impl PartialEq for OrdF64 {
    fn eq(&self, o: &Self) -> bool {
        self.0.total_cmp(&o.0) == Ordering::Equal
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Points of ℝⁿ deduplicated up to a tolerance. Candidates are located through
/// a fixed linear functional of the coordinates and then compared in full.
struct TolerantIndex<const N: usize> {
    weights: [f64; N],
    by_key: BTreeMap<OrdF64, Vec<usize>>,
    points: Vec<[f64; N]>,
}

impl<const N: usize> TolerantIndex<N> {
    fn new() -> Self {
        // irrational-looking weights keep distinct points apart in key space
        let weights = std::array::from_fn(|i| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_894_9).fract());
        Self { weights, by_key: BTreeMap::new(), points: Vec::new() }
    }

    fn key(&self, v: &[f64; N]) -> f64 {
        v.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    fn find(&self, v: &[f64; N], tol: f64) -> Option<usize> {
        let k = self.key(v);
        let reach = tol * self.weights.iter().sum::<f64>() * 2.0;
        self.by_key
            .range(OrdF64(k - reach)..=OrdF64(k + reach))
            .flat_map(|(_, ids)| ids.iter().copied())
            .find(|&i| self.points[i].iter().zip(v).all(|(a, b)| (a - b).abs() <= tol))
    }

    fn insert(&mut self, v: [f64; N]) -> usize {
        let id = self.points.len();
        self.by_key.entry(OrdF64(self.key(&v))).or_default().push(id);
        self.points.push(v);
        id
    }
}

fn matrix_coords<T: Scalar>(m: &Mat2<T>) -> [f64; 8] {
    let e = m.entries();
    std::array::from_fn(|i| {
        let z = e[i / 2];
        if i % 2 == 0 {
            z.re.as_f64()
        } else {
            z.im.as_f64()
        }
    })
}

fn matrix_tolerance(v: &[f64; 8]) -> f64 {
    DEDUP_TOLERANCE * v.iter().fold(1.0f64, |acc, x| acc.max(x.abs()))
}

/// Breadth-first ball of radius `max_len` in the Cayley graph of `⟨α, β, γ⟩`,
/// excluding the identity, one entry per matrix up to sign. Each element keeps
/// the first word reaching it, which is a shortest one.
pub fn enumerate_elements<T: Scalar>(p: &Params<T>, max_len: usize) -> Result<Vec<GroupElement<T>>> {
    if max_len == 0 {
        return Err(invalid("max_len must be at least 1"));
    }
    let [alpha, beta, gamma] = p.generators();
    let gen = |l: Letter| match l {
        Letter::X => alpha,
        Letter::XInv => alpha.inverse_sl2(),
        Letter::Y => beta,
        Letter::YInv => beta.inverse_sl2(),
        Letter::Z => gamma,
        Letter::ZInv => gamma.inverse_sl2(),
    };

    let mut index = TolerantIndex::<8>::new();
    index.insert(matrix_coords(&Mat2::<T>::identity()));
    let mut frontier = vec![GroupElement { word: Vec::new(), matrix: Mat2::identity() }];
    let mut out = Vec::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for el in &frontier {
            for l in Letter::ALL {
                if el.word.last() == Some(&l.inverse()) {
                    continue;
                }
                let m = el.matrix * gen(l);
                let v = matrix_coords(&m);
                let neg = v.map(|x| -x);
                let tol = matrix_tolerance(&v);
                if index.find(&v, tol).is_some() || index.find(&neg, tol).is_some() {
                    continue;
                }
                index.insert(v);
                let mut word = el.word.clone();
                word.push(l);
                next.push(GroupElement { word, matrix: m });
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// One horoball of the pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Horoball<T> {
    /// Point of tangency, reduced into the parallelogram spanned by `a`, `b`.
    pub center: Complex<T>,
    pub diameter: T,
    /// Shortest word found whose element produces this ball.
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoroballDiagram<T> {
    pub lattice: CuspShape<T>,
    pub balls: Vec<Horoball<T>>,
}

/// Lattice coordinates `(s, t)` of `z = s a + t b`, reduced into `[0, 1)²`.
pub fn reduce_mod_lattice<T: Scalar>(lattice: &CuspShape<T>, z: Complex<T>) -> (T, T) {
    let (a, b) = (lattice.a(), lattice.b());
    let t = (a.conj() * z).im / (a.conj() * b).im;
    let s = (b.conj() * z).im / (b.conj() * a).im;
    let eps = T::lit(DEDUP_TOLERANCE);
    let wrap = |u: T| {
        let f = u - u.floor();
        if f < eps || f > T::one() - eps {
            T::zero()
        } else {
            f
        }
    };
    (wrap(s), wrap(t))
}

/// The horoballs of diameter at least `min_diameter` seen by elements of word
/// length at most `max_len`, one per lattice class.
pub fn horoball_diagram<T: Scalar>(p: &Params<T>, min_diameter: T, max_len: usize) -> Result<HoroballDiagram<T>> {
    if !(min_diameter > T::zero()) || !min_diameter.is_finite() {
        return Err(invalid(format!("min_diameter must be positive, got {min_diameter}")));
    }
    let lattice = CuspShape::new(p.a, p.b)?;
    let elements = enumerate_elements(p, max_len)?;
    let zero_tol = T::lit(ZERO_TOLERANCE);
    let mut index = TolerantIndex::<3>::new();
    let mut balls = Vec::new();
    for el in &elements {
        let y = el.lower_left();
        if y.norm() <= zero_tol {
            continue;
        }
        let diameter = T::one() / y.norm_sqr();
        if diameter < min_diameter {
            continue;
        }
        let (s, t) = reduce_mod_lattice(&lattice, el.matrix.a / y);
        let key = [s.as_f64(), t.as_f64(), diameter.as_f64()];
        if index.find(&key, DEDUP_TOLERANCE).is_some() {
            continue;
        }
        index.insert(key);
        balls.push(Horoball { center: lattice.a() * s + lattice.b() * t, diameter, witness: el.word_text() });
    }
    balls.sort_by(|u, v| {
        v.diameter
            .as_f64()
            .total_cmp(&u.diameter.as_f64())
            .then(u.center.re.as_f64().total_cmp(&v.center.re.as_f64()))
            .then(u.center.im.as_f64().total_cmp(&v.center.im.as_f64()))
    });
    Ok(HoroballDiagram { lattice, balls })
}

/// Smallest `|y|` over enumerated elements with `y ≠ 0`. Below 1 the height-1
/// cusp is not embedded for these parameters.
pub fn min_lower_left<T: Scalar>(p: &Params<T>, max_len: usize) -> Result<T> {
    let zero_tol = T::lit(ZERO_TOLERANCE);
    Ok(enumerate_elements(p, max_len)?
        .iter()
        .map(|e| e.lower_left().norm())
        .filter(|y| *y > zero_tol)
        .fold(T::infinity(), T::min))
}

struct Fixed(f64);

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.0.abs() < 5e-5 { 0.0 } else { self.0 };
        write!(f, "{v:.4}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn to_f64<T: Scalar>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

/// Standalone SVG 1.1: the fundamental parallelogram of the lattice and one
/// circle per ball. `metadata` is embedded verbatim (escaped) when given.
pub fn render_svg<T: Scalar>(d: &HoroballDiagram<T>, scale_px_per_unit: f64, metadata: Option<&str>) -> Result<String> {
    if !(scale_px_per_unit > 0.0) || !scale_px_per_unit.is_finite() {
        return Err(invalid(format!("scale must be positive, got {scale_px_per_unit}")));
    }
    let a = to_f64(d.lattice.a());
    let b = to_f64(d.lattice.b());
    let corners = [Complex::zero(), a, a + b, b];
    let margin = 0.75;
    let min_x = corners.iter().map(|z| z.re).fold(f64::INFINITY, f64::min) - margin;
    let max_x = corners.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) + margin;
    let min_y = corners.iter().map(|z| z.im).fold(f64::INFINITY, f64::min) - margin;
    let max_y = corners.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max) + margin;
    let px = |z: Complex<f64>| (Fixed((z.re - min_x) * scale_px_per_unit), Fixed((max_y - z.im) * scale_px_per_unit));
    let width = Fixed((max_x - min_x) * scale_px_per_unit);
    let height = Fixed((max_y - min_y) * scale_px_per_unit);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    if let Some(meta) = metadata {
        let _ = writeln!(s, "<metadata>{}</metadata>", xml_escape(meta));
    }
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let pts: Vec<String> = corners
        .iter()
        .map(|z| {
            let (x, y) = px(*z);
            format!("{x},{y}")
        })
        .collect();
    let _ = writeln!(
        s,
        r#"<polygon class="fundamental-domain" points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        pts.join(" ")
    );
    let _ = writeln!(s, r#"<g class="horoballs" fill="none" stroke="steelblue" stroke-width="1">"#);
    for ball in &d.balls {
        let (cx, cy) = px(to_f64(ball.center));
        let r = Fixed(ball.diameter.as_f64() / 2.0 * scale_px_per_unit);
        let _ = writeln!(
            s,
            r#"<circle cx="{cx}" cy="{cy}" r="{r}"><title>{} (diameter {})</title></circle>"#,
            xml_escape(&ball.witness),
            Fixed(ball.diameter.as_f64())
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// CSV with header `center_re,center_im,diameter,word`.
pub fn diagram_csv<T: Scalar>(d: &HoroballDiagram<T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["center_re", "center_im", "diameter", "word"])?;
    for ball in &d.balls {
        w.write_record([
            ball.center.re.as_f64().to_string(),
            ball.center.im.as_f64().to_string(),
            ball.diameter.as_f64().to_string(),
            ball.witness.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
