//! Arithmetic on the cusp torus `ℂ / ⟨a, b⟩`: area and volume, slopes and
//! their lengths, intersection numbers, and bounds on exceptional fillings.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Default slope-length cutoff of the 6-theorem.
pub const SHORT_SLOPE_LENGTH: f64 = 6.0;

/// Lattice generators of the horotorus at height 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspShape<T> {
    a: Complex<T>,
    b: Complex<T>,
}

impl<T: Scalar> CuspShape<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(invalid("lattice generators must be finite"));
        }
        let cross = (a.conj() * b).im.abs();
        let scale = a.norm() * b.norm();
        if !(cross > scale * T::epsilon() * T::lit(16.0)) {
            return Err(Error::DegenerateLattice(format!("a = {a}, b = {b} span no lattice")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> Complex<T> {
        self.a
    }

    pub fn b(&self) -> Complex<T> {
        self.b
    }

    /// `|Im(ā b)|`, the area of the torus.
    pub fn area(&self) -> T {
        (self.a.conj() * self.b).im.abs()
    }

    /// Volume of the cusp bounded by this torus: half its area.
    pub fn volume(&self) -> T {
        self.area() / (T::one() + T::one())
    }

    /// `p a + q b`
    pub fn translation(&self, s: Slope) -> Complex<T> {
        self.a * T::lit(s.p as f64) + self.b * T::lit(s.q as f64)
    }

    pub fn slope_length(&self, s: Slope) -> T {
        self.translation(s).norm()
    }

    /// Every primitive slope of length at most `max_len`, by length then `(p, q)`.
    ///
    /// Writing `v = p a + q b`, `q = Im(ā v) / Im(ā b)` and likewise for `p`, so
    /// `|q| ≤ |a| L / area` and `|p| ≤ |b| L / area`; that window is scanned in full.
    pub fn short_slopes(&self, max_len: T) -> Result<Vec<(Slope, T)>> {
        if !(max_len > T::zero()) || !max_len.is_finite() {
            return Err(invalid(format!("slope length cutoff must be positive, got {max_len}")));
        }
        let area = self.area();
        let slack = T::one() + T::lit(1e-9);
        let p_max = (self.b.norm() * max_len / area * slack).floor().as_f64() as i64 + 1;
        let q_max = (self.a.norm() * max_len / area * slack).floor().as_f64() as i64 + 1;
        let mut out = Vec::new();
        for q in 0..=q_max {
            for p in -p_max..=p_max {
                let Ok(s) = Slope::new(p, q) else { continue };
                if s.p != p || s.q != q {
                    // non-canonical sign; the canonical twin is visited separately
                    continue;
                }
                let len = self.slope_length(s);
                if len <= max_len {
                    out.push((s, len));
                }
            }
        }
        out.sort_by(|(s1, l1), (s2, l2)| l1.partial_cmp(l2).unwrap().then((s1.p, s1.q).cmp(&(s2.p, s2.q))));
        Ok(out)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A primitive class `(p, q)` on the torus, signed so that `q > 0`, or `q = 0`
/// and `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    /// Canonicalizes the sign; rejects non-primitive pairs.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
            return Err(invalid(format!("({p}, {q}) is not a primitive slope")));
        }
        if q < 0 || (q == 0 && p < 0) {
            Ok(Self { p: -p, q: -q })
        } else {
            Ok(Self { p, q })
        }
    }
}

/// Geometric intersection number `|p₁ q₂ − p₂ q₁|`.
pub fn delta(s1: Slope, s2: Slope) -> u64 {
    (s1.p as i128 * s2.q as i128 - s2.p as i128 * s1.q as i128).unsigned_abs() as u64
}

/// `36 / area`: an upper bound for `Δ` between two exceptional slopes on a
/// cusp torus of that area.
pub fn delta_bound<T: Scalar>(area: T) -> Result<T> {
    if !(area > T::zero()) || !area.is_finite() {
        return Err(invalid(format!("area must be positive, got {area}")));
    }
    Ok(T::lit(36.0) / area)
}

/// Largest integer strictly below `bound`.
pub fn strict_floor<T: Scalar>(bound: T) -> i64 {
    bound.ceil().as_f64() as i64 - 1
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Most slopes with pairwise `Δ ≤ delta_max`: the next prime above
/// `delta_max`, plus one.
pub fn max_exceptional_count(delta_max: u64) -> u64 {
    (delta_max + 1..).find(|&n| is_prime(n)).unwrap() + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeEntry {
    pub p: i64,
    pub q: i64,
    pub length: f64,
}

/// One-shot summary of a cusp shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspAudit {
    pub area: f64,
    pub volume: f64,
    pub slope_length_cutoff: f64,
    pub short_slopes: Vec<SlopeEntry>,
    /// `36 / area`.
    pub delta_bound: f64,
    /// Largest `Δ` strictly below `delta_bound`.
    pub delta_max: i64,
    pub max_exceptional_count: u64,
}

pub fn audit_cusp<T: Scalar>(s: &CuspShape<T>, max_len: T) -> Result<CuspAudit> {
    let area = s.area();
    let bound = delta_bound(area)?;
    let delta_max = strict_floor(bound).max(0);
    let short_slopes = s
        .short_slopes(max_len)?
        .into_iter()
        .map(|(sl, len)| SlopeEntry { p: sl.p, q: sl.q, length: len.as_f64() })
        .collect();
    Ok(CuspAudit {
        area: area.as_f64(),
        volume: s.volume().as_f64(),
        slope_length_cutoff: max_len.as_f64(),
        short_slopes,
        delta_bound: bound.as_f64(),
        delta_max,
        max_exceptional_count: max_exceptional_count(delta_max as u64),
    })
}
