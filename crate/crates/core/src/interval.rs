//! Certified enclosures: real intervals, complex rectangles and 2×2 matrices of them.
//!
//! Rounding is handled without touching the FPU mode. Every arithmetic step is
//! checked with an error-free transformation; when the floating result is exact
//! the endpoint is kept, otherwise it is pushed outward by two ulps. Exact inputs
//! therefore produce exact outputs, and a structural zero stays `[0, 0]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::mobius::Mat2;
use crate::scalar::Scalar;

#[inline]
fn round_down<T: Scalar>(v: T, exact: bool) -> T {
    if exact {
        v
    } else {
        v.next_down().next_down()
    }
}

#[inline]
fn round_up<T: Scalar>(v: T, exact: bool) -> T {
    if exact {
        v
    } else {
        v.next_up().next_up()
    }
}

/// Knuth's TwoSum; the sum is exact iff the error term vanishes.
#[inline]
fn sum_exact<T: Scalar>(a: T, b: T) -> (T, bool) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err == T::zero())
}

/// Product with an FMA exactness check. Results near the underflow threshold
/// are treated as inexact since the residual itself may have underflowed.
#[inline]
fn prod_exact<T: Scalar>(a: T, b: T) -> (T, bool) {
    let p = a * b;
    if a == T::zero() || b == T::zero() {
        return (p, true);
    }
    let tiny = T::min_positive_value() / T::epsilon();
    let exact = a.mul_add(b, -p) == T::zero() && p.abs() >= tiny;
    (p, exact)
}

#[inline]
fn sqrt_exact<T: Scalar>(v: T) -> (T, bool) {
    let s = v.sqrt();
    if v == T::zero() {
        return (s, true);
    }
    let tiny = T::min_positive_value() / T::epsilon();
    (s, s.mul_add(s, -v) == T::zero() && v >= tiny)
}

/// A closed interval `[lo, hi]` of reals with `lo ≤ hi`.
#[derive(Clone, Copy, PartialEq)]
pub struct RealInterval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> RealInterval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("interval endpoints must be finite, got [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(invalid(format!("interval endpoints out of order: [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    ///
    /// # Panics
    /// If `x` is not finite.
    pub fn point(x: T) -> Self {
        assert!(x.is_finite(), "interval point must be finite");
        Self { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self::point(T::zero())
    }

    pub fn one() -> Self {
        Self::point(T::one())
    }

    /// `[x, x]` widened by one ulp each side; encloses any real whose
    /// correctly rounded value is `x`.
    pub fn around(x: T) -> Self {
        assert!(x.is_finite(), "interval point must be finite");
        Self { lo: x.next_down(), hi: x.next_up() }
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    /// `hi − lo`, rounded up.
    pub fn width(&self) -> T {
        let (w, exact) = sum_exact(self.hi, -self.lo);
        round_up(w, exact)
    }

    pub fn mid(&self) -> T {
        let two = T::one() + T::one();
        let m = self.lo / two + self.hi / two;
        m.max(self.lo).min(self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(T::zero())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo == T::zero() && self.hi == T::zero()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Smallest absolute value over the interval.
    pub fn mig(&self) -> T {
        if self.contains_zero() {
            T::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> T {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn abs(&self) -> Self {
        Self { lo: self.mig(), hi: self.mag() }
    }

    /// `{x² : x ∈ self}`; tighter than `self * self` when the interval straddles 0.
    pub fn sqr(&self) -> Self {
        let lo = self.mig();
        let hi = self.mag();
        let (l, le) = prod_exact(lo, lo);
        let (h, he) = prod_exact(hi, hi);
        Self { lo: round_down(l, le).max(T::zero()), hi: round_up(h, he) }
    }

    /// Square root of the nonnegative part of the interval.
    pub fn sqrt(&self) -> Self {
        let lo = self.lo.max(T::zero());
        let hi = self.hi.max(T::zero());
        let (l, le) = sqrt_exact(lo);
        let (h, he) = sqrt_exact(hi);
        Self { lo: round_down(l, le).max(T::zero()), hi: round_up(h, he) }
    }

    /// Split at the midpoint into `[lo, m]` and `[m, hi]`.
    pub fn bisect(&self) -> Option<(Self, Self)> {
        let m = self.mid();
        if m <= self.lo || m >= self.hi {
            return None;
        }
        Some((Self { lo: self.lo, hi: m }, Self { lo: m, hi: self.hi }))
    }

    /// Multiply by an integer, exactly when `k` is representable.
    pub fn scale(&self, k: i64) -> Self {
        *self * Self::point(T::lit(k as f64))
    }
}

impl<T: Scalar> Add for RealInterval<T> {
    type Output = Self;

    #[inline]
    fn add(self, o: Self) -> Self {
        let (l, le) = sum_exact(self.lo, o.lo);
        let (h, he) = sum_exact(self.hi, o.hi);
        Self { lo: round_down(l, le), hi: round_up(h, he) }
    }
}

impl<T: Scalar> Sub for RealInterval<T> {
    type Output = Self;

    #[inline]
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Scalar> Neg for RealInterval<T> {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self { lo: -self.hi, hi: -self.lo }
    }
}

impl<T: Scalar> Mul for RealInterval<T> {
    type Output = Self;

    #[inline]
    fn mul(self, o: Self) -> Self {
        let cands = [
            prod_exact(self.lo, o.lo),
            prod_exact(self.lo, o.hi),
            prod_exact(self.hi, o.lo),
            prod_exact(self.hi, o.hi),
        ];
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for (p, exact) in cands {
            lo = lo.min(round_down(p, exact));
            hi = hi.max(round_up(p, exact));
        }
        Self { lo, hi }
    }
}

impl<T: fmt::Debug> fmt::Debug for RealInterval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl<T: Scalar> fmt::Display for RealInterval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The axis-aligned rectangle `re × im` in ℂ.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexInterval<T> {
    pub re: RealInterval<T>,
    pub im: RealInterval<T>,
}

impl<T: Scalar> ComplexInterval<T> {
    pub fn new(re: RealInterval<T>, im: RealInterval<T>) -> Self {
        Self { re, im }
    }

    pub fn point(z: Complex<T>) -> Self {
        Self::new(RealInterval::point(z.re), RealInterval::point(z.im))
    }

    pub fn real(x: RealInterval<T>) -> Self {
        Self::new(x, RealInterval::zero())
    }

    pub fn zero() -> Self {
        Self::real(RealInterval::zero())
    }

    pub fn one() -> Self {
        Self::real(RealInterval::one())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.re.is_subset_of(&other.re) && self.im.is_subset_of(&other.im)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(self.re.scale(k), self.im.scale(k))
    }

    /// Certified bounds `[L, U]` on `|z|` over the rectangle.
    ///
    /// `L` comes from the rectangle point nearest the origin and is zero exactly
    /// when the rectangle contains 0; `U` comes from the farthest corner.
    pub fn abs_bounds(&self) -> RealInterval<T> {
        if self.im.is_exact_zero() {
            return self.re.abs();
        }
        if self.re.is_exact_zero() {
            return self.im.abs();
        }
        let x = RealInterval::point(self.re.mig());
        let y = RealInterval::point(self.im.mig());
        let near = (x.sqr() + y.sqr()).sqrt().lo();
        // guards against underflow in the squares
        let lo = near.max(x.lo()).max(y.lo());
        let x = RealInterval::point(self.re.mag());
        let y = RealInterval::point(self.im.mag());
        let hi = (x.sqr() + y.sqr()).sqrt().hi();
        RealInterval { lo, hi }
    }
}

impl<T: Scalar> Add for ComplexInterval<T> {
    type Output = Self;

    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl<T: Scalar> Sub for ComplexInterval<T> {
    type Output = Self;

    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl<T: Scalar> Neg for ComplexInterval<T> {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl<T: Scalar> Mul for ComplexInterval<T> {
    type Output = Self;

    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexInterval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

/// A 2×2 matrix of complex rectangles enclosing a set of matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalMatrix<T> {
    pub m11: ComplexInterval<T>,
    pub m12: ComplexInterval<T>,
    pub m21: ComplexInterval<T>,
    pub m22: ComplexInterval<T>,
}

impl<T: Scalar> IntervalMatrix<T> {
    pub fn new(
        m11: ComplexInterval<T>,
        m12: ComplexInterval<T>,
        m21: ComplexInterval<T>,
        m22: ComplexInterval<T>,
    ) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::translation(ComplexInterval::zero())
    }

    /// `[[1, t], [0, 1]]`
    pub fn translation(t: ComplexInterval<T>) -> Self {
        Self::new(ComplexInterval::one(), t, ComplexInterval::zero(), ComplexInterval::one())
    }

    pub fn point(m: &Mat2<T>) -> Self {
        Self::new(
            ComplexInterval::point(m.a),
            ComplexInterval::point(m.b),
            ComplexInterval::point(m.c),
            ComplexInterval::point(m.d),
        )
    }

    /// Lower-left entry is structurally zero.
    pub fn is_upper_triangular(&self) -> bool {
        self.m21.is_exact_zero()
    }

    /// Entrywise enclosure of the product. Upper-triangular factors give an
    /// upper-triangular product without evaluating the lower-left entry.
    pub fn mul(&self, b: &Self) -> Self {
        let a = self;
        let m21 = if a.is_upper_triangular() && b.is_upper_triangular() {
            ComplexInterval::zero()
        } else {
            a.m21 * b.m11 + a.m22 * b.m21
        };
        Self::new(a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22, m21, a.m21 * b.m12 + a.m22 * b.m22)
    }

    /// Inverse of an enclosure of determinant-one matrices: the adjugate.
    pub fn inv_sl2(&self) -> Self {
        Self::new(self.m22, -self.m12, -self.m21, self.m11)
    }

    pub fn det(&self) -> ComplexInterval<T> {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn contains(&self, m: &Mat2<T>) -> bool {
        self.m11.contains(m.a) && self.m12.contains(m.b) && self.m21.contains(m.c) && self.m22.contains(m.d)
    }
}

impl<T: Scalar> Mul for IntervalMatrix<T> {
    type Output = Self;

    fn mul(self, b: Self) -> Self {
        IntervalMatrix::mul(&self, &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type I = RealInterval<f64>;
    type C = ComplexInterval<f64>;

    fn iv(lo: f64, hi: f64) -> I {
        I::new(lo, hi).unwrap()
    }

    fn cpt(re: f64, im: f64) -> C {
        C::point(Complex::new(re, im))
    }

    fn ulps_between(a: f64, b: f64) -> u64 {
        let (a, b) = (a.to_bits() as i64, b.to_bits() as i64);
        (a - b).unsigned_abs()
    }

    #[test]
    fn construction_is_validated() {
        assert!(I::new(2.0, 1.0).is_err());
        assert!(I::new(f64::NAN, 1.0).is_err());
        assert!(I::new(0.0, f64::INFINITY).is_err());
        assert!(I::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn exact_endpoint_addition() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(1.0, 2.0) - iv(3.0, 4.0), iv(-3.0, -1.0));
        assert_eq!(-iv(1.0, 2.0), iv(-2.0, -1.0));
    }

    #[test]
    fn multiplication_sign_cases() {
        let r = iv(-1.0, 2.0) * iv(3.0, 3.0);
        assert!(r.contains(-3.0) && r.contains(6.0));
        assert_eq!(r, iv(-3.0, 6.0));
        assert_eq!(iv(-2.0, -1.0) * iv(-3.0, 4.0), iv(-8.0, 6.0));
    }

    #[test]
    fn inexact_results_are_widened() {
        let r = I::point(0.1) + I::point(0.2);
        assert!(r.lo() < 0.1 + 0.2 && 0.1 + 0.2 < r.hi());
        let third = I::point(1.0 / 3.0) * I::point(3.0);
        assert!(third.lo() < third.hi());
    }

    #[test]
    fn complex_identity_and_i_squared() {
        let z = C::new(iv(0.3, 0.7), iv(-1.1, 0.2));
        let p = cpt(1.0, 0.0) * z;
        for (got, want) in [(p.re, z.re), (p.im, z.im)] {
            assert!(ulps_between(got.lo(), want.lo()) <= 2);
            assert!(ulps_between(got.hi(), want.hi()) <= 2);
        }
        let m1 = cpt(0.0, 1.0) * cpt(0.0, 1.0);
        assert!(m1.contains(Complex::new(-1.0, 0.0)));
    }

    #[test]
    fn abs_bounds_examples() {
        let r = cpt(3.0, 4.0).abs_bounds();
        assert!(ulps_between(r.lo(), 5.0) <= 1 && ulps_between(r.hi(), 5.0) <= 1);

        let r = C::new(iv(-1.0, 1.0), iv(-1.0, 1.0)).abs_bounds();
        assert_eq!(r.lo(), 0.0);
        assert!(r.hi() >= std::f64::consts::SQRT_2);
        assert!(r.hi() <= std::f64::consts::SQRT_2 * (1.0 + 1e-15));

        let r = C::new(iv(0.4, 0.6), iv(0.0, 0.0)).abs_bounds();
        assert_eq!(r, iv(0.4, 0.6));
    }

    #[test]
    fn abs_lower_bound_survives_underflow() {
        let r = C::new(iv(1e-200, 2e-200), iv(1e-200, 1e-200)).abs_bounds();
        assert!(r.lo() > 0.0);
        let r = C::new(iv(-1e-200, 2e-200), iv(0.0, 1e-300)).abs_bounds();
        assert_eq!(r.lo(), 0.0);
    }

    #[test]
    fn translation_composition() {
        let a = cpt(4.0, 0.0);
        let b = cpt(1.0, 1.5);
        let p = IntervalMatrix::translation(a) * IntervalMatrix::translation(b);
        assert_eq!(p, IntervalMatrix::translation(cpt(5.0, 1.5)));
        assert!(p.m21.is_exact_zero());
    }

    #[test]
    fn gamma_squared_by_hand() {
        // γ = [[c, −1], [1, 0]], γ² = [[c² − 1, −c], [c, −1]]
        let c = 0.75;
        let g = IntervalMatrix::new(cpt(c, 0.0), cpt(-1.0, 0.0), cpt(1.0, 0.0), cpt(0.0, 0.0));
        let g2 = g * g;
        let want = Mat2::new(
            Complex::new(c * c - 1.0, 0.0),
            Complex::new(-c, 0.0),
            Complex::new(c, 0.0),
            Complex::new(-1.0, 0.0),
        );
        assert!(g2.contains(&want));
        assert_eq!(g2, IntervalMatrix::point(&want));
    }

    #[test]
    fn adjugate_inverse() {
        let id = IntervalMatrix::<f64>::identity();
        assert_eq!(id.inv_sl2(), id);
        let t = IntervalMatrix::translation(cpt(2.5, -1.0));
        assert_eq!(t.inv_sl2(), IntervalMatrix::translation(cpt(-2.5, 1.0)));
        let c = Complex::new(0.3, 1.7);
        let g = IntervalMatrix::point(&Mat2::new(
            c,
            Complex::new(-1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
        ));
        let gi = g.inv_sl2();
        assert!(gi.contains(&Mat2::new(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0), c)));
        assert!((g * gi).contains(&Mat2::identity()));
    }

    #[test]
    fn bisect_covers_parent() {
        let x = iv(-1.0, 3.0);
        let (l, r) = x.bisect().unwrap();
        assert_eq!(l.lo(), -1.0);
        assert_eq!(r.hi(), 3.0);
        assert_eq!(l.hi(), r.lo());
        assert!(I::point(2.0).bisect().is_none());
    }

    #[test]
    fn works_in_single_precision() {
        let x = RealInterval::<f32>::new(0.1, 0.2).unwrap();
        let y = RealInterval::<f32>::point(3.0);
        let p = x * y;
        assert!(p.contains(0.1f32 * 3.0) && p.contains(0.2f32 * 3.0));
    }
}
