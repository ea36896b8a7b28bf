//! Point-valued 2×2 complex matrices acting as Möbius transformations.

use std::ops::Mul;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// The matrix `[[a, b], [c, d]]`, read as `z ↦ (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::translation(Complex::zero())
    }

    /// `[[1, t], [0, 1]]`
    pub fn translation(t: Complex<T>) -> Self {
        Self::new(Complex::one(), t, Complex::zero(), Complex::one())
    }

    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex<T> {
        self.a + self.d
    }

    /// Inverse of a determinant-one matrix (the adjugate).
    pub fn inverse_sl2(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// `self(∞) = a / c`, or `None` when the matrix fixes ∞.
    pub fn image_of_infinity(&self) -> Option<Complex<T>> {
        if self.c.is_zero() {
            None
        } else {
            Some(self.a / self.c)
        }
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn entries(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Largest entrywise distance to `other`.
    pub fn max_distance(&self, other: &Self) -> T {
        self.entries().iter().zip(other.entries().iter()).map(|(x, y)| (*x - *y).norm()).fold(T::zero(), T::max)
    }

    /// Poincaré extension to the upper half-space: maps `(z, t)` with `t > 0`.
    pub fn apply_upper_half_space(&self, z: Complex<T>, t: T) -> (Complex<T>, T) {
        let cz_d = self.c * z + self.d;
        let den = cz_d.norm_sqr() + self.c.norm_sqr() * t * t;
        let num = (self.a * z + self.b) * cz_d.conj() + self.a * self.c.conj() * t * t;
        (num / den, t / den)
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, o: Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl<'a, T: Scalar> Mul<&'a Mat2<T>> for &'a Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, o: &'a Mat2<T>) -> Mat2<T> {
        *self * *o
    }
}
