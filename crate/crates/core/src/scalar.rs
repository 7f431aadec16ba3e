//! Scalar abstractions shared by exact and floating evaluation.
//!
//! [`Ring`] is all a polynomial needs to be evaluated (exact rationals
//! included). [`Scalar`] adds what the series and quadrature code needs;
//! it is implemented for `f64`, double-double [`TwoFloat`], and their
//! complex counterparts, so every numeric routine runs in either precision.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, One, Zero};
use twofloat::TwoFloat;

use crate::rational::{to_f64, to_f64_pair};

pub type C64 = Complex64;
pub type DD = TwoFloat;
pub type CDD = Complex<TwoFloat>;

pub trait Ring:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: &BigRational) -> Self;
}

impl Ring for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

impl Ring for f64 {
    fn from_rational(q: &BigRational) -> Self {
        to_f64(q)
    }
}

impl Ring for TwoFloat {
    fn from_rational(q: &BigRational) -> Self {
        let (hi, lo) = to_f64_pair(q);
        TwoFloat::new_add(hi, lo)
    }
}

impl<T: Ring + Float> Ring for Complex<T> {
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(T::from_rational(q), T::zero())
    }
}

/// A real floating type: `f64` or double-double.
pub trait Real: Ring + Float + Copy + Send + Sync + Debug + 'static {
    fn from_parts(hi: f64, lo: f64) -> Self;
    fn lift(x: f64) -> Self {
        Self::from_parts(x, 0.0)
    }
    fn approx(self) -> f64;
    /// `1/self` to full working precision.
    fn inv(self) -> Self;
}

impl Real for f64 {
    fn from_parts(hi: f64, lo: f64) -> Self {
        hi + lo
    }
    fn approx(self) -> f64 {
        self
    }
    fn inv(self) -> Self {
        1.0 / self
    }
}

impl Real for TwoFloat {
    fn from_parts(hi: f64, lo: f64) -> Self {
        TwoFloat::new_add(hi, lo)
    }
    fn approx(self) -> f64 {
        self.hi() + self.lo()
    }
    // twofloat's own division is only accurate to about one double, so
    // refine the double reciprocal with one Newton step.
    fn inv(self) -> Self {
        let r = TwoFloat::from(1.0 / self.hi());
        r + r * (TwoFloat::from(1.0) - self * r)
    }
}

/// Real or complex floating scalar over a [`Real`] base.
pub trait Scalar:
    Ring + Copy + Send + Sync + Debug + Div<Output = Self> + 'static
{
    type Real: Real;
    const IS_COMPLEX: bool;
    fn from_real(r: Self::Real) -> Self;
    fn embed(x: f64) -> Self {
        Self::from_real(Self::Real::lift(x))
    }
    fn modulus(self) -> f64;
    fn scale(self, r: Self::Real) -> Self;
    fn to_c64(self) -> C64;
    /// Rounds a complex double into `Self`; real types drop the imaginary part.
    fn from_c64(z: C64) -> Self;
    fn exp(self) -> Self;
}

impl Scalar for f64 {
    type Real = f64;
    const IS_COMPLEX: bool = false;
    fn from_real(r: f64) -> Self {
        r
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn scale(self, r: f64) -> Self {
        self * r
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn from_c64(z: C64) -> Self {
        z.re
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
}

impl Scalar for TwoFloat {
    type Real = TwoFloat;
    const IS_COMPLEX: bool = false;
    fn from_real(r: TwoFloat) -> Self {
        r
    }
    fn modulus(self) -> f64 {
        self.approx().abs()
    }
    fn scale(self, r: TwoFloat) -> Self {
        self * r
    }
    fn to_c64(self) -> C64 {
        C64::new(self.approx(), 0.0)
    }
    fn from_c64(z: C64) -> Self {
        TwoFloat::from(z.re)
    }
    fn exp(self) -> Self {
        Float::exp(self)
    }
}

impl<T: Real> Scalar for Complex<T> {
    type Real = T;
    const IS_COMPLEX: bool = true;
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn modulus(self) -> f64 {
        self.re.approx().hypot(self.im.approx())
    }
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    fn to_c64(self) -> C64 {
        C64::new(self.re.approx(), self.im.approx())
    }
    fn from_c64(z: C64) -> Self {
        Complex::new(T::lift(z.re), T::lift(z.im))
    }
    fn exp(self) -> Self {
        Complex::exp(self)
    }
}

/// Euclidean length `sqrt(sum |z_i|^2)` of a (possibly complex) point.
pub fn point_norm<S: Scalar>(z: &[S]) -> f64 {
    z.iter()
        .map(|c| {
            let m = c.modulus();
            m * m
        })
        .sum::<f64>()
        .sqrt()
}

pub fn lift_point<S: Scalar>(x: &[f64]) -> Vec<S> {
    x.iter().map(|&v| S::embed(v)).collect()
}

/// Multiplies every coordinate by the imaginary unit.
pub fn times_i<T: Real>(x: &[f64]) -> Vec<Complex<T>> {
    x.iter()
        .map(|&v| Complex::new(T::zero(), T::lift(v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn double_double_keeps_extra_digits() {
        let third = DD::from_rational(&rat(1, 3));
        let back = third * DD::lift(3.0) - DD::lift(1.0);
        assert!(back.approx().abs() < 1e-30);
    }

    #[test]
    fn double_double_reciprocal_is_accurate() {
        for v in [3.0, 7.0, 0.1, 1e10 + 1.0] {
            let x = DD::from_parts(v, v * 1.234e-19);
            assert!((x.inv() * x - DD::lift(1.0)).approx().abs() < 1e-30);
        }
    }

    #[test]
    fn complex_scalars_embed_reals() {
        let z = CDD::embed(2.5);
        assert_eq!(z.to_c64(), C64::new(2.5, 0.0));
        assert_eq!(C64::from_rational(&rat(-1, 4)), C64::new(-0.25, 0.0));
        assert!((C64::new(0.0, std::f64::consts::PI).exp() + C64::one()).norm() < 1e-15);
    }
}
