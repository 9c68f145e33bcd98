//! Minimal field arithmetic shared by the double and extended precision CG paths.

use std::fmt::Debug;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

/// Arbitrary precision binary float used for `Precision::Extended`.
pub type BigFloat = FBig<HalfEven, 2>;

pub trait Scalar: Clone + Debug + Send + Sync + PartialOrd {
    /// Lift a double at the given working precision (ignored by `f64`).
    fn lift(x: f64, bits: usize) -> Self;
    fn to_f64(&self) -> f64;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn over(&self, other: &Self) -> Self;
    fn root(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Scalar for f64 {
    fn lift(x: f64, _bits: usize) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn root(&self) -> Self {
        self.sqrt()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for BigFloat {
    fn lift(x: f64, bits: usize) -> Self {
        // every finite double is exactly representable, so the conversion cannot fail
        let v = BigFloat::try_from(x).expect("finite f64");
        if v == BigFloat::ZERO {
            BigFloat::ZERO.with_precision(bits).value()
        } else {
            v.with_precision(bits).value()
        }
    }
    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self).value()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
    fn root(&self) -> Self {
        self.context().sqrt(self.repr()).value()
    }
    fn is_zero(&self) -> bool {
        *self == BigFloat::ZERO
    }
}

/// Binary precision for a requested number of significant decimal digits,
/// with a few guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 16
}
