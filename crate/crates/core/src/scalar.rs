//! Numeric carriers shared by the float (dynamics) and exact (identity) paths.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use std::fmt::Debug;

/// Arbitrary-precision rational, the carrier of every exact identity check.
pub type Rational = BigRational;

/// Field elements the polynomial formulas are evaluated over.
///
/// Implemented for `f64` and [`Rational`]; every polynomial identity in the
/// crate is written once against this trait.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive {
    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer is representable")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {}
impl Scalar for Rational {}

/// Fixed-width rational for bulk exact checks on small-height points.
///
/// Overflow panics (the workspace keeps overflow checks on in every profile);
/// callers bound the height of their inputs so it cannot happen.
pub type SmallRational = Ratio<i128>;

impl Scalar for SmallRational {}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn dot<T: Scalar, const N: usize>(a: &[T; N], b: &[T; N]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub(crate) fn cross<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
