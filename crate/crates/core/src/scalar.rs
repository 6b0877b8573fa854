//! Scalars for the convolution algebra: exact cyclotomic values or `f64` complex.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::cyclotomic::{rational_to_f64, Cyclotomic, Rational};

pub type C64 = Complex<f64>;

/// Absolute tolerance used by float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

/// Complex scalar field used for algebra coefficients and functional weights.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether equalities in this scalar type are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn conj(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    /// Exact zero test, or `|x| <= FLOAT_TOL` in float mode.
    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> C64;

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    fn from_int(i: i64) -> Self {
        Self::from_rational(&crate::cyclotomic::int(i))
    }

    /// `re + i·im`.
    fn from_gaussian(re: &Rational, im: &Rational) -> Self;

    /// Packs moment-matrix blocks for a positivity strategy.
    fn into_blocks(blocks: Vec<Vec<Vec<Self>>>) -> MomentBlocks;
}

/// Hermitian blocks of a moment matrix, in either arithmetic.
#[derive(Clone, Debug)]
pub enum MomentBlocks {
    Exact(Vec<Vec<Vec<Cyclotomic>>>),
    Float(Vec<Vec<Vec<C64>>>),
}

impl Scalar for Cyclotomic {
    const EXACT: bool = true;

    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn from_rational(r: &Rational) -> Self {
        Cyclotomic::from_rational(r.clone())
    }
    fn conj(&self) -> Self {
        Cyclotomic::conj(self)
    }
    fn inv(&self) -> Option<Self> {
        Cyclotomic::inv(self)
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn to_c64(&self) -> C64 {
        Cyclotomic::to_c64(self)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn from_gaussian(re: &Rational, im: &Rational) -> Self {
        Cyclotomic::gaussian(re.clone(), im.clone())
    }
    fn into_blocks(blocks: Vec<Vec<Vec<Self>>>) -> MomentBlocks {
        MomentBlocks::Exact(blocks)
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex::new(rational_to_f64(r), 0.0)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(Complex::new(1.0, 0.0) / self)
        }
    }
    fn is_zero(&self) -> bool {
        self.norm() <= FLOAT_TOL
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn from_gaussian(re: &Rational, im: &Rational) -> Self {
        Complex::new(rational_to_f64(re), rational_to_f64(im))
    }
    fn into_blocks(blocks: Vec<Vec<Vec<Self>>>) -> MomentBlocks {
        MomentBlocks::Float(blocks)
    }
}

/// A commutative field with exact equality, used by the elimination routines.
pub trait Field: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
}

impl Field for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as num_traits::One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Field for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn inv(&self) -> Self {
        Cyclotomic::inv(self).expect("inverse of zero")
    }
}
