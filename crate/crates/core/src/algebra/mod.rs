//! Exact arithmetic and symmetric-matrix inertia.

mod heptagon;
mod interval;
mod matrix;
mod number;
mod poly;

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

pub use heptagon::{cos_pi_over_7, Heptagonal};
pub use matrix::{
    charpoly_signature_test, inertia_f64, principal_minor, signature_exact, CharpolyDecision,
    Matrix, MatrixError,
};
pub use interval::Interval;
pub use number::{gram_entry, AlgebraicNumber};
pub use poly::{poly_determinant, Coefficient, Monomial, Poly};

/// A real field with exact equality and decidable sign.
pub trait ExactField:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(q: BigRational) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn signum(&self) -> Ordering;
    fn to_f64(&self) -> f64;
}

/// Inertia of a real symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(pos: usize, neg: usize, zero: usize) -> Self {
        Self { pos, neg, zero }
    }

    pub fn size(&self) -> usize {
        self.pos + self.neg + self.zero
    }

    pub fn is_positive_definite(&self) -> bool {
        self.neg == 0 && self.zero == 0
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.pos, self.neg, self.zero)
    }
}

/// Entry of a Gram matrix whose value may still be unknown.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymbolicEntry {
    Known(AlgebraicNumber),
    /// `x_i`, constrained to `x_i < -1`.
    Dotted(usize),
    /// `-y_i / 2`, constrained to `1.8 < y_i < 2`.
    Seven(usize),
}

impl SymbolicEntry {
    pub fn known(&self) -> Option<&AlgebraicNumber> {
        match self {
            SymbolicEntry::Known(v) => Some(v),
            _ => None,
        }
    }
}

pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl ExactField for BigRational {
    fn from_rational(q: BigRational) -> Self {
        q
    }
    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
    fn signum(&self) -> Ordering {
        self.cmp(&BigRational::zero())
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
