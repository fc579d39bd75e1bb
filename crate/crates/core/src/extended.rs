//! Extended reals with explicit infinity tags.

use std::fmt;

use crate::Scalar;

/// A real number or a signed infinity. Infinite limits are tagged rather
/// than carried as IEEE infinities so callers have to match on them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended<T> {
    NegInfinity,
    Finite(T),
    PosInfinity,
}

impl<T: Scalar> Extended<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// -1, 0 or +1; the sign of a finite value or of the infinity.
    pub fn signum(&self) -> i8 {
        match *self {
            Extended::NegInfinity => -1,
            Extended::PosInfinity => 1,
            Extended::Finite(v) if v > T::zero() => 1,
            Extended::Finite(v) if v < T::zero() => -1,
            Extended::Finite(_) => 0,
        }
    }

    /// Conversion to a plain float, mapping the tags onto IEEE infinities.
    pub fn to_float(self) -> T {
        match self {
            Extended::NegInfinity => T::neg_infinity(),
            Extended::PosInfinity => T::infinity(),
            Extended::Finite(v) => v,
        }
    }

    pub fn le(&self, other: &Self) -> bool {
        self.to_float() <= other.to_float()
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInfinity => f.write_str("-inf"),
            Extended::PosInfinity => f.write_str("+inf"),
            Extended::Finite(v) => v.fmt(f),
        }
    }
}
